import csv
import io
from pathlib import Path

import pytest

from vdw import cli
from vdw.cli import GREENS_COLUMNS, SCAN_COLUMNS, main
from vdw.config import RunConfig, apply_override, parse_value, read_config_file, resolve_config
from vdw.exceptions import ConfigError
from vdw.schemas import Environment
from vdw.units import length_unit


def rows(text: str) -> list[dict[str, str]]:
    body = "\n".join(line for line in text.splitlines() if not line.startswith("#"))
    return list(csv.DictReader(io.StringIO(body)))


def comments(text: str) -> list[str]:
    return [line for line in text.splitlines() if line.startswith("#")]


@pytest.mark.parametrize(
    ("text", "expected"),
    [("1e-3", 1e-3), ("-1", -1), ("true", True), ("[1.0, 2.0]", [1.0, 2.0]), ("free", "free")],
)
def test_parse_value(text, expected):
    assert parse_value(text) == expected


def test_apply_override_creates_sections():
    document = apply_override({}, "scan.y=[1, 2]")
    apply_override(document, "plate.chirality = 1")
    assert document == {"scan": {"y": [1, 2]}, "plate": {"chirality": 1}}


def test_apply_override_errors():
    with pytest.raises(ConfigError):
        apply_override({}, "no-assignment")
    with pytest.raises(ConfigError) as info:
        apply_override({"plate": 1}, "plate.z=0.5")
    assert info.value.key == "plate.z"


def test_resolve_config_order(tmp_path):
    path = tmp_path / "run.toml"
    path.write_text('scenario = "scan"\n[plate]\nchirality = 1\nz = 0.5\n')
    config = resolve_config(path, ["plate.chirality=-1"], scenario="potential")
    assert config.scenario == "potential"
    assert config.plate.chirality == -1
    assert config.plate.z == 0.5


def test_resolve_config_names_invalid_key():
    with pytest.raises(ConfigError) as info:
        resolve_config(None, ["plate.chirality=2"])
    assert info.value.key.startswith("plate.chirality")


def test_resolve_config_rejects_unknown_key():
    with pytest.raises(ConfigError) as info:
        resolve_config(None, ["scan.bogus=1"])
    assert "bogus" in info.value.key


def test_config_file_parse_error(tmp_path):
    path = tmp_path / "broken.toml"
    path.write_text("scenario = \n")
    with pytest.raises(ConfigError):
        read_config_file(path)


def test_echoed_json_reproduces_config(tmp_path):
    config = resolve_config(None, ["environment.kind=cavity", "scan.y=[1.5]"])
    path = tmp_path / "echo.json"
    path.write_text(config.model_dump_json())
    assert resolve_config(path, []) == config


def test_build_environment_kinds():
    assert RunConfig().build_environment() == Environment.single_plate(-1)
    cavity = resolve_config(None, ["environment.kind=cavity", "plate.z=1.0"]).build_environment()
    assert cavity == Environment.cavity(4e-3, chirality=1, z0=1.0)
    assert resolve_config(None, ["environment.kind=free"]).build_environment() == Environment.free()


def test_cavity_same_handedness_gives_zero_force(capsys):
    assert main(["cavity", "--handedness", "A=+1,C=+1"]) == 0
    out = capsys.readouterr().out
    (row,) = rows(out)
    assert abs(float(row["force_b"])) < 1e-6 * abs(float(row["force_ab_ee"]))
    assert any("three-body" in line for line in comments(out))


def test_cavity_opposite_handedness(capsys):
    assert main(["cavity", "--handedness", "A=+1,C=-1"]) == 0
    (row,) = rows(capsys.readouterr().out)
    assert row["handedness_c"] == "-1"
    assert float(row["force_b"]) == pytest.approx(2.0 * float(row["force_ab_ce"]), rel=1e-6)


def test_scan_is_deterministic(tmp_path):
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["scan", "--out", str(first), "--set", "scan.workers=2"]) == 0
    assert main(["scan", "--out", str(second)]) == 0
    text = first.read_text()
    table = rows(text)
    assert tuple(table[0]) == SCAN_COLUMNS
    assert [float(r["y"]) for r in table] == pytest.approx([1.0, 2.0, 5.0, 10.0, 20.0])
    assert rows(second.read_text()) == table


def test_scan_calibration(tmp_path):
    out = tmp_path / "scan.csv"
    assert main(["scan", "--out", str(out), "--set", "scan.calibrate=0.0675", "--set", "scan.y=[1e4]"]) == 0
    (row,) = rows(out.read_text())
    assert float(row["ratio_CE_EE"]) == pytest.approx(0.0675, rel=1e-3)


def test_potential_free_space(capsys):
    assert main(["potential", "--set", "environment.kind=free"]) == 0
    (row,) = rows(capsys.readouterr().out)
    parts = sum(float(row[k]) for k in ("U_EE", "U_CE", "U_CC", "U_MM", "U_EM", "U_CM"))
    assert float(row["total"]) == pytest.approx(parts, rel=1e-9)
    assert float(row["U_EE"]) < 0


def test_greens_dump_rows_and_si_scaling(capsys):
    args = ["greens-dump", "--set", "environment.kind=free", "--set", "geometry.xi=[0.5, 1.0]"]
    assert main(args) == 0
    internal = rows(capsys.readouterr().out)
    assert len(internal) == 4
    assert tuple(internal[0]) == GREENS_COLUMNS
    assert [r["kind"] for r in internal] == ["G", "curl_G", "G", "curl_G"]
    assert main([*args, "--set", "units=SI"]) == 0
    si = rows(capsys.readouterr().out)
    unit = length_unit(resolve_config(None, []).omega_ref)
    assert float(si[0]["T_yy"]) == pytest.approx(float(internal[0]["T_yy"]) / unit, rel=1e-9)
    assert float(si[1]["T_xz"]) == pytest.approx(float(internal[1]["T_xz"]) / unit**2, rel=1e-9)
    assert float(si[0]["z_b"]) == pytest.approx(float(internal[0]["z_b"]) * unit, rel=1e-9)


def test_exit_codes(tmp_path, capsys):
    assert main(["scan", "--config", str(tmp_path / "missing.toml")]) == 3
    assert main(["cavity", "--handedness", "A=2"]) == 1
    assert main(["scan", "--set", "plate.chirality=0"]) == 1
    assert main(["scan", "--set", "scan.z=[-2.0]"]) == 1
    assert "configuration error" in capsys.readouterr().err


DIMER = """name = "dimer"
units = "internal"
handedness = 1

[[transition]]
omega = 1.0
d = [1.0, 0.0, 0.0]
m_imag = [0.05, 0.0, 0.0]
"""


def test_molecule_paths_resolve_against_config_directory(tmp_path, monkeypatch, capsys):
    runs = tmp_path / "runs"
    runs.mkdir()
    (runs / "dimer.toml").write_text(DIMER)
    (runs / "run.toml").write_text(
        'scenario = "scan"\n[molecules]\na = "dimer.toml"\n[scan]\ny = [2.0]\n'
    )
    elsewhere = tmp_path / "elsewhere"
    elsewhere.mkdir()
    monkeypatch.chdir(elsewhere)
    config = resolve_config(Path("../runs/run.toml"), [])
    assert Path(config.molecules.a) == (runs / "dimer.toml").resolve()
    assert config.molecules.b == "preset:rb-like"
    assert main(["scan", "--config", "../runs/run.toml"]) == 0
    (row,) = rows(capsys.readouterr().out)
    assert float(row["y"]) == 2.0


def test_molecule_override_stays_relative_to_working_directory(tmp_path):
    path = tmp_path / "run.toml"
    path.write_text('[molecules]\na = "inside.toml"\n')
    config = resolve_config(path, ["molecules.c=local.toml"])
    assert Path(config.molecules.a) == (tmp_path / "inside.toml").resolve()
    assert config.molecules.c == "local.toml"


def test_cavity_full_setting(monkeypatch, capsys):
    seen = []
    experiment = cli.cavity_experiment

    def recording(*args, full=False, **kwargs):
        seen.append(full)
        return experiment(*args, full=False, **kwargs)

    monkeypatch.setattr(cli, "cavity_experiment", recording)
    assert main(["cavity", "--full"]) == 0
    assert main(["cavity", "--set", "cavity.full=true"]) == 0
    assert main(["cavity", "--set", "scan.full=true"]) == 0
    assert seen == [True, True, False]
    capsys.readouterr()
