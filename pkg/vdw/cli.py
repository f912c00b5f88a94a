"""
Created on : Wednesday, 21st October 2026 11:38:52 am
Author: chiral-vdw contributors
-----
Command line front end: `vdw {potential,scan,cavity,greens-dump}`.

Exit codes: 0 success, 1 configuration error, 2 numerical failure, 3 I/O error.
"""

import argparse
import csv
import io
import logging
import sys
from collections.abc import Iterable, Sequence
from pathlib import Path
from typing import Any

import numpy as np

from vdw.config import RunConfig, resolve_config
from vdw.exceptions import ConfigError, NumericalError
from vdw.forces import calibrate_chirality, cavity_experiment, ratio_field
from vdw.greens import total_curl_G, total_G
from vdw.polarizability import load_molecule
from vdw.potentials import potential_breakdown
from vdw.schemas import GeometryPair, ScanConfig
from vdw.units import energy_unit, force_unit, length_unit

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_IO = 0, 1, 2, 3

SCAN_COLUMNS = (
    "x", "y", "z", "U_EE", "U_CE", "U_CC",
    "Fx_EE", "Fy_EE", "Fz_EE", "Fx_CE", "Fy_CE", "Fz_CE",
    "er_dot_F_EE", "er_dot_F_CE", "ratio_CE_EE", "err_estimate",
)  # fmt: skip
BREAKDOWN_COLUMNS = ("U_EE", "U_CE", "U_CC", "U_MM", "U_EM", "U_CM", "total", "err_estimate")
CAVITY_COLUMNS = (
    "axis", "handedness_a", "handedness_c", "force_b",
    "force_ab_ee", "force_ab_ce", "force_cb_ee", "force_cb_ce",
)  # fmt: skip
TENSOR_COLUMNS = tuple(f"T_{i}{j}" for i in "xyz" for j in "xyz")
GREENS_COLUMNS = ("xi", "kind", "x_a", "y_a", "z_a", "x_b", "y_b", "z_b") + TENSOR_COLUMNS


class _Scales:
    """Multipliers from internal to output units."""

    def __init__(self, config: RunConfig):
        si = config.units == "SI"
        self.label = "SI" if si else "internal"
        self.length = length_unit(config.omega_ref) if si else 1.0
        self.energy = energy_unit(config.omega_ref) if si else 1.0
        self.force = force_unit(config.omega_ref) if si else 1.0
        self.frequency = config.omega_ref if si else 1.0
        self.names = (
            {"length": "m", "energy": "J", "force": "N", "frequency": "rad/s"}
            if si
            else {
                "length": "c/omega_ref",
                "energy": "hbar*omega_ref",
                "force": "hbar*omega_ref^2/c",
                "frequency": "omega_ref",
            }
        )


def format_number(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    return format(float(value), ".12g")


def _header(config: RunConfig, scales: _Scales, units: Iterable[str]) -> list[str]:
    return [
        f"# vdw {config.scenario}",
        f"# config: {config.model_dump_json()}",
        f"# units: {scales.label} omega_ref={format_number(config.omega_ref)} rad/s "
        f"length_unit={format_number(length_unit(config.omega_ref))} m "
        f"energy_unit={format_number(energy_unit(config.omega_ref))} J",
        "# column units: " + ",".join(units),
    ]


def _render(header: list[str], columns: Sequence[str], rows: Iterable[Sequence[Any]], footer: Iterable[str] = ()) -> str:
    buffer = io.StringIO()
    for line in header:
        buffer.write(line + "\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_number(v) for v in row])
    for line in footer:
        buffer.write(line + "\n")
    return buffer.getvalue()


def run_potential(config: RunConfig) -> str:
    scales = _Scales(config)
    a = load_molecule(config.molecules.a, config.omega_ref)
    b = load_molecule(config.molecules.b, config.omega_ref)
    g = GeometryPair(r_a=config.geometry.r_a, r_b=config.geometry.r_b)
    breakdown = potential_breakdown(a, b, g, config.build_environment(), config.quadrature)
    values = [getattr(breakdown, column) for column in BREAKDOWN_COLUMNS[:-1]]
    row = [v * scales.energy for v in values] + [sum(breakdown.errors.values()) * scales.energy]
    units = [scales.names["energy"]] * len(BREAKDOWN_COLUMNS)
    return _render(_header(config, scales, units), BREAKDOWN_COLUMNS, [row])


def run_scan(config: RunConfig) -> str:
    scales = _Scales(config)
    env = config.build_environment()
    a = load_molecule(config.molecules.a, config.omega_ref)
    b = load_molecule(config.molecules.b, config.omega_ref)
    section = config.scan
    if section.calibrate is not None:
        chirality = env.plates[0].chirality if env.plates else 1
        a = calibrate_chirality(a, b, chirality, section.calibrate, config.quadrature)
    scan = ScanConfig(
        z_a=section.z_a,
        x=section.x,
        y=section.y,
        z=section.z,
        molecule_a=a,
        molecule_b=b,
        environment=env,
        quadrature=config.quadrature,
        full=section.full,
        step=section.step,
        workers=section.workers,
    )
    result = ratio_field(scan)
    rows = []
    for p in result.points:
        f_ee = p.F_EE or (None, None, None)
        f_ce = p.F_CE or (None, None, None)
        energies = [None if u is None else u * scales.energy for u in (p.U_EE, p.U_CE, p.U_CC)]
        forces = [None if f is None else f * scales.force for f in (*f_ee, *f_ce)]
        radial = [None if f is None else f * scales.force for f in (p.er_dot_F_EE, p.er_dot_F_CE)]
        error = None if p.err_estimate is None else p.err_estimate * scales.energy
        rows.append([p.x, p.y, p.z, *energies, *forces, *radial, p.ratio_CE_EE, error])
    units = (
        ["z_a"] * 3
        + [scales.names["energy"]] * 3
        + [scales.names["force"]] * 8
        + ["1", scales.names["energy"]]
    )
    footer = [f"# failed: {p.x},{p.y},{p.z}: {p.failure}" for p in result.failures]
    return _render(_header(config, scales, units), SCAN_COLUMNS, rows, footer)


def run_cavity(config: RunConfig) -> str:
    scales = _Scales(config)
    section = config.cavity
    env = config.build_cavity()
    a = load_molecule(config.molecules.a, config.omega_ref).model_copy(update={"handedness": section.handedness_a})
    b = load_molecule(config.molecules.b, config.omega_ref)
    c = load_molecule(config.molecules.c, config.omega_ref).model_copy(update={"handedness": section.handedness_c})
    centre = (0.0, 0.0, config.plate.z + 0.5 * section.separation)
    report = cavity_experiment(
        a, b, c, env, centre, section.offset, section.axis, config.quadrature, full=section.full
    )
    forces = [
        report.force_b, report.force_ab_ee, report.force_ab_ce, report.force_cb_ee, report.force_cb_ce
    ]
    row = [report.axis, report.handedness_a, report.handedness_c, *(f * scales.force for f in forces)]
    units = ["", "", ""] + [scales.names["force"]] * 5
    header = _header(config, scales, units) + [f"# note: {report.note}"]
    return _render(header, CAVITY_COLUMNS, [row])


def run_greens_dump(config: RunConfig) -> str:
    scales = _Scales(config)
    env = config.build_environment()
    g = GeometryPair(r_a=config.geometry.r_a, r_b=config.geometry.r_b)
    rows = []
    for xi in config.geometry.xi:
        positions = [c * scales.length for c in (*g.r_a, *g.r_b)]
        tensor = total_G(g, env, xi, config.quadrature) / scales.length
        curl = total_curl_G(g, env, xi, config.quadrature) / scales.length**2
        rows.append([xi * scales.frequency, "G", *positions, *np.ravel(tensor)])
        rows.append([xi * scales.frequency, "curl_G", *positions, *np.ravel(curl)])
    units = [scales.names["frequency"], ""] + [scales.names["length"]] * 6 + [f"1/{scales.names['length']} (G) or 1/{scales.names['length']}^2 (curl_G)"] * 9
    return _render(_header(config, scales, units), GREENS_COLUMNS, rows)


RUNNERS = {
    "potential": run_potential,
    "scan": run_scan,
    "cavity": run_cavity,
    "greens-dump": run_greens_dump,
}


def _parse_handedness(text: str) -> dict[str, int]:
    """Parse `A=+1,C=-1` into cavity overrides."""
    result: dict[str, int] = {}
    for item in text.split(","):
        name, sep, value = item.partition("=")
        name = name.strip().upper()
        if not sep or name not in ("A", "C") or value.strip() not in ("+1", "1", "-1"):
            raise ConfigError(f"parse_handedness: invalid entry {item!r}", key="handedness")
        result[f"cavity.handedness_{name.lower()}"] = int(value)
    return result


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vdw", description="Dispersion potentials and forces between chiral molecules."
    )
    parser.add_argument("scenario", choices=sorted(RUNNERS))
    parser.add_argument("--config", type=Path, help="TOML run configuration")
    parser.add_argument(
        "--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
        help="override a config entry, e.g. plate.chirality=-1",
    )  # fmt: skip
    parser.add_argument("--out", type=Path, help="output CSV path (default stdout)")
    parser.add_argument("--full", action="store_true", help="full quadrature instead of closed forms")
    parser.add_argument("--nodes", type=int, help="initial quadrature node count")
    parser.add_argument("--handedness", help="cavity handedness, e.g. A=+1,C=-1")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    return parser


def run(args: argparse.Namespace) -> str:
    fixed: dict[str, Any] = {"scenario": args.scenario}
    if args.full:
        fixed["scan.full"] = True
        fixed["cavity.full"] = True
    if args.nodes is not None:
        fixed["quadrature.nodes"] = args.nodes
    if args.handedness:
        fixed.update(_parse_handedness(args.handedness))
    config = resolve_config(args.config, args.overrides, **fixed)
    return RUNNERS[config.scenario](config)


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose > 1 else logging.INFO if args.verbose else logging.WARNING,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        output = run(args)
        if args.out is None:
            sys.stdout.write(output)
        else:
            args.out.write_text(output, encoding="utf-8")
            logger.info("main: wrote %s", args.out)
    except ConfigError as e:
        print(f"vdw: configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as e:
        print(f"vdw: numerical failure in {e.operation} at {e.point!r}: {e}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as e:
        print(f"vdw: I/O error: {e}", file=sys.stderr)
        return EXIT_IO
    except ValueError as e:
        print(f"vdw: configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
