"""Example dispersion calculations using the chiral-vdw library."""

import asyncio
import sys
from pathlib import Path

# Add parent directory to path to import vdw package
sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from vdw.aio import scenarios
from vdw.forces import asymptotic_ratios, calibrate_chirality, cavity_experiment, ratio_field
from vdw.polarizability import enantiomer, load_molecule
from vdw.potentials import potential_breakdown
from vdw.schemas import Environment, GeometryPair, ScanConfig


# Synchronous example
def show_sync():
    """Potentials, a short ratio scan and the cavity check."""
    mcp = load_molecule("preset:3mcp-like")
    rb = load_molecule("preset:rb-like")
    plate = Environment.single_plate(chirality=-1)

    print("=" * 60)
    print("PAIR POTENTIAL NEAR A CHIRAL PLATE")
    print("=" * 60)

    g = GeometryPair(r_a=(0.0, 0.0, 1e-3), r_b=(0.0, 2e-3, 1e-3))
    breakdown = potential_breakdown(mcp, rb, g, plate)
    print(f"\n✓ Breakdown: {breakdown.model_dump()}")

    # Calibrate
    mcp = calibrate_chirality(mcp, rb, -1, target=0.0675)
    parallel, perpendicular = asymptotic_ratios(mcp, rb, -1)
    print(f"\n✓ Asymptotes: parallel={parallel:.4%} perpendicular={perpendicular:.4%}")

    # Scan
    scan = ScanConfig(
        z_a=1e-3, y=(1.0, 5.0, 50.0), z=(0.0,), molecule_a=mcp, molecule_b=rb, environment=plate
    )
    for point in ratio_field(scan).points:
        print(f"\n✓ y={point.y:g}: ratio={point.ratio_CE_EE:.4%}")

    # Cavity
    cavity = Environment.cavity(4e-3, chirality=1)
    for c in (mcp, enantiomer(mcp)):
        report = cavity_experiment(mcp, rb, c, cavity, (0.0, 0.0, 2e-3), 1e-3)
        print(f"\n✓ Cavity handedness C={c.handedness:+d}: force on B={report.force_b:.6e}")


# Asynchronous example
async def show_async():
    """The same scan, evaluated on worker threads."""
    mcp = load_molecule("preset:3mcp-like")
    rb = load_molecule("preset:rb-like")

    print("\n" + "=" * 60)
    print("ASYNCHRONOUS RATIO SCAN")
    print("=" * 60)

    scan = ScanConfig(
        z_a=1e-3,
        y=(0.0, 1.0),
        z=(1.0, 10.0),
        molecule_a=mcp,
        molecule_b=rb,
        workers=4,
    )
    result = await scenarios.ratio_field(scan)
    for point in result.points:
        print(f"\n✓ (y, z)=({point.y:g}, {point.z:g}): ratio={point.ratio_CE_EE:.4%}")


# Run examples
if __name__ == "__main__":
    print("\n" + "=" * 60)
    print("CHIRAL-VDW EXAMPLE")
    print("=" * 60)

    show_sync()

    asyncio.run(show_async())

    print("\n" + "=" * 60)
    print("EXAMPLES COMPLETED")
    print("=" * 60 + "\n")
