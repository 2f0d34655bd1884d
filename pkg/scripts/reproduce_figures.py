"""Write sweep datasets for every figure preset.

Usage: python scripts/reproduce_figures.py [--out results] [--count 400]
"""

import argparse
import sys
from pathlib import Path

from floquet_pt.cli import main
from floquet_pt.presets import PRESETS


def run(out: Path, count: int) -> int:
    status = 0
    for name in PRESETS:
        print(f"== {name}: {PRESETS[name].description}")
        code = main(
            [
                "sweep",
                "--preset",
                name,
                "--out",
                str(out / name),
                "--set",
                f"sweep.x.count={count}",
                "--set",
                f"sweep.y.count={count}",
                "--dat",
            ]
        )
        status = status or code
    return status


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", type=Path, default=Path("results"))
    parser.add_argument("--count", type=int, default=400)
    args = parser.parse_args()
    sys.exit(run(args.out, args.count))
