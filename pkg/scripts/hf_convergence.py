"""Distance between the located EP and the high-frequency boundary as the drive frequency grows.

Uses the fig5 duty cycle (T0 = 0.4T) with gamma1 = 0 and scans gamma0.
"""

import argparse

from floquet_pt.analysis import Axis, Boundary, find_ep, scan_brackets
from floquet_pt.drive import DriveProtocol


def ep_gap(omega: float, t0_fraction: float = 0.4) -> tuple[float, float]:
    base = DriveProtocol.from_omega(1.0, 1.0, 0.0, 0.0, omega, t0_fraction)
    ray = Axis.single("gamma0").ray(base)
    brackets = scan_brackets(ray, Boundary.PlusOne, 0.0, 2.0 / t0_fraction, num=400)
    root = find_ep(ray, Boundary.PlusOne, brackets[0]).ray_parameter
    return root, abs(t0_fraction * root - 1)


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("omegas", nargs="*", type=float, default=[3, 5, 10, 30, 100, 300])
    args = parser.parse_args()
    print(f"{'omega':>8} {'gamma0*':>16} {'|0.4 gamma0* - 1|':>18}")
    for w in args.omegas:
        root, gap = ep_gap(w)
        print(f"{w:8.3g} {root:16.10f} {gap:18.3e}")
