"""Compare brute-force norm growth with 2|Im E+| on a few broken-phase points."""

from floquet_pt.drive import DriveProtocol
from floquet_pt.dynamics import BASIS_STATES, growth_rate, propagate_periods
from floquet_pt.engine import pi_closed_form, quasi_energies

POINTS = {
    "diagonal gain": DriveProtocol.from_values(0.0, 0.0, 0.4, 0.0, 1.0, 1.0),
    "fig1 omega=1 gamma=0.2": DriveProtocol.from_omega(1, 1, 0.2, 0, 1.0, 0.5),
    "fig2 two-photon": DriveProtocol.from_omega(1, 1, 0.5, 0, 0.466, 0.5),
    "fig5 gamma0=3": DriveProtocol.from_omega(1, 1, 3.0, 0, 3.0, 0.4),
    "fig4b k=1": DriveProtocol.from_omega(1, -0.2, 0.3, 0.3, 0.46, 0.55),
}

if __name__ == "__main__":
    for name, p in POINTS.items():
        q = quasi_energies(pi_closed_form(p), p.omega)
        rate = growth_rate(propagate_periods(p, BASIS_STATES[0], 400))
        print(f"{name:24s} {q.label.variant.value:12s} rate={rate:.10f} 2|Im E+|={2 * abs(q.e_plus.imag):.10f}")
