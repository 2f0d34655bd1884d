"""Named parameter sets for the standard phase diagrams (fig1 ... fig5).

Axis windows for figs 2-5 are chosen to frame the resonance features of each
diagram.
"""

from __future__ import annotations

from dataclasses import dataclass

from .analysis import Axis

OMEGA = Axis.single("omega")
GAMMA = Axis.single("gamma0")
GAMMA_ANTISYMMETRIC = Axis.linked("gamma", {"gamma0": 1.0, "gamma1": -1.0})
GAMMA_CONSTANT = Axis.linked("gamma", {"gamma0": 1.0, "gamma1": 1.0})
DEFAULT_RESOLUTION = 400


@dataclass(frozen=True)
class FigurePreset:
    name: str
    protocol: dict[str, float]
    x: Axis
    x_range: tuple[float, float]
    y: Axis
    y_range: tuple[float, float]
    description: str

    def sweep_block(self, count: int = DEFAULT_RESOLUTION) -> dict:
        def axis(a: Axis, r: tuple[float, float]) -> dict:
            d = a.to_dict()
            d.update(min=r[0], max=r[1], count=count)
            return d

        return {"x": axis(self.x, self.x_range), "y": axis(self.y, self.y_range)}


def _dissipation(name, gamma1_sign, t0_fraction, x_range, description, y=None):
    return FigurePreset(
        name=name,
        protocol={
            "delta0": 1.0,
            "delta1": 1.0,
            "gamma0": 0.2,
            "gamma1": gamma1_sign * 0.2,
            "omega": 1.0,
            "t0_fraction": t0_fraction,
        },
        x=OMEGA,
        x_range=x_range,
        y=y or GAMMA,
        y_range=(0.0, 0.5),
        description=description,
    )


PRESETS: dict[str, FigurePreset] = {
    "fig1": _dissipation(
        "fig1", 0.0, 0.5, (0.8, 1.25), "one-photon resonance, gamma0=gamma, gamma1=0, T0=T1"
    ),
    "fig2": _dissipation(
        "fig2", 0.0, 0.5, (0.45, 0.55), "two-photon resonance, gamma0=gamma, gamma1=0, T0=T1"
    ),
    "fig3a": _dissipation(
        "fig3a", 0.0, 0.5, (0.15, 1.25), "multiphoton, gamma0=gamma, gamma1=0, T0=T1"
    ),
    "fig3b": _dissipation(
        "fig3b",
        -1.0,
        0.5,
        (0.15, 1.25),
        "multiphoton, gamma0=-gamma1=gamma, T0=T1",
        y=GAMMA_ANTISYMMETRIC,
    ),
    "fig3c": _dissipation(
        "fig3c",
        -1.0,
        0.55,
        (0.15, 1.25),
        "multiphoton, gamma0=-gamma1=gamma, T0=0.55T, T1=0.45T",
        y=GAMMA_ANTISYMMETRIC,
    ),
    "fig4a": FigurePreset(
        name="fig4a",
        protocol={
            "delta0": 1.0,
            "delta1": 0.0,
            "gamma0": 0.1,
            "gamma1": 0.1,
            "omega": 0.5,
            "t0_fraction": 0.5,
        },
        x=OMEGA,
        x_range=(0.1, 0.6),
        y=GAMMA_CONSTANT,
        y_range=(0.0, 0.5),
        description="time-periodic coupling, delta0=1, delta1=0, T0=0.5T",
    ),
    "fig4b": FigurePreset(
        name="fig4b",
        protocol={
            "delta0": 1.0,
            "delta1": -0.2,
            "gamma0": 0.1,
            "gamma1": 0.1,
            "omega": 0.46,
            "t0_fraction": 0.55,
        },
        x=OMEGA,
        x_range=(0.1, 0.6),
        y=GAMMA_CONSTANT,
        y_range=(0.0, 0.5),
        description="time-periodic coupling, delta0=1, delta1=-0.2, T0=0.55T",
    ),
    "fig5": FigurePreset(
        name="fig5",
        protocol={
            "delta0": 1.0,
            "delta1": 1.0,
            "gamma0": 0.0,
            "gamma1": 0.0,
            "omega": 3.0,
            "t0_fraction": 0.4,
        },
        x=Axis.single("gamma0"),
        x_range=(-4.0, 4.0),
        y=Axis.single("gamma1"),
        y_range=(-4.0, 4.0),
        description="high frequency, delta0=delta1=1, omega=3, T0=0.4T, T1=0.6T",
    ),
}
