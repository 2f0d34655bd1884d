"""``floquet-pt`` command line front end.

Exit codes: 0 success, 2 configuration error, 3 numerical failure, 4 I/O failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
import tempfile
from pathlib import Path
from typing import Iterable, Sequence

from . import analysis, dynamics, engine
from .config import ConfigError, ConfigIOError, RunConfig, load_config
from .drive import DriveProtocol
from .presets import PRESETS
from .su2 import PrecisionError

log = logging.getLogger("floquet_pt")

COMMANDS = ("classify", "quasi", "sweep", "ep", "dynamics", "hfcompare", "resonances")
EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 2, 3, 4
SWEEP_HEADER = ("x", "y", "pi", "label", "n", "re_e_plus", "im_e_plus")


class NumericError(RuntimeError):
    pass


def fmt(x: float) -> str:
    """17 significant digits in scientific notation."""
    return f"{float(x):.16e}"


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_json(path: Path, payload: dict) -> None:
    _atomic_write(path, json.dumps(payload, indent=2, allow_nan=True) + "\n")


def write_table(path: Path, header: Sequence[str], rows: Iterable[Sequence[str]], sep: str = ",") -> None:
    lines = [("# " if sep == " " else "") + sep.join(header)]
    lines.extend(sep.join(r) for r in rows)
    _atomic_write(path, "\n".join(lines) + "\n")


def _complex(z: complex) -> list[float]:
    return [z.real, z.imag]


def protocol_summary(p: DriveProtocol) -> dict:
    d = p.as_dict()
    d.update(period=p.period, omega=p.omega, delta_eff=p.delta_eff, gamma_eff=p.gamma_eff)
    return d


def classification_payload(cfg: RunConfig) -> dict:
    p = cfg.protocol
    mono = engine.monodromy(p)
    q = engine.quasi_energies(mono.pi_value, p.omega, cfg.ep_tol)
    return {
        "protocol": protocol_summary(p),
        "pi": mono.pi_value,
        "label": q.label.variant.value,
        "n": q.label.n,
        "margin": q.label.margin,
        "e_plus": _complex(q.e_plus),
        "e_minus": _complex(q.e_minus),
        "ep_tol": cfg.ep_tol,
    }


def cmd_classify(cfg: RunConfig, args) -> dict:
    payload = classification_payload(cfg)
    print(
        f"pi={payload['pi']:.12g} label={payload['label']} n={payload['n']} "
        f"E+={complex(*payload['e_plus']):.10g} E-={complex(*payload['e_minus']):.10g}"
    )
    write_json(cfg.out / "classify.json", payload)
    return payload


def cmd_quasi(cfg: RunConfig, args) -> dict:
    p = cfg.protocol
    payload = classification_payload(cfg)
    q = engine.quasi_energies(payload["pi"], p.omega, cfg.ep_tol)
    heff = engine.effective_hamiltonian(p, cfg.ep_tol)
    payload.update(
        h=_complex(q.h_value),
        effective_hamiltonian={
            "J": heff.j,
            "gamma_y": heff.gamma_y,
            "gamma_z": heff.gamma_z,
            "n": heff.n,
            "well_conditioned": heff.well_conditioned,
        },
    )
    print(f"E+={q.e_plus:.12g} E-={q.e_minus:.12g} label={q.label.variant.value}")
    print(
        f"J={heff.j:.12g} Gamma_y={heff.gamma_y:.12g} Gamma_z={heff.gamma_z:.12g} "
        f"n={heff.n} well_conditioned={heff.well_conditioned}"
    )
    write_json(cfg.out / "quasi.json", payload)
    return payload


def sweep_rows(result: analysis.SweepResult) -> Iterable[tuple[str, ...]]:
    for rec in result:
        label = rec.label.variant.value if rec.label is not None else "Invalid"
        n = str(rec.label.n) if rec.label is not None else "-1"
        yield (fmt(rec.x), fmt(rec.y), fmt(rec.pi_value), label, n, fmt(rec.re_quasi), fmt(rec.im_quasi))


def cmd_sweep(cfg: RunConfig, args) -> dict:
    if cfg.sweep is None:
        raise ConfigError("sweep needs a 'sweep' block or a preset")
    result = analysis.sweep(cfg.sweep.grid(cfg.protocol, cfg.ep_tol))
    rows = list(sweep_rows(result))
    write_table(cfg.out / "sweep.csv", SWEEP_HEADER, rows)
    if getattr(args, "dat", False):
        write_table(cfg.out / "sweep.dat", SWEEP_HEADER, rows, sep=" ")
    summary = {"preset": cfg.preset, "base_protocol": protocol_summary(cfg.protocol)}
    summary.update(result.summary())
    write_json(cfg.out / "sweep.json", summary)
    print(
        f"{len(result)} points; lobes {summary['lobes']}; phase counts {summary['phase_counts']}"
    )
    return summary


def cmd_ep(cfg: RunConfig, args) -> dict:
    if cfg.ep is None:
        raise ConfigError("ep needs an 'ep' block")
    spec = cfg.ep
    ray = spec.axis.ray(cfg.protocol)
    brackets = [spec.bracket] if spec.bracket is not None else analysis.scan_brackets(
        ray, spec.boundary, *spec.scan
    )
    if not brackets:
        raise NumericError("pre-scan found no sign change of Pi -+ 1")
    found = []
    for br in brackets:
        loc = analysis.find_ep(ray, spec.boundary, br, cfg.root_tol)
        found.append(
            {
                "ray_parameter": loc.ray_parameter,
                "pi_at_root": loc.pi_at_root,
                "boundary": loc.boundary.name,
                "residual": loc.residual,
                "iterations": loc.iterations,
                "bracket": list(br),
            }
        )
        print(f"EP at {spec.axis.name}={loc.ray_parameter:.12g} (Pi={loc.pi_at_root:.12g})")
    payload = {"axis": spec.axis.to_dict(), "protocol": protocol_summary(cfg.protocol), "roots": found}
    write_json(cfg.out / "ep.json", payload)
    return payload


def cmd_dynamics(cfg: RunConfig, args) -> dict:
    p, spec = cfg.protocol, cfg.dynamics
    traj = dynamics.propagate_periods(p, spec.psi0, spec.periods, spec.substeps)
    rows = (
        (fmt(t), fmt(nrm), fmt(s.a.real), fmt(s.a.imag), fmt(s.b.real), fmt(s.b.imag))
        for t, nrm, s in zip(traj.times, traj.norms, traj.states)
    )
    write_table(cfg.out / "trajectory.csv", ("t", "norm_sq", "re_a", "im_a", "re_b", "im_b"), rows)
    q = engine.quasi_energies(engine.pi_closed_form(p), p.omega, cfg.ep_tol)
    discard = min(spec.discard, max(0, len(traj.times) - 11))
    rate = dynamics.growth_rate(traj, discard) if len(traj.times) > 11 else math.nan
    payload = {
        "protocol": protocol_summary(p),
        "periods": len(traj.times) - 1,
        "truncated": traj.truncated,
        "growth_rate": rate,
        "expected_rate": 2 * abs(q.e_plus.imag),
        "label": q.label.variant.value,
    }
    write_json(cfg.out / "dynamics.json", payload)
    print(f"growth rate {rate:.10g} (2|Im E+| = {payload['expected_rate']:.10g})")
    return payload


def hf_table(p: DriveProtocol, halvings: int, t_start: float | None = None) -> list[dict]:
    """Exact and second-order ``Pi`` while the period is halved at fixed duty cycle."""
    period = t_start if t_start is not None else p.period
    frac = p.t0_fraction
    rows = []
    prev = None
    for _ in range(halvings + 1):
        q = DriveProtocol.from_values(
            p.seg0.delta, p.seg1.delta, p.seg0.gamma, p.seg1.gamma, frac * period, (1 - frac) * period
        )
        exact, approx = engine.pi_closed_form(q), analysis.hf_pi_approx(q)
        diff = abs(exact - approx)
        rows.append(
            {
                "T": period,
                "pi_exact": exact,
                "pi_hf": approx,
                "abs_diff": diff,
                "reduction": prev / diff if prev and diff else math.nan,
            }
        )
        prev = diff
        period /= 2
    return rows


def cmd_hfcompare(cfg: RunConfig, args) -> dict:
    rows = hf_table(cfg.protocol, cfg.hf_halvings, cfg.hf_t_start)
    header = ("T", "pi_exact", "pi_hf", "abs_diff", "reduction")
    write_table(cfg.out / "hfcompare.csv", header, ([fmt(r[k]) for k in header] for r in rows))
    print(f"{'T':>12} {'pi_exact':>20} {'pi_hf':>20} {'|diff|':>12} {'ratio':>8}")
    for r in rows:
        print(
            f"{r['T']:12.6g} {r['pi_exact']:20.15g} {r['pi_hf']:20.15g} "
            f"{r['abs_diff']:12.4e} {r['reduction']:8.3f}"
        )
    payload = {"protocol": protocol_summary(cfg.protocol), "rows": rows}
    write_json(cfg.out / "hfcompare.json", payload)
    return payload


def cmd_resonances(cfg: RunConfig, args) -> dict:
    preds = analysis.predict_resonances(cfg.protocol, cfg.k_max)
    header = ("k", "kind", "omega_resonant", "breaking_expected", "reason")
    rows = [
        (str(r.k), r.kind.value, fmt(r.omega_resonant), str(r.breaking_expected).lower(), r.reason)
        for r in preds
    ]
    write_table(cfg.out / "resonances.csv", header, rows)
    for row in rows:
        print("  ".join(row))
    payload = {
        "protocol": protocol_summary(cfg.protocol),
        "delta_eff": cfg.protocol.delta_eff,
        "resonances": [dict(zip(header, (r.k, r.kind.value, r.omega_resonant, r.breaking_expected, r.reason))) for r in preds],
    }
    write_json(cfg.out / "resonances.json", payload)
    return payload


HANDLERS = {
    "classify": cmd_classify,
    "quasi": cmd_quasi,
    "sweep": cmd_sweep,
    "ep": cmd_ep,
    "dynamics": cmd_dynamics,
    "hfcompare": cmd_hfcompare,
    "resonances": cmd_resonances,
}


def run_command(cfg: RunConfig, cmd: str, args=None) -> int:
    """Run ``cmd`` and map failures onto the exit-code categories."""
    try:
        HANDLERS[cmd](cfg, args)
    except ConfigError as exc:
        log.error("config error: %s", exc)
        return EXIT_CONFIG
    except (
        NumericError,
        PrecisionError,
        engine.ConsistencyError,
        analysis.BracketError,
        ArithmeticError,
        ValueError,
    ) as exc:
        log.error("numerical error: %s", exc)
        return EXIT_NUMERIC
    except OSError as exc:
        log.error("i/o error: %s", exc)
        return EXIT_IO
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="floquet-pt",
        description="Floquet PT-phase analysis of a square-wave driven non-Hermitian qubit.",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", type=Path, help="JSON config file")
    parser.add_argument("--preset", choices=sorted(PRESETS), help="figure preset")
    parser.add_argument("--out", help="output directory (overrides config 'out')")
    parser.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="override a config key, dotted path, e.g. protocol.gamma0=0.3",
    )
    parser.add_argument("--dat", action="store_true", help="also write a space-delimited sweep.dat")
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    overrides = list(args.overrides)
    if args.out is not None:
        overrides.append({"out": args.out})
    try:
        cfg = load_config(args.config, args.preset, overrides)
    except ConfigIOError as exc:
        log.error("%s", exc)
        return EXIT_IO
    except ConfigError as exc:
        log.error("config error: %s", exc)
        return EXIT_CONFIG
    return run_command(cfg, args.command, args)


if __name__ == "__main__":
    sys.exit(main())
