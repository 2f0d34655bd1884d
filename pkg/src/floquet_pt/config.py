"""JSON run configuration.

A config is a single JSON object. Top-level keys::

    preset      name from presets.PRESETS (fills protocol and sweep axes)
    protocol    delta0 delta1 gamma0 gamma1 and either {t0, t1} or {omega, t0_fraction};
                "delta" sets delta0 = delta1
    sweep       {"x": AXIS, "y": AXIS}, AXIS = {"name", "targets": {param: [scale, offset]},
                "min", "max", "count"}
    ep          {"axis": AXIS-without-range, "boundary": "PlusOne"|"MinusOne",
                 "bracket": [a, b]} or "scan": {"lo", "hi", "num"} instead of "bracket"
    dynamics    {"periods", "substeps", "discard", "psi0": [[re, im], [re, im]]}
    hfcompare   {"halvings", "t_start"}
    resonances  {"k_max"}
    tolerances  {"ep_tol", "root_tol"}
    out         output directory

Layers are merged in order preset < file < ``--set`` overrides. A layer that
names either time convention replaces whatever convention earlier layers used.
"""

from __future__ import annotations

import copy
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from .analysis import PARAM_KEYS, ROOT_TOL, Axis, Boundary, SweepGrid
from .drive import DriveProtocol, ValidationError
from .dynamics import StateVector
from .engine import EP_TOL
from .presets import PRESETS


class ConfigError(ValueError):
    exit_code = 2


class MissingKeyError(ConfigError):
    pass


class UnknownKeyError(ConfigError):
    pass


class ConflictError(ConfigError):
    pass


class MalformedNumberError(ConfigError):
    pass


class ConfigIOError(OSError):
    pass


TIME_PAIRS = (("t0", "t1"), ("omega", "t0_fraction"))
TIME_KEYS = frozenset(k for pair in TIME_PAIRS for k in pair)
PROTOCOL_KEYS = frozenset({"delta", "delta0", "delta1", "gamma0", "gamma1"}) | TIME_KEYS
SECTIONS = {
    "preset": None,
    "protocol": PROTOCOL_KEYS,
    "sweep": frozenset({"x", "y"}),
    "ep": frozenset({"axis", "boundary", "bracket", "scan"}),
    "dynamics": frozenset({"periods", "substeps", "discard", "psi0"}),
    "hfcompare": frozenset({"halvings", "t_start"}),
    "resonances": frozenset({"k_max"}),
    "tolerances": frozenset({"ep_tol", "root_tol"}),
    "out": None,
}
AXIS_KEYS = frozenset({"name", "targets", "min", "max", "count"})


@dataclass(frozen=True)
class SweepSpec:
    x: Axis
    x_range: tuple[float, float, int]
    y: Axis
    y_range: tuple[float, float, int]

    def grid(self, base: DriveProtocol, ep_tol: float) -> SweepGrid:
        return SweepGrid(self.x, self.x_range, self.y, self.y_range, base, ep_tol)


@dataclass(frozen=True)
class EpSpec:
    axis: Axis
    boundary: Boundary
    bracket: tuple[float, float] | None = None
    scan: tuple[float, float, int] | None = None


@dataclass(frozen=True)
class DynamicsSpec:
    periods: int = 400
    substeps: int = 8
    discard: int = 100
    psi0: StateVector = StateVector(1 + 0j, 0j)


@dataclass(frozen=True)
class RunConfig:
    protocol: DriveProtocol
    sweep: SweepSpec | None = None
    ep: EpSpec | None = None
    dynamics: DynamicsSpec = field(default_factory=DynamicsSpec)
    hf_halvings: int = 6
    hf_t_start: float | None = None
    k_max: int = 6
    ep_tol: float = EP_TOL
    root_tol: float = ROOT_TOL
    out: Path = Path("out")
    preset: str | None = None


def _number(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise MalformedNumberError(f"{where}: expected a number, got {value!r}")
    value = float(value)
    if not math.isfinite(value):
        raise MalformedNumberError(f"{where}: expected a finite number, got {value!r}")
    return value


def _integer(value, where: str) -> int:
    v = _number(value, where)
    if v != int(v):
        raise MalformedNumberError(f"{where}: expected an integer, got {value!r}")
    return int(v)


def _positive(value, where: str) -> float:
    v = _number(value, where)
    if v <= 0:
        raise ConfigError(f"{where}: must be positive, got {value!r}")
    return v


def _check_keys(block, allowed, where: str) -> None:
    if not isinstance(block, dict):
        raise ConfigError(f"{where}: expected an object, got {type(block).__name__}")
    for key in block:
        if key not in allowed:
            raise UnknownKeyError(f"unknown key {where + '.' if where else ''}{key}")


def _merge_protocol(base: dict, layer: dict) -> dict:
    out = dict(base)
    for pair, other in (TIME_PAIRS, TIME_PAIRS[::-1]):
        # a layer using one time convention replaces the other
        if set(pair) & layer.keys():
            for k in other:
                out.pop(k, None)
    if "delta" in layer:
        out.pop("delta0", None)
        out.pop("delta1", None)
    elif {"delta0", "delta1"} & layer.keys():
        out.pop("delta", None)
    out.update(layer)
    return out


def merge(base: dict, layer: dict) -> dict:
    out = copy.deepcopy(base)
    for key, value in layer.items():
        if key == "protocol" and isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _merge_protocol(out[key], value)
        elif isinstance(value, dict) and isinstance(out.get(key), dict) and key != "sweep":
            out[key] = merge(out[key], value)
        elif key == "sweep" and isinstance(value, dict) and isinstance(out.get(key), dict):
            sweep = copy.deepcopy(out[key])
            for ax, spec in value.items():
                if isinstance(spec, dict) and isinstance(sweep.get(ax), dict):
                    if "targets" in spec:
                        sweep[ax] = {k: v for k, v in sweep[ax].items() if k != "targets"}
                    sweep[ax].update(spec)
                else:
                    sweep[ax] = spec
            out[key] = sweep
        else:
            out[key] = copy.deepcopy(value)
    return out


def parse_override(item: str) -> dict:
    """``a.b.c=value`` into ``{"a": {"b": {"c": value}}}``; value parsed as JSON when possible."""
    if "=" not in item:
        raise ConfigError(f"override {item!r} is not of the form key=value")
    path, raw = item.split("=", 1)
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    keys = path.strip().split(".")
    if not all(keys):
        raise ConfigError(f"override {item!r} has an empty key")
    doc: dict = {}
    cur = doc
    for k in keys[:-1]:
        cur = cur.setdefault(k, {})
    cur[keys[-1]] = value
    return doc


def parse_protocol(block: dict) -> DriveProtocol:
    _check_keys(block, PROTOCOL_KEYS, "protocol")
    values = dict(block)
    if "delta" in values:
        if "delta0" in values or "delta1" in values:
            raise ConflictError("protocol: 'delta' cannot be combined with delta0/delta1")
        values["delta0"] = values["delta1"] = values.pop("delta")
    given = [pair for pair in TIME_PAIRS if any(k in values for k in pair)]
    if len(given) > 1:
        raise ConflictError(
            "protocol: give either t0 and t1 or omega and t0_fraction, not both"
        )
    if not given:
        raise MissingKeyError("protocol: missing durations (t0, t1) or (omega, t0_fraction)")
    pair = given[0]
    for k in ("delta0", "delta1", "gamma0", "gamma1") + pair:
        if k not in values:
            raise MissingKeyError(f"missing required key protocol.{k}")
    nums = {k: _number(v, f"protocol.{k}") for k, v in values.items()}
    try:
        if pair == ("t0", "t1"):
            return DriveProtocol.from_values(
                nums["delta0"], nums["delta1"], nums["gamma0"], nums["gamma1"], nums["t0"], nums["t1"]
            )
        return DriveProtocol.from_omega(
            nums["delta0"],
            nums["delta1"],
            nums["gamma0"],
            nums["gamma1"],
            nums["omega"],
            nums["t0_fraction"],
        )
    except ValidationError as exc:
        raise ConfigError(f"protocol: {exc}") from exc


def _parse_axis(block, where: str, with_range: bool):
    allowed = AXIS_KEYS if with_range else frozenset({"name", "targets"})
    _check_keys(block, allowed, where)
    if "targets" not in block:
        raise MissingKeyError(f"missing required key {where}.targets")
    targets = block["targets"]
    if not isinstance(targets, dict) or not targets:
        raise ConfigError(f"{where}.targets: expected a non-empty object")
    parsed = []
    for key, spec in targets.items():
        if key not in PARAM_KEYS:
            raise UnknownKeyError(f"unknown key {where}.targets.{key}")
        if isinstance(spec, list):
            if len(spec) != 2:
                raise ConfigError(f"{where}.targets.{key}: expected [scale, offset]")
            scale, offset = (_number(v, f"{where}.targets.{key}") for v in spec)
        else:
            scale, offset = _number(spec, f"{where}.targets.{key}"), 0.0
        parsed.append((key, scale, offset))
    axis = Axis(str(block.get("name", "+".join(k for k, _, _ in parsed))), tuple(parsed))
    if not with_range:
        return axis
    for k in ("min", "max", "count"):
        if k not in block:
            raise MissingKeyError(f"missing required key {where}.{k}")
    count = _integer(block["count"], f"{where}.count")
    if count < 2:
        raise ConfigError(f"{where}.count must be >= 2")
    return axis, (_number(block["min"], f"{where}.min"), _number(block["max"], f"{where}.max"), count)


def _parse_state(raw) -> StateVector:
    try:
        (ar, ai), (br, bi) = raw
    except (TypeError, ValueError) as exc:
        raise ConfigError("dynamics.psi0: expected [[re, im], [re, im]]") from exc
    return StateVector(
        complex(_number(ar, "dynamics.psi0"), _number(ai, "dynamics.psi0")),
        complex(_number(br, "dynamics.psi0"), _number(bi, "dynamics.psi0")),
    )


def resolve_document(doc: dict | None = None, preset: str | None = None, overrides=()) -> dict:
    """Merge preset, file document and ``key=value`` overrides into one document."""
    doc = dict(doc or {})
    _check_keys(doc, SECTIONS, "")
    name = preset or doc.get("preset")
    merged: dict = {}
    if name is not None:
        if name not in PRESETS:
            raise ConfigError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
        fp = PRESETS[name]
        merged = {"preset": name, "protocol": dict(fp.protocol), "sweep": fp.sweep_block()}
    merged = merge(merged, doc)
    if preset is not None:
        merged["preset"] = preset
    for item in overrides:
        layer = parse_override(item) if isinstance(item, str) else item
        _check_keys(layer, SECTIONS, "")
        merged = merge(merged, layer)
    return merged


def parse_config(doc: dict | str | None = None, preset: str | None = None, overrides=()) -> RunConfig:
    """Validate a config document (dict or JSON text) into a :class:`RunConfig`."""
    if isinstance(doc, str):
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
    doc = resolve_document(doc, preset, overrides)
    if "protocol" not in doc:
        raise MissingKeyError("missing required key protocol")
    protocol = parse_protocol(doc["protocol"])

    sweep = None
    if "sweep" in doc:
        _check_keys(doc["sweep"], SECTIONS["sweep"], "sweep")
        for ax in ("x", "y"):
            if ax not in doc["sweep"]:
                raise MissingKeyError(f"missing required key sweep.{ax}")
        x, x_range = _parse_axis(doc["sweep"]["x"], "sweep.x", True)
        y, y_range = _parse_axis(doc["sweep"]["y"], "sweep.y", True)
        if x.keys & y.keys:
            raise ConflictError(f"sweep axes both drive {sorted(x.keys & y.keys)}")
        sweep = SweepSpec(x, x_range, y, y_range)

    ep = None
    if "ep" in doc:
        block = doc["ep"]
        _check_keys(block, SECTIONS["ep"], "ep")
        if "axis" not in block:
            raise MissingKeyError("missing required key ep.axis")
        axis = _parse_axis(block["axis"], "ep.axis", False)
        b = block.get("boundary", "PlusOne")
        if b not in Boundary.__members__:
            raise ConfigError(f"ep.boundary must be PlusOne or MinusOne, got {b!r}")
        bracket = scan = None
        if "bracket" in block:
            raw = block["bracket"]
            if not isinstance(raw, list) or len(raw) != 2:
                raise ConfigError("ep.bracket: expected [a, b]")
            bracket = tuple(_number(v, "ep.bracket") for v in raw)
        if "scan" in block:
            s = block["scan"]
            _check_keys(s, frozenset({"lo", "hi", "num"}), "ep.scan")
            scan = (
                _number(s.get("lo"), "ep.scan.lo"),
                _number(s.get("hi"), "ep.scan.hi"),
                _integer(s.get("num", 200), "ep.scan.num"),
            )
        if bracket is None and scan is None:
            raise MissingKeyError("ep needs either bracket or scan")
        ep = EpSpec(axis, Boundary[b], bracket, scan)

    dyn = DynamicsSpec()
    if "dynamics" in doc:
        block = doc["dynamics"]
        _check_keys(block, SECTIONS["dynamics"], "dynamics")
        dyn = DynamicsSpec(
            periods=_integer(block.get("periods", dyn.periods), "dynamics.periods"),
            substeps=_integer(block.get("substeps", dyn.substeps), "dynamics.substeps"),
            discard=_integer(block.get("discard", dyn.discard), "dynamics.discard"),
            psi0=_parse_state(block["psi0"]) if "psi0" in block else dyn.psi0,
        )

    hf = doc.get("hfcompare", {})
    _check_keys(hf, SECTIONS["hfcompare"], "hfcompare")
    res = doc.get("resonances", {})
    _check_keys(res, SECTIONS["resonances"], "resonances")
    tol = doc.get("tolerances", {})
    _check_keys(tol, SECTIONS["tolerances"], "tolerances")
    out = doc.get("out", "out")
    if not isinstance(out, str):
        raise ConfigError(f"out: expected a path string, got {out!r}")

    return RunConfig(
        protocol=protocol,
        sweep=sweep,
        ep=ep,
        dynamics=dyn,
        hf_halvings=_integer(hf.get("halvings", 6), "hfcompare.halvings"),
        hf_t_start=_positive(hf["t_start"], "hfcompare.t_start") if "t_start" in hf else None,
        k_max=_integer(res.get("k_max", 6), "resonances.k_max"),
        ep_tol=_positive(tol.get("ep_tol", EP_TOL), "tolerances.ep_tol"),
        root_tol=_positive(tol.get("root_tol", ROOT_TOL), "tolerances.root_tol"),
        out=Path(out),
        preset=doc.get("preset"),
    )


def load_config(path: str | Path | None, preset: str | None = None, overrides=()) -> RunConfig:
    doc = None
    if path is not None:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigIOError(f"cannot read config {path}: {exc}") from exc
        doc = text
    return parse_config(doc, preset, overrides)

