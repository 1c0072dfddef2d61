"""Plain-dict (YAML/JSON) encoding of functions, transforms, spaces, operators and jobs.

Every analytic variant is a mapping with a ``type`` key and numeric
parameters; ``+inf`` is written as the string ``"inf"``.  Callables
(opaque functions, monotone maps) are not serializable.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import yaml

from .extended import Atoms, FuncSpec, Interval, MeasureSpace, Piecewise, Power, Table, Truncated
from .gls import (
    PsiFunction, constant_psi, degenerate_psi, natural_psi, power_psi, tabulated_psi,
)
from .operators import Composition, LinearSubstitution, Multiplicative, OperatorSpec, Product
from .pushforward import (
    AtomMap, MeasurePreserving, PiecewiseConstantMap, PowerMap, Transform,
)


class ConfigError(ValueError):
    """Malformed or unsupported configuration."""


def encode_number(x: float):
    if isinstance(x, float) and math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def decode_number(x) -> float:
    if isinstance(x, str):
        s = x.strip().lower()
        if s in ("inf", "+inf", "infinity"):
            return math.inf
        if s in ("-inf", "-infinity"):
            return -math.inf
    try:
        return float(x)
    except (TypeError, ValueError):
        raise ConfigError(f"expected a number, got {x!r}") from None


def _nums(xs) -> List[float]:
    if not isinstance(xs, (list, tuple)):
        raise ConfigError(f"expected a list of numbers, got {xs!r}")
    return [decode_number(v) for v in xs]


def _get(d: Dict, key: str, kind: str):
    if not isinstance(d, dict):
        raise ConfigError(f"{kind} must be a mapping, got {d!r}")
    if key not in d:
        raise ConfigError(f"{kind} is missing '{key}'")
    return d[key]


# ---------------------------------------------------------------------------
# functions

def func_to_dict(f: FuncSpec) -> Dict[str, Any]:
    if isinstance(f, Power):
        return {"type": "power", "c": f.c, "s": f.s}
    if isinstance(f, Piecewise):
        return {"type": "piecewise", "breakpoints": [encode_number(b) for b in f.breakpoints],
                "pieces": [func_to_dict(pc) for pc in f.pieces]}
    if isinstance(f, Truncated):
        out = {"type": "truncated", "base": func_to_dict(f.base), "level": encode_number(f.level)}
        if f.gate is not None:
            out["gate"] = func_to_dict(f.gate)
        return out
    if isinstance(f, Table):
        return {"type": "table", "grid": list(f.grid), "values": list(f.values)}
    raise ConfigError(f"function of type {type(f).__name__} cannot be serialized")


def func_from_dict(d: Dict[str, Any]) -> FuncSpec:
    kind = _get(d, "type", "function")
    try:
        if kind == "power":
            return Power(decode_number(d.get("c", 1.0)), decode_number(d.get("s", 0.0)))
        if kind == "constant":
            return Power(decode_number(_get(d, "c", "constant function")), 0.0)
        if kind == "piecewise":
            return Piecewise(tuple(_nums(_get(d, "breakpoints", "piecewise"))),
                             tuple(func_from_dict(pc) for pc in _get(d, "pieces", "piecewise")))
        if kind == "truncated":
            gate = d.get("gate")
            return Truncated(func_from_dict(_get(d, "base", "truncated")),
                             decode_number(_get(d, "level", "truncated")),
                             None if gate is None else func_from_dict(gate))
        if kind == "table":
            return Table(tuple(_nums(_get(d, "grid", "table"))),
                         tuple(_nums(_get(d, "values", "table"))))
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    raise ConfigError(f"unknown function type {kind!r}")


# ---------------------------------------------------------------------------
# transforms

def transform_to_dict(xi: Transform) -> Dict[str, Any]:
    if isinstance(xi, PowerMap):
        return {"type": "power_map", "r": xi.r}
    if isinstance(xi, PiecewiseConstantMap):
        return {"type": "piecewise_constant", "breakpoints": list(xi.breakpoints),
                "values": list(xi.values)}
    if isinstance(xi, AtomMap):
        return {"type": "atom_map", "targets": list(xi.targets)}
    if isinstance(xi, MeasurePreserving) and xi.forward is None:
        return {"type": "measure_preserving"}
    raise ConfigError(f"transform of type {type(xi).__name__} cannot be serialized")


def transform_from_dict(d: Dict[str, Any]) -> Transform:
    kind = _get(d, "type", "transform")
    try:
        if kind == "power_map":
            return PowerMap(decode_number(_get(d, "r", "power_map")))
        if kind in ("identity", "measure_preserving"):
            return MeasurePreserving()
        if kind == "piecewise_constant":
            return PiecewiseConstantMap(tuple(_nums(_get(d, "breakpoints", kind))),
                                        tuple(_nums(_get(d, "values", kind))))
        if kind == "constant":
            dom = _nums(d.get("domain", [0.0, 1.0]))
            return PiecewiseConstantMap(tuple(dom), (decode_number(_get(d, "c", kind)),))
        if kind == "atom_map":
            return AtomMap(tuple(int(t) for t in _get(d, "targets", kind)))
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    raise ConfigError(f"unknown transform type {kind!r}")


# ---------------------------------------------------------------------------
# spaces

def space_to_dict(s: MeasureSpace) -> Dict[str, Any]:
    if isinstance(s, Interval):
        return {"type": "interval", "a": encode_number(s.a), "b": encode_number(s.b),
                "density": func_to_dict(s.density)}
    return {"type": "atoms", "weights": list(s.weights), "points": list(s.points)}


def space_from_dict(d: Dict[str, Any]) -> MeasureSpace:
    kind = _get(d, "type", "space")
    try:
        if kind == "interval":
            dens = d.get("density")
            return Interval(decode_number(d.get("a", 0.0)), decode_number(d.get("b", 1.0)),
                            Power(1.0, 0.0) if dens is None else func_from_dict(dens))
        if kind == "atoms":
            pts = d.get("points")
            return Atoms(tuple(_nums(_get(d, "weights", "atoms"))),
                         None if pts is None else tuple(_nums(pts)))
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    raise ConfigError(f"unknown space type {kind!r}")


# ---------------------------------------------------------------------------
# operators

def operator_to_dict(op: OperatorSpec) -> Dict[str, Any]:
    if isinstance(op, Composition):
        out: Dict[str, Any] = {"type": "composition"}
        if op.xi is not None:
            out["transform"] = transform_to_dict(op.xi)
        if op.z is not None:
            out["z"] = func_to_dict(op.z)
        return out
    if isinstance(op, Multiplicative):
        return {"type": "multiplicative", "g": func_to_dict(op.g)}
    if isinstance(op, Product):
        out = {"type": "product", "g": func_to_dict(op.g), "transform": transform_to_dict(op.xi),
               "independent": op.independent}
        if op.factored_h is not None:
            out["factored_h"] = func_to_dict(op.factored_h)
        return out
    if isinstance(op, LinearSubstitution):
        return {"type": "linear_substitution", "dim": op.dim, "abs_det": op.abs_det}
    raise ConfigError(f"operator of type {type(op).__name__} cannot be serialized")


def operator_from_dict(d: Dict[str, Any]) -> OperatorSpec:
    kind = _get(d, "type", "operator")
    try:
        if kind == "composition":
            xi = d.get("transform")
            z = d.get("z")
            if xi is None and z is None:
                raise ConfigError("composition operator needs 'transform' or 'z'")
            return Composition(None if xi is None else transform_from_dict(xi),
                               None if z is None else func_from_dict(z))
        if kind == "multiplicative":
            if "t" in d:
                return Multiplicative(Power(1.0, -decode_number(d["t"])))
            return Multiplicative(func_from_dict(_get(d, "g", kind)))
        if kind == "product":
            h = d.get("factored_h")
            return Product(func_from_dict(_get(d, "g", kind)),
                           transform_from_dict(_get(d, "transform", kind)),
                           bool(d.get("independent", False)),
                           None if h is None else func_from_dict(h))
        if kind == "linear_substitution":
            return LinearSubstitution(int(_get(d, "dim", kind)),
                                      decode_number(_get(d, "abs_det", kind)))
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    raise ConfigError(f"unknown operator type {kind!r}")


# ---------------------------------------------------------------------------
# Psi-functions

def psi_from_dict(d: Dict[str, Any]) -> PsiFunction:
    kind = _get(d, "type", "psi")
    A = decode_number(d.get("A", 1.0))
    B = decode_number(d.get("B", math.inf))
    try:
        if kind == "power":
            return power_psi(decode_number(_get(d, "m", kind)), A, B,
                             decode_number(d.get("c", 1.0)))
        if kind == "constant":
            return constant_psi(decode_number(d.get("c", 1.0)), A, B)
        if kind == "degenerate":
            return degenerate_psi(decode_number(_get(d, "r", kind)))
        if kind == "tabulated":
            return tabulated_psi(_nums(_get(d, "grid", kind)), _nums(_get(d, "values", kind)))
        if kind == "natural":
            sp = d.get("space")
            space = Interval() if sp is None else space_from_dict(sp)
            return natural_psi(func_from_dict(_get(d, "f", kind)), space, A, B)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    raise ConfigError(f"unknown psi type {kind!r}")


# ---------------------------------------------------------------------------
# jobs

FORMATS = ("csv", "json")


@dataclass
class JobConfig:
    """Everything a CLI command needs; ``raw`` keeps the psi/transform mappings."""

    operator: Optional[OperatorSpec] = None
    mu: MeasureSpace = field(default_factory=Interval)
    nu: Optional[MeasureSpace] = None
    p: Tuple[float, ...] = ()
    q: Tuple[float, ...] = ()
    psi: Optional[Dict[str, Any]] = None
    transform: Optional[Dict[str, Any]] = None
    suite: Optional[str] = None
    output_format: str = "csv"
    output_path: Optional[str] = None
    tol: float = 1e-10
    seed: int = 0

    @property
    def target(self) -> MeasureSpace:
        return self.mu if self.nu is None else self.nu

    def pairs(self) -> List[Tuple[float, float]]:
        out = []
        for p in self.p:
            for q in self.q:
                if q < p:
                    raise ConfigError(f"exponent pair p={p:g}, q={q:g} needs p <= q")
                out.append((p, q))
        return out

    def to_dict(self) -> Dict[str, Any]:
        d: Dict[str, Any] = {}
        if self.operator is not None:
            d["operator"] = operator_to_dict(self.operator)
        d["spaces"] = {"mu": space_to_dict(self.mu)}
        if self.nu is not None:
            d["spaces"]["nu"] = space_to_dict(self.nu)
        if self.p or self.q:
            d["exponents"] = {"p": [encode_number(v) for v in self.p],
                              "q": [encode_number(v) for v in self.q]}
        if self.psi is not None:
            d["psi"] = self.psi
        if self.transform is not None:
            d["transform"] = self.transform
        if self.suite is not None:
            d["suite"] = self.suite
        d["output"] = {"format": self.output_format}
        if self.output_path is not None:
            d["output"]["path"] = self.output_path
        d["tol"] = self.tol
        d["seed"] = self.seed
        return d

    @classmethod
    def from_dict(cls, d: Dict[str, Any]) -> "JobConfig":
        if not isinstance(d, dict):
            raise ConfigError("configuration must be a mapping")
        known = {"operator", "spaces", "exponents", "psi", "transform", "suite", "output",
                 "tol", "seed"}
        extra = set(d) - known
        if extra:
            raise ConfigError(f"unknown configuration keys: {sorted(extra)}")
        op = d.get("operator")
        spaces = d.get("spaces", {}) or {}
        mu = space_from_dict(spaces["mu"]) if "mu" in spaces else Interval()
        nu = space_from_dict(spaces["nu"]) if "nu" in spaces else None
        ex = d.get("exponents", {}) or {}

        def as_tuple(v):
            if v is None:
                return ()
            return tuple(_nums(v if isinstance(v, (list, tuple)) else [v]))

        out = d.get("output", {}) or {}
        fmt = out.get("format", "csv")
        if fmt not in FORMATS:
            raise ConfigError(f"output format must be one of {FORMATS}, got {fmt!r}")
        psi = d.get("psi")
        if psi is not None:
            psi_from_dict(psi)  # validate early
        return cls(None if op is None else operator_from_dict(op), mu, nu,
                   as_tuple(ex.get("p")), as_tuple(ex.get("q")), psi, d.get("transform"),
                   d.get("suite"), fmt, out.get("path"), decode_number(d.get("tol", 1e-10)),
                   int(d.get("seed", 0)))


def load_config(path: str) -> JobConfig:
    """Read a YAML or JSON job file."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse config {path}: {exc}") from None
    return JobConfig.from_dict(data)


def dump_config(cfg: JobConfig, fmt: str = "yaml") -> str:
    d = cfg.to_dict()
    if fmt == "json":
        return json.dumps(d, indent=2, sort_keys=True)
    return yaml.safe_dump(d, sort_keys=True)
