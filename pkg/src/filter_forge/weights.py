"""Even, non-negative step weight functions with compact support.

A weight is stored on the positive half-line as strictly increasing
breakpoints ``0 < b_1 < ... < b_k`` and per-piece values ``v_j >= 0`` on
``[b_{j-1}, b_j)`` (with ``b_0 = 0``).  It is mirrored for negative
arguments and identically zero for ``|x| >= b_k``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

__all__ = [
    "StepWeightFunction",
    "builtin_weight",
    "builtin_weight_names",
    "load_weight",
    "save_weight",
]


@dataclass(frozen=True, eq=False)
class StepWeightFunction:
    breakpoints: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        bks = np.asarray(self.breakpoints, dtype=float)
        vals = np.asarray(self.values, dtype=float)
        if bks.ndim != 1 or bks.shape != vals.shape or bks.size == 0:
            raise ValueError(f"breakpoint/value shape mismatch: {bks.shape} vs {vals.shape}")
        if not np.all(np.isfinite(bks)) or not np.all(np.isfinite(vals)):
            raise ValueError("breakpoints and values must be finite")
        if bks[0] <= 0 or np.any(np.diff(bks) <= 0):
            raise ValueError("breakpoints must be strictly increasing and positive")
        if np.any(vals < 0):
            raise ValueError("weight values must be non-negative")
        bks.setflags(write=False)
        vals.setflags(write=False)
        object.__setattr__(self, "breakpoints", bks)
        object.__setattr__(self, "values", vals)

    @property
    def support(self) -> float:
        """Radius beyond which the weight vanishes."""
        return float(self.breakpoints[-1])

    def __call__(self, x):
        ax = np.abs(np.asarray(x, dtype=float))
        idx = np.searchsorted(self.breakpoints, ax, side="right")
        padded = np.append(self.values, 0.0)
        out = padded[idx]
        return float(out) if out.ndim == 0 else out

    def segments(self) -> list[tuple[float, float, float]]:
        """Positive half-line pieces as ``(lo, hi, value)`` triples."""
        edges = np.concatenate(([0.0], self.breakpoints))
        return [
            (float(edges[j]), float(edges[j + 1]), float(self.values[j]))
            for j in range(self.values.size)
        ]


_BUILTIN = {
    "gamma-slise": ([0.95, 1.05, 1.4, 5.0], [1.0, 0.01, 10.0, 20.0]),
    "box-slise": (
        [0.95, 0.995, 1.005, 1.05, 1.1, 1.3, 1.8, 3.0],
        [1.0, 4.0, 2.0, 4.0, 0.6, 1.0, 0.3, 0.1],
    ),
    "enhanced-gamma-slise": ([0.96, 1.0417, 1.4, 10.0], [0.7, 0.00092, 887.0, 20.0]),
}


def builtin_weight_names() -> tuple[str, ...]:
    return tuple(_BUILTIN)


def builtin_weight(name: str) -> StepWeightFunction:
    """Look up a builtin step weight: gamma-slise, box-slise, enhanced-gamma-slise."""
    key = name.strip().lower().replace("_", "-").replace(" ", "-")
    aliases = {
        "gammaslise": "gamma-slise",
        "boxslise": "box-slise",
        "enhancedgammaslise": "enhanced-gamma-slise",
    }
    key = aliases.get(key.replace("-", ""), key)
    try:
        bks, vals = _BUILTIN[key]
    except KeyError:
        raise LookupError(
            f"unknown builtin weight {name!r}; available: {', '.join(_BUILTIN)}"
        ) from None
    return StepWeightFunction(np.array(bks), np.array(vals))


def save_weight(weight: StepWeightFunction, path) -> None:
    doc = {"breakpoints": list(weight.breakpoints), "values": list(weight.values)}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def load_weight(path) -> StepWeightFunction:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    for key in ("breakpoints", "values"):
        if key not in doc:
            raise ValueError(f"{path}: missing field {key!r}")
    try:
        return StepWeightFunction(np.asarray(doc["breakpoints"], float),
                                  np.asarray(doc["values"], float))
    except ValueError as exc:
        raise ValueError(f"{path}: {exc}") from None
