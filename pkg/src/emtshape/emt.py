"""Contracted elastic moment tensors and the multiplicative noise model.

The contracted EMT of an inclusion pairs the density phi solved for the
background field h_n^(t) against a second polynomial field h_m^(s):

    E^{(t,s)}_{nm} = integral Re{ h_m^(s)(z) conj(phi(z)) } dsigma(z),

which equals the real 2-vector pairing of the field against the density.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import BoundaryCurve
from .materials import MaterialPair
from .transmission import BackgroundField, assemble_and_solve, solve_densities

__all__ = [
    "EmtTable",
    "NoiseModel",
    "contracted_emt",
    "emt_table",
    "apply_noise",
    "table_to_json",
    "table_from_json",
]


@dataclass(frozen=True)
class NoiseModel:
    """Multiplicative Gaussian noise: every entry is scaled by (1 + g) with
    g ~ N(0, sigma2), drawn from ``numpy.random.default_rng(seed)``."""

    sigma2: float
    seed: int

    def __post_init__(self) -> None:
        if not (self.sigma2 >= 0.0 and math.isfinite(self.sigma2)):
            raise ValueError("noise variance must be finite and nonnegative")


@dataclass(frozen=True)
class EmtTable:
    """Contracted EMTs E^{(t,s)}_{nm} for 1 <= n,m <= order, t,s in {1,2}.

    values[n-1, m-1, t-1, s-1] holds E^{(t,s)}_{nm}; provenance is None for
    exact tables and the generating NoiseModel for noisy ones.
    """

    order: int
    values: np.ndarray
    provenance: NoiseModel | None = None

    def __post_init__(self) -> None:
        if self.order < 1:
            raise ValueError("order must be a positive integer")
        values = np.array(self.values, dtype=float)
        if values.shape != (self.order, self.order, 2, 2):
            raise ValueError(
                f"values must have shape {(self.order, self.order, 2, 2)}, "
                f"got {values.shape}"
            )
        if not np.all(np.isfinite(values)):
            raise ValueError("EMT entries must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def entry(self, n: int, m: int, t: int, s: int) -> float:
        if not (1 <= n <= self.order and 1 <= m <= self.order):
            raise ValueError(f"orders (n, m) = {(n, m)} outside 1..{self.order}")
        if t not in (1, 2) or s not in (1, 2):
            raise ValueError("field types t, s must lie in {1, 2}")
        return float(self.values[n - 1, m - 1, t - 1, s - 1])


def contracted_emt(curve: BoundaryCurve, mat: MaterialPair,
                   n: int, m: int, t: int, s: int) -> float:
    """Single contracted EMT entry; t, s may range over all four field types."""
    pair = assemble_and_solve(curve, mat, BackgroundField.from_pair(mat, t, n))
    test = BackgroundField.from_pair(mat, s, m).values(curve.z)
    return float(np.sum(curve.weight * (test * np.conj(pair.phi)).real))


def emt_table(curve: BoundaryCurve, mat: MaterialPair, order: int) -> EmtTable:
    """All entries with n, m <= order and t, s in {1, 2}.

    The transmission system is factorized once; the 2*order densities are
    solved simultaneously and reused across every test field.
    """
    if order < 1:
        raise ValueError("order must be a positive integer")
    index = [(n, t) for n in range(1, order + 1) for t in (1, 2)]
    pairs = solve_densities(curve, mat,
                            [BackgroundField.from_pair(mat, t, n) for n, t in index])
    tests = np.stack([
        BackgroundField.from_pair(mat, s, m).values(curve.z)
        for m in range(1, order + 1) for s in (1, 2)
    ])
    values = np.empty((order, order, 2, 2))
    for (n, t), pair in zip(index, pairs):
        row = tests @ (curve.weight * np.conj(pair.phi))
        values[n - 1, :, t - 1, :] = row.real.reshape(order, 2)
    return EmtTable(order, values)


def apply_noise(table: EmtTable, noise: NoiseModel) -> EmtTable:
    """Perturb every entry by an independent multiplicative Gaussian factor.

    Draws come from ``default_rng(seed)`` as a single normal block of shape
    (order, order, 2, 2), i.e. in C order: n outermost, then m, t, s.
    """
    if table.provenance is not None:
        raise ValueError("table already carries noise; apply_noise needs an exact table")
    rng = np.random.default_rng(noise.seed)
    factors = 1.0 + rng.normal(0.0, math.sqrt(noise.sigma2), size=table.values.shape)
    return EmtTable(table.order, table.values * factors, noise)


def table_to_json(table: EmtTable) -> dict:
    if table.provenance is None:
        provenance: dict = {"kind": "exact"}
    else:
        provenance = {
            "kind": "noisy",
            "sigma2": table.provenance.sigma2,
            "seed": table.provenance.seed,
        }
    entries = [
        {"n": n, "m": m, "t": t, "s": s,
         "value": float(table.values[n - 1, m - 1, t - 1, s - 1])}
        for n in range(1, table.order + 1)
        for m in range(1, table.order + 1)
        for t in (1, 2)
        for s in (1, 2)
    ]
    return {"order": table.order, "provenance": provenance, "entries": entries}


def table_from_json(data: dict) -> EmtTable:
    try:
        order = int(data["order"])
        provenance_data = data["provenance"]
        entries = data["entries"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed EMT table document: {exc}") from exc
    if order < 1:
        raise ValueError("order must be a positive integer")
    if provenance_data is None or provenance_data.get("kind") == "exact":
        provenance = None
    elif provenance_data.get("kind") == "noisy":
        provenance = NoiseModel(float(provenance_data["sigma2"]),
                                int(provenance_data["seed"]))
    else:
        raise ValueError(f"unknown provenance kind {provenance_data!r}")
    values = np.full((order, order, 2, 2), np.nan)
    for entry in entries:
        try:
            n, m, t, s = (int(entry[key]) for key in ("n", "m", "t", "s"))
            value = float(entry["value"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed EMT entry {entry!r}") from exc
        if not (1 <= n <= order and 1 <= m <= order and t in (1, 2) and s in (1, 2)):
            raise ValueError(f"EMT entry index {(n, m, t, s)} out of range")
        values[n - 1, m - 1, t - 1, s - 1] = value
    if np.isnan(values).any():
        raise ValueError("EMT table document is missing entries")
    return EmtTable(order, values, provenance)
