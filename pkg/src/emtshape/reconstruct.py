"""Two-step analytic inversion of contracted EMTs into a boundary estimate.

Step 1 fits a disk D(a0, gamma) to the three leading entries.  Step 2
recenters the table at a0 (binomial recombination), subtracts the exact
disk values, and divides the resulting first-channel combinations by their
known factors to read off the Fourier coefficients eps*h_k of the radial
perturbation.  The product eps*h_k is never separated into factors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .disk import disk_modified_emt
from .emt import EmtTable
from .geometry import BoundaryCurve
from .materials import MaterialPair

__all__ = [
    "InversionError",
    "DiskEstimate",
    "ModifiedEmtTable",
    "ShapeEstimate",
    "ShapeError",
    "estimate_disk",
    "modified_emts",
    "deltas",
    "fourier_coefficients",
    "reconstruct",
    "reconstruct_curve",
    "shape_error",
    "shape_estimate_to_json",
    "shape_estimate_from_json",
]

_Q = (1.0, 1.0j)


class InversionError(RuntimeError):
    """Raised when the EMT data admit no disk fit (wrong-signed leading entry,
    matched shear moduli, or a table too small for Step 1)."""


@dataclass(frozen=True)
class DiskEstimate:
    a0: complex
    gamma: float

    def __post_init__(self) -> None:
        if not (self.gamma > 0.0 and math.isfinite(self.gamma)):
            raise ValueError("gamma must be finite and positive")


@dataclass(frozen=True)
class ModifiedEmtTable:
    """Recentered contracted EMTs, indexed like EmtTable."""

    order: int
    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=float)
        if values.shape != (self.order, self.order, 2, 2):
            raise ValueError("values must have shape (order, order, 2, 2)")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)


@dataclass(frozen=True)
class ShapeEstimate:
    disk: DiskEstimate
    coeffs: np.ndarray  # eps*h_k for k = 0 .. order-1
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        coeffs = np.array(self.coeffs, dtype=complex)
        if coeffs.ndim != 1 or coeffs.size < 1:
            raise ValueError("coeffs must be a nonempty 1-d complex sequence")
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)


@dataclass(frozen=True)
class ShapeError:
    hausdorff: float
    radial_l2: float


def estimate_disk(table: EmtTable, mat: MaterialPair) -> DiskEstimate:
    """Disk whose E^{(1,1)}_{11}, E^{(1,1)}_{12}, E^{(1,2)}_{12} match the data."""
    if table.order < 2:
        raise InversionError("disk fit needs entries up to order 2")
    m0 = mat.constants.m0
    if m0 == 0.0:
        raise InversionError(
            "matched shear moduli (mu = mu~) make the leading EMT vanish; "
            "the disk radius is not identifiable from this data"
        )
    ratio = table.entry(1, 1, 1, 1) / (2.0 * math.pi * m0)
    if ratio <= 0.0:
        raise InversionError(
            f"E^(1,1)_11 / M0 = {2.0 * math.pi * ratio:.6g} is not positive: "
            "the leading entry contradicts the material contrast "
            "(noise-corrupted table?)"
        )
    gamma = math.sqrt(ratio)
    a0 = (table.entry(1, 2, 1, 1) - 1j * table.entry(1, 2, 1, 2)) / (
        4.0 * math.pi * gamma**2 * m0
    )
    return DiskEstimate(a0, gamma)


def _binomial_weights(order: int, a0: complex) -> np.ndarray:
    # c[n, k] = C(n, k) (-conj(a0))^(n-k), the change of basis between
    # conj((z - a0)^n) and the origin-centered family conj(z^k)
    c = np.zeros((order + 1, order + 1), dtype=complex)
    for n in range(1, order + 1):
        for k in range(1, n + 1):
            c[n, k] = math.comb(n, k) * (-np.conj(a0)) ** (n - k)
    return c


def modified_emts(table: EmtTable, a0: complex) -> ModifiedEmtTable:
    """Recenter the table at a0.

    Writing conj(q_t (z - a0)^n) = const + sum_k Re(u_nk) h_k^(1)
    + Im(u_nk) h_k^(2) with u_nk = q_t conj(c_nk), the density map and the
    EMT pairing are both real-linear, so the recentered entries are an exact
    real-bilinear combination of the original ones.
    """
    order = table.order
    c = _binomial_weights(order, a0)
    e = table.values
    out = np.empty_like(e)
    for n in range(1, order + 1):
        for m in range(1, order + 1):
            block = e[:n, :m]  # E_{kl} for k <= n, l <= m
            for t in (1, 2):
                u = _Q[t - 1] * np.conj(c[n, 1 : n + 1])
                uu = np.stack([u.real, u.imag])
                for s in (1, 2):
                    v = _Q[s - 1] * np.conj(c[m, 1 : m + 1])
                    vv = np.stack([v.real, v.imag])
                    out[n - 1, m - 1, t - 1, s - 1] = np.einsum(
                        "ak,bl,klab->", uu, vv, block
                    )
    return ModifiedEmtTable(order, out)


def deltas(modified: ModifiedEmtTable, gamma: float,
           mat: MaterialPair) -> dict[tuple[int, int, int, int], float]:
    """Data-minus-disk gaps Delta^{(t,s)}_{nm} feeding the Fourier formulas."""
    if not gamma > 0.0:
        raise ValueError("gamma must be positive")
    out = {}
    for n in range(1, modified.order + 1):
        for m in range(1, modified.order + 1):
            for t in (1, 2):
                for s in (1, 2):
                    out[(n, m, t, s)] = float(
                        modified.values[n - 1, m - 1, t - 1, s - 1]
                        - disk_modified_emt(mat, gamma, n, m, t, s)
                    )
    return out


def fourier_coefficients(delta_map: dict[tuple[int, int, int, int], float],
                         gamma: float, mat: MaterialPair,
                         order: int) -> tuple[np.ndarray, dict]:
    """eps*h_k for k = 0..order-1 from the (n, m) = (k+1, 1) channel.

    Returns (coeffs, diagnostics); diagnostics carries the discarded
    imaginary part of h_0 and the second-channel consistency values
    eps*h_{n+m+2}, which are reported but never merged into the estimate.
    """
    if not gamma > 0.0:
        raise ValueError("gamma must be positive")
    mu_gap = mat.inclusion.mu - mat.background.mu
    if mu_gap == 0.0:
        raise InversionError(
            "matched shear moduli (mu = mu~): both channel denominators vanish"
        )
    m1, m2 = mat.constants.m1, mat.constants.m2

    def combo(n: int, m: int, second: bool) -> complex:
        d = {(t, s): delta_map[(n, m, t, s)] for t in (1, 2) for s in (1, 2)}
        if second:
            return d[(1, 1)] - d[(2, 2)] + 1j * (d[(1, 2)] + d[(2, 1)])
        return d[(1, 1)] + d[(2, 2)] - 1j * (d[(1, 2)] - d[(2, 1)])

    coeffs = np.empty(order, dtype=complex)
    for k in range(order):
        n, m = k + 1, 1
        denom = 16.0 * math.pi * n * m * gamma ** (n + m) * mu_gap * m1
        coeffs[k] = combo(n, m, second=False) / denom
    h0_imag = float(coeffs[0].imag)
    coeffs[0] = coeffs[0].real

    second_channel = []
    for n in range(1, order + 1):
        for m in range(1, order + 1):
            k = n + m + 2
            if k > order - 1 or m2 == 0.0:
                continue
            denom = 16.0 * math.pi * n * m * gamma ** (n + m) * mu_gap * m1 * m2
            value = combo(n, m, second=True) / denom
            second_channel.append({
                "n": n, "m": m, "k": k,
                "value": [float(value.real), float(value.imag)],
                "firstChannelGap": float(abs(value - coeffs[k])),
            })
    diagnostics = {"h0Imag": h0_imag, "secondChannel": second_channel}
    return coeffs, diagnostics


def reconstruct(table: EmtTable, mat: MaterialPair,
                order: int | None = None) -> ShapeEstimate:
    """Full two-step inversion; order (<= table.order) truncates the data."""
    if order is None:
        order = table.order
    if not 1 <= order <= table.order:
        raise ValueError(f"order must lie in 1..{table.order}")
    sub = EmtTable(order, table.values[:order, :order], table.provenance)
    disk = estimate_disk(sub, mat)
    modified = modified_emts(sub, disk.a0)
    gaps = deltas(modified, disk.gamma, mat)
    coeffs, diagnostics = fourier_coefficients(gaps, disk.gamma, mat, order)
    return ShapeEstimate(disk, coeffs, diagnostics)


def reconstruct_curve(est: ShapeEstimate, theta_samples: int) -> np.ndarray:
    """Boundary samples a0 + gamma e^{i theta} (1 + 2 Re sum eps*h_k e^{ik theta})."""
    if theta_samples < 1:
        raise ValueError("theta_samples must be positive")
    theta = 2.0 * math.pi * np.arange(theta_samples) / theta_samples
    modes = np.exp(1j * np.outer(np.arange(est.coeffs.size), theta))
    profile = 1.0 + 2.0 * (est.coeffs @ modes).real
    return est.disk.a0 + est.disk.gamma * np.exp(1j * theta) * profile


def shape_error(samples: np.ndarray, truth: BoundaryCurve,
                center: complex | None = None) -> ShapeError:
    """Symmetric discrete Hausdorff distance plus a radial L2 gap.

    The radial metric treats both boundaries as radial graphs about
    ``center`` (default: centroid of the samples) and compares radii at the
    sample angles by periodic linear interpolation.
    """
    samples = np.asarray(samples, dtype=complex)
    truth_z = truth.z
    dist = np.abs(samples[:, None] - truth_z[None, :])
    hausdorff = float(max(dist.min(axis=1).max(), dist.min(axis=0).max()))

    if center is None:
        center = complex(samples.mean())
    rel_s = samples - center
    rel_t = truth_z - center
    ang_t = np.angle(rel_t)
    order = np.argsort(ang_t)
    ang_t, rad_t = ang_t[order], np.abs(rel_t)[order]
    ang_t = np.concatenate([ang_t, [ang_t[0] + 2.0 * math.pi]])
    rad_t = np.concatenate([rad_t, [rad_t[0]]])
    ang_s = np.angle(rel_s)
    interp = np.interp(np.mod(ang_s - ang_t[0], 2.0 * math.pi) + ang_t[0],
                       ang_t, rad_t)
    radial = float(np.sqrt(np.mean((np.abs(rel_s) - interp) ** 2)))
    return ShapeError(hausdorff, radial)


def shape_estimate_to_json(est: ShapeEstimate) -> dict:
    return {
        "a0": [float(est.disk.a0.real), float(est.disk.a0.imag)],
        "gamma": float(est.disk.gamma),
        "coeffs": [[float(c.real), float(c.imag)] for c in est.coeffs],
        "diagnostics": est.diagnostics,
    }


def shape_estimate_from_json(data: dict) -> ShapeEstimate:
    try:
        a0 = complex(data["a0"][0], data["a0"][1])
        gamma = float(data["gamma"])
        coeffs = np.array([complex(re, im) for re, im in data["coeffs"]])
        diagnostics = dict(data.get("diagnostics", {}))
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise ValueError(f"malformed shape estimate document: {exc}") from exc
    return ShapeEstimate(DiskEstimate(a0, gamma), coeffs, diagnostics)
