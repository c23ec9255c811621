"""Nystrom solver for the planar inclusion transmission system.

Displacements are complex-valued; the transmission pair (psi, phi) solves

    S~[psi]| - S[phi]|          = H          (trace)
    dnu~ S~[psi]|- - dnu S[phi]|+ = dnu H    (traction)

with phi orthogonal to the discrete rigid motions {1, i, iz}.  The log kernel
of the single-layer trace uses the trigonometric product quadrature (exact
for trigonometric polynomials below the Nyquist mode); the traction operators
are built from boundary values of Cauchy-type integrals (circular Hilbert
transform + smooth remainder) and spectral differentiation.  Conjugations
make every operator real-linear but not complex-linear, so the assembled
system is real of size 4N+3: the extra three columns are rigid-motion slacks
attached to the traction rows, the extra three rows the orthogonality
constraints on phi.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .geometry import BoundaryCurve
from .materials import MaterialPair

__all__ = [
    "BackgroundField",
    "DensityPair",
    "SolverError",
    "evaluate_background",
    "assemble_and_solve",
    "solve_densities",
    "evaluate_exterior",
    "single_layer_offcurve",
    "residual_norms",
    "rigid_motion_residuals",
]


class SolverError(RuntimeError):
    """Raised when the discretized transmission system cannot be solved."""


@dataclass(frozen=True)
class BackgroundField:
    """Polynomial background displacement of family t in {1,2,3,4}, degree n.

    Values at z (with w = z - center):
        t=1: conj(w^n)        t=2: conj(i w^n)
        t=3: kappa w^n - z conj(n w^{n-1})
        t=4: kappa i w^n - z conj(i n w^{n-1})
    kappa and mu belong to the background material (mu scales tractions).
    """

    t: int
    n: int
    center: complex
    kappa: float
    mu: float

    def __post_init__(self) -> None:
        if self.t not in (1, 2, 3, 4):
            raise ValueError(f"family index must be 1..4, got {self.t}")
        if self.n < 1:
            raise ValueError(f"degree must be >= 1, got {self.n}")

    @classmethod
    def from_pair(cls, mat: MaterialPair, t: int, n: int,
                  center: complex = 0.0) -> "BackgroundField":
        return cls(t=t, n=n, center=complex(center),
                   kappa=mat.constants.kappa, mu=mat.background.mu)

    def values(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        w = z - self.center
        nn = self.n
        if self.t in (1, 2):
            q = 1.0 if self.t == 1 else 1.0j
            return np.conj(q * w**nn)
        p = 1.0 if self.t == 3 else 1.0j
        return self.kappa * p * w**nn - z * np.conj(nn * p * w ** (nn - 1))


@dataclass(frozen=True)
class DensityPair:
    """Nodal transmission densities: phi (exterior), psi (interior)."""

    curve: BoundaryCurve
    phi: np.ndarray
    psi: np.ndarray


def evaluate_background(field: BackgroundField, curve: BoundaryCurve):
    """Nodal values H_j and traction density (conormal derivative per unit
    arc length) of a background field on a curve.

    The traction comes from the complex representation: with potentials (f, g)
    of H, traction * dsigma = -2 i mu d/dtheta [f + z conj(f') + conj(g)], and
    the theta-derivative is evaluated from the polynomial form analytically.
    """
    z, dz = curve.z, curve.dz
    w = z - field.center
    n, mu = field.n, field.mu
    h = field.values(z)
    if field.t in (1, 2):
        q = 1.0 if field.t == 1 else 1.0j
        dg = -np.conj(q * n * w ** (n - 1) * dz)
    else:
        p = 1.0 if field.t == 3 else 1.0j
        dg = p * n * w ** (n - 1) * dz + dz * np.conj(p * n * w ** (n - 1))
        if n > 1:
            dg = dg + z * np.conj(p * n * (n - 1) * w ** (n - 2) * dz)
    traction = -2.0j * mu * dg / np.abs(dz)
    return h, traction


# ---------------------------------------------------------------------------
# periodic spectral operators

def _circulant(col: np.ndarray) -> np.ndarray:
    n = col.shape[0]
    idx = (np.arange(n)[:, None] - np.arange(n)[None, :]) % n
    return col[idx]


def _multiplier_matrix(n: int, mult: np.ndarray) -> np.ndarray:
    # matrix of f -> ifft(mult * fft(f)); real whenever mult is Hermitian
    return _circulant(np.fft.ifft(mult).real)


def _conjugation_matrix(n: int) -> np.ndarray:
    k = np.rint(np.fft.fftfreq(n, 1.0 / n)).astype(int)
    mult = 1j * np.sign(k).astype(complex)
    mult[n // 2] = 0.0  # Nyquist mode dropped
    return _multiplier_matrix(n, mult)


def _diff_matrix(n: int) -> np.ndarray:
    k = np.rint(np.fft.fftfreq(n, 1.0 / n)).astype(int)
    mult = (1j * k).astype(complex)
    mult[n // 2] = 0.0
    return _multiplier_matrix(n, mult)


def _log_quadrature_row(n: int) -> np.ndarray:
    # weights R_d with sum_l R_{(j-l) mod N} e^{ik tau_l} = -(2 pi/|k|) e^{ik theta_j}
    d = np.arange(n)
    m = np.arange(1, n // 2)
    series = (np.cos(2.0 * math.pi * np.outer(d, m) / n) / m).sum(axis=1)
    return -(4.0 * math.pi / n) * (series + np.where(d % 2 == 0, 1.0, -1.0) / n)


def _second_derivative(dz: np.ndarray) -> np.ndarray:
    n = dz.shape[0]
    k = np.rint(np.fft.fftfreq(n, 1.0 / n)).astype(int)
    mult = (1j * k).astype(complex)
    mult[n // 2] = 0.0
    return np.fft.ifft(mult * np.fft.fft(dz))


def _cauchy_matrices(curve: BoundaryCurve):
    """Boundary-value matrices of C[g](z) = (1/2pi) int g/(z-zeta) dsigma from
    the interior (-) and exterior (+) side."""
    n, z, dz, theta = curve.n, curve.z, curve.dz, curve.theta
    ddz = _second_derivative(dz)

    dtheta = theta[None, :] - theta[:, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        ks = dz[None, :] / (z[None, :] - z[:, None]) - 0.5 / np.tan(0.5 * dtheta)
    np.fill_diagonal(ks, ddz / (2.0 * dz))

    pv = -0.5j * _conjugation_matrix(n) - (1j / n) * ks
    base = np.diag(np.abs(dz) / dz)
    eye = np.eye(n)
    c_int = -1j * (0.5 * eye + pv) @ base
    c_ext = -1j * (-0.5 * eye + pv) @ base
    return c_int, c_ext


# ---------------------------------------------------------------------------
# single-layer trace and traction operators (real-linear pairs P, Q with
# action phi -> P phi + Q conj(phi))

def _single_layer_trace(curve: BoundaryCurve, alpha: float, beta: float):
    n, z, dz, theta, w = curve.n, curve.z, curve.dz, curve.theta, curve.weight
    dtheta = theta[None, :] - theta[:, None]
    diff = z[:, None] - z[None, :]

    with np.errstate(divide="ignore", invalid="ignore"):
        smooth = np.log(np.abs(diff) / (2.0 * np.abs(np.sin(0.5 * dtheta))))
    np.fill_diagonal(smooth, np.log(np.abs(dz)))
    rmat = _circulant(_log_quadrature_row(n))
    logmat = (0.5 * rmat + (2.0 * math.pi / n) * smooth) / (2.0 * math.pi) * np.abs(dz)[None, :]

    kk = np.empty((n, n), dtype=complex)
    with np.errstate(divide="ignore", invalid="ignore"):
        np.divide(diff, np.conj(diff), out=kk)
    np.fill_diagonal(kk, dz / np.conj(dz))

    p = alpha * logmat - (beta / (4.0 * math.pi)) * np.tile(w, (n, 1))
    q = -(beta / (4.0 * math.pi)) * kk * w[None, :]
    return p.astype(complex), q


def _traction_pair(curve: BoundaryCurve, alpha: float, beta: float, side: str):
    """Matrices of dG/dtheta for the single layer, where
    traction * dsigma = -2 i mu (dG/dtheta) dtheta; side '+' exterior, '-' interior."""
    c_int, c_ext = _cauchy_matrices(curve)
    c = c_ext if side == "+" else c_int
    cc = np.conj(c)
    d = _diff_matrix(curve.n)
    dzd = np.diag(curve.dz)
    zd = np.diag(curve.z)
    p = 0.5 * beta * dzd @ c - 0.5 * alpha * np.diag(np.conj(curve.dz)) @ cc
    q = 0.5 * beta * (dzd @ cc + zd @ (d @ cc) - d @ (cc @ zd))
    return p, q


def _real_block(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    return np.block([
        [p.real + q.real, q.imag - p.imag],
        [p.imag + q.imag, p.real - q.real],
    ])


def _assemble(curve: BoundaryCurve, mat: MaterialPair) -> np.ndarray:
    n = curve.n
    k = mat.constants
    mu, mu_t = mat.background.mu, mat.inclusion.mu
    a = np.zeros((4 * n + 3, 4 * n + 3))

    trace_psi = _real_block(*_single_layer_trace(curve, k.alpha_tilde, k.beta_tilde))
    trace_phi = _real_block(*_single_layer_trace(curve, k.alpha, k.beta))
    a[: 2 * n, : 2 * n] = trace_psi
    a[: 2 * n, 2 * n : 4 * n] = -trace_phi

    trac_psi = _real_block(*_traction_pair(curve, k.alpha_tilde, k.beta_tilde, "-"))
    trac_phi = _real_block(*_traction_pair(curve, k.alpha, k.beta, "+"))
    a[2 * n : 4 * n, : 2 * n] = mu_t * trac_psi
    a[2 * n : 4 * n, 2 * n : 4 * n] = -mu * trac_phi

    # slack columns on the traction rows: constants and the dilation field z.
    # The rows are written in dG/dtheta variables, so their exact left null
    # space is spanned by Re/Im of the periodicity sum and by Re sum(conj(z) *
    # row); the rotation i*z pairs to zero against the last and cannot close
    # the rank, while z pairs to sum(|z|^2) > 0.
    z = curve.z
    a[2 * n : 3 * n, 4 * n] = 1.0
    a[3 * n : 4 * n, 4 * n + 1] = 1.0
    a[2 * n : 3 * n, 4 * n + 2] = z.real
    a[3 * n : 4 * n, 4 * n + 2] = z.imag

    # discrete orthogonality of phi to the rigid motions
    w = curve.weight
    a[4 * n, 2 * n : 3 * n] = w
    a[4 * n + 1, 3 * n : 4 * n] = w
    a[4 * n + 2, 2 * n : 3 * n] = w * z.imag
    a[4 * n + 2, 3 * n : 4 * n] = -w * z.real
    return a


def _rhs_column(curve: BoundaryCurve, trace: np.ndarray, traction: np.ndarray) -> np.ndarray:
    n = curve.n
    v = 0.5j * np.abs(curve.dz) * traction  # = mu * dG_H/dtheta
    b = np.zeros(4 * n + 3)
    b[:n] = trace.real
    b[n : 2 * n] = trace.imag
    b[2 * n : 3 * n] = v.real
    b[3 * n : 4 * n] = v.imag
    return b


def solve_densities(curve: BoundaryCurve, mat: MaterialPair,
                    fields: list[BackgroundField]) -> list[DensityPair]:
    """Solve the transmission system for several background fields at once;
    the matrix is assembled and factorized a single time."""
    n = curve.n
    a = _assemble(curve, mat)
    b = np.stack([_rhs_column(curve, *evaluate_background(f, curve)) for f in fields],
                 axis=1)
    try:
        x = np.linalg.solve(a, b)
    except np.linalg.LinAlgError as exc:
        cond = np.linalg.cond(a)
        raise SolverError(f"transmission system singular (cond ~ {cond:.3e})") from exc
    out = []
    for j in range(len(fields)):
        col = x[:, j]
        psi = col[:n] + 1j * col[n : 2 * n]
        phi = col[2 * n : 3 * n] + 1j * col[3 * n : 4 * n]
        out.append(DensityPair(curve=curve, phi=phi, psi=psi))
    return out


def assemble_and_solve(curve: BoundaryCurve, mat: MaterialPair,
                       field: BackgroundField) -> DensityPair:
    """Solve the transmission system for one background field."""
    return solve_densities(curve, mat, [field])[0]


def rigid_motion_residuals(pair: DensityPair) -> np.ndarray:
    """The three discrete rigid-motion pairings of phi (all ~ 0 after a solve)."""
    w, z, phi = pair.curve.weight, pair.curve.z, pair.phi
    return np.array([
        float(np.sum(w * phi.real)),
        float(np.sum(w * phi.imag)),
        float(np.sum(w * np.real(1j * np.conj(z) * phi))),
    ])


def residual_norms(curve: BoundaryCurve, mat: MaterialPair, field: BackgroundField,
                   pair: DensityPair) -> tuple[float, float]:
    """Relative weighted-l2 residuals of the two discretized equations."""
    k = mat.constants
    mu, mu_t = mat.background.mu, mat.inclusion.mu
    h, traction = evaluate_background(field, curve)

    def apply(pq, v):
        return pq[0] @ v + pq[1] @ np.conj(v)

    trace_lhs = (apply(_single_layer_trace(curve, k.alpha_tilde, k.beta_tilde), pair.psi)
                 - apply(_single_layer_trace(curve, k.alpha, k.beta), pair.phi))
    trac_lhs = (mu_t * apply(_traction_pair(curve, k.alpha_tilde, k.beta_tilde, "-"), pair.psi)
                - mu * apply(_traction_pair(curve, k.alpha, k.beta, "+"), pair.phi))
    trac_rhs = 0.5j * np.abs(curve.dz) * traction

    def wnorm(v):
        return math.sqrt(float(np.sum(curve.weight * np.abs(v) ** 2)))

    eps = np.finfo(float).tiny
    return (wnorm(trace_lhs - h) / max(wnorm(h), eps),
            wnorm(trac_lhs - trac_rhs) / max(wnorm(trac_rhs), eps))


# ---------------------------------------------------------------------------
# off-curve evaluation

def single_layer_offcurve(curve: BoundaryCurve, density: np.ndarray,
                          alpha: float, beta: float, points) -> np.ndarray:
    """Single-layer potential at points off the curve (plain trapezoidal rule;
    the kernel is smooth away from the boundary)."""
    pts = np.asarray(points, dtype=complex)
    flat = pts.ravel()
    diff = flat[:, None] - curve.z[None, :]
    wphi = curve.weight * density
    log_part = (alpha / (2.0 * math.pi)) * (np.log(np.abs(diff)) @ wphi)
    const_part = -(beta / (4.0 * math.pi)) * np.sum(wphi)
    k_part = -(beta / (4.0 * math.pi)) * ((diff / np.conj(diff)) @ (curve.weight * np.conj(density)))
    return (log_part + const_part + k_part).reshape(pts.shape)


def _winding_number(curve: BoundaryCurve, point: complex) -> int:
    ang = np.angle(curve.z - point)
    inc = np.diff(np.concatenate([ang, ang[:1]]))
    inc = (inc + math.pi) % (2.0 * math.pi) - math.pi
    return round(float(inc.sum()) / (2.0 * math.pi))


def evaluate_exterior(curve: BoundaryCurve, mat: MaterialPair, densities: DensityPair,
                      field: BackgroundField, points) -> np.ndarray:
    """Total exterior displacement u = H + S[phi] at the given points.

    Points must lie outside the curve; points closer to the boundary than one
    node spacing trigger a near-singularity warning (the plain quadrature
    loses accuracy there).
    """
    pts = np.asarray(points, dtype=complex)
    flat = pts.ravel()
    for x in flat:
        if _winding_number(curve, complex(x)) != 0:
            raise ValueError(f"point {x} is not exterior to the curve")
    spacing = 2.0 * math.pi * float(np.abs(curve.dz).max()) / curve.n
    dmin = np.abs(flat[:, None] - curve.z[None, :]).min()
    if dmin < spacing:
        warnings.warn("evaluation point within one node spacing of the boundary; "
                      "quadrature is near-singular", RuntimeWarning, stacklevel=2)
    k = mat.constants
    s = single_layer_offcurve(curve, densities.phi, k.alpha, k.beta, pts)
    return field.values(pts) + s
