"""Closed-form transmission solutions for a circular inclusion.

On a disk the density basis phi_k(theta) = gamma^{-1} e^{i k theta}
diagonalizes the transmission system, so densities, interior/exterior fields
and every contracted moment are available in closed form.  These formulas are
the reference values for the Nystrom solver and the anchor of the inversion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .materials import MaterialPair

__all__ = [
    "DiskSolution",
    "disk_density_coefficients",
    "disk_solution",
    "disk_interior_field",
    "disk_exterior_field",
    "disk_modified_emt",
    "disk_emt_general",
]

_Q = (1.0 + 0.0j, 1.0j)  # s/t index 1 -> 1, index 2 -> i

_RTOL = 1e-12


def disk_density_coefficients(mat: MaterialPair, gamma: float, n: int, q: complex = 1.0):
    """Density coefficients (c_{-n}, d_{-n}) for background trace conj(q (z-a0)^n).

    The exterior density is c_{-n} phi_{-n} and the interior one d_{-n} phi_{-n}:

        c_{-n} = conj(q) n gamma^n M0,
        d_{-n} = -2 conj(q) n gamma^n M1 / alpha~.

    q may be any complex coefficient (the pair is antilinear in q).
    """
    if n < 1:
        raise ValueError(f"degree must be >= 1, got {n}")
    k = mat.constants
    scale = np.conj(q) * n * gamma**n
    return scale * k.m0, -2.0 * scale * k.m1 / k.alpha_tilde


@dataclass(frozen=True)
class DiskSolution:
    """One diagonal transmission mode on a disk (a0, gamma)."""

    mat: MaterialPair
    center: complex
    gamma: float
    n: int
    q: complex
    c_minus_n: complex
    d_minus_n: complex


def disk_solution(mat: MaterialPair, center: complex, gamma: float, n: int,
                  q: complex = 1.0) -> DiskSolution:
    c, d = disk_density_coefficients(mat, gamma, n, q)
    return DiskSolution(mat=mat, center=complex(center), gamma=float(gamma), n=n,
                        q=complex(q), c_minus_n=c, d_minus_n=d)


def disk_interior_field(sol: DiskSolution, z) -> np.ndarray:
    """Interior single-layer field S~[psi](z), |z - a0| <= gamma.

    Equals -(alpha~/2) (d_{-n}/n) gamma^{-n} conj((z-a0)^n); antiholomorphic,
    vanishing at the center for every n >= 1.
    """
    w = np.asarray(z, dtype=complex) - sol.center
    if np.any(np.abs(w) > sol.gamma * (1.0 + _RTOL)):
        raise ValueError("point outside the closed disk")
    k = sol.mat.constants
    return (-0.5 * k.alpha_tilde * sol.d_minus_n / sol.n
            * sol.gamma ** (-sol.n) * np.conj(w**sol.n))


def disk_exterior_field(sol: DiskSolution, z) -> np.ndarray:
    """Exterior single-layer field S[phi](z), |z - a0| >= gamma.

    Halved closed form:
        2 S[phi](z) = -alpha (c_{-n}/n) gamma^n (z-a0)^{-n}
                      - beta conj(c_{-n}) ((z-a0) gamma^n conj((z-a0)^{-n-1})
                                           - gamma^{n+2} conj((z-a0)^{-n-2})).
    The beta bracket vanishes identically on |z - a0| = gamma, so the trace
    reduces to the alpha term alone.
    """
    w = np.asarray(z, dtype=complex) - sol.center
    if np.any(np.abs(w) < sol.gamma * (1.0 - _RTOL)):
        raise ValueError("point inside the open disk")
    k = sol.mat.constants
    g, n, c = sol.gamma, sol.n, sol.c_minus_n
    bracket = w * g**n * np.conj(w ** (-n - 1)) - g ** (n + 2) * np.conj(w ** (-n - 2))
    return 0.5 * (-k.alpha * (c / n) * g**n * w ** (-n) - k.beta * np.conj(c) * bracket)


def disk_modified_emt(mat: MaterialPair, gamma: float, n: int, m: int,
                      t: int, s: int) -> float:
    """Moment of a centered disk in the disk-centered basis: diagonal
    2 pi M0 n delta_nm gamma^{n+m} for (t,s) in {(1,1),(2,2)}, zero cross."""
    _check_ts(t, s)
    if t != s or n != m:
        return 0.0
    return 2.0 * math.pi * mat.constants.m0 * n * gamma ** (n + m)


def disk_emt_general(mat: MaterialPair, gamma: float, a0: complex, n: int, m: int,
                     t: int, s: int) -> float:
    """Contracted moment of the (possibly off-center) disk for origin-based
    background fields conj(q_t z^n), conj(q_s z^m).

    Binomial recombination of the centered diagonal values: expanding
    z^n = sum_k C(n,k) a0^{n-k} (z-a0)^k and using the orthogonality of the
    disk modes gives

        E^{(t,s)}_{nm} = 2 pi M0 Re{ q_t conj(q_s) S_nm },
        S_nm = sum_{k=1}^{min(n,m)} k gamma^{2k} b_{nk} conj(b_{mk}),
        b_{nk} = C(n,k) a0^{n-k}.

    Symmetric under (n,t) <-> (m,s) exchange; reduces to disk_modified_emt at
    a0 = 0.  E.g. E^{(1,1)}_{12} = 2 pi gamma^2 M0 (a0 + conj(a0)).
    """
    _check_ts(t, s)
    a0 = complex(a0)
    acc = 0.0 + 0.0j
    for k in range(1, min(n, m) + 1):
        bn = math.comb(n, k) * a0 ** (n - k)
        bm = math.comb(m, k) * a0 ** (m - k)
        acc += k * gamma ** (2 * k) * bn * np.conj(bm)
    val = _Q[t - 1] * np.conj(_Q[s - 1]) * acc
    return 2.0 * math.pi * mat.constants.m0 * float(np.real(val))


def _check_ts(t: int, s: int) -> None:
    if t not in (1, 2) or s not in (1, 2):
        raise ValueError(f"closed forms cover t, s in {{1, 2}}, got t={t}, s={s}")
