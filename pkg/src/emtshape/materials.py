"""Material parameters and derived constants for plane elastostatics.

Everything downstream (layer potentials, moment tensors, the inversion
formulas) is driven by a handful of scalars derived from the two Lame pairs,
so they are computed eagerly at construction and cached on the pair.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "LameConstants",
    "DerivedConstants",
    "MaterialPair",
    "derive_constants",
    "kelvin_matrix",
    "elastic_tensor_apply",
]


@dataclass(frozen=True)
class LameConstants:
    """Isotropic Lame pair (lam, mu); dimensionless shear and bulk moduli.

    Requires mu > 0 and lam + mu > 0 (ellipticity of the plane Lame operator).
    The JSON key for ``lam`` is "lambda"; the Python name avoids the keyword.
    """

    lam: float
    mu: float

    def __post_init__(self) -> None:
        if not self.mu > 0:
            raise ValueError(f"shear modulus must be positive, got mu={self.mu}")
        if not self.lam + self.mu > 0:
            raise ValueError(f"need lam + mu > 0, got lam+mu={self.lam + self.mu}")


def _alpha_beta(mat: LameConstants) -> tuple[float, float]:
    a = 0.5 * (1.0 / mat.mu + 1.0 / (2.0 * mat.mu + mat.lam))
    b = 0.5 * (1.0 / mat.mu - 1.0 / (2.0 * mat.mu + mat.lam))
    return a, b


@dataclass(frozen=True)
class DerivedConstants:
    """Scalars derived from a background/inclusion pair.

    alpha, beta (and the inclusion analogues alpha_tilde, beta_tilde) weight
    the two kernels of the fundamental solution; kappa = (lam+3mu)/(lam+mu)
    enters the complex representation of displacement fields.  m0, m1, m2 are
    the contrast combinations the disk formulas and the inversion consume:

        m0 = 2(mu~ - mu) / (mu~ alpha + mu beta)
        m1 = 1 / (mu~ alpha + mu beta)
        m2 = beta (mu - mu~) / (mu~ alpha + mu beta)

    Identities: kappa * beta == alpha, m1 > 0, sign(m0) == sign(mu~ - mu).
    """

    alpha: float
    beta: float
    alpha_tilde: float
    beta_tilde: float
    kappa: float
    kappa_tilde: float
    m0: float
    m1: float
    m2: float


@dataclass(frozen=True)
class MaterialPair:
    """Background and inclusion Lame constants.

    Invariants: the pairs are not jointly identical, and the contrast is
    sign-consistent, (lam - lam~)(mu - mu~) >= 0.  Equal shear moduli are
    permitted (the forward problem is still well posed when only lam differs)
    and show up downstream as ``constants.m0 == 0``; the reconstruction
    refuses such pairs.

    Derived constants are computed once here and cached as ``constants``.
    """

    background: LameConstants
    inclusion: LameConstants

    def __post_init__(self) -> None:
        bg, inc = self.background, self.inclusion
        if bg.lam == inc.lam and bg.mu == inc.mu:
            raise ValueError("background and inclusion materials are identical")
        if (bg.lam - inc.lam) * (bg.mu - inc.mu) < 0:
            raise ValueError(
                "need (lam - lam~)(mu - mu~) >= 0, got "
                f"({bg.lam - inc.lam})*({bg.mu - inc.mu}) < 0"
            )
        object.__setattr__(self, "constants", derive_constants(self))

    # populated in __post_init__; declared for introspection
    constants: DerivedConstants = None  # type: ignore[assignment]

    @property
    def shear_matched(self) -> bool:
        """True when mu~ == mu; the inclusion is invisible to the inversion."""
        return self.background.mu == self.inclusion.mu


def derive_constants(mat: MaterialPair) -> DerivedConstants:
    """Compute all derived scalar constants for a material pair.

    Args:
        mat: validated material pair (invariants enforced at construction).

    Returns:
        DerivedConstants with every field populated; kappa*beta == alpha holds
        to machine precision by construction.
    """
    bg, inc = mat.background, mat.inclusion
    alpha, beta = _alpha_beta(bg)
    alpha_t, beta_t = _alpha_beta(inc)
    kappa = (bg.lam + 3.0 * bg.mu) / (bg.lam + bg.mu)
    kappa_t = (inc.lam + 3.0 * inc.mu) / (inc.lam + inc.mu)
    denom = inc.mu * alpha + bg.mu * beta
    return DerivedConstants(
        alpha=alpha,
        beta=beta,
        alpha_tilde=alpha_t,
        beta_tilde=beta_t,
        kappa=kappa,
        kappa_tilde=kappa_t,
        m0=2.0 * (inc.mu - bg.mu) / denom,
        m1=1.0 / denom,
        m2=beta * (bg.mu - inc.mu) / denom,
    )


def kelvin_matrix(x, bg: LameConstants) -> np.ndarray:
    """Fundamental solution of the plane Lame operator, evaluated at x != 0.

    Gamma_ij(x) = (alpha/2pi) delta_ij log|x| - (beta/2pi) x_i x_j / |x|^2.

    Args:
        x: length-2 vector.
        bg: material the operator belongs to.

    Returns:
        Symmetric 2x2 array; Gamma(x) == Gamma(-x).
    """
    x = np.asarray(x, dtype=float)
    r2 = float(x @ x)
    if r2 == 0.0:
        raise ValueError("kelvin_matrix is singular at x = 0")
    alpha, beta = _alpha_beta(bg)
    log_term = alpha / (2.0 * math.pi) * 0.5 * math.log(r2)
    return log_term * np.eye(2) - beta / (2.0 * math.pi) * np.outer(x, x) / r2


def elastic_tensor_apply(bg: LameConstants, a) -> np.ndarray:
    """Apply the isotropic elastic tensor: lam*tr(a)*I + 2*mu*a.

    ``a`` is expected symmetric (a strain); the formula is applied as given.
    """
    a = np.asarray(a, dtype=float)
    return bg.lam * np.trace(a) * np.eye(2) + 2.0 * bg.mu * a
