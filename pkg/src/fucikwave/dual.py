"""Shifted dual operators and the quadratic/positive-part functionals.

The lower problem uses the resolvent ``L = (box - (lambda_{k-1}+eps1))^{-1}``
followed by the second shift ``mu``; the upper problem uses
``M = (lambda_{k+1}-eps3 - box)^{-1}`` and ``rho``.  Both are diagonal in the
eigenbasis, so every operator here is a coefficient-wise scaling.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .exceptions import ConditioningFailure, InvalidEps, ZeroEigenvalue
from .spectral import SpectralField, TruncationSpec, basis_for, eigenvalue_by_index, neighbors

DEFAULT_DELTA_BOX = (32, 32)


class Side(str, enum.Enum):
    LOWER = "lower"
    UPPER = "upper"


def _delta(shift, bounds):
    m = np.arange(1, 4 * bounds[0] + 1)[:, None]
    n = np.arange(0, 4 * bounds[1] + 1)[None, :]
    return float(np.min(np.abs(m * m - n * n - shift)))


@dataclass(frozen=True)
class ShiftConfigLower:
    k: int
    lambda_k: int
    lambda_km1: int
    eps1: float
    eps2: float
    mu: float
    nu: float
    delta: float
    delta_bounds: tuple = DEFAULT_DELTA_BOX

    side = Side.LOWER

    @property
    def shift(self) -> float:
        """lambda_{k-1} + eps1, the first shift."""
        return self.lambda_km1 + self.eps1

    @property
    def second_shift(self) -> float:
        return self.mu

    @property
    def kernel_value(self) -> float:
        return self.nu

    @property
    def top_value(self) -> float:
        """Greatest eigenvalue of L - mu, attained on the lambda_k modes."""
        return 1.0 / (self.lambda_k - self.shift) - self.mu

    @property
    def square(self):
        """Open interval whose square is Q_k."""
        return self.shift, self.shift + 1.0 / self.mu

    def resolvent_denominator(self, eigenvalues):
        return np.asarray(eigenvalues, dtype=float) - self.shift

    def with_eps(self, eps1, eps2):
        return validate_lower(self.k, eps1, eps2, bounds=self.delta_bounds)

    def to_dict(self):
        return {"side": "lower", "k": self.k, "lambda_k": self.lambda_k,
                "lambda_km1": self.lambda_km1, "eps1": self.eps1, "eps2": self.eps2,
                "mu": self.mu, "nu": self.nu, "delta": self.delta}


@dataclass(frozen=True)
class ShiftConfigUpper:
    k: int
    lambda_k: int
    lambda_kp1: int
    eps3: float
    eps4: float
    rho: float
    sigma: float
    delta: float
    delta_bounds: tuple = DEFAULT_DELTA_BOX

    side = Side.UPPER

    @property
    def shift(self) -> float:
        """lambda_{k+1} - eps3."""
        return self.lambda_kp1 - self.eps3

    @property
    def second_shift(self) -> float:
        return self.rho

    @property
    def kernel_value(self) -> float:
        return self.sigma

    @property
    def top_value(self) -> float:
        return 1.0 / (self.shift - self.lambda_k) - self.rho

    @property
    def square(self):
        """Open interval whose square is R_k."""
        return self.shift - 1.0 / self.rho, self.shift

    def resolvent_denominator(self, eigenvalues):
        return self.shift - np.asarray(eigenvalues, dtype=float)

    def with_eps(self, eps3, eps4):
        return validate_upper(self.k, eps3, eps4, bounds=self.delta_bounds)

    def to_dict(self):
        return {"side": "upper", "k": self.k, "lambda_k": self.lambda_k,
                "lambda_kp1": self.lambda_kp1, "eps3": self.eps3, "eps4": self.eps4,
                "rho": self.rho, "sigma": self.sigma, "delta": self.delta}


def _bounds_of(trunc, bounds):
    if bounds is not None:
        return tuple(bounds)
    if trunc is not None:
        return (trunc.m_max, trunc.n_max)
    return DEFAULT_DELTA_BOX


def validate_lower(k, eps1, eps2, trunc: TruncationSpec = None, bounds=None):
    """Build the lower shift configuration for index ``k`` and check every constraint.

    ``delta`` is the smallest divisor ``|m^2 - n^2 - lambda_{k-1} - eps1|`` over
    the box four times ``bounds`` (the truncation box by default).
    """
    k = int(k)
    if k == 0:
        raise ZeroEigenvalue("the curves are defined only through nonzero eigenvalues")
    lam = eigenvalue_by_index(k)
    lo, _ = neighbors(lam)
    gap = lam - lo
    if not 0.0 < eps1 < gap:
        raise InvalidEps(f"eps1={eps1} must lie in (0, {gap})")
    base = max(0.0, -1.0 / (lo + eps1))
    eps2_max = 1.0 / (gap - eps1) - base
    if not 0.0 < eps2 < eps2_max:
        raise InvalidEps(f"eps2={eps2} must lie in (0, {eps2_max:.17g})")
    mu = base + eps2
    nu = -1.0 / (lo + eps1) - mu
    box = _bounds_of(trunc, bounds)
    delta = _delta(lo + eps1, box)
    if not delta > 0.0:
        raise ConditioningFailure("shift coincides with an eigenvalue")
    return ShiftConfigLower(k, lam, lo, float(eps1), float(eps2), mu, nu, delta, box)


def validate_upper(k, eps3, eps4, trunc: TruncationSpec = None, bounds=None):
    k = int(k)
    if k == 0:
        raise ZeroEigenvalue("the curves are defined only through nonzero eigenvalues")
    lam = eigenvalue_by_index(k)
    _, hi = neighbors(lam)
    gap = hi - lam
    if not 0.0 < eps3 < gap:
        raise InvalidEps(f"eps3={eps3} must lie in (0, {gap})")
    base = max(0.0, 1.0 / (hi - eps3))
    eps4_max = 1.0 / (gap - eps3) - base
    if not 0.0 < eps4 < eps4_max:
        raise InvalidEps(f"eps4={eps4} must lie in (0, {eps4_max:.17g})")
    rho = base + eps4
    sigma = 1.0 / (hi - eps3) - rho
    box = _bounds_of(trunc, bounds)
    delta = _delta(hi - eps3, box)
    if not delta > 0.0:
        raise ConditioningFailure("shift coincides with an eigenvalue")
    return ShiftConfigUpper(k, lam, hi, float(eps3), float(eps4), rho, sigma, delta, box)


def make_config(k, side, eps_a=0.1, eps_b=0.1, trunc=None, bounds=None):
    side = Side(side)
    if side is Side.LOWER:
        return validate_lower(k, eps_a, eps_b, trunc=trunc, bounds=bounds)
    return validate_upper(k, eps_a, eps_b, trunc=trunc, bounds=bounds)


def resolvent_diagonal(cfg, trunc: TruncationSpec) -> np.ndarray:
    """Coefficient multipliers of L (lower) or M (upper) on ``trunc``."""
    den = cfg.resolvent_denominator(basis_for(trunc).eigenvalues)
    tiny = np.abs(den) < cfg.delta * (1.0 - 1e-12)
    if np.any(tiny):
        raise ConditioningFailure(
            f"divisor {float(np.min(np.abs(den)))} below delta={cfg.delta}")
    return 1.0 / den


def shifted_diagonal(cfg, trunc: TruncationSpec) -> np.ndarray:
    """Diagonal of L - mu (or M - rho)."""
    return resolvent_diagonal(cfg, trunc) - cfg.second_shift


def apply_L(v: SpectralField, cfg: ShiftConfigLower) -> SpectralField:
    return SpectralField(v.trunc, resolvent_diagonal(cfg, v.trunc) * v.coeffs)


def apply_M(v: SpectralField, cfg: ShiftConfigUpper) -> SpectralField:
    return SpectralField(v.trunc, resolvent_diagonal(cfg, v.trunc) * v.coeffs)


def apply_resolvent(v: SpectralField, cfg) -> SpectralField:
    return SpectralField(v.trunc, resolvent_diagonal(cfg, v.trunc) * v.coeffs)


def F_value_grad(v: SpectralField, cfg):
    d = shifted_diagonal(cfg, v.trunc)
    c = v.coeffs
    return float(np.dot(d * c, c)), SpectralField(v.trunc, 2.0 * d * c)


def positive_part_weights(values, r):
    """Pointwise weight 1 where v > 0 and r where v <= 0; v^+ - r v^- = weights * v."""
    return np.where(values > 0.0, 1.0, r)


def g_value_grad_array(basis, coeffs, r):
    """``(G, gradG, grid values)`` for a raw coefficient vector."""
    V = basis.synth(coeffs)
    vp = np.maximum(V, 0.0)
    vm = np.maximum(-V, 0.0)
    G = basis.weight * (np.sum(vp * vp) + r * np.sum(vm * vm))
    grad = 2.0 * basis.analyze(vp - r * vm)
    return float(G), grad, V


def G_value_grad(v: SpectralField, r: float):
    if not r > 0.0:
        raise InvalidEps(f"r={r} must be positive")
    G, grad, _ = g_value_grad_array(basis_for(v.trunc), v.coeffs, float(r))
    return G, SpectralField(v.trunc, grad)

