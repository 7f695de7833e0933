"""Eigenbasis of the wave operator on ]0, pi[ x T.

Functions are stored as coefficient vectors over the orthonormal family

    phi_(m,n) = c_n sin(ms) cos(nt),   psi_(m,n) = (sqrt(2)/pi) sin(ms) sin(nt)

with c_n = sqrt(2)/pi for n >= 1 and c_0 = 1/pi, so that the coefficient
2-norm is the L2 norm on [0, pi] x [0, 2 pi].  Every mode is an eigenfunction
of u_tt - u_ss with eigenvalue m^2 - n^2.

Coefficient order is fixed: modes sorted by (m, n, parity) with COS before
SIN.  Reshaped to ``(m_max, 2*n_max + 1)`` the columns run over
``(0,cos), (1,cos), (1,sin), (2,cos), ...``; synthesis is then the matrix
product ``S @ C @ T.T`` with tabulated sine and trigonometric factors.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .exceptions import NeighborUnresolved, ValidationError


class Parity(str, enum.Enum):
    COS = "cos"
    SIN = "sin"


@dataclass(frozen=True, order=True)
class ModeIndex:
    m: int
    n: int
    parity: Parity = Parity.COS

    def __post_init__(self):
        object.__setattr__(self, "parity", Parity(self.parity))
        if self.m < 1 or self.n < 0:
            raise ValidationError(f"invalid mode ({self.m}, {self.n})")
        if self.parity is Parity.SIN and self.n == 0:
            raise ValidationError("psi_(m,0) vanishes identically")

    @property
    def eigenvalue(self) -> int:
        return self.m * self.m - self.n * self.n

    def sort_key(self):
        return (self.m, self.n, 0 if self.parity is Parity.COS else 1)


def eigenvalue(mode: ModeIndex) -> int:
    return mode.m * mode.m - mode.n * mode.n


@dataclass(frozen=True)
class TruncationSpec:
    """Mode box ``1 <= m <= m_max``, ``0 <= n <= n_max`` plus the collocation grid.

    ``grid_t`` must also exceed ``2 * n_max`` so the periodic trapezoid rule is
    exact on products of retained modes.
    """

    m_max: int
    n_max: int
    grid_s: int
    grid_t: int
    oversample: float = 2.0

    def __post_init__(self):
        if self.m_max < 1 or self.n_max < 0:
            raise ValidationError("need m_max >= 1 and n_max >= 0")
        if self.oversample < 1:
            raise ValidationError("oversample must be >= 1")
        if self.grid_s < self.oversample * self.m_max or self.grid_s < self.m_max:
            raise ValidationError(
                f"grid_s={self.grid_s} below oversample * m_max")
        if (self.grid_t < self.oversample * 2 * self.n_max
                or self.grid_t < 2 * self.n_max + 1):
            raise ValidationError(
                f"grid_t={self.grid_t} below oversample * 2 * n_max")

    @classmethod
    def from_bounds(cls, m_max: int, n_max: int, oversample: float = 2.0):
        grid_s = max(math.ceil(oversample * m_max), m_max)
        grid_t = max(math.ceil(oversample * 2 * n_max), 2 * n_max + 1)
        return cls(m_max, n_max, grid_s, grid_t, oversample)

    @property
    def n_temporal(self) -> int:
        return 2 * self.n_max + 1

    @property
    def dim(self) -> int:
        return self.m_max * self.n_temporal

    @property
    def quad_weight(self) -> float:
        return (math.pi / (self.grid_s + 1)) * (2.0 * math.pi / self.grid_t)

    def contains(self, other: "TruncationSpec") -> bool:
        """True when every mode of ``other`` is also a mode of ``self``."""
        return self.m_max >= other.m_max and self.n_max >= other.n_max

    def to_dict(self):
        return {"m_max": self.m_max, "n_max": self.n_max, "grid_s": self.grid_s,
                "grid_t": self.grid_t, "oversample": self.oversample}


class Basis:
    """Tabulated basis for one truncation; obtain through :func:`basis_for`."""

    def __init__(self, trunc: TruncationSpec):
        self.trunc = trunc
        m = np.arange(1, trunc.m_max + 1)
        self.s_nodes = np.pi * np.arange(1, trunc.grid_s + 1) / (trunc.grid_s + 1)
        self.t_nodes = 2.0 * np.pi * np.arange(trunc.grid_t) / trunc.grid_t
        self.S = np.sqrt(2.0 / np.pi) * np.sin(np.outer(self.s_nodes, m))

        T = np.empty((trunc.grid_t, trunc.n_temporal))
        T[:, 0] = 1.0 / np.sqrt(2.0 * np.pi)
        for n in range(1, trunc.n_max + 1):
            T[:, 2 * n - 1] = np.cos(n * self.t_nodes) / np.sqrt(np.pi)
            T[:, 2 * n] = np.sin(n * self.t_nodes) / np.sqrt(np.pi)
        self.T = T

        self.ws = np.pi / (trunc.grid_s + 1)
        self.wt = 2.0 * np.pi / trunc.grid_t
        self.weight = self.ws * self.wt

        modes = []
        for mm in range(1, trunc.m_max + 1):
            modes.append(ModeIndex(mm, 0, Parity.COS))
            for n in range(1, trunc.n_max + 1):
                modes.append(ModeIndex(mm, n, Parity.COS))
                modes.append(ModeIndex(mm, n, Parity.SIN))
        self.modes = tuple(modes)
        self.m_of = np.array([md.m for md in modes])
        self.n_of = np.array([md.n for md in modes])
        self.eigenvalues = (self.m_of ** 2 - self.n_of ** 2).astype(float)
        self.kernel_mask = self.m_of == self.n_of
        self.sin_mask = np.array([md.parity is Parity.SIN for md in modes])
        for arr in (self.S, self.T, self.m_of, self.n_of, self.eigenvalues,
                    self.kernel_mask, self.sin_mask):
            arr.flags.writeable = False

    def evaluate(self, coeffs, s, t) -> np.ndarray:
        """Field values at arbitrary points ``(s[i], t[i])`` by direct summation."""
        s = np.atleast_1d(np.asarray(s, dtype=float))
        t = np.atleast_1d(np.asarray(t, dtype=float))
        nt = np.outer(t, self.n_of)
        scale = np.where(self.n_of == 0, 1.0 / np.pi, np.sqrt(2.0) / np.pi)
        trig = np.where(self.sin_mask, np.sin(nt), np.cos(nt))
        return (scale * np.sin(np.outer(s, self.m_of)) * trig) @ np.asarray(coeffs, dtype=float)

    def synth(self, coeffs: np.ndarray) -> np.ndarray:
        C = np.asarray(coeffs, dtype=float).reshape(self.trunc.m_max,
                                                    self.trunc.n_temporal)
        return self.S @ C @ self.T.T

    def synth_many(self, coeffs: np.ndarray) -> np.ndarray:
        """Synthesize a stack ``(k, dim)`` into ``(k, grid_s, grid_t)``."""
        C = np.asarray(coeffs, dtype=float).reshape(-1, self.trunc.m_max,
                                                    self.trunc.n_temporal)
        return np.einsum("im,kmq,jq->kij", self.S, C, self.T, optimize=True)

    def analyze(self, values: np.ndarray) -> np.ndarray:
        V = np.asarray(values, dtype=float)
        return (self.weight * (self.S.T @ V @ self.T)).ravel()

    def integrate(self, values: np.ndarray) -> float:
        return float(self.weight * np.sum(values))

    def weighted_gram(self, weights: np.ndarray) -> np.ndarray:
        """Matrix of ``c -> analyze(weights * synth(c))``; symmetric.

        Built through the tensor structure of the grid in
        O(grid_s * n_temporal^2 * (grid_t + m_max^2)) work.
        """
        tr = self.trunc
        X = np.matmul(self.T.T[None, :, :], weights[:, :, None] * self.T[None, :, :])
        SS = (self.S[:, :, None] * self.S[:, None, :]).reshape(tr.grid_s, -1)
        A = (SS.T @ X.reshape(tr.grid_s, -1)).reshape(
            tr.m_max, tr.m_max, tr.n_temporal, tr.n_temporal)
        A = A.transpose(0, 2, 1, 3).reshape(tr.dim, tr.dim)
        return self.weight * A

    def index(self, mode: ModeIndex) -> int:
        mode = mode if isinstance(mode, ModeIndex) else ModeIndex(*mode)
        if mode.m > self.trunc.m_max or mode.n > self.trunc.n_max:
            raise ValidationError(f"{mode} outside truncation")
        q = 0 if mode.n == 0 else 2 * mode.n - (1 if mode.parity is Parity.COS else 0)
        return (mode.m - 1) * self.trunc.n_temporal + q

    def embed(self, coeffs: np.ndarray, source: TruncationSpec) -> np.ndarray:
        """Copy coefficients from a smaller (nested) truncation into this one."""
        if not self.trunc.contains(source):
            raise ValidationError("source truncation is not nested in target")
        out = np.zeros((self.trunc.m_max, self.trunc.n_temporal))
        src = np.asarray(coeffs).reshape(source.m_max, source.n_temporal)
        out[:source.m_max, :source.n_temporal] = src
        return out.ravel()


@lru_cache(maxsize=32)
def basis_for(trunc: TruncationSpec) -> Basis:
    return Basis(trunc)


@dataclass(frozen=True, eq=False)
class SpectralField:
    """A truncated element of L2 given by its coefficients in the fixed mode order."""

    trunc: TruncationSpec
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float)
        if c.shape != (self.trunc.dim,):
            raise ValidationError(
                f"expected {self.trunc.dim} coefficients, got {c.shape}")
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def zeros(cls, trunc):
        return cls(trunc, np.zeros(trunc.dim))

    @classmethod
    def unit(cls, trunc, mode):
        c = np.zeros(trunc.dim)
        c[basis_for(trunc).index(mode)] = 1.0
        return cls(trunc, c)

    @property
    def modes(self):
        return basis_for(self.trunc).modes

    def coefficient(self, mode) -> float:
        return float(self.coeffs[basis_for(self.trunc).index(mode)])

    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    def _check(self, other):
        if other.trunc != self.trunc:
            raise ValidationError("fields live on different truncations")

    def __add__(self, other):
        self._check(other)
        return SpectralField(self.trunc, self.coeffs + other.coeffs)

    def __sub__(self, other):
        self._check(other)
        return SpectralField(self.trunc, self.coeffs - other.coeffs)

    def __mul__(self, scalar):
        return SpectralField(self.trunc, float(scalar) * self.coeffs)

    __rmul__ = __mul__

    def __neg__(self):
        return SpectralField(self.trunc, -self.coeffs)

    def to_dict(self):
        return {
            "trunc": self.trunc.to_dict(),
            "modes": [[md.m, md.n, md.parity.value] for md in self.modes],
            "coeffs": [float(x) for x in self.coeffs],
        }

    @classmethod
    def from_dict(cls, data):
        trunc = TruncationSpec(**data["trunc"])
        expected = [[md.m, md.n, md.parity.value] for md in basis_for(trunc).modes]
        if [list(x) for x in data["modes"]] != expected:
            raise ValidationError("mode list does not match the fixed order")
        return cls(trunc, np.asarray(data["coeffs"], dtype=float))


@dataclass(frozen=True, eq=False)
class GridField:
    trunc: TruncationSpec
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.shape != (self.trunc.grid_s, self.trunc.grid_t):
            raise ValidationError(f"grid shape {v.shape} does not match truncation")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    def quad_norm(self) -> float:
        b = basis_for(self.trunc)
        return math.sqrt(b.integrate(self.values ** 2))


def synthesize(field: SpectralField) -> GridField:
    return GridField(field.trunc, basis_for(field.trunc).synth(field.coeffs))


def analyze(grid: GridField) -> SpectralField:
    return SpectralField(grid.trunc, basis_for(grid.trunc).analyze(grid.values))


def split(field: SpectralField):
    """Return ``(x, y)`` with ``x`` in the range part (m != n) and ``y`` in the kernel."""
    mask = basis_for(field.trunc).kernel_mask
    y = np.where(mask, field.coeffs, 0.0)
    x = np.where(mask, 0.0, field.coeffs)
    return SpectralField(field.trunc, x), SpectralField(field.trunc, y)


class SpectrumLevel(NamedTuple):
    value: int
    multiplicity: int
    modes: tuple


def enumerate_spectrum(m_bound: int, n_bound: int) -> list:
    if m_bound < 1 or n_bound < 1:
        raise ValidationError("bounds must be >= 1")
    levels = {}
    for m in range(1, m_bound + 1):
        for n in range(0, n_bound + 1):
            lam = m * m - n * n
            bucket = levels.setdefault(lam, [])
            bucket.append(ModeIndex(m, n, Parity.COS))
            if n >= 1:
                bucket.append(ModeIndex(m, n, Parity.SIN))
    return [SpectrumLevel(lam, len(ms), tuple(sorted(ms)))
            for lam, ms in sorted(levels.items())]


def _resolving_bound(value: int) -> int:
    # Any (m, n) with m^2 - n^2 = x != 0 has m, n <= (|x| + 1) / 2.
    return (abs(value) + 2) // 2


def is_eigenvalue(value: int) -> bool:
    """Closed-form membership: odd except -1, or a multiple of 4 except -4."""
    value = int(value)
    if value % 2:
        return value != -1
    return value % 4 == 0 and value != -4


def neighbors(lambda_k: int, bounds=None):
    """Adjacent distinct eigenvalues ``(lambda_{k-1}, lambda_{k+1})``.

    The neighbours are read off an enumeration over ``bounds``; the margin rule
    requires the box to contain every mode that could realise any value between
    the two neighbours, otherwise :class:`NeighborUnresolved` is raised.
    """
    lambda_k = int(lambda_k)
    if bounds is None:
        b = _resolving_bound(abs(lambda_k) + 4) + 1
        bounds = (b, b)
    m_bound, n_bound = bounds
    values = [lev.value for lev in enumerate_spectrum(m_bound, n_bound)]
    if lambda_k not in values:
        raise NeighborUnresolved(f"{lambda_k} not attained within bounds {bounds}")
    i = values.index(lambda_k)
    if i == 0 or i == len(values) - 1:
        raise NeighborUnresolved(f"bounds {bounds} too small around {lambda_k}")
    lo, hi = values[i - 1], values[i + 1]
    need = max(_resolving_bound(lo), _resolving_bound(hi))
    if min(m_bound, n_bound) < need:
        raise NeighborUnresolved(
            f"bounds {bounds} cannot certify neighbours of {lambda_k}; need {need}")
    return lo, hi


def eigenvalue_by_index(k: int) -> int:
    """The k-th eigenvalue in increasing order with lambda_0 = 0."""
    k = int(k)
    value, step = 0, (1 if k > 0 else -1)
    for _ in range(abs(k)):
        value += step
        while not is_eigenvalue(value):
            value += step
    return value


def index_of_eigenvalue(value: int) -> int:
    value = int(value)
    if not is_eigenvalue(value):
        raise ValidationError(f"{value} is not an eigenvalue of the wave operator")
    step = 1 if value > 0 else -1
    return step * sum(1 for x in range(step, value + step, step) if is_eigenvalue(x))
