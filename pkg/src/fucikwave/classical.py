"""Explicit Fucik curves of the two one-dimensional factors, with shooting oracles.

Separable fields ``S(s)`` and ``sin(s) T(t)`` reduce the wave problem to
``-S'' = a S+ - b S-`` on ``]0, pi[`` with Dirichlet ends, and to
``T'' + T = a T+ - b T-`` on the circle.  Between sign changes both equations
are harmonic oscillators, so arch lengths are ``pi / sqrt(a)`` (resp.
``pi / sqrt(1 - a)``) and the curves follow from adding arches.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import minimize_scalar

from .exceptions import DomainError, IntegratorFailure

RTOL = 1e-10
ATOL = 1e-12


class Family(str, enum.Enum):
    DIRICHLET = "dirichlet"
    PERIODIC = "periodic"


@dataclass(frozen=True)
class OdePoint:
    family: Family
    index: int
    a: float
    b: float
    branch: tuple
    on_kernel: bool = False

    @property
    def eigenvalue(self) -> int:
        """Point where the family meets the diagonal: m^2 or 1 - n^2."""
        if self.family is Family.DIRICHLET:
            return self.index ** 2
        return 1 - self.index ** 2

    def to_dict(self):
        return {"family": self.family.value, "index": self.index, "a": self.a, "b": self.b,
                "branch": list(self.branch), "on_kernel": self.on_kernel}


def dirichlet_branches(m):
    """Admissible (positive, negative) arch counts summing to ``m``."""
    if m < 1:
        raise DomainError(f"m={m} must be a positive integer")
    out = [(p, m - p) for p in range(m + 1) if abs(2 * p - m) <= 1]
    return out


def _check_branch(m, branch):
    p, q = (int(x) for x in branch)
    if p < 0 or q < 0 or p + q != m or abs(p - q) > 1:
        raise DomainError(f"branch {branch} is not an arch split of m={m}")
    return p, q


def dirichlet_b_of_a(m, branch, a):
    """``b`` with ``p pi / sqrt(a) + q pi / sqrt(b) = pi`` on the branch ``(p, q)``.

    For ``m = 1`` the family is the pair of lines ``a = 1`` and ``b = 1``: the
    negative branch ``(0, 1)`` returns 1 for every ``a``, while the positive
    branch ``(1, 0)`` does not define ``b`` as a function of ``a``.
    """
    p, q = _check_branch(m, branch)
    a = float(a)
    if not a > 0.0:
        raise DomainError(f"a={a} must be positive")
    if p == 0:
        return 1.0
    if q == 0:
        raise DomainError("the branch (1, 0) is the vertical line a = 1")
    slack = 1.0 - p / math.sqrt(a)
    if not slack > 0.0:
        raise DomainError(f"a={a} must exceed {p * p} on branch {branch}")
    return (q / slack) ** 2


def periodic_b_of_a(n, a):
    """``b`` with ``n (pi / sqrt(1 - a) + pi / sqrt(1 - b)) = 2 pi``."""
    n = int(n)
    if n < 1:
        raise DomainError(f"n={n} must be a positive integer")
    a = float(a)
    if not a < 1.0:
        raise DomainError(f"a={a} must be below 1")
    rest = 2.0 / n - 1.0 / math.sqrt(1.0 - a)
    if not rest > 0.0:
        raise DomainError(f"a={a} leaves no room for a negative arch at n={n}")
    return 1.0 - 1.0 / (rest * rest)


def dirichlet_point(m, branch, a) -> OdePoint:
    return OdePoint(Family.DIRICHLET, int(m), float(a), dirichlet_b_of_a(m, branch, a),
                    tuple(int(x) for x in branch))


def periodic_point(n, a) -> OdePoint:
    n = int(n)
    return OdePoint(Family.PERIODIC, n, float(a), periodic_b_of_a(n, a), (n, n),
                    on_kernel=(n == 1))


def _piecewise_harmonic(k_pos, k_neg, y0, t_end):
    """Integrate ``y'' = -k y`` with ``k = k_pos`` where ``y > 0`` and ``k_neg`` where ``y < 0``.

    Integration restarts at every zero of ``y`` so the right side is linear
    on each segment.  Returns the final state and the interior zero times.
    """
    t0 = 0.0
    y = np.asarray(y0, dtype=float)
    zeros = []
    for _ in range(10_000):
        if t0 >= t_end:
            break
        if y[0] != 0.0:
            positive = y[0] > 0.0
        else:
            positive = y[1] > 0.0
        k = k_pos if positive else k_neg

        def rhs(_t, z, k=k):
            return (z[1], -k * z[0])

        def crossing(_t, z):
            return z[0]

        crossing.terminal = True
        crossing.direction = -1.0 if positive else 1.0
        sol = solve_ivp(rhs, (t0, t_end), y, method="RK45", rtol=RTOL, atol=ATOL,
                        events=crossing)
        if sol.status == -1:
            raise IntegratorFailure(sol.message)
        if sol.status == 1:
            t0 = float(sol.t_events[0][0])
            y = np.array([0.0, sol.y_events[0][0][1]])
            if t0 < t_end * (1.0 - 1e-8):
                zeros.append(t0)
        else:
            return sol.y[:, -1], zeros
    else:
        raise IntegratorFailure("too many sign changes")
    return y, zeros


def shoot_dirichlet(a, b):
    """``(S(pi), interior sign changes)`` for ``S'' = -a S+ + b S-``, ``S(0) = 0``, ``S'(0) = 1``."""
    a, b = float(a), float(b)
    if not (a > 0.0 and b > 0.0):
        raise DomainError("shooting needs a, b > 0")
    y, zeros = _piecewise_harmonic(a, b, (0.0, 1.0), math.pi)
    return float(y[0]), len(zeros)


def _periodic_miss(k_pos, k_neg, theta):
    T0, dT0 = math.cos(theta), math.sin(theta)
    energy = dT0 * dT0 + (k_pos if T0 > 0 else k_neg) * T0 * T0
    y0 = np.array([T0, dT0]) / math.sqrt(energy)
    y, _ = _piecewise_harmonic(k_pos, k_neg, y0, 2.0 * math.pi)
    return float(np.hypot(y[0] - y0[0], y[1] - y0[1]))


def shoot_periodic(a, b, n_theta=4):
    """Smallest return mismatch after ``2 pi`` over unit-energy initial phases."""
    a, b = float(a), float(b)
    if not (a < 1.0 and b < 1.0):
        raise DomainError("shooting needs a, b < 1")
    k_pos, k_neg = 1.0 - a, 1.0 - b
    thetas = np.linspace(0.0, 2.0 * math.pi, n_theta, endpoint=False)
    misses = [_periodic_miss(k_pos, k_neg, th) for th in thetas]
    i = int(np.argmin(misses))
    h = math.pi / n_theta
    out = minimize_scalar(lambda th: _periodic_miss(k_pos, k_neg, th),
                          bounds=(thetas[i] - h, thetas[i] + h), method="bounded",
                          options={"xatol": 1e-4})
    return float(min(misses[i], out.fun))


def sample_points(family, index, n_samples, seed=0):
    """Random on-curve points of one family member, a drawn from its admissible range."""
    family = Family(family)
    rng = np.random.default_rng(seed)
    pts = []
    if family is Family.DIRICHLET:
        branches = [br for br in dirichlet_branches(index) if br[0] and br[1]]
        if not branches:
            # m = 1: only the horizontal line b = 1 is a graph over a
            branches = [(0, 1)]
        for i in range(n_samples):
            br = branches[i % len(branches)]
            lo = (br[0] + 0.05) ** 2 if br[0] else 0.05
            a = float(rng.uniform(lo, lo + 4.0 * index * index + 4.0))
            pts.append(dirichlet_point(index, br, a))
    else:
        # admissible a: 1/sqrt(1 - a) < 2/n, i.e. a < 1 - n^2/4
        hi = 1.0 - index * index / 4.0 - 0.05
        for _ in range(n_samples):
            a = float(rng.uniform(hi - 4.0 * index * index - 4.0, hi))
            pts.append(periodic_point(index, a))
    return pts


def default_branch(m):
    """Positive-first split for ``m >= 2``; the horizontal line ``b = 1`` for ``m = 1``."""
    if m == 1:
        return (0, 1)
    return ((m + 1) // 2, m // 2)


def shooting_miss(point: OdePoint) -> float:
    """Shooting residual of a family point.

    Dirichlet shooting starts with a positive arch, so a branch with more
    negative arches is checked through ``S -> -S``, which swaps ``a`` and ``b``.
    """
    if point.family is Family.PERIODIC:
        return shoot_periodic(point.a, point.b)
    p, q = point.branch
    if p == 0:
        return abs(shoot_dirichlet(point.b, point.a)[0])
    if p >= q:
        return abs(shoot_dirichlet(point.a, point.b)[0])
    return abs(shoot_dirichlet(point.b, point.a)[0])


def family_curve(family, index, a_values, branch=None):
    """On-curve points over ``a_values``; inadmissible abscissae are skipped."""
    family = Family(family)
    out = []
    for a in a_values:
        try:
            if family is Family.DIRICHLET:
                out.append(dirichlet_point(index, branch or default_branch(index), a))
            else:
                out.append(periodic_point(index, a))
        except DomainError:
            continue
    return out
