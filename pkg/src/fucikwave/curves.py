"""Tracing the curves C_k (lower) and D_k (upper) and classifying points against them.

A dual value ``a_hat`` on the ray ``b_hat = r * a_hat`` maps to the plane by

    lower:  a = shift + 1 / (a_hat + mu),   b = shift + 1 / (r a_hat + mu)
    upper:  a = shift - 1 / (a_hat + rho),  b = shift - 1 / (r a_hat + rho)

Only ``r >= 1`` is computed; ``r < 1`` follows from ``a_hat(1/r) = r a_hat(r)``,
which swaps the two coordinates.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import PchipInterpolator

from .dual import Side, make_config
from .exceptions import DomainError, ValidationError
from .maximizer import MaximizerConfig, maximize_ratio
from .spectral import SpectralField, TruncationSpec

logger = logging.getLogger(__name__)

DEFAULT_TRUNC = (16, 16)
ON_BAND = 1e-4
TRUST_RANGE = (1e-8, 1e8)


class Flag(str, enum.Enum):
    OK = "ok"
    MIRRORED = "mirrored"
    REFINED = "refined"
    UNTRUSTED = "untrusted"
    UNCONVERGED = "unconverged"


class Region(str, enum.Enum):
    BELOW_C = "BELOW_C"
    ON_C = "ON_C"
    BETWEEN = "BETWEEN"
    ON_D = "ON_D"
    ABOVE_D = "ABOVE_D"
    OUTSIDE = "OUTSIDE"


@dataclass(frozen=True)
class CurvePoint:
    r: float
    a_hat: float
    a: float
    b: float
    residual: float
    flag: Flag = Flag.OK

    def to_dict(self):
        return {"r": self.r, "a_hat": self.a_hat, "a": self.a, "b": self.b,
                "residual": self.residual, "flag": self.flag.value}


def map_point(side, a_hat, r, cfg):
    """Plane coordinates of the dual value ``a_hat`` on ray ``r``."""
    side = Side(side)
    second = cfg.second_shift
    da, db = a_hat + second, r * a_hat + second
    if not (da > 0.0 and db > 0.0):
        raise DomainError(f"a_hat={a_hat} with r={r} gives a nonpositive denominator")
    if side is Side.LOWER:
        return cfg.shift + 1.0 / da, cfg.shift + 1.0 / db
    return cfg.shift - 1.0 / da, cfg.shift - 1.0 / db


def dual_coordinates(a, b, cfg):
    """Inverse of :func:`map_point`: ``(a_hat, b_hat)`` of a point in the open square.

    Raises :class:`DomainError` outside the square, where a dual coordinate is
    not positive.
    """
    if Side(cfg.side) is Side.LOWER:
        da, db = a - cfg.shift, b - cfg.shift
    else:
        da, db = cfg.shift - a, cfg.shift - b
    if not (da > 0.0 and db > 0.0):
        raise DomainError(f"({a}, {b}) lies outside the square")
    a_hat = 1.0 / da - cfg.second_shift
    b_hat = 1.0 / db - cfg.second_shift
    if not (a_hat > 0.0 and b_hat > 0.0):
        raise DomainError(f"({a}, {b}) lies outside the square")
    return a_hat, b_hat


def in_square(a, b, cfg) -> bool:
    lo, hi = cfg.square
    return lo < a < hi and lo < b < hi


def _flag(res, converged):
    if not TRUST_RANGE[0] <= res.a_hat <= TRUST_RANGE[1]:
        return Flag.UNTRUSTED
    return Flag.OK if converged else Flag.UNCONVERGED


@dataclass
class Curve:
    k: int
    side: Side
    cfg: object
    trunc: TruncationSpec
    points: list
    mcfg: MaximizerConfig = field(default_factory=MaximizerConfig)

    @property
    def eps(self):
        if self.side is Side.LOWER:
            return self.cfg.eps1, self.cfg.eps2
        return self.cfg.eps3, self.cfg.eps4

    @property
    def r(self):
        return np.array([p.r for p in self.points])

    @property
    def a_hat(self):
        return np.array([p.a_hat for p in self.points])

    @property
    def a(self):
        return np.array([p.a for p in self.points])

    @property
    def b(self):
        return np.array([p.b for p in self.points])

    def point_at(self, r, tol=1e-12):
        for p in self.points:
            if abs(p.r - r) <= tol * max(1.0, r):
                return p
        raise KeyError(r)

    def interpolator(self):
        """Monotone cubic interpolant of ``log a_hat`` against ``log r``."""
        return PchipInterpolator(np.log(self.r), np.log(self.a_hat), extrapolate=False)

    def a_hat_at(self, r):
        """Interpolated dual value.

        Past the largest traced ratio ``r a_hat`` is held fixed; below the
        smallest, ``a_hat`` is.  Both match the limits implied by symmetry.
        """
        lr = math.log(r)
        r_lo, r_hi = self.points[0].r, self.points[-1].r
        if r > r_hi:
            return self.points[-1].a_hat * r_hi / r
        if r < r_lo:
            return self.points[0].a_hat
        return float(np.exp(self.interpolator()(lr)))

    def to_dict(self):
        return {
            "k": self.k, "side": self.side.value, "config": self.cfg.to_dict(),
            "trunc": self.trunc.to_dict(), "maximizer": self.mcfg.to_dict(),
            "points": [p.to_dict() for p in self.points],
        }

    @classmethod
    def from_dict(cls, data):
        c = data["config"]
        side = Side(data["side"])
        eps = (c["eps1"], c["eps2"]) if side is Side.LOWER else (c["eps3"], c["eps4"])
        trunc = TruncationSpec(**data["trunc"])
        cfg = make_config(data["k"], side, *eps, trunc=trunc)
        pts = [CurvePoint(p["r"], p["a_hat"], p["a"], p["b"], p["residual"], Flag(p["flag"]))
               for p in data["points"]]
        return cls(data["k"], side, cfg, trunc, pts, MaximizerConfig(**data["maximizer"]))


def default_r_grid(r_max=100.0, n_r=40):
    if not (r_max > 1.0 and n_r >= 2):
        raise ValidationError("need r_max > 1 and n_r >= 2")
    return list(np.logspace(0.0, math.log10(r_max), int(n_r)))


def _bound_violation(lo, hi, rel_tol):
    """True when consecutive results break ``a_hat(r) >= a_hat(r') >= (r / r') a_hat(r)``.

    Both inequalities hold for the exact supremum (monotonicity plus symmetry),
    so a violation means a start missed the global maximum.
    """
    drop = math.log(lo.a_hat) - math.log(hi.a_hat)
    span = math.log(hi.r) - math.log(lo.r)
    return drop < -rel_tol or drop > span + rel_tol


def trace(k, side, r_grid=None, cfg=None, mcfg=None, trunc=None, eps=(0.1, 0.1),
          refine_levels=3, mirror=True):
    """Trace C_k (lower) or D_k (upper) over ``r_grid`` (ascending from 1).

    Each point is warm-started from the previous extremizer.  A pair of
    consecutive values that violates the monotonicity/symmetry bounds triggers
    up to ``refine_levels`` rounds of geometric midpoint insertion, and the
    right-hand point is recomputed from the new warm start.  With ``mirror``
    the points for ``r < 1`` are appended by symmetry.
    """
    side = Side(side)
    trunc = trunc or TruncationSpec.from_bounds(*DEFAULT_TRUNC)
    cfg = cfg or make_config(k, side, *eps, trunc=trunc)
    mcfg = mcfg or MaximizerConfig()
    grid = sorted(float(r) for r in (r_grid if r_grid is not None else default_r_grid()))
    if abs(grid[0] - 1.0) > 1e-12 or any(r <= 0 for r in grid):
        raise ValidationError("r_grid must start at 1")

    fields = {}

    def solve(r, warm, flag=None):
        res = maximize_ratio(cfg, r, trunc, mcfg, warm_start=warm)
        fields[r] = res.v0
        a, b = map_point(side, res.a_hat, r, cfg)
        return CurvePoint(r, res.a_hat, a, b, res.residual, flag or _flag(res, res.converged))

    pts = []
    warm = None
    for r in grid:
        p = solve(r, warm)
        pts.append(p)
        warm = fields[r]

    for _ in range(refine_levels):
        bad = [i for i in range(len(pts) - 1)
               if _bound_violation(pts[i], pts[i + 1], 1e-9)]
        if not bad:
            break
        logger.info("refining %d interval(s)", len(bad))
        for i in reversed(bad):
            lo, hi = pts[i], pts[i + 1]
            kept = fields[hi.r]
            mid = solve(math.sqrt(lo.r * hi.r), fields[lo.r], Flag.REFINED)
            redo = solve(hi.r, fields[mid.r])
            if redo.a_hat <= hi.a_hat:
                redo = hi
                fields[hi.r] = kept
            pts[i + 1:i + 2] = [mid, redo]

    if mirror:
        mirrored = [CurvePoint(1.0 / p.r, p.r * p.a_hat, p.b, p.a, p.residual,
                               Flag.MIRRORED if p.flag is Flag.OK else p.flag)
                    for p in pts if p.r > 1.0]
        pts = sorted(mirrored, key=lambda p: p.r) + pts
    return Curve(int(k), side, cfg, trunc, pts, mcfg)


def mirror_field(v: SpectralField) -> SpectralField:
    """``v -> -v``, which carries an admissible field for ``r`` to one for ``1/r``."""
    return -v


def curve_checks(curve: Curve, margin=1e-6):
    """Invariants of a traced curve as a dict of booleans with worst-case numbers."""
    lam = curve.cfg.lambda_k
    one = curve.point_at(1.0)
    through = abs(one.a - lam) + abs(one.b - lam)
    lo, hi = curve.cfg.square
    inside = all(lo < p.a < hi and lo < p.b < hi for p in curve.points)
    vals = curve.a_hat
    diffs = np.diff(vals)
    nonincreasing = bool(np.all(diffs <= 1e-12 * np.abs(vals[:-1])))
    strict = bool(np.all(-diffs > margin))
    sym = 0.0
    for p in curve.points:
        if p.r > 1.0:
            try:
                q = curve.point_at(1.0 / p.r)
            except KeyError:
                continue
            sym = max(sym, abs(q.a - p.b), abs(q.b - p.a))
    return {
        "through_eigenvalue": through <= 1e-6, "eigen_distance": through,
        "inside_square": inside,
        "nonincreasing": nonincreasing, "strictly_decreasing": strict,
        "symmetric": sym <= 1e-3, "symmetry_error": sym,
    }


def _position(a, b, cfg, reference, band):
    """``(inside, beyond, on)`` for one side; ``beyond`` means the type-I side.

    ``reference(r)`` returns the curve's dual value on ray ``r``.
    """
    if not in_square(a, b, cfg):
        return False, False, False
    a_hat, b_hat = dual_coordinates(a, b, cfg)
    r = b_hat / a_hat
    ref = reference(r)
    ca, cb = map_point(cfg.side, ref, r, cfg)
    on = max(abs(a - ca), abs(b - cb)) <= band
    return True, a_hat > ref and not on, on


def _combine(pos_c, pos_d):
    in_c, below, on_c = pos_c
    in_d, above, on_d = pos_d
    if not (in_c or in_d):
        return Region.OUTSIDE
    if on_c:
        return Region.ON_C
    if on_d:
        return Region.ON_D
    if below:
        return Region.BELOW_C
    if above:
        return Region.ABOVE_D
    return Region.BETWEEN


def classify(a, b, curve_c: Curve = None, curve_d: Curve = None, band=ON_BAND):
    """Region of ``(a, b)`` relative to traced curves C_k and D_k.

    The comparison happens on the ray through the point: beyond C means the
    dual value exceeds the interpolated curve value (the side containing the
    lower-left corner of Q_k), and likewise for D with R_k.  BETWEEN covers
    every other point of Q_k or R_k; OUTSIDE is the complement of both squares.
    When both curves pass within the band, ON_C wins.
    """
    if curve_c is None and curve_d is None:
        raise ValidationError("classify needs at least one curve")
    if not (math.isfinite(a) and math.isfinite(b)):
        raise ValidationError("(a, b) must be finite")
    none = (False, False, False)
    pos_c = _position(a, b, curve_c.cfg, curve_c.a_hat_at, band) if curve_c else none
    pos_d = _position(a, b, curve_d.cfg, curve_d.a_hat_at, band) if curve_d else none
    return _combine(pos_c, pos_d)


def classify_point(a, b, k, eps_lower=(0.1, 0.1), eps_upper=(0.1, 0.1), trunc=None,
                   mcfg=None, band=ON_BAND):
    """Like :func:`classify`, but solves for the curve value on the point's ray directly."""
    if not (math.isfinite(a) and math.isfinite(b)):
        raise ValidationError("(a, b) must be finite")
    trunc = trunc or TruncationSpec.from_bounds(*DEFAULT_TRUNC)
    mcfg = mcfg or MaximizerConfig(n_starts=8)
    out = []
    for side, eps in ((Side.LOWER, eps_lower), (Side.UPPER, eps_upper)):
        cfg = make_config(k, side, *eps, trunc=trunc)

        def reference(r, cfg=cfg):
            return maximize_ratio(cfg, r, trunc, mcfg).a_hat

        out.append(_position(a, b, cfg, reference, band))
    return _combine(*out)


def spectrum_point_check(a, b, cfg, trunc=None, mcfg=None, slack=1e-3):
    """Dual inequality for a known spectrum point ``(a, b)`` inside the square.

    No nontrivial solution exists above the supremum on its ray, so the point's
    dual value must satisfy ``a_star <= a_hat(r_star) + slack``.
    """
    trunc = trunc or TruncationSpec.from_bounds(*DEFAULT_TRUNC)
    a_star, b_star = dual_coordinates(a, b, cfg)
    r_star = b_star / a_star
    res = maximize_ratio(cfg, r_star, trunc, mcfg or MaximizerConfig())
    return {"a": a, "b": b, "a_star": a_star, "r_star": r_star, "a_hat": res.a_hat,
            "residual": res.residual, "holds": a_star <= res.a_hat + slack}
