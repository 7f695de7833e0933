"""Dual variational solver for ``box u = a u+ - b u- + p(s, t, u)`` in type-I regions.

Lower side: with ``a' = a - shift`` and ``b' = b - shift`` put

    J'(u) = a' u+ - b' u- + p(s, t, u),

so the equation reads ``(box - shift) u = J'(u)``.  Writing ``v = J'(u)`` gives
``u = L v = (J*)'(v)`` and ``v`` is a critical point of

    I(v) = 1/2 <(L - mu) v, v> - integral [J*(v) - mu v^2 / 2].

The upper side is identical after ``a' = shift - a``, ``b' = shift - b``,
``p -> -p`` and ``L, mu -> M, rho``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .dual import Side, make_config, resolvent_diagonal
from .exceptions import (BracketFailure, HypothesisViolated, NoConvergence, RegionError,
                         ValidationError)
from .expr import parse_p
from .maximizer import MaximizerConfig, maximize_ratio
from .spectral import ModeIndex, Parity, SpectralField, TruncationSpec, basis_for

logger = logging.getLogger(__name__)

EPS_FLOOR = 1e-4
_GL_X, _GL_W = np.polynomial.legendre.leggauss(20)


def _ones_like(*arrays):
    return np.zeros(np.broadcast(*arrays).shape)


@dataclass(frozen=True)
class NonlinearitySpec:
    """A perturbation ``p(s, t, u)``, vectorized over numpy arrays.

    ``dp`` (derivative in ``u``) and ``P`` (antiderivative from 0) are optional;
    when missing they fall back to central differences and Gauss-Legendre
    quadrature.
    """

    name: str
    p: object
    dp: object = None
    P: object = None
    u_probe_range: tuple = (-50.0, 50.0)
    derivative_bounds: tuple = None

    def __call__(self, s, t, u):
        return self.p(s, t, u)

    def derivative(self, s, t, u):
        if self.dp is not None:
            return self.dp(s, t, u)
        u = np.asarray(u, dtype=float)
        h = 1e-6 * (1.0 + np.abs(u))
        return (self.p(s, t, u + h) - self.p(s, t, u - h)) / (2.0 * h)

    def antiderivative(self, s, t, u):
        if self.P is not None:
            return self.P(s, t, u)
        return _quad_antiderivative(self.p, s, t, u)

    def sublinearity_probe(self, levels=(1e2, 1e3, 1e4), n_nodes=16):
        """Max of ``|p| / |u|`` over an (s, t) lattice at ``u = +-level``."""
        s, t = _lattice(n_nodes)
        out = []
        for lev in levels:
            vals = [np.max(np.abs(self.p(s, t, np.full(s.shape, sg * lev)))) / lev
                    for sg in (1.0, -1.0)]
            out.append(float(max(vals)))
        return out


def _quad_antiderivative(p, s, t, u):
    """``int_0^u p`` on dyadic panels ``[0, 2^-K], ..., [1/2, 1]`` of the unit interval.

    The panel count is chosen so the first panel has length at most 1 in ``u``.
    """
    s, t, u = np.broadcast_arrays(*(np.asarray(x, dtype=float) for x in (s, t, u)))
    big = float(np.max(np.abs(u))) if u.size else 0.0
    K = max(0, math.ceil(math.log2(big))) if big > 1.0 else 0
    edges = np.concatenate([[0.0], 2.0 ** -np.arange(K, -1, -1)])
    total = np.zeros(u.shape)
    for lo, hi in zip(edges[:-1], edges[1:]):
        half = 0.5 * (hi - lo)
        for x, w in zip(0.5 * (hi + lo) + half * _GL_X, half * _GL_W):
            total += w * p(s, t, x * u)
    return total * u


def _mode_function(mode: ModeIndex):
    cn = math.sqrt(2.0) / math.pi if mode.n else 1.0 / math.pi
    trig = np.cos if mode.parity is Parity.COS else np.sin

    def phi(s, t):
        return cn * np.sin(mode.m * np.asarray(s)) * trig(mode.n * np.asarray(t))
    return phi


def zero_spec():
    return NonlinearitySpec(
        "zero", lambda s, t, u: _ones_like(s, t, u), lambda s, t, u: _ones_like(s, t, u),
        lambda s, t, u: _ones_like(s, t, u), derivative_bounds=(0.0, 0.0))


def forcing_spec(mode: ModeIndex, amplitude=1.0, name=None):
    phi = _mode_function(mode)
    amp = float(amplitude)
    return NonlinearitySpec(
        name or f"forcing:{mode.m},{mode.n},{mode.parity.value},{amp!r}",
        lambda s, t, u: amp * phi(s, t) + _ones_like(s, t, u),
        lambda s, t, u: _ones_like(s, t, u),
        lambda s, t, u: amp * phi(s, t) * np.asarray(u, dtype=float),
        derivative_bounds=(0.0, 0.0))


def arctan_spec(scale=1.0):
    c = float(scale)

    def P(s, t, u):
        u = np.asarray(u, dtype=float) + _ones_like(s, t)
        return c * (u * np.arctan(u) - 0.5 * np.log1p(u * u))

    return NonlinearitySpec(
        f"arctan:{c!r}",
        lambda s, t, u: c * np.arctan(np.asarray(u, dtype=float)) + _ones_like(s, t),
        lambda s, t, u: c / (1.0 + np.asarray(u, dtype=float) ** 2) + _ones_like(s, t),
        P, derivative_bounds=(min(0.0, c), max(0.0, c)))


def expr_spec(source):
    e = parse_p(source)
    return NonlinearitySpec(f"expr:{source}", e)


def from_catalog(spec: str) -> NonlinearitySpec:
    """Build a nonlinearity from a catalog string.

    ``zero``; ``forcing:m,n[,cos|sin][,amplitude]`` (a single basis mode,
    independent of ``u``); ``arctan:scale`` for ``scale * atan(u)``;
    ``expr:<expression in s, t, u>``.
    """
    if not isinstance(spec, str):
        raise ValidationError("nonlinearity must be given as a string")
    head, _, rest = spec.partition(":")
    head = head.strip()
    if head == "zero" and not rest:
        return zero_spec()
    if head == "arctan":
        try:
            return arctan_spec(float(rest) if rest.strip() else 1.0)
        except ValueError:
            raise ValidationError(f"bad arctan scale {rest!r}") from None
    if head == "forcing":
        parts = [x.strip() for x in rest.split(",") if x.strip()]
        try:
            m, n = int(parts[0]), int(parts[1])
            parity = Parity.COS
            amp = 1.0
            for extra in parts[2:]:
                if extra in ("cos", "sin"):
                    parity = Parity(extra)
                else:
                    amp = float(extra)
            mode = ModeIndex(m, n, parity)
        except (IndexError, ValueError) as exc:
            raise ValidationError(f"bad forcing spec {spec!r}: {exc}") from None
        return forcing_spec(mode, amp, name=spec)
    if head == "expr":
        return expr_spec(rest)
    raise ValidationError(f"unknown nonlinearity {spec!r}")


def _lattice(n_nodes=16):
    s = (np.arange(n_nodes) + 0.5) * math.pi / n_nodes
    t = np.arange(n_nodes) * 2.0 * math.pi / n_nodes
    S, T = np.meshgrid(s, t, indexing="ij")
    return S, T


@dataclass(frozen=True)
class SampleSpec:
    n_s: int = 16
    n_t: int = 16
    n_u: int = 401
    u_range: tuple = (-50.0, 50.0)
    tails: tuple = (1e3,)
    tail_step: float = 1.0

    def to_dict(self):
        return {"n_s": self.n_s, "n_t": self.n_t, "n_u": self.n_u,
                "u_range": list(self.u_range), "tails": list(self.tails),
                "tail_step": self.tail_step}


@dataclass
class HypothesisReport:
    side: Side
    h1_ok: bool
    h2_ok: bool
    h3_ok: bool
    h1_margin: float
    h2_margin: float
    h3_margin: float
    eps_under: float
    eps_over: float
    p_k: float
    q_k: float
    slope_min: float
    slope_max: float
    witness_min: tuple
    witness_max: tuple
    eps: tuple
    in_square: bool
    sample: SampleSpec = field(default_factory=SampleSpec)

    @property
    def ok(self):
        return self.h1_ok and self.h2_ok and self.h3_ok and self.in_square and \
            self.p_k < self.slope_min and self.slope_max < self.q_k

    def to_dict(self):
        return {
            "side": self.side.value, "ok": self.ok, "h1_ok": self.h1_ok,
            "h2_ok": self.h2_ok, "h3_ok": self.h3_ok, "h1_margin": self.h1_margin,
            "h2_margin": self.h2_margin, "h3_margin": self.h3_margin,
            "eps_under": self.eps_under, "eps_over": self.eps_over,
            "p_k": self.p_k, "q_k": self.q_k, "slope_min": self.slope_min,
            "slope_max": self.slope_max, "witness_min": list(self.witness_min),
            "witness_max": list(self.witness_max), "eps": list(self.eps),
            "in_square": self.in_square, "sample": self.sample.to_dict(),
        }


def _slopes(pspec, a, b, sample: SampleSpec):
    """Difference quotients of ``a u+ - b u- + p`` and of ``p`` alone, with witnesses."""
    s = (np.arange(sample.n_s) + 0.5) * math.pi / sample.n_s
    t = np.arange(sample.n_t) * 2.0 * math.pi / sample.n_t
    u = np.linspace(sample.u_range[0], sample.u_range[1], sample.n_u)
    pairs = [(u[:-1], u[1:])]
    for lev in sample.tails:
        h = sample.tail_step
        pairs.append((np.array([lev, -lev - h]), np.array([lev + h, -lev])))
    lo = np.concatenate([x for x, _ in pairs])
    hi = np.concatenate([y for _, y in pairs])
    S, T, U0 = np.meshgrid(s, t, lo, indexing="ij")
    _, _, U1 = np.meshgrid(s, t, hi, indexing="ij")
    p0, p1 = pspec(S, T, U0), pspec(S, T, U1)
    dp = (p1 - p0) / (U1 - U0)

    def lin(x):
        return a * np.maximum(x, 0.0) - b * np.maximum(-x, 0.0)

    df = (lin(U1) - lin(U0)) / (U1 - U0) + dp
    if not (np.all(np.isfinite(df))):
        raise HypothesisViolated("nonlinearity is not finite on the sample lattice")
    i_min = np.unravel_index(np.argmin(df), df.shape)
    i_max = np.unravel_index(np.argmax(df), df.shape)

    def wit(i):
        return (float(S[i]), float(T[i]), float(U0[i]))

    return (float(df[i_min]), float(df[i_max]), wit(i_min), wit(i_max),
            float(np.min(dp)), float(np.max(dp)))


def _report(pspec, a, b, cfg, sample):
    side = Side(cfg.side)
    smin, smax, wmin, wmax, pmin, pmax = _slopes(pspec, a, b, sample)
    lo, hi = cfg.square
    lam = cfg.lambda_k
    inside = lo < a < hi and lo < b < hi
    inf = math.inf
    if side is Side.LOWER:
        base = cfg.lambda_km1
        h1 = smin - base
        eps_under = 0.5 * h1 if h1 > 0 else 0.0
        if lam > 0:
            h2, h3 = (inf if math.isfinite(pmax) else -inf), inf
            eps_over = 1.0 / (max(pmax, 0.0) + 1.0)
        else:
            h2, h3 = inf, -smax
            eps_over = 0.5 * h3 if h3 > 0 else 0.0
    else:
        base = cfg.lambda_kp1
        h1 = base - smax
        eps_under = 0.5 * h1 if h1 > 0 else 0.0
        if lam > 0:
            h2, h3 = smin, inf
            eps_over = 0.5 * h2 if h2 > 0 else 0.0
        else:
            h2, h3 = inf, (inf if math.isfinite(pmin) else -inf)
            eps_over = 1.0 / (max(-pmin, 0.0) + 1.0)
    eps = (cfg.eps1, cfg.eps2) if side is Side.LOWER else (cfg.eps3, cfg.eps4)
    return HypothesisReport(side, h1 > 0, h2 > 0, h3 > 0, h1, h2, h3, eps_under, eps_over,
                            lo, hi, smin, smax, wmin, wmax, eps, inside, sample)


def check_hypotheses(p: NonlinearitySpec, a, b, k, side, cfg=None, sample_spec=None,
                     shrink=True, raise_on_failure=True):
    """Sample the monotonicity hypotheses and shrink the shifts until they hold.

    The hypotheses hold exactly when every u-slope of ``a u+ - b u- + p`` lies
    strictly inside the square's interval ``]p_k, q_k[``.  When the sampled
    extremes fall outside it, both shift parameters are halved (floor 1e-4)
    until they fit.  Returns ``(report, cfg)``; the config carries the final
    parameters.
    """
    side = Side(side)
    sample = sample_spec or SampleSpec()
    cfg = cfg or make_config(k, side, 0.1, 0.1)
    report = _report(p, a, b, cfg, sample)
    while shrink and not report.ok and report.h1_ok and report.h2_ok and report.h3_ok:
        e1, e2 = report.eps
        lo_ok = report.p_k < report.slope_min and report.p_k < min(a, b)
        hi_ok = report.slope_max < report.q_k and max(a, b) < report.q_k
        if side is Side.UPPER:
            lo_ok, hi_ok = hi_ok, lo_ok
        n1 = e1 if lo_ok else 0.5 * e1
        n2 = e2 if hi_ok else 0.5 * e2
        if (n1, n2) == (e1, e2) or min(n1, n2) < EPS_FLOOR:
            break
        cfg = cfg.with_eps(n1, n2)
        report = _report(p, a, b, cfg, sample)
    if not report.ok and raise_on_failure:
        lower_fail = report.slope_min <= report.p_k or not (
            report.h1_ok if side is Side.LOWER else report.h2_ok)
        bad = report.witness_min if lower_fail else report.witness_max
        if not report.in_square:
            msg = f"({a}, {b}) is not inside the square ]{report.p_k}, {report.q_k}[^2"
        else:
            msg = (f"sampled slopes [{report.slope_min:.6g}, {report.slope_max:.6g}] do not fit "
                   f"]{report.p_k:.6g}, {report.q_k:.6g}[ at eps={report.eps}")
        raise HypothesisViolated(msg, witness=bad, report=report)
    return report, cfg


@dataclass(frozen=True)
class DualNonlinearity:
    """Pointwise ``J``, ``J'``, ``J''`` and the conjugate for one (a, b, shift, p)."""

    a: float
    b: float
    shift: float
    p: NonlinearitySpec
    side: Side = Side.LOWER

    @classmethod
    def from_config(cls, a, b, cfg, p):
        return cls(float(a), float(b), float(cfg.shift), p, Side(cfg.side))

    @property
    def sign(self):
        return 1.0 if self.side is Side.LOWER else -1.0

    @property
    def a_dot(self):
        return self.sign * (self.a - self.shift)

    @property
    def b_dot(self):
        return self.sign * (self.b - self.shift)

    def jprime(self, s, t, u):
        u = np.asarray(u, dtype=float)
        return (self.a_dot * np.maximum(u, 0.0) - self.b_dot * np.maximum(-u, 0.0)
                + self.sign * self.p(s, t, u))

    def jsecond(self, s, t, u):
        u = np.asarray(u, dtype=float)
        return np.where(u > 0.0, self.a_dot, self.b_dot) + self.sign * self.p.derivative(s, t, u)

    def J(self, s, t, u):
        u = np.asarray(u, dtype=float)
        return (0.5 * self.a_dot * np.maximum(u, 0.0) ** 2
                + 0.5 * self.b_dot * np.maximum(-u, 0.0) ** 2
                + self.sign * self.p.antiderivative(s, t, u))

    def invert(self, s, t, v, max_iter=200):
        """Solve ``J'(s, t, u) = v`` elementwise.

        The bracket grows geometrically from ``u = 0``; then safeguarded Newton
        (bisection whenever the Newton point leaves the bracket) runs until
        ``|v - J'| <= 1e-12 (1 + |v|)``.
        """
        s, t, v = np.broadcast_arrays(*(np.asarray(x, dtype=float) for x in (s, t, v)))
        tol = 1e-12 * (1.0 + np.abs(v))
        lo = -np.ones(v.shape)
        hi = np.ones(v.shape)
        for _ in range(400):
            low_bad = self.jprime(s, t, lo) > v
            high_bad = self.jprime(s, t, hi) < v
            if not (low_bad.any() or high_bad.any()):
                break
            lo = np.where(low_bad, 2.0 * lo, lo)
            hi = np.where(high_bad, 2.0 * hi, hi)
        else:
            raise BracketFailure("could not bracket J' = v; J' is not increasing",
                                 witness=_first_bad(s, t, v, low_bad | high_bad))
        guess = np.maximum(v, 0.0) / self.a_dot - np.maximum(-v, 0.0) / self.b_dot
        u = np.where((guess > lo) & (guess < hi), guess, 0.5 * (lo + hi))
        for _ in range(max_iter):
            f = self.jprime(s, t, u) - v
            done = np.abs(f) <= tol
            if done.all():
                return u
            lo = np.where(f < 0.0, u, lo)
            hi = np.where(f > 0.0, u, hi)
            d = self.jsecond(s, t, u)
            with np.errstate(divide="ignore", invalid="ignore"):
                newton = u - f / d
            ok = (d > 0.0) & (newton > lo) & (newton < hi)
            u = np.where(done, u, np.where(ok, newton, 0.5 * (lo + hi)))
            if np.all(hi - lo <= 4.0 * np.spacing(np.abs(u) + 1.0)) and not done.all():
                f = self.jprime(s, t, u) - v
                if np.all(np.abs(f) <= 1e3 * tol):
                    return u
        raise BracketFailure("inversion of J' did not converge; J' may not be increasing",
                             witness=_first_bad(s, t, v, np.abs(self.jprime(s, t, u) - v) > tol))

    def conjugate(self, s, t, v):
        """``(J*(v), (J*)'(v), q)`` with ``q = (J*)'(v) - (v+/a' - v-/b')``."""
        v = np.asarray(v, dtype=float)
        u = self.invert(s, t, v)
        jstar = v * u - self.J(s, t, u)
        q = u - (np.maximum(v, 0.0) / self.a_dot - np.maximum(-v, 0.0) / self.b_dot)
        return jstar, u, q


def _first_bad(s, t, v, mask):
    idx = np.argwhere(mask)
    if idx.size == 0:
        return None
    i = tuple(idx[0])
    return (float(s[i]), float(t[i]), float(v[i]))


def conjugate_eval(s, t, v, params: DualNonlinearity):
    """``(Jstar, u_of_v, q)`` at ``(s, t, v)``; arrays are evaluated elementwise."""
    return params.conjugate(s, t, v)


def functional_I(v: SpectralField, cfg, params: DualNonlinearity):
    """Dual functional and its coefficient gradient ``L v - P[(J*)'(v)]``."""
    basis = basis_for(v.trunc)
    L = resolvent_diagonal(cfg, v.trunc)
    mu = cfg.second_shift
    c = v.coeffs
    V = basis.synth(c)
    S, T = np.meshgrid(basis.s_nodes, basis.t_nodes, indexing="ij")
    jstar, u, _ = params.conjugate(S, T, V)
    quad = 0.5 * float(np.dot((L - mu) * c, c))
    value = quad - basis.integrate(jstar - 0.5 * mu * V * V)
    grad = L * c - basis.analyze(u)
    return float(value), SpectralField(v.trunc, grad)


@dataclass
class SolveResult:
    v0: SpectralField
    u0: SpectralField
    I_value: float
    weak_residuals: list
    kernel_residuals: list
    grad_norm: float
    converged: bool
    gap: float
    a_hat_ray: float
    report: HypothesisReport
    cfg: object
    p_name: str
    start_values: list = field(default_factory=list)

    def to_dict(self):
        return {
            "I_value": self.I_value, "grad_norm": self.grad_norm, "converged": self.converged,
            "gap": self.gap, "a_hat_ray": self.a_hat_ray,
            "max_weak_residual": max(self.weak_residuals, default=0.0),
            "max_kernel_residual": max(self.kernel_residuals, default=0.0),
            "weak_residuals": list(self.weak_residuals),
            "kernel_residuals": list(self.kernel_residuals),
            "start_values": list(self.start_values),
            "config": self.cfg.to_dict(), "p": self.p_name,
            "hypotheses": self.report.to_dict(),
            "v0": self.v0.to_dict(), "u0": self.u0.to_dict(),
        }


def region_gap(a, b, cfg, trunc, mcfg=None):
    """Type-I test on the ray through ``(a, b)``.

    Returns ``(gap, a_hat_ray)`` where ``gap = min(a_hat - a_hat(r), b_hat - a_hat(1/r))
    = min(1, r) (a_hat - a_hat(r))``; the point is beyond the curve exactly when
    the gap is positive.
    """
    from .curves import dual_coordinates

    a_hat, b_hat = dual_coordinates(a, b, cfg)
    r = b_hat / a_hat
    res = maximize_ratio(cfg, r, trunc, mcfg or MaximizerConfig(n_starts=8))
    return min(1.0, r) * (a_hat - res.a_hat), res.a_hat


def weak_residuals(u0: SpectralField, a, b, p: NonlinearitySpec):
    """Per-mode ``|lambda_e <u0, e> - <a u0+ - b u0- + p(u0), e>|``, split into range and kernel."""
    basis = basis_for(u0.trunc)
    U = basis.synth(u0.coeffs)
    S, T = np.meshgrid(basis.s_nodes, basis.t_nodes, indexing="ij")
    rhs = a * np.maximum(U, 0.0) - b * np.maximum(-U, 0.0) + p(S, T, U)
    res = np.abs(basis.eigenvalues * u0.coeffs - basis.analyze(rhs))
    kern = basis.kernel_mask
    return [float(x) for x in res[~kern]], [float(x) for x in res[kern]]


def _hessian(c, cfg, params, basis, L):
    V = basis.synth(c)
    S, T = np.meshgrid(basis.s_nodes, basis.t_nodes, indexing="ij")
    u = params.invert(S, T, V)
    curv = 1.0 / params.jsecond(S, T, u)
    return np.diag(L) - basis.weighted_gram(curv)


def _ascend_I(c0, cfg, params, trunc, mcfg, gtol):
    basis = basis_for(trunc)
    L = resolvent_diagonal(cfg, trunc)

    def state(c):
        val, g = functional_I(SpectralField(trunc, c), cfg, params)
        return val, g.coeffs

    c = np.asarray(c0, dtype=float)
    val, g = state(c)
    alpha = mcfg.step_init
    it = 0
    while it < mcfg.max_iters:
        gn = float(np.linalg.norm(g))
        if gn <= gtol * (1.0 + float(np.linalg.norm(c))):
            return c, val, gn, it, True
        it += 1
        H = _hessian(c, cfg, params, basis, L)
        try:
            step = np.linalg.solve(H, -g)
            trial = c + step
            v2, g2 = state(trial)
            if v2 >= val - 1e-14 * (1.0 + abs(val)) and np.linalg.norm(g2) < gn:
                c, val, g = trial, v2, g2
                continue
        except np.linalg.LinAlgError:
            pass
        step = alpha
        for _ in range(60):
            trial = c + step * g
            v2, g2 = state(trial)
            if v2 >= val + 1e-4 * step * gn * gn:
                break
            step *= mcfg.backtrack
        else:
            return c, val, gn, it, False
        s = trial - c
        y = g2 - g
        sy = -float(np.dot(s, y))
        alpha = float(np.dot(s, s)) / sy if sy > 0 else step / mcfg.backtrack
        alpha = min(max(alpha, 1e-8), 1e8)
        c, val, g = trial, v2, g2
    gn = float(np.linalg.norm(g))
    return c, val, gn, it, gn <= gtol * (1.0 + float(np.linalg.norm(c)))


def solve(p, a, b, k, side=Side.LOWER, cfg=None, mcfg=None, trunc=None, eps=(0.1, 0.1),
          sample_spec=None, n_starts=4, gtol=1e-7, check_region=True,
          raise_on_failure=False):
    """Weak solution of ``box u = a u+ - b u- + p`` for ``(a, b)`` beyond C_k (or D_k).

    Steps: sample the hypotheses (shrinking the shifts if needed), confirm on
    the ray through ``(a, b)`` that the point is beyond the curve, maximize
    the dual functional from ``v = 0`` and seeded random starts, and return
    ``u0 = L v0`` with its per-mode weak residuals.
    """
    side = Side(side)
    if isinstance(p, str):
        p = from_catalog(p)
    trunc = trunc or TruncationSpec.from_bounds(16, 16)
    mcfg = mcfg or MaximizerConfig()
    cfg = cfg or make_config(k, side, *eps, trunc=trunc)
    report, cfg = check_hypotheses(p, a, b, k, side, cfg, sample_spec)
    gap, a_hat_ray = (math.nan, math.nan)
    if check_region:
        gap, a_hat_ray = region_gap(a, b, cfg, trunc)
        if not gap > 0.0:
            where = "below C_k" if side is Side.LOWER else "above D_k"
            raise RegionError(f"({a}, {b}) is not {where}: gap {gap:.3g} on its ray")
    params = DualNonlinearity.from_config(a, b, cfg, p)

    rng = np.random.default_rng(mcfg.seed)
    starts = [np.zeros(trunc.dim)]
    for _ in range(max(n_starts - 1, 0)):
        starts.append(rng.standard_normal(trunc.dim))
    runs = [_ascend_I(c0, cfg, params, trunc, mcfg, gtol) for c0 in starts]
    best = min(range(len(runs)), key=lambda i: (-runs[i][1], runs[i][2], i))
    c, val, gn, _, conv = runs[best]
    L = resolvent_diagonal(cfg, trunc)
    v0 = SpectralField(trunc, c)
    u0 = SpectralField(trunc, L * c)
    wr, kr = weak_residuals(u0, a, b, p)
    result = SolveResult(v0, u0, val, wr, kr, gn, conv, gap, a_hat_ray, report, cfg, p.name,
                         [float(r[1]) for r in runs])
    if not conv:
        logger.warning("dual ascent stopped with gradient norm %.3g", gn)
        if raise_on_failure:
            raise NoConvergence("dual functional ascent did not converge", result)
    return result


def dense_conjugate_oracle(params: DualNonlinearity, s, t, v, u_range=(-1e3, 1e3),
                           n_points=10_000_000, chunk=1_000_000):
    """Brute-force ``sup_u [v u - J(s, t, u)]`` on a uniform grid, refined by a parabola.

    Returns ``(Jstar, argmax)``.  The parabola through the best grid node and
    its neighbours locates the maximizer; ``Jstar`` is then evaluated there.
    """
    grid = np.linspace(u_range[0], u_range[1], n_points)
    best_val, best_i = -np.inf, 0
    for start in range(0, n_points, chunk):
        u = grid[start:start + chunk]
        vals = v * u - params.J(s, t, u)
        i = int(np.argmax(vals))
        if vals[i] > best_val:
            best_val, best_i = float(vals[i]), start + i
    i = min(max(best_i, 1), n_points - 2)
    u3 = grid[i - 1:i + 2]
    f3 = v * u3 - params.J(s, t, u3)
    h = grid[1] - grid[0]
    denom = f3[0] - 2.0 * f3[1] + f3[2]
    shift = 0.5 * h * (f3[0] - f3[2]) / denom if denom < 0 else 0.0
    u_star = float(u3[1] + shift)
    j_star = float(v * u_star - params.J(s, t, u_star))
    return max(j_star, best_val), u_star
