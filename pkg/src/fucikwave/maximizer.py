"""Maximization of F/G on a truncated space.

Each start runs projected ascent on the 0-homogeneous ratio F/G: the search
direction is ``gradF - (F/G) gradG``, steps are accepted only when the ratio
increases, and the iterate is rescaled to ``G = 1`` after every step.  Step
lengths come from a Barzilai-Borwein estimate with backtracking.  Once the
Euler-Lagrange residual is small the iteration switches to semismooth Newton
on the bordered system ``(D - a A_chi) v = 0, G(v) = 1`` where ``A_chi`` is
the Gram matrix of the positive-part weights; a Newton step is kept only if
it does not lower the ratio and does reduce the residual.  When Newton lands
on a lower critical point, or backtracking fails, the iterate is near a
saddle and a step along the top eigenvector of the frozen-pattern pencil
``(D - R A_chi, A_chi)`` moves it off.
"""

from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh

from .dual import Side, g_value_grad_array, positive_part_weights, shifted_diagonal
from .exceptions import InvalidEps, NoConvergence, ValidationError
from .spectral import SpectralField, TruncationSpec, basis_for, enumerate_spectrum

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MaximizerConfig:
    n_starts: int = 16
    max_iters: int = 5000
    tol_ratio: float = 1e-10
    tol_residual: float = 1e-8
    step_init: float = 1.0
    backtrack: float = 0.5
    seed: int = 0
    stall_window: int = 20
    newton_switch: float = 1e-2
    newton_retry_every: int = 50
    stall_rescues: int = 5

    def __post_init__(self):
        if self.n_starts < 1 or self.max_iters < 1:
            raise ValidationError("n_starts and max_iters must be positive")
        if not (self.tol_ratio > 0 and self.tol_residual > 0 and self.step_init > 0):
            raise ValidationError("tolerances and step_init must be positive")
        if not 0.0 < self.backtrack < 1.0:
            raise ValidationError("backtrack must lie in (0, 1)")

    def to_dict(self):
        return dict(self.__dict__)


@dataclass
class MaximizerResult:
    a_hat: float
    v0: SpectralField
    residual: float
    iters_per_start: list
    start_values: list
    start_residuals: list = field(default_factory=list)
    start_labels: list = field(default_factory=list)
    best_start: int = 0
    converged: bool = True
    r: float = 1.0
    side: str = "lower"

    @property
    def distinct_values(self):
        """Converged ratios that differ by more than 1e-6 (relative), descending."""
        out = []
        for val, res in sorted(zip(self.start_values, self.start_residuals),
                               key=lambda p: -p[0]):
            if res > 1e-6:
                continue
            if all(abs(val - o) > 1e-6 * max(1.0, abs(o)) for o in out):
                out.append(val)
        return out

    def to_dict(self, include_field=True):
        d = {
            "r": self.r, "side": self.side, "a_hat": self.a_hat,
            "residual": self.residual, "converged": self.converged,
            "best_start": self.best_start,
            "iters_per_start": list(self.iters_per_start),
            "start_values": list(self.start_values),
            "start_residuals": list(self.start_residuals),
            "start_labels": list(self.start_labels),
        }
        if include_field:
            d["v0"] = self.v0.to_dict()
        return d


class RatioProblem:
    """F/G on raw coefficient vectors for one (config, r, truncation)."""

    def __init__(self, cfg, r, trunc: TruncationSpec):
        if not r > 0.0:
            raise InvalidEps(f"r={r} must be positive")
        self.cfg = cfg
        self.r = float(r)
        self.trunc = trunc
        self.basis = basis_for(trunc)
        self.d = shifted_diagonal(cfg, trunc)

    def F(self, c):
        return float(np.dot(self.d * c, c))

    def G(self, c):
        return g_value_grad_array(self.basis, c, self.r)[0]

    def normalize(self, c):
        G = self.G(c)
        if not G > 0.0:
            raise ValidationError("cannot normalize the zero field")
        return c / math.sqrt(G)

    def state(self, c):
        """Ratio, ratio gradient (valid at G = 1) and grid values."""
        G, gG, V = g_value_grad_array(self.basis, c, self.r)
        F = self.F(c)
        R = F / G
        g = (2.0 * self.d * c - R * gG) / G
        return R, g, V

    def el_residual(self, c, a_hat):
        _, gG, _ = g_value_grad_array(self.basis, c, self.r)
        return float(np.linalg.norm(2.0 * self.d * c - a_hat * gG))

    def newton_step(self, c, R, V):
        """Semismooth Newton target for ``(D - R A_chi) c = 0`` at fixed ``G``."""
        w = positive_part_weights(V, self.r)
        A = self.basis.weighted_gram(w)
        Ac = A @ c
        n = c.size
        K = np.empty((n + 1, n + 1))
        K[:n, :n] = -R * A
        K[np.arange(n), np.arange(n)] += self.d
        K[:n, n] = -Ac
        K[n, :n] = Ac
        K[n, n] = 0.0
        rhs = np.concatenate([-(self.d * c - R * Ac), [0.0]])
        try:
            sol = np.linalg.solve(K, rhs)
        except np.linalg.LinAlgError:
            return None
        return c + sol[:n]

    def curvature_step(self, c, R, V):
        """Escape a saddle along the most ascending direction of the frozen-pattern pencil.

        With the sign pattern fixed the ratio is ``c.D.c / c.A.c``; the top
        eigenvector of ``(D - R A, A)``, made A-orthogonal to ``c``, is the
        direction of strongest second-order gain.  Steps of decreasing length
        in both orientations are tried on the true ratio.
        """
        A = self.basis.weighted_gram(positive_part_weights(V, self.r))
        theta, X = eigh(np.diag(self.d) - R * A, A)
        if not theta[-1] > 1e-12 * max(abs(R), 1.0):
            return None
        x = X[:, -1]
        Ac = A @ c
        x = x - (x @ Ac) / (c @ Ac) * c
        nx = np.linalg.norm(x)
        if not nx > 0.0:
            return None
        x *= np.linalg.norm(c) / nx
        t = 1.0
        for _ in range(40):
            best = None
            for sign in (1.0, -1.0):
                trial = self.normalize(c + sign * t * x)
                out = self.state(trial)
                if out[0] > R and (best is None or out[0] > best[1][0]):
                    best = (trial, out)
            if best is not None:
                return best
            t *= 0.5
        return None


def _ascend(problem: RatioProblem, c0, mcfg: MaximizerConfig):
    """Run one start; returns ``(c, ratio, residual, iterations)``."""
    c = problem.normalize(np.asarray(c0, dtype=float))
    R, g, V = problem.state(c)
    res = float(np.linalg.norm(g))
    alpha = mcfg.step_init
    stall = 0
    it = 0
    # After a failed Newton attempt, retry once the residual has dropped well
    # below that level or after a fixed number of gradient steps. Failures come
    # from sign-pattern cycling at grid nodes close to the nodal set.
    retry_below = mcfg.newton_switch
    last_try = 0
    force = False
    rescues = 0
    while it < mcfg.max_iters and res > mcfg.tol_residual:
        it += 1
        due = res < mcfg.newton_switch and it - last_try >= mcfg.newton_retry_every
        if force or res < retry_below or due:
            last_try = it
            force = False
            target = problem.newton_step(c, R, V)
            if target is not None and np.all(np.isfinite(target)):
                trial = problem.normalize(target)
                R2, g2, V2 = problem.state(trial)
                res2 = float(np.linalg.norm(g2))
                # A step that crosses a sign-pattern boundary may raise the
                # residual while still gaining ratio; the next step then lands.
                gained = R2 > R + 1e-14 * abs(R)
                if gained or (R2 >= R - 1e-13 * abs(R) and res2 < res):
                    c, R, g, V, res = trial, R2, g2, V2, res2
                    stall = 0
                    retry_below = mcfg.newton_switch
                    continue
                if R2 < R and res2 < res:
                    # Newton found a lower critical point nearby: leave the saddle
                    esc = problem.curvature_step(c, R, V)
                    if esc is not None:
                        c, (R, g, V) = esc
                        res = float(np.linalg.norm(g))
                        stall = 0
                        continue
            retry_below = 0.1 * res

        accepted = False
        step = alpha
        for _ in range(60):
            trial = problem.normalize(c + step * g)
            R2, g2, V2 = problem.state(trial)
            if R2 > R:
                accepted = True
                break
            step *= mcfg.backtrack
        if not accepted:
            esc = problem.curvature_step(c, R, V) if res > mcfg.tol_residual else None
            if esc is not None:
                c, (R, g, V) = esc
                res = float(np.linalg.norm(g))
                continue
            if rescues < mcfg.stall_rescues and last_try != it:
                rescues += 1
                force = True
                continue
            break
        s = trial - c
        y = g2 - g
        sy = abs(float(np.dot(s, y)))
        alpha = float(np.dot(s, s)) / sy if sy > 0 else step / mcfg.backtrack
        alpha = min(max(alpha, 1e-8), 1e8)
        gain = (R2 - R) / max(abs(R), 1e-300)
        stall = stall + 1 if gain < mcfg.tol_ratio else 0
        c, R, g, V = trial, R2, g2, V2
        res = float(np.linalg.norm(g))
        if stall >= mcfg.stall_window:
            if rescues < mcfg.stall_rescues:
                rescues += 1
                force = True
                stall = 0
                continue
            break
    return c, R, problem.el_residual(c, R), it


def eigen_starts(cfg, trunc):
    """Both signs of every retained eigenmode of lambda_k."""
    basis = basis_for(trunc)
    starts, labels = [], []
    for i, mode in enumerate(basis.modes):
        if mode.eigenvalue == cfg.lambda_k:
            for sign, tag in ((1.0, "+"), (-1.0, "-")):
                c = np.zeros(trunc.dim)
                c[i] = sign
                starts.append(c)
                labels.append(f"eig{tag}({mode.m},{mode.n},{mode.parity.value})")
    return starts, labels


def _thread_count():
    try:
        return max(1, int(os.environ.get("FUCIK_THREADS", "1")))
    except ValueError:
        return 1


def maximize_ratio(cfg, r, trunc: TruncationSpec, mcfg: MaximizerConfig = None,
                   warm_start: SpectralField = None, raise_on_failure=False):
    """Compute the supremum of F/G over the truncated space.

    Starts: both signs of each lambda_k eigenmode, the warm start when given,
    then seeded random fields up to ``mcfg.n_starts``.  The returned value is
    the best ratio; ties go to the smaller residual, then the earlier start.
    """
    mcfg = mcfg or MaximizerConfig()
    problem = RatioProblem(cfg, r, trunc)
    starts, labels = eigen_starts(cfg, trunc)
    if warm_start is not None:
        c = warm_start.coeffs
        if warm_start.trunc != trunc:
            c = basis_for(trunc).embed(c, warm_start.trunc)
        starts.insert(0, c)
        labels.insert(0, "warm")
    rng = np.random.default_rng(mcfg.seed)
    n_random = max(mcfg.n_starts - len(starts), 0)
    # damp high frequencies so random fields are not dominated by grid noise
    scale = (1.0 + problem.basis.eigenvalues ** 2) ** -0.25
    for i in range(n_random):
        starts.append(rng.standard_normal(trunc.dim) * scale)
        labels.append(f"random{i}")

    threads = _thread_count()
    if threads > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            runs = list(pool.map(lambda c0: _ascend(problem, c0, mcfg), starts))
    else:
        runs = [_ascend(problem, c0, mcfg) for c0 in starts]

    values = [float(R) for _, R, _, _ in runs]
    residuals = [float(res) for _, _, res, _ in runs]
    iters = [int(it) for _, _, _, it in runs]
    best = min(range(len(runs)), key=lambda i: (-values[i], residuals[i], i))
    c_best = runs[best][0]
    a_hat = values[best]
    result = MaximizerResult(
        a_hat=a_hat, v0=SpectralField(trunc, c_best), residual=residuals[best],
        iters_per_start=iters, start_values=values, start_residuals=residuals,
        start_labels=labels, best_start=best,
        converged=residuals[best] <= mcfg.tol_residual, r=float(r),
        side=Side(cfg.side).value)
    if not result.converged:
        logger.warning("r=%g: best start residual %.3g above tolerance", r, result.residual)
        if raise_on_failure:
            raise NoConvergence(f"no start met tol_residual at r={r}", result)
    return result


def residual(v: SpectralField, a_hat, r, cfg) -> float:
    """Norm of ``(L - mu) v - a_hat * P(v^+ - r v^-)`` over the truncated basis."""
    basis = basis_for(v.trunc)
    d = shifted_diagonal(cfg, v.trunc)
    V = basis.synth(v.coeffs)
    proj = basis.analyze(np.maximum(V, 0.0) - r * np.maximum(-V, 0.0))
    return float(np.linalg.norm(d * v.coeffs - a_hat * proj))


def brute_force_sup(cfg, r, tiny_trunc: TruncationSpec, n_samples=1_000_000, seed=0,
                    n_polish=100, chunk=100_000):
    """Random-direction lower bound for the truncated supremum (dimension <= 8).

    Samples ``n_samples`` Gaussian directions, keeps the best ``n_polish`` and
    refines each with a derivative-free Nelder-Mead search on the ratio.
    """
    from scipy.optimize import minimize

    if tiny_trunc.dim > 8:
        raise ValidationError("brute force oracle is limited to dimension 8")
    basis = basis_for(tiny_trunc)
    d = shifted_diagonal(cfg, tiny_trunc)
    rng = np.random.default_rng(seed)
    best_vals = np.empty(0)
    best_dirs = np.empty((0, tiny_trunc.dim))
    done = 0
    while done < n_samples:
        k = min(chunk, n_samples - done)
        X = rng.standard_normal((k, tiny_trunc.dim))
        V = basis.synth_many(X)
        G = basis.weight * (np.sum(np.maximum(V, 0.0) ** 2, axis=(1, 2))
                            + r * np.sum(np.maximum(-V, 0.0) ** 2, axis=(1, 2)))
        vals = np.einsum("ki,i,ki->k", X, d, X) / G
        best_vals = np.concatenate([best_vals, vals])
        best_dirs = np.concatenate([best_dirs, X])
        keep = np.argsort(-best_vals)[:n_polish]
        best_vals, best_dirs = best_vals[keep], best_dirs[keep]
        done += k

    def neg_ratio(x):
        Vx = basis.synth(x)
        G = basis.weight * (np.sum(np.maximum(Vx, 0.0) ** 2)
                            + r * np.sum(np.maximum(-Vx, 0.0) ** 2))
        if G <= 0:
            return 0.0
        return -float(np.dot(d * x, x)) / G

    top = float(best_vals[0])
    for x0 in best_dirs:
        out = minimize(neg_ratio, x0 / np.linalg.norm(x0), method="Nelder-Mead",
                       options={"xatol": 1e-7, "fatol": 1e-11, "maxiter": 1600})
        top = max(top, -float(out.fun))
    return top


def lambda_k_multiplicity(cfg, trunc):
    for lev in enumerate_spectrum(trunc.m_max, max(trunc.n_max, 1)):
        if lev.value == cfg.lambda_k:
            return sum(1 for md in lev.modes if md.n <= trunc.n_max)
    return 0
