"""Command-line front end.

Every subcommand accepts ``--config file.json``; keys use the flag names
(``eps-a`` or ``eps_a``), and explicit flags win over the file.  Artifacts are
deterministic JSON (plus CSV where noted) that echo the resolved config.

Exit codes: 0 success, 1 oracle disagreement or integrator failure,
2 validation failure, 3 no convergence, 4 expression parse error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import io
from .classical import Family, sample_points, shooting_miss
from .curves import Curve, Flag, Side, classify, classify_point, default_r_grid, trace
from .dual import make_config
from .exceptions import FucikError, NoConvergence, ValidationError
from .maximizer import MaximizerConfig, brute_force_sup, maximize_ratio
from .nonhomog import DualNonlinearity, arctan_spec, dense_conjugate_oracle, solve
from .spectral import TruncationSpec, basis_for, enumerate_spectrum

logger = logging.getLogger("fucikwave")

DEFAULTS = {
    "spectrum-list": {"m_bound": 8, "n_bound": 8, "out": None},
    "curve-trace": {"k": 1, "side": "lower", "eps_a": 0.1, "eps_b": 0.1, "m_max": 16,
                    "n_max": 16, "r_max": 100.0, "n_r": 40, "n_starts": 16, "seed": 0,
                    "out": "curve"},
    "curve-check": {"a": None, "b": None, "k": 1, "curves_in": None, "eps_a": 0.1,
                    "eps_b": 0.1, "m_max": 16, "n_max": 16, "n_starts": 8, "seed": 0,
                    "out": None},
    "validate-1d": {"family": "dirichlet", "index": 2, "n_samples": 50, "seed": 0,
                    "out": None},
    "solve": {"k": 1, "side": "lower", "a": None, "b": None, "p": "zero", "eps_a": 0.1,
              "eps_b": 0.1, "m_max": 16, "n_max": 16, "n_starts": 4, "seed": 0,
              "out": "solution"},
    "oracle": {"suite": "maximizer", "dim": 8, "seed": 0, "k": 3, "out": None},
}


def _add(p, *names, **kw):
    kw.setdefault("default", None)
    p.add_argument(*names, **kw)


def build_parser():
    parser = argparse.ArgumentParser(prog="fucik", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum-list", help="eigenvalues m^2 - n^2 with multiplicities")
    _add(p, "m_bound", nargs="?", type=int)
    _add(p, "n_bound", nargs="?", type=int)

    p = sub.add_parser("curve-trace", help="trace C_k (lower) or D_k (upper)")
    _add(p, "--k", type=int)
    _add(p, "--side", choices=["lower", "upper"])
    _add(p, "--eps-a", type=float, help="eps1 (lower) or eps3 (upper)")
    _add(p, "--eps-b", type=float, help="eps2 (lower) or eps4 (upper)")
    _add(p, "--m-max", type=int)
    _add(p, "--n-max", type=int)
    _add(p, "--r-max", type=float)
    _add(p, "--n-r", type=int)
    _add(p, "--n-starts", type=int)
    _add(p, "--seed", type=int)

    p = sub.add_parser("curve-check", help="classify a point against C_k and D_k")
    _add(p, "--a", type=float)
    _add(p, "--b", type=float)
    _add(p, "--k", type=int)
    _add(p, "--curves-in", nargs="+", help="curve JSON files from curve-trace")
    _add(p, "--eps-a", type=float)
    _add(p, "--eps-b", type=float)
    _add(p, "--m-max", type=int)
    _add(p, "--n-max", type=int)
    _add(p, "--n-starts", type=int)
    _add(p, "--seed", type=int)

    p = sub.add_parser("validate-1d", help="closed-form family points against shooting")
    _add(p, "--family", choices=[f.value for f in Family])
    _add(p, "--index", type=int)
    _add(p, "--n-samples", type=int)
    _add(p, "--seed", type=int)

    p = sub.add_parser("solve", help="solve the forced problem in a type-I region")
    _add(p, "--k", type=int)
    _add(p, "--side", choices=["lower", "upper"])
    _add(p, "--a", type=float)
    _add(p, "--b", type=float)
    _add(p, "--p", dest="p", help="zero | forcing:m,n[,cos|sin][,amp] | arctan:scale | expr:...")
    _add(p, "--eps-a", type=float)
    _add(p, "--eps-b", type=float)
    _add(p, "--m-max", type=int)
    _add(p, "--n-max", type=int)
    _add(p, "--n-starts", type=int)
    _add(p, "--seed", type=int)

    p = sub.add_parser("oracle", help="run an independent oracle suite")
    _add(p, "--suite", choices=["maximizer", "conjugate", "shooting"])
    _add(p, "--dim", type=int)
    _add(p, "--k", type=int)
    _add(p, "--seed", type=int)

    for name, sp in sub.choices.items():
        _add(sp, "--config", help="JSON file with default values for the flags")
        if name != "curve-trace" and name != "solve":
            _add(sp, "--out", help="JSON artifact path")
        else:
            _add(sp, "--out", help="artifact path prefix (.json and .csv are appended)")
    return parser


def resolve(command, args):
    """Merge defaults, the ``--config`` file and explicit flags, in that order."""
    cfg = dict(DEFAULTS[command])
    if getattr(args, "config", None):
        data = io.read_json(args.config)
        if not isinstance(data, dict):
            raise ValidationError("config file must hold a JSON object")
        for key, value in data.items():
            norm = key.replace("-", "_")
            if norm not in cfg:
                raise ValidationError(f"unknown config key {key!r} for {command}")
            cfg[norm] = value
    for key in cfg:
        value = getattr(args, key, None)
        if value is not None:
            cfg[key] = value
    missing = [k for k, v in cfg.items() if v is None and k not in ("out", "curves_in")]
    if missing:
        raise ValidationError(f"missing required setting(s): {', '.join(missing)}")
    return cfg


def _trunc(cfg):
    return TruncationSpec.from_bounds(int(cfg["m_max"]), int(cfg["n_max"]))


def _emit(cfg, command, result, path=None):
    art = io.envelope(command, cfg, cfg.get("seed"), result)
    if path:
        io.write_json(path, art)
    return art


def cmd_spectrum_list(cfg):
    levels = enumerate_spectrum(int(cfg["m_bound"]), int(cfg["n_bound"]))
    print("value,multiplicity,modes")
    rows = []
    for lev in levels:
        modes = " ".join(f"({m.m},{m.n},{m.parity.value})" for m in lev.modes)
        print(f"{lev.value},{lev.multiplicity},{modes}")
        rows.append({"value": lev.value, "multiplicity": lev.multiplicity,
                     "modes": [[m.m, m.n, m.parity.value] for m in lev.modes]})
    _emit(cfg, "spectrum-list", {"levels": rows}, cfg["out"])
    return 0


def cmd_curve_trace(cfg):
    trunc = _trunc(cfg)
    mcfg = MaximizerConfig(n_starts=int(cfg["n_starts"]), seed=int(cfg["seed"]))
    curve = trace(int(cfg["k"]), cfg["side"], default_r_grid(cfg["r_max"], cfg["n_r"]),
                  mcfg=mcfg, trunc=trunc, eps=(cfg["eps_a"], cfg["eps_b"]))
    prefix = Path(cfg["out"])
    io.write_csv(prefix.with_suffix(".csv"), io.CURVE_HEADER, io.curve_rows(curve))
    _emit(cfg, "curve-trace", curve.to_dict(), prefix.with_suffix(".json"))
    one = curve.point_at(1.0)
    print(f"wrote {prefix.with_suffix('.csv')} ({len(curve.points)} points); "
          f"r=1 point ({one.a:.12g}, {one.b:.12g})")
    if any(p.flag is Flag.UNCONVERGED for p in curve.points):
        print("some points did not meet the residual tolerance", file=sys.stderr)
        return NoConvergence.exit_code
    return 0


def cmd_curve_check(cfg):
    a, b = float(cfg["a"]), float(cfg["b"])
    if cfg["curves_in"]:
        paths = cfg["curves_in"]
        if isinstance(paths, str):
            paths = [paths]
        curves = [Curve.from_dict(io.read_json(p)["result"]) for p in paths]
        c = next((cv for cv in curves if cv.side is Side.LOWER), None)
        d = next((cv for cv in curves if cv.side is Side.UPPER), None)
        region = classify(a, b, c, d)
    else:
        eps = (cfg["eps_a"], cfg["eps_b"])
        mcfg = MaximizerConfig(n_starts=int(cfg["n_starts"]), seed=int(cfg["seed"]))
        region = classify_point(a, b, int(cfg["k"]), eps, eps, _trunc(cfg), mcfg)
    print(region.value)
    _emit(cfg, "curve-check", {"a": a, "b": b, "region": region.value}, cfg["out"])
    return 0


def cmd_validate_1d(cfg):
    pts = sample_points(cfg["family"], int(cfg["index"]), int(cfg["n_samples"]),
                        int(cfg["seed"]))
    rows = []
    for p in pts:
        d = p.to_dict()
        d["miss"] = shooting_miss(p)
        rows.append(d)
    worst = max((r["miss"] for r in rows), default=0.0)
    ok = worst <= 1e-6
    print(f"{len(rows)} points, worst shooting miss {worst:.3e}: {'ok' if ok else 'FAIL'}")
    _emit(cfg, "validate-1d", {"worst_miss": worst, "ok": ok, "points": rows}, cfg["out"])
    return 0 if ok else 1


def cmd_solve(cfg):
    trunc = _trunc(cfg)
    mcfg = MaximizerConfig(seed=int(cfg["seed"]))
    res = solve(cfg["p"], float(cfg["a"]), float(cfg["b"]), int(cfg["k"]), cfg["side"],
                mcfg=mcfg, trunc=trunc, eps=(cfg["eps_a"], cfg["eps_b"]),
                n_starts=int(cfg["n_starts"]))
    prefix = Path(cfg["out"])
    _emit(cfg, "solve", res.to_dict(), prefix.with_suffix(".json"))
    basis = basis_for(trunc)
    U = basis.synth(res.u0.coeffs)
    rows = [(float(s), float(t), float(U[i, j]))
            for i, s in enumerate(basis.s_nodes) for j, t in enumerate(basis.t_nodes)]
    io.write_csv(prefix.with_name(prefix.name + "_u0").with_suffix(".csv"), ("s", "t", "u"), rows)
    print(f"I={res.I_value:.12g} |gradI|={res.grad_norm:.3e} "
          f"max weak residual={max(res.weak_residuals + res.kernel_residuals):.3e}")
    return 0 if res.converged else NoConvergence.exit_code


def _tiny_trunc(dim):
    """Box truncation of exactly ``dim`` modes, preferring temporal modes."""
    for n in range(dim // 2, -1, -1):
        if dim % (2 * n + 1) == 0:
            return TruncationSpec.from_bounds(dim // (2 * n + 1), n, oversample=4.0)
    raise ValidationError(f"no box truncation has dimension {dim}")


def cmd_oracle(cfg):
    suite, seed = cfg["suite"], int(cfg["seed"])
    rows = []
    if suite == "maximizer":
        trunc = _tiny_trunc(int(cfg["dim"]))
        mc = make_config(int(cfg["k"]), Side.LOWER, 0.1, 0.1, trunc=trunc)
        for r in (0.5, 1.0, 2.0):
            bf = brute_force_sup(mc, r, trunc, seed=seed)
            mr = maximize_ratio(mc, r, trunc, MaximizerConfig(seed=seed)).a_hat
            rows.append({"r": r, "brute_force": bf, "maximizer": mr,
                         "ok": abs(bf - mr) <= 1e-3 and bf <= mr + 1e-9})
    elif suite == "conjugate":
        params = DualNonlinearity(1.0, 2.0, 0.0, arctan_spec(1.0))
        rng = np.random.default_rng(seed)
        for v in [2.0] + list(rng.uniform(-20.0, 20.0, 3)):
            jstar, u, q = (float(x) for x in params.conjugate(0.0, 0.0, v))
            oj, ou = dense_conjugate_oracle(params, 0.0, 0.0, v)
            rows.append({"v": float(v), "jstar": jstar, "oracle_jstar": oj, "u": u,
                         "oracle_u": ou,
                         "ok": abs(jstar - oj) <= 1e-6 and abs(u - ou) <= 1e-6})
    else:
        for fam, idx in ((Family.DIRICHLET, 2), (Family.DIRICHLET, 3), (Family.PERIODIC, 2)):
            for p in sample_points(fam, idx, 4, seed):
                miss = shooting_miss(p)
                rows.append({**p.to_dict(), "miss": miss, "ok": miss <= 1e-6})
    ok = all(r["ok"] for r in rows)
    for r in rows:
        print(", ".join(f"{k}={io.fmt_float(v) if isinstance(v, float) else v}"
                        for k, v in r.items()))
    _emit(cfg, "oracle", {"suite": suite, "ok": ok, "rows": rows}, cfg["out"])
    return 0 if ok else 1


COMMANDS = {
    "spectrum-list": cmd_spectrum_list,
    "curve-trace": cmd_curve_trace,
    "curve-check": cmd_curve_check,
    "validate-1d": cmd_validate_1d,
    "solve": cmd_solve,
    "oracle": cmd_oracle,
}


def run(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = resolve(args.command, args)
        return COMMANDS[args.command](cfg)
    except FucikError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return getattr(exc, "exit_code", 1)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
