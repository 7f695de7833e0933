import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fucikwave.curves import (Curve, CurvePoint, Flag, Region, _bound_violation, _combine,
                              classify, classify_point, curve_checks, default_r_grid,
                              dual_coordinates, in_square, map_point, mirror_field,
                              spectrum_point_check, trace)
from fucikwave.dual import Side, make_config
from fucikwave.exceptions import DomainError, ValidationError
from fucikwave.maximizer import MaximizerConfig
from fucikwave.spectral import SpectralField, TruncationSpec

TRUNC = TruncationSpec.from_bounds(6, 5)
MCFG = MaximizerConfig(n_starts=6, seed=1)
GRID = default_r_grid(20.0, 10)


@pytest.fixture(scope="module")
def curves_k1():
    c = trace(1, Side.LOWER, GRID, mcfg=MCFG, trunc=TRUNC)
    d = trace(1, Side.UPPER, GRID, mcfg=MCFG, trunc=TRUNC)
    return c, d


@pytest.fixture(scope="module")
def curve_c2():
    return trace(2, Side.LOWER, GRID, mcfg=MCFG, trunc=TRUNC)


@pytest.mark.parametrize("k, side", [(1, "lower"), (3, "lower"), (2, "upper"), (-1, "lower")])
def test_map_point_through_eigenvalue(k, side):
    cfg = make_config(k, side, 0.1, 0.1)
    a, b = map_point(side, cfg.top_value, 1.0, cfg)
    assert abs(a - cfg.lambda_k) <= 1e-12 and abs(b - cfg.lambda_k) <= 1e-12


def test_map_point_corners():
    cfg = make_config(2, "lower", 0.1, 0.1)
    lo, hi = cfg.square
    a, _ = map_point("lower", 1e-12, 1.0, cfg)
    assert a == pytest.approx(hi, rel=1e-9)
    a, _ = map_point("lower", 1e12, 1.0, cfg)
    assert a == pytest.approx(lo, abs=1e-11)
    up = make_config(2, "upper", 0.1, 0.1)
    lo, hi = up.square
    assert map_point("upper", 1e-12, 1.0, up)[0] == pytest.approx(lo, rel=1e-9)
    assert map_point("upper", 1e12, 1.0, up)[0] == pytest.approx(hi, abs=1e-11)


def test_map_point_domain_error():
    cfg = make_config(1, "lower", 0.1, 0.1)
    with pytest.raises(DomainError):
        map_point("lower", -0.5, 1.0, cfg)
    with pytest.raises(DomainError):
        dual_coordinates(0.0, 0.5, cfg)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([(1, "lower"), (2, "lower"), (3, "upper"), (-1, "upper")]),
       st.floats(1e-3, 1e3), st.floats(1e-2, 1e2))
def test_dual_coordinates_invert_map(case, a_hat, r):
    cfg = make_config(case[0], case[1], 0.1, 0.1)
    a, b = map_point(case[1], a_hat, r, cfg)
    assert in_square(a, b, cfg) or min(abs(a - x) for x in cfg.square) < 1e-9
    x, y = dual_coordinates(a, b, cfg)
    assert x == pytest.approx(a_hat, rel=1e-6) and y == pytest.approx(r * a_hat, rel=1e-6)


def test_default_grid():
    g = default_r_grid()
    assert len(g) == 40 and g[0] == 1.0 and g[-1] == pytest.approx(100.0)
    with pytest.raises(ValidationError):
        default_r_grid(1.0, 10)


def test_trace_rejects_grid_not_starting_at_one():
    with pytest.raises(ValidationError):
        trace(1, "lower", [2.0, 3.0], mcfg=MCFG, trunc=TRUNC)


def test_traced_curve_invariants(curves_k1, curve_c2):
    for curve in (*curves_k1, curve_c2):
        checks = curve_checks(curve)
        assert checks["through_eigenvalue"], checks
        assert checks["inside_square"] and checks["symmetric"] and checks["nonincreasing"]
        assert all(p.flag in (Flag.OK, Flag.MIRRORED, Flag.REFINED) for p in curve.points)
    assert curve_checks(curve_c2)["strictly_decreasing"]
    one = curves_k1[0].point_at(1.0)
    assert abs(one.a - 1) <= 1e-6 and abs(one.b - 1) <= 1e-6


def test_mirrored_points_swap_coordinates(curve_c2):
    for p in curve_c2.points:
        if p.r > 1:
            q = curve_c2.point_at(1.0 / p.r)
            assert (q.a, q.b) == (p.b, p.a)
            assert q.a_hat == pytest.approx(p.r * p.a_hat, rel=1e-15)


def test_a_decreases_as_b_increases(curve_c2):
    order = np.argsort(curve_c2.b)
    assert np.all(np.diff(curve_c2.a[order]) < 0)


def test_curve_round_trip(curve_c2):
    data = json.loads(json.dumps(curve_c2.to_dict()))
    back = Curve.from_dict(data)
    assert back.to_dict() == curve_c2.to_dict()


def test_interpolation_and_extrapolation(curve_c2):
    for p in curve_c2.points:
        assert curve_c2.a_hat_at(p.r) == pytest.approx(p.a_hat, rel=1e-12)
    last = curve_c2.points[-1]
    assert curve_c2.a_hat_at(2 * last.r) == pytest.approx(last.a_hat / 2)
    first = curve_c2.points[0]
    assert curve_c2.a_hat_at(first.r / 2) == first.a_hat


def test_classify_with_curves(curves_k1):
    c, d = curves_k1
    assert classify(0.5, 0.5, c, d) is Region.BELOW_C
    assert classify(1.0, 1.0, c, d) is Region.ON_C
    assert classify(1.0, 1.0, None, d) is Region.ON_D
    assert classify(2.5, 2.5, c, d) is Region.ABOVE_D
    assert classify(50.0, 50.0, c, d) is Region.OUTSIDE
    with pytest.raises(ValidationError):
        classify(0.5, 0.5)
    with pytest.raises(ValidationError):
        classify(math.nan, 0.5, c, d)


def test_interior_square_is_below_c(curves_k1):
    c, d = curves_k1
    rng = np.random.default_rng(7)
    pts = rng.uniform(0.1 + 1e-3, 1.0 - 1e-3, size=(20, 2))
    assert all(classify(a, b, c, d) is Region.BELOW_C for a, b in pts)


def test_diagonal_past_eigenvalue_is_above_d():
    c = trace(2, Side.LOWER, GRID, mcfg=MCFG, trunc=TRUNC)
    d = trace(2, Side.UPPER, GRID, mcfg=MCFG, trunc=TRUNC)
    assert classify(3.001, 3.001, c, d) is Region.ABOVE_D
    assert classify(2.999, 2.999, c, d) is Region.BELOW_C


def test_region_combination():
    inside_not_beyond = (True, False, False)
    assert _combine(inside_not_beyond, inside_not_beyond) is Region.BETWEEN
    assert _combine(inside_not_beyond, (False, False, False)) is Region.BETWEEN
    assert _combine((True, True, False), inside_not_beyond) is Region.BELOW_C
    assert _combine((True, False, True), (True, False, True)) is Region.ON_C
    assert _combine((False,) * 3, (False,) * 3) is Region.OUTSIDE


@pytest.mark.slow
@pytest.mark.parametrize("a, b, k, expected", [
    (0.5, 0.5, 1, Region.BELOW_C), (1.0, 1.0, 1, Region.ON_C),
    (4.5, 4.5, 3, Region.ABOVE_D), (20.0, 20.0, 1, Region.OUTSIDE)])
def test_classify_point_examples(a, b, k, expected):
    assert classify_point(a, b, k) is expected


def test_spectrum_point_check_dirichlet():
    cfg = make_config(2, "lower", 0.1, 0.1)
    out = spectrum_point_check(9.0, 2.25, cfg, TRUNC, MCFG)
    assert out["holds"] and out["r_star"] > 1


def test_bound_violation_detects_jumps():
    lo = CurvePoint(1.0, 1.0, 0, 0, 0)
    assert not _bound_violation(lo, CurvePoint(2.0, 0.7, 0, 0, 0), 1e-9)
    assert _bound_violation(lo, CurvePoint(2.0, 1.2, 0, 0, 0), 1e-9)
    assert _bound_violation(lo, CurvePoint(2.0, 0.4, 0, 0, 0), 1e-9)


def test_mirror_field():
    v = SpectralField(TRUNC, np.arange(TRUNC.dim, dtype=float))
    assert np.array_equal(mirror_field(v).coeffs, -v.coeffs)
