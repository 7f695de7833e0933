import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fucikwave.dual import (F_value_grad, G_value_grad, apply_L, apply_M, make_config,
                            resolvent_diagonal, validate_lower, validate_upper)
from fucikwave.exceptions import ConditioningFailure, InvalidEps, ZeroEigenvalue
from fucikwave.spectral import ModeIndex, SpectralField, TruncationSpec, basis_for


def test_lower_parameters_k1():
    cfg = validate_lower(1, 0.1, 0.1)
    assert (cfg.lambda_k, cfg.lambda_km1) == (1, 0)
    assert math.isclose(cfg.mu, 0.1) and math.isclose(cfg.nu, -10.1)
    assert cfg.delta > 0


def test_lower_parameters_negative_shift():
    cfg = validate_lower(-1, 0.5, 0.1)
    assert (cfg.lambda_k, cfg.lambda_km1) == (-3, -5)
    assert math.isclose(cfg.shift, -4.5)
    assert math.isclose(cfg.mu, 1 / 4.5 + 0.1)
    assert cfg.nu < 0


def test_lower_eps_bounds():
    with pytest.raises(InvalidEps):
        validate_lower(1, 1.0, 0.1)
    with pytest.raises(InvalidEps):
        validate_lower(1, 0.1, 0.0)
    with pytest.raises(InvalidEps):
        validate_lower(1, 0.1, 1.2)


def test_zero_eigenvalue_rejected():
    with pytest.raises(ZeroEigenvalue):
        validate_lower(0, 0.1, 0.1)
    with pytest.raises(ZeroEigenvalue):
        validate_upper(0, 0.1, 0.1)


def test_upper_parameters():
    cfg = validate_upper(2, 0.2, 0.1)
    assert (cfg.lambda_k, cfg.lambda_kp1) == (3, 4)
    assert math.isclose(cfg.rho, 1 / 3.8 + 0.1)
    assert cfg.sigma < 0
    with pytest.raises(InvalidEps):
        validate_upper(2, 1.0, 0.1)


def test_apply_L_examples(small_trunc, rng):
    cfg = validate_lower(1, 0.1, 0.1)
    out = apply_L(SpectralField.unit(small_trunc, ModeIndex(2, 1)), cfg)
    assert math.isclose(out.coefficient(ModeIndex(2, 1)), 1 / 2.9)
    out = apply_L(SpectralField.unit(small_trunc, ModeIndex(1, 1)), cfg)
    assert math.isclose(out.coefficient(ModeIndex(1, 1)), -1 / 0.1)
    f = SpectralField(small_trunc, rng.standard_normal(small_trunc.dim))
    g = SpectralField(small_trunc, rng.standard_normal(small_trunc.dim))
    assert np.allclose(apply_L(f + g, cfg).coeffs, (apply_L(f, cfg) + apply_L(g, cfg)).coeffs)


def test_apply_M_examples(small_trunc):
    cfg = validate_upper(2, 0.2, 0.1)
    out = apply_M(SpectralField.unit(small_trunc, ModeIndex(2, 1)), cfg)
    assert math.isclose(out.coefficient(ModeIndex(2, 1)), 1 / 0.8)
    out = apply_M(SpectralField.unit(small_trunc, ModeIndex(3, 3)), cfg)
    assert math.isclose(out.coefficient(ModeIndex(3, 3)), 1 / 3.8)


def test_resolvent_inverts_shifted_box(small_trunc, rng):
    cfg = validate_lower(2, 0.3, 0.1)
    f = SpectralField(small_trunc, rng.standard_normal(small_trunc.dim))
    lam = basis_for(small_trunc).eigenvalues
    back = (lam - cfg.shift) * apply_L(f, cfg).coeffs
    assert np.allclose(back, f.coeffs, rtol=1e-14, atol=0)


def test_conditioning_failure(small_trunc):
    # a config claiming a larger margin than its divisors actually have
    cfg = dataclasses.replace(validate_lower(1, 0.1, 0.1), delta=0.5)
    with pytest.raises(ConditioningFailure):
        resolvent_diagonal(cfg, small_trunc)


@pytest.mark.parametrize("k, side", [(1, "lower"), (2, "lower"), (3, "upper"), (-1, "upper")])
def test_F_on_eigenmode_and_kernel(small_trunc, k, side):
    cfg = make_config(k, side, 0.1, 0.1)
    mode = next(m for m in basis_for(small_trunc).modes if m.eigenvalue == cfg.lambda_k)
    F, _ = F_value_grad(SpectralField.unit(small_trunc, mode), cfg)
    assert math.isclose(F, cfg.top_value, rel_tol=1e-14)
    y = 2.0 * SpectralField.unit(small_trunc, ModeIndex(2, 2))
    F, _ = F_value_grad(y, cfg)
    assert math.isclose(F, cfg.kernel_value * 4.0, rel_tol=1e-14)
    assert cfg.kernel_value < 0


def _fd_rel_error(fun, c, grad, h=1e-6):
    fd = np.array([(fun(c + h * e) - fun(c - h * e)) / (2 * h) for e in np.eye(len(c))])
    return np.linalg.norm(fd - grad) / np.linalg.norm(grad)


def test_gradients_match_finite_differences(small_trunc, rng):
    cfg = make_config(2, "lower", 0.1, 0.1)
    for _ in range(50):
        c = rng.standard_normal(small_trunc.dim)
        r = float(rng.uniform(0.2, 5.0))
        _, gF = F_value_grad(SpectralField(small_trunc, c), cfg)
        _, gG = G_value_grad(SpectralField(small_trunc, c), r)
        assert _fd_rel_error(lambda x: F_value_grad(SpectralField(small_trunc, x), cfg)[0],
                             c, gF.coeffs) <= 1e-6
        assert _fd_rel_error(lambda x: G_value_grad(SpectralField(small_trunc, x), r)[0],
                             c, gG.coeffs) <= 1e-6


def test_G_positive_field(small_trunc):
    v = SpectralField.unit(small_trunc, ModeIndex(1, 0))
    G, grad = G_value_grad(v, 3.0)
    assert math.isclose(G, 1.0, rel_tol=1e-13)
    assert np.allclose(grad.coeffs, 2 * v.coeffs, atol=1e-13)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.05, 20.0))
def test_G_identities(seed, r):
    trunc = TruncationSpec.from_bounds(4, 3)
    v = SpectralField(trunc, np.random.default_rng(seed).standard_normal(trunc.dim))
    G_r, _ = G_value_grad(v, r)
    G_inv, _ = G_value_grad(-v, 1.0 / r)
    assert math.isclose(G_inv, G_r / r, rel_tol=1e-12)
    G1, _ = G_value_grad(v, 1.0)
    assert math.isclose(G1, v.norm() ** 2, rel_tol=1e-12)
    nrm = v.norm() ** 2
    assert min(1, r) * nrm * (1 - 1e-12) <= G_r <= max(1, r) * nrm * (1 + 1e-12)


def test_G_rejects_nonpositive_r(small_trunc):
    with pytest.raises(InvalidEps):
        G_value_grad(SpectralField.zeros(small_trunc), 0.0)
