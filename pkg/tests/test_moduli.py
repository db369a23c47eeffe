from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from syzkit import chambers, moduli as mo, subdivision as sd
from syzkit.lattice import M0


def test_monomial_tables():
    assert len(mo.MONOMIALS) == 126
    assert len(mo.OFF_SLICE) == 20 and len(mo.SKELETON) == 105
    assert {mo.MONOMIALS[i] for i in mo.OFF_SLICE} == {mo.off_slice_exponent(j, k) for j in range(5) for k in range(5) if j != k}
    with pytest.raises(mo.ModuliError):
        mo.off_slice_exponent(2, 2)


def test_linear_change_examples():
    rng = np.random.default_rng(0)
    p = mo.random_quintic(rng)
    assert np.allclose(mo.apply_linear_change(p, mo.LinearChange.identity()).coeffs, p.coeffs, rtol=0, atol=1e-15)
    z15 = mo.QuinticPolynomial.from_mapping({(5, 0, 0, 0, 0): 1})
    out = mo.apply_linear_change(z15, mo.LinearChange(np.diag([2, 1, 1, 1, 1])))
    assert out[(5, 0, 0, 0, 0)] == pytest.approx(32, abs=1e-12)
    with pytest.raises(mo.ModuliError):
        mo.apply_linear_change(p, mo.LinearChange(np.zeros((5, 5))))


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10_000))
def test_linear_change_matches_evaluation(seed):
    rng = np.random.default_rng(seed)
    p = mo.random_quintic(rng)
    a = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
    q = mo.apply_linear_change(p, mo.LinearChange(a))
    z = rng.normal(size=(20, 5)) + 1j * rng.normal(size=(20, 5))
    lhs, rhs = p.evaluate(z @ a.T), q.evaluate(z)
    assert np.max(np.abs(lhs - rhs)) < 1e-9 * np.max(np.abs(lhs))


def test_slice_step_fixed_point():
    p = mo.QuinticPolynomial.from_mapping({**{m: 1 for m in sd.skeleton_keys()}, M0: 7})
    L, q, c = mo.slice_step(p)
    assert np.array_equal(L.matrix, np.eye(5)) and q is p and c == 1
    r = mo.reduce_to_slice(p)
    assert r.steps == 0 and r.history == [0.0]


def test_slice_step_reduces_off_slice_norm_at_moderate_psi():
    # at |psi| = 10 a single step lowers the norm for most but not all draws; from |psi| = 20 on it always does
    for seed in range(20):
        p = mo.random_quintic(np.random.default_rng(seed), 20)
        L, q, c = mo.slice_step(p)
        assert q.off_slice_norm() < p.off_slice_norm()
        z = np.random.default_rng(seed + 1).normal(size=(5, 5)) * 0.3
        assert np.allclose(p.evaluate(z @ L.matrix.T), c * q.evaluate(z), rtol=1e-10, atol=1e-12)
        assert q.psi == pytest.approx(p.psi)


@pytest.mark.parametrize("psi", [30, 100])
def test_reduce_to_slice_large_psi(psi):
    rng = np.random.default_rng(psi)
    p = mo.random_quintic(rng, psi)
    r = mo.reduce_to_slice(p)
    assert r.p0.off_slice_norm() < 1e-12 and r.steps <= 40
    z = 0.5 * (rng.normal(size=(100, 5)) + 1j * rng.normal(size=(100, 5)))
    assert r.consistency(p, z) < 1e-9


def test_rate_matches_log_psi_for_huge_psi():
    psi = 1e4
    p = mo.random_quintic(np.random.default_rng(7), psi)
    hist = [p.off_slice_norm()]
    cur = p
    for _ in range(3):
        _, cur, _ = mo.slice_step(cur)
        hist.append(cur.off_slice_norm())
    rate = mo.convergence_rate(hist)
    assert abs(rate - (-math.log(psi))) <= 0.2 * math.log(psi)


def test_small_psi_reports_divergence():
    p = mo.random_quintic(np.random.default_rng(0), 0.1)
    with pytest.raises(mo.SliceDivergence) as exc:
        mo.reduce_to_slice(p)
    assert len(exc.value.history) >= 3 and exc.value.last is not None
    with pytest.raises(mo.ModuliError):
        mo.reduce_to_slice(mo.random_quintic(np.random.default_rng(0), 0))


def test_psi_min_guard():
    p = mo.random_quintic(np.random.default_rng(0), 2)
    with pytest.raises(mo.ModuliError, match="threshold"):
        mo.reduce_to_slice(p, psi_min=5)


def test_json_roundtrip():
    p = mo.random_quintic(np.random.default_rng(4))
    assert np.array_equal(mo.QuinticPolynomial.from_json(p.to_json()).coeffs, p.coeffs)


def test_permutation_action():
    p = mo.random_quintic(np.random.default_rng(5))
    perm = [1, 2, 0, 4, 3]
    z = np.random.default_rng(6).normal(size=(4, 5))
    q = p.permuted(perm)
    assert np.allclose(q.evaluate(z), p.evaluate(z[:, perm]), rtol=1e-12, atol=1e-12)
    assert sorted(np.abs(q.coeffs)) == sorted(np.abs(p.coeffs))


def test_mirror_map_examples(std_weight):
    keys = sd.skeleton_keys()
    zero = sd.WeightFunction.from_function(keys, lambda p: 0)
    p = mo.monomial_divisor_map(None, zero)
    assert np.all(p.coeffs[list(mo.SKELETON)] == 1) and p.psi == 1
    assert np.all(p.coeffs[list(mo.OFF_SLICE)] == 0)
    q = mo.monomial_divisor_map(None, std_weight)
    for m in keys[:10]:
        assert q[m].imag == 0 and q[m].real == pytest.approx(math.exp(-2 * math.pi * std_weight[m]), rel=1e-14)
    assert mo.polynomial_chamber(q) == sd.chamber_key(std_weight)
    half = mo.monomial_divisor_map({(5, 0, 0, 0, 0): "1/2"}, std_weight)
    assert half[(5, 0, 0, 0, 0)] == pytest.approx(-q[(5, 0, 0, 0, 0)], rel=1e-14)
    assert np.allclose(np.abs(half.coeffs), np.abs(q.coeffs), rtol=1e-15, atol=0)


def test_mirror_map_rejects_nonconvex(std_weight):
    bad = std_weight.map_values(lambda p, v: v + 40 * (p == (0, 0, 1, 2, 2)))
    with pytest.raises(mo.ModuliError):
        mo.monomial_divisor_map(None, bad)


def test_mirror_map_alt_chamber():
    w = chambers.alt_weight()
    assert mo.polynomial_chamber(mo.monomial_divisor_map(None, w)) == sd.chamber_key(w)
