import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from riesz_flow.errors import InputError
from riesz_flow.functionals import (
    EnergyKind,
    certify,
    counterexample_g1_exact,
    counterexample_norm_exact,
    counterexample_sequence,
    energy,
    gagliardo_parts,
    h00_norm,
)
from riesz_flow.grid import GridField, build_domain, sphere_area
from riesz_flow.kernels import KernelSpec, build_table, ring_mass

from conftest import random_field

ALL_KINDS = [
    EnergyKind.J(0.5), EnergyKind.J(0.5, -1), EnergyKind.Jhat(0.3), EnergyKind.G1(0.4),
    EnergyKind.G1(0.0), EnergyKind.J1(0.2), EnergyKind.Jhat0(), EnergyKind.Jd(),
    EnergyKind.Jtilde(0.7), EnergyKind.JtildeD(),
]


@pytest.fixture(scope="module")
def chi(unit_1d):
    return GridField.indicator(unit_1d)


@pytest.mark.parametrize("alpha", [0.1, 0.5, 0.9])
def test_J_of_indicator(chi, alpha):
    exact = -2 / (alpha * (alpha + 1))
    assert energy(EnergyKind.J(alpha), chi) == pytest.approx(exact, rel=1e-3)


def test_J_half_value(chi):
    assert energy(EnergyKind.J(0.5), chi) == pytest.approx(-8 / 3, rel=1e-3)


@pytest.mark.parametrize("alpha", [0.1, 0.5, 0.9])
def test_renormalized_of_indicator(chi, alpha):
    assert energy(EnergyKind.Jhat(alpha), chi) == pytest.approx(2 / (alpha + 1), rel=1e-3)
    assert energy(EnergyKind.G1(alpha), chi) == pytest.approx(2 / (alpha + 1), rel=1e-3)
    assert energy(EnergyKind.J1(alpha), chi) == 0.0


def test_limit_energies_of_indicator(chi):
    assert energy(EnergyKind.Jd(), chi) == pytest.approx(-1.0, rel=1e-14)
    assert energy(EnergyKind.Jhat0(), chi) == pytest.approx(2.0, abs=1e-2)
    assert energy(EnergyKind.JtildeD(), chi) == pytest.approx(-1.5, abs=1e-4)


def test_sign_multiplier(chi):
    a = energy(EnergyKind.Jtilde(0.6), chi)
    assert energy(EnergyKind.Jtilde(0.6, -1), chi) == -a


def test_Jtilde_is_difference_quotient(small_1d):
    u = random_field(small_1d, 2)
    for a in (0.3, 0.8):
        j = energy(EnergyKind.J(a), u)
        jd = energy(EnergyKind.Jd(), u)
        assert energy(EnergyKind.Jtilde(a), u) == pytest.approx((j - jd) / (1 - a), rel=1e-9)


@pytest.mark.parametrize("make", [
    lambda: EnergyKind.J(None), lambda: EnergyKind("Jd", 0.5), lambda: EnergyKind("K", 1),
    lambda: EnergyKind.J(0.5, 2),
])
def test_kind_validation(make):
    with pytest.raises(InputError):
        make()


@pytest.mark.parametrize("kind", [EnergyKind.J(1.0), EnergyKind.Jhat(0.0), EnergyKind.G1(1.2)])
def test_alpha_range(small_1d, kind):
    with pytest.raises(InputError):
        energy(kind, GridField.indicator(small_1d))


def test_G1_zero_diverges_to_inf():
    dom = build_domain(1, (0, 1), 8)
    u = GridField(dom, np.full(8, 1e160))
    assert energy(EnergyKind.G1(0.0), u) == math.inf
    assert h00_norm(u) == math.inf


def test_h00_norm(chi, small_1d):
    assert h00_norm(GridField.zeros(small_1d)) == 0.0
    assert h00_norm(chi) == pytest.approx(3.0, abs=5e-3)


@pytest.mark.parametrize("kind", ALL_KINDS, ids=str)
@given(seed=st.integers(0, 2**31), c=st.floats(-5, 5))
def test_quadratic_scaling(small_1d, kind, seed, c):
    u = random_field(small_1d, seed)
    assert energy(kind, u * c) == pytest.approx(c * c * energy(kind, u), rel=1e-10, abs=1e-10)


@pytest.mark.parametrize("dim", [1, 2])
@given(seed=st.integers(0, 2**31), alpha=st.floats(0.05, 0.95))
def test_split_identity(dim, seed, alpha):
    if dim == 1:
        dom = build_domain(1, (0, 2.5), 48)
    else:
        dom = build_domain(2, [(0, 1.6), (0, 1.6)], 12)
        alpha *= 2
    u = random_field(dom, seed)
    jhat = energy(EnergyKind.Jhat(alpha), u)
    parts = energy(EnergyKind.G1(alpha), u) + energy(EnergyKind.J1(alpha), u)
    assert parts == pytest.approx(jhat, rel=1e-6)


def test_G1_double_sum_against_brute_force():
    dom = build_domain(1, (0, 1.5), 12)
    u = random_field(dom, 4)
    w = build_table(KernelSpec.truncated(0.3, 1.0), dom).weights
    h = dom.h
    v = u.values
    inner = 0.5 * sum(
        (v[i] - v[j]) ** 2 * w[i - j + 11] * h * h for i in range(12) for j in range(12) if i != j
    )
    outside = sum(v[i] ** 2 * (ring_mass(0.3, 1, h) - sum(w[i - j + 11] for j in range(12) if j != i) * h)
                  for i in range(12)) * h
    got_in, got_out = gagliardo_parts(0.3, u)
    assert got_in == pytest.approx(inner, rel=1e-12)
    assert got_out == pytest.approx(outside, rel=1e-12)


@given(seed=st.integers(0, 2**31), alpha=st.floats(0.05, 0.95))
def test_J_nonpositive_and_bounded(seed, alpha):
    dom = build_domain(1, (0, 1), 40)
    u = random_field(dom, seed)
    j = energy(EnergyKind.J(alpha), u)
    nrm2 = u.norm() ** 2
    assert j <= 1e-8 * nrm2
    assert abs(j) <= sphere_area(1) / alpha * dom.diam**alpha * nrm2 + 1e-8


@given(seed=st.integers(0, 2**31), alpha=st.floats(0.05, 0.95))
def test_lipschitz_estimate(seed, alpha):
    dom = build_domain(1, (0, 1), 40)
    u, v = random_field(dom, seed), random_field(dom, seed + 1)
    C = sphere_area(1) / alpha * dom.diam**alpha
    lhs = abs(energy(EnergyKind.J(alpha), u) - energy(EnergyKind.J(alpha), v))
    assert lhs <= C * (u.norm() + v.norm()) * (u - v).norm() + 1e-10


def test_pointwise_limits():
    dom = build_domain(1, (0, 1), 256)
    u = GridField.from_function(dom, lambda x: np.sin(np.pi * x[:, 0]) + 0.3)
    lim0 = sphere_area(1) * u.norm() ** 2
    gaps = [abs(-a * energy(EnergyKind.J(a), u) - lim0) for a in (0.2, 0.1, 0.05)]
    assert gaps[0] > gaps[1] > gaps[2]
    jd = energy(EnergyKind.Jd(), u)
    gaps = [abs(energy(EnergyKind.J(a), u) - jd) for a in (0.9, 0.95, 0.99)]
    assert gaps[0] > gaps[1] > gaps[2]
    jtd = energy(EnergyKind.JtildeD(), u)
    gaps = [abs(energy(EnergyKind.Jtilde(a), u) - jtd) for a in (0.9, 0.95, 0.99)]
    assert gaps[0] > gaps[1] > gaps[2]


def test_certificates_example_values():
    dom = build_domain(1, (0, 1), 1024)
    assert certify(EnergyKind.J(0.5), dom).lambda_ == pytest.approx(8.08, rel=1e-3)
    assert certify(EnergyKind.Jhat(0.3), dom).lambda_ == pytest.approx(2.02, rel=1e-12)
    assert certify(EnergyKind.JtildeD(), dom).lambda_ == pytest.approx(4.04, rel=1e-5)
    for kind in ALL_KINDS:
        c = certify(kind, dom)
        assert c.lambda_ > 2 * c.witness_bound and c.lambda_ > 0


@pytest.mark.parametrize("kind", ALL_KINDS, ids=str)
def test_lambda_positivity_and_convexity(small_1d, kind):
    lam = certify(kind, small_1d, "convexity").lambda_
    rng = np.random.default_rng(11)

    def F(w):
        return energy(kind, w) + lam / 2 * w.norm() ** 2

    for _ in range(20):
        u = GridField(small_1d, rng.standard_normal(64) * rng.uniform(0.1, 10))
        v = GridField(small_1d, rng.standard_normal(64))
        assert F(u) >= -1e-8
        assert F((u + v) * 0.5) <= 0.5 * (F(u) + F(v)) + 1e-8


def test_counterexample_field():
    dom = build_domain(1, (-1, 1), 128)
    v = counterexample_sequence(4, dom)
    x = dom.centers()[:, 0]
    support = x[v.values != 0]
    assert support.min() > -0.25 and support.max() < 0.25
    assert np.allclose(v.values[v.values != 0], 2 / math.log(4) ** 0.25)
    assert v.norm() == pytest.approx(counterexample_norm_exact(math.log(4)), rel=1e-12)


def test_counterexample_preconditions():
    with pytest.raises(InputError, match="resolve"):
        counterexample_sequence(64, build_domain(1, (-1, 1), 64))
    with pytest.raises(InputError, match="origin"):
        counterexample_sequence(4, build_domain(1, (0.5, 1), 64))


def test_counterexample_exact_g1_matches_grid():
    dom = build_domain(1, (-1, 1), 256)
    for n in (4, 8):
        v = counterexample_sequence(n, dom)
        for a in (0.0, 0.3):
            grid = energy(EnergyKind.G1(a), v)
            assert grid == pytest.approx(counterexample_g1_exact(math.log(n), a), rel=3e-2)


def test_counterexample_growth():
    # fixed n: G1 increases as alpha decreases; along alpha = 1/log n it blows up
    vals = [counterexample_g1_exact(20.0, a) for a in (0.5, 0.2, 0.05, 0.0)]
    assert all(b > a for a, b in zip(vals, vals[1:]))
    assert counterexample_norm_exact(70.0) < 0.5
    assert counterexample_g1_exact(70.0, 1 / 70) > 10
    assert counterexample_g1_exact(70.0, 0.0) == pytest.approx(33.61, abs=0.01)
