import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from riesz_flow.convolve import convolve, make_plan, operator_norm_bound, plan_for
from riesz_flow.errors import InputError
from riesz_flow.grid import Ball, GridField, build_domain, inner_product
from riesz_flow.kernels import KernelSpec, build_table

from conftest import random_field

SPECS_1D = [KernelSpec.riesz(0.4), KernelSpec.log(), KernelSpec.tail(0.3),
            KernelSpec.truncated(0.6, 0.3), KernelSpec.diff_quotient(0.8), KernelSpec.constant()]
SPECS_2D = [KernelSpec.riesz(1.1, 2), KernelSpec.log(2), KernelSpec.tail(0.0, 2),
            KernelSpec.diff_quotient(1.5, 2)]


def _rel(a, b):
    return np.linalg.norm(a - b) / np.linalg.norm(b)


@pytest.mark.parametrize("spec", SPECS_1D)
@given(seed=st.integers(0, 2**31), n=st.integers(2, 64))
def test_direct_matches_fft_1d(spec, seed, n):
    dom = build_domain(1, (0, 1.5), n)
    table = build_table(spec, dom)
    u = random_field(dom, seed)
    a = convolve(make_plan(table, "direct"), u).values
    b = convolve(make_plan(table, "fft"), u).values
    assert _rel(b, a) <= 1e-10


@pytest.mark.parametrize("spec", SPECS_2D)
def test_direct_matches_fft_2d(spec):
    dom = build_domain(2, [(0, 2), (0, 2)], 32, Ball((1.0, 1.0), 0.95))
    table = build_table(spec, dom)
    for seed in range(3):
        u = random_field(dom, seed)
        a = convolve(make_plan(table, "direct"), u).values
        b = convolve(make_plan(table, "fft"), u).values
        assert _rel(b, a) <= 1e-10


def test_fft_padding():
    dom = build_domain(1, (0, 1), 200)
    plan = make_plan(build_table(KernelSpec.log(), dom))
    assert plan.method == "fft"
    assert plan.padded_size == (512,)
    assert make_plan(build_table(KernelSpec.log(), build_domain(1, (0, 1), 128))).method == "direct"


def test_discrete_delta():
    dom = build_domain(2, [(0, 1), (0, 1)], 9)
    table = build_table(KernelSpec.riesz(0.5, 2), dom)
    full = np.zeros(dom.shape)
    full[2, 6] = 1.0
    v = convolve(make_plan(table), GridField.from_full(dom, full)).full()
    for i, j in [(0, 0), (2, 6), (8, 3)]:
        assert v[i, j] == pytest.approx(table.weight((i - 2, j - 6)) * dom.cell_volume, rel=1e-14)


def test_constant_kernel_gives_volume():
    dom = build_domain(1, (0, 1), 50)
    v = convolve(make_plan(build_table(KernelSpec.constant(), dom)), GridField.indicator(dom))
    np.testing.assert_allclose(v.values, 1.0, rtol=1e-13)


def test_riesz_of_indicator(unit_1d):
    a = 0.5
    x = unit_1d.centers()[:, 0]
    v = convolve(plan_for(KernelSpec.riesz(a), unit_1d), GridField.indicator(unit_1d)).values
    exact = (x**a + (1 - x) ** a) / a
    assert np.max(np.abs(v / exact - 1)) <= 1e-3


@given(seed=st.integers(0, 2**31))
def test_self_adjoint_and_linear(seed):
    dom = build_domain(1, (0, 2), 40)
    plan = make_plan(build_table(KernelSpec.riesz(0.7), dom))
    u, v, w = (random_field(dom, seed + k) for k in range(3))
    uv = inner_product(u, convolve(plan, v))
    vu = inner_product(v, convolve(plan, u))
    assert uv == pytest.approx(vu, rel=1e-12, abs=1e-12)
    lhs = convolve(plan, u * 2.5 + w * -1.5).values
    rhs = 2.5 * convolve(plan, u).values - 1.5 * convolve(plan, w).values
    np.testing.assert_allclose(lhs, rhs, rtol=1e-12, atol=1e-12)


def test_deterministic():
    dom = build_domain(1, (0, 1), 300)
    plan = plan_for(KernelSpec.log(), dom)
    u = random_field(dom, 5)
    np.testing.assert_array_equal(convolve(plan, u).values, convolve(plan, u).values)


def test_norm_bounds():
    dom = build_domain(1, (0, 1), 256)
    assert operator_norm_bound(build_table(KernelSpec.constant(), dom)) == pytest.approx(
        (2 * 256 - 1) / 256)
    d2 = build_domain(1, (0, 2), 256)
    assert operator_norm_bound(build_table(KernelSpec.truncated(0.5, 1.0), d2)) == pytest.approx(
        4.0, rel=1e-9)
    # the offset cells cover |z| < b = 1 - h/2; int_{-b}^{b} |log|z|| = 2 (b - b log b)
    b = 1 - dom.h / 2
    bound = operator_norm_bound(build_table(KernelSpec.log(), dom))
    assert bound == pytest.approx(2 * (b - b * np.log(b)), rel=1e-12)
    assert bound == pytest.approx(2.0, rel=1e-5)


def test_young_bound_holds():
    dom = build_domain(1, (0, 1), 64)
    table = build_table(KernelSpec.riesz(0.3), dom)
    plan = make_plan(table)
    for seed in range(5):
        u = random_field(dom, seed)
        assert convolve(plan, u).norm() <= operator_norm_bound(table) * u.norm() * (1 + 1e-12)


def test_domain_mismatch():
    a = build_domain(1, (0, 1), 16)
    plan = make_plan(build_table(KernelSpec.log(), a))
    with pytest.raises(InputError):
        convolve(plan, GridField.indicator(build_domain(1, (0, 1), 17)))
    with pytest.raises(InputError):
        make_plan(build_table(KernelSpec.log(), a), "spectral")
