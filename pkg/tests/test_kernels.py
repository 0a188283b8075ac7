import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from riesz_flow.errors import InputError
from riesz_flow.grid import build_domain, sphere_area
from riesz_flow.kernels import (
    KernelSpec,
    build_table,
    check_fourier_identity,
    eval_kernel,
    fourier_constant,
    fourier_lhs,
    kernel_l1_truncated,
    ring_mass,
    taylor_defect,
)


def test_eval_examples():
    assert eval_kernel(KernelSpec.riesz(0.5), 0.25) == pytest.approx(2.0)
    assert eval_kernel(KernelSpec.log(2), [0.6, 0.8]) == pytest.approx(0.0, abs=1e-15)
    assert eval_kernel(KernelSpec.diff_quotient(0.9), 0.5) == pytest.approx(
        (0.5**-0.1 - 1) / 0.1, rel=1e-13
    )
    assert eval_kernel(KernelSpec.diff_quotient(0.9), 0.5) == pytest.approx(0.71773, abs=1e-5)


def test_eval_singular_origin():
    with pytest.raises(InputError):
        eval_kernel(KernelSpec.riesz(0.5), 0.0)
    assert eval_kernel(KernelSpec.constant(), 0.0) == 1.0


def test_truncation_and_tail():
    assert eval_kernel(KernelSpec.truncated(0.5, 1.0), 1.5) == 0.0
    assert eval_kernel(KernelSpec.tail(0.5), 0.5) == 0.0
    assert eval_kernel(KernelSpec.tail(0.5), 4.0) == pytest.approx(0.5)


@pytest.mark.parametrize("make", [
    lambda: KernelSpec.riesz(0.0),
    lambda: KernelSpec.riesz(1.0),
    lambda: KernelSpec.diff_quotient(2.0, 2),
    lambda: KernelSpec.tail(1.0),
    lambda: KernelSpec.truncated(0.5, 0.0),
])
def test_spec_validation(make):
    with pytest.raises(InputError):
        make()


@given(st.floats(0.01, 0.98), st.floats(0.01, 0.98), st.floats(0.01, 0.99))
def test_riesz_decreasing_in_alpha(a, b, r):
    lo, hi = sorted((a, b))
    if hi - lo < 1e-6:
        return
    assert eval_kernel(KernelSpec.riesz(lo), r) > eval_kernel(KernelSpec.riesz(hi), r)


def test_diff_quotient_tends_to_log():
    z = 0.3
    log = eval_kernel(KernelSpec.log(), z)
    for eps in (1e-1, 1e-2, 1e-3):
        dq = eval_kernel(KernelSpec.diff_quotient(1 - eps), z)
        bound = taylor_defect(1 - eps, z) * eps * math.log(1 / z) ** 2
        assert abs(dq - log) == pytest.approx(bound, rel=1e-10)


def test_origin_weight_1d():
    dom = build_domain(1, (0, 1), 8)
    table = build_table(KernelSpec.riesz(0.5), dom)
    h = 0.125
    # exact cell average of |z|^(-1/2) over (-h/2, h/2)
    assert table.weight(0) == pytest.approx((2 / h) * (h / 2) ** 0.5 / 0.5, rel=1e-14)
    assert table.weight(0) == pytest.approx(8.0, rel=1e-14)


def test_constant_table():
    dom = build_domain(2, [(0, 1), (0, 1)], 5)
    w = build_table(KernelSpec.constant(2), dom).weights
    np.testing.assert_allclose(w, 1.0, rtol=1e-14)


@pytest.mark.parametrize("spec", [
    KernelSpec.riesz(0.3, 2), KernelSpec.log(2), KernelSpec.truncated(1.2, 0.4, 2),
    KernelSpec.tail(0.0, 2), KernelSpec.diff_quotient(1.7, 2),
])
def test_tables_symmetric_2d(spec):
    dom = build_domain(2, [(0, 1), (0, 1)], 12)
    w = build_table(spec, dom).weights
    np.testing.assert_array_equal(w, w[::-1, ::-1])
    np.testing.assert_allclose(w, w.T, rtol=1e-12, atol=0)
    assert np.all(np.isfinite(w))


@pytest.mark.parametrize("spec", [KernelSpec.riesz(0.6), KernelSpec.log(), KernelSpec.tail(0.4)])
def test_tables_symmetric_1d(spec):
    w = build_table(spec, build_domain(1, (0, 3), 30)).weights
    np.testing.assert_array_equal(w, w[::-1])


@pytest.mark.parametrize("alpha, R", [(0.5, 1.0), (0.25, 0.5)])
def test_truncated_mass_1d(alpha, R):
    dom = build_domain(1, (0, 2), 64)
    table = build_table(KernelSpec.truncated(alpha, R), dom)
    assert table.mass() == pytest.approx(kernel_l1_truncated(alpha, R, 1), abs=1e-9)
    assert table.mass() == pytest.approx(ring_mass(alpha, 1, dom.h, R) + table.weight(0) * dom.h)


@pytest.mark.parametrize("alpha", [0.5, 1.0, 1.5])
def test_truncated_mass_2d(alpha):
    dom = build_domain(2, [(0, 1), (0, 1)], 16)
    table = build_table(KernelSpec.truncated(alpha, 0.5, 2), dom)
    assert table.mass() == pytest.approx(kernel_l1_truncated(alpha, 0.5, 2), abs=1e-9)


def test_cell_averages_against_dblquad():
    dom = build_domain(2, [(0, 1), (0, 1)], 8)
    h = dom.h
    table = build_table(KernelSpec.riesz(1.3, 2), dom)
    for o in [(1, 0), (2, 3), (5, 7)]:
        x0, y0 = (o[0] - 0.5) * h, (o[1] - 0.5) * h
        ref, _ = integrate.dblquad(
            lambda y, x: (x * x + y * y) ** ((1.3 - 2) / 2), x0, x0 + h, y0, y0 + h,
            epsabs=1e-14, epsrel=1e-13,
        )
        assert table.weight(o) == pytest.approx(ref / h**2, rel=1e-10)


def test_origin_cell_2d_against_polar():
    # int over the square [-a, a]^2 of |z|^(alpha-2) = 8 int_0^{pi/4} (a sec t)^alpha / alpha dt
    dom = build_domain(2, [(0, 1), (0, 1)], 10)
    a, alpha = dom.h / 2, 0.7
    ref = 8 * integrate.quad(lambda t: (a / math.cos(t)) ** alpha / alpha, 0, math.pi / 4,
                             epsabs=1e-15)[0]
    table = build_table(KernelSpec.riesz(alpha, 2), dom)
    assert table.weight((0, 0)) == pytest.approx(ref / dom.h**2, rel=1e-10)


def test_truncated_plus_tail_is_full():
    dom = build_domain(2, [(0, 2), (0, 2)], 10)
    full = build_table(KernelSpec.riesz(0.8, 2), dom).weights
    trunc = build_table(KernelSpec.truncated(0.8, 1.0, 2), dom).weights
    tail = build_table(KernelSpec.tail(0.8, 2), dom).weights
    np.testing.assert_allclose(trunc + tail, full, rtol=1e-10)


def test_zero_alpha_truncated_excludes_origin():
    dom = build_domain(1, (0, 2), 32)
    table = build_table(KernelSpec.truncated(0.0, 1.0), dom)
    assert table.origin_excluded
    assert table.weight(0) == 0.0
    assert table.mass() == pytest.approx(ring_mass(0.0, 1, dom.h), rel=1e-12)


def test_l1_values():
    assert kernel_l1_truncated(0.5, 1, 1) == pytest.approx(4.0)
    assert kernel_l1_truncated(1, 1, 2) == pytest.approx(2 * math.pi)
    assert kernel_l1_truncated(0.5, 2, 1) == pytest.approx(4 * math.sqrt(2))
    with pytest.raises(InputError):
        kernel_l1_truncated(1.0, 1, 1)


def test_fourier_constant_values():
    assert fourier_constant(1, 2) == pytest.approx(2 * math.pi, rel=1e-13)
    assert fourier_constant(0.5, 1) == pytest.approx(math.sqrt(2 * math.pi), rel=1e-13)
    ref = float(2**0.5 * mpmath.pi * mpmath.gamma(0.25) / mpmath.gamma(0.75))
    assert fourier_constant(0.5, 2) == pytest.approx(ref, rel=1e-12)
    assert fourier_constant(0.5, 2) == pytest.approx(13.1450, abs=1e-4)


@given(st.floats(0.01, 0.99))
def test_fourier_constant_reflection(alpha):
    assert fourier_constant(alpha, 1) * fourier_constant(1 - alpha, 1) == pytest.approx(
        2 * math.pi, rel=1e-11)


def test_fourier_identity():
    assert fourier_lhs(0.5) == pytest.approx(float(mpmath.gamma(0.25)), rel=1e-10)
    assert fourier_lhs(0.5) == pytest.approx(3.625610, abs=1e-6)
    assert check_fourier_identity(0.5, 1, 4096) <= 1e-6


def test_fourier_identity_domain():
    with pytest.raises(InputError):
        check_fourier_identity(0.5, 2)


def test_taylor_defect_examples():
    assert taylor_defect(1 - 1e-6, 0.5) <= 0.5 + 1e-3
    assert taylor_defect(0.5, 1.0) == 0.0
    v = taylor_defect(0.9, 0.1)
    assert math.isfinite(v) and v <= 1.0


def test_ring_mass_matches_kernel_l1():
    h = 1 / 64
    for alpha in (0.3, 0.8):
        full = kernel_l1_truncated(alpha, 1, 1)
        assert ring_mass(alpha, 1, h) == pytest.approx(full - 2 * (h / 2) ** alpha / alpha)
    dom = build_domain(2, [(0, 1), (0, 1)], 64)
    w0 = build_table(KernelSpec.riesz(0.7, 2), dom).weight((0, 0)) * dom.h**2
    assert ring_mass(0.7, 2, dom.h) + w0 == pytest.approx(sphere_area(2) / 0.7, rel=1e-12)
