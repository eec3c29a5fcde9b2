import math

import mpmath
import numpy as np
import pytest

from vilentropy.bounds import (
    A_N_k,
    chi_k,
    constants,
    g_function,
    g_maximizer,
    levy_mean_estimate,
    lower_bound_expr,
    smallest_b,
    sup_A,
    upper_bound_expr,
    volume_factor,
)
from vilentropy.errors import InputError
from vilentropy.index_lattice import count_A
from vilentropy.multiplier import MultiplierSpec
from vilentropy.product_system import LayerWindow, ProductSpec

EXP_MAX = MultiplierSpec.exponential(1.0, 1.0, "max")


def test_A_examples():
    assert A_N_k(EXP_MAX, 2, 0, 1) == pytest.approx(-1.0)
    assert A_N_k(EXP_MAX, 36, 1000, 1) == pytest.approx(-36.7337, abs=5e-4)
    with pytest.raises(InputError):
        A_N_k(MultiplierSpec.finite(1.0), 1, 0, 1)


def test_sup_A_examples():
    N, v = sup_A(EXP_MAX, 1000, 1)
    assert N == 36 and v == pytest.approx(-36.7337, abs=5e-4)
    brute = max(A_N_k(EXP_MAX, n, 1000, 1) for n in range(1, 2000))
    assert v == brute
    _, big = sup_A(EXP_MAX, 10**6, 1)
    assert 0.98 <= big / (-constants(1, 1, 1).C_star * 1e3) <= 1.0
    vals = [sup_A(EXP_MAX, k, 1)[1] for k in (10, 100, 1000, 10000)]
    assert all(b < a for a, b in zip(vals, vals[1:]))


def test_constants():
    c = constants(1, 1, 1)
    assert c.C == pytest.approx(math.sqrt(2 * math.log(2)), abs=1e-14)
    assert c.C_star == pytest.approx(c.C, abs=1e-14)
    c2 = constants(2, 1, 1)
    with mpmath.workdps(30):
        assert abs(c2.C - float(mpmath.cbrt(12 * mpmath.log(2) / mpmath.pi))) < 1e-13
        assert abs(c2.C_star - float(mpmath.cbrt(3 * mpmath.log(2)))) < 1e-13
    for r in (0.25, 0.5, 1.0):
        for g in (0.5, 1.0, 2.0):
            c = constants(1, r, g)
            assert abs(c.C - c.C_star) <= 1e-12
    # odd d goes through the half-integer Gamma recursion
    c5 = constants(5, 0.5, 1.5)
    with mpmath.workdps(30):
        inner = 5.5 * 16 * 5 * mpmath.gamma(2.5) * mpmath.log(2) / (0.5 * mpmath.pi**2.5)
        want = mpmath.mpf(1.5) ** (5 / 5.5) * inner ** (0.5 / 5.5)
    assert c5.C == pytest.approx(float(want), rel=1e-13)
    with pytest.raises(InputError):
        constants(0, 1, 1)


def test_g_maximizer():
    g0 = g_maximizer(1, 0, 1, 100)
    assert g0.x == pytest.approx(100 * math.log(2), rel=1e-10)
    g1 = g_maximizer(1, 1, 1, 100)
    assert 28.38 <= g1.x <= 69.32
    eps = 1e-4 * g1.x
    assert g1.g >= g_function(g1.x - eps, 1, 1, 1, 100)
    assert g1.g >= g_function(g1.x + eps, 1, 1, 1, 100)
    resid = [g_maximizer(1, 1, 1, k).g + math.log2(k) + math.log2(math.log2(k)) for k in (1e2, 1e3, 1e4, 1e5, 1e6)]
    assert max(abs(r) for r in resid) < 5


def test_lower_bound_example():
    s = MultiplierSpec.finite(2.0, mode="max")
    rep = lower_bound_expr(s, 5, 2, 2, 1, N=4)
    assert rep.n == 5
    assert rep.details["product_term"] == pytest.approx(0.5 * 576 ** (-1 / 5), rel=1e-12)
    assert rep.details["product_term"] >= 0.0625  # lambda(4)
    assert rep.constants_normalized


def test_volume_factor_cases():
    assert volume_factor(16, 2, 2) == 1.0
    assert volume_factor(16, math.inf, 1) == pytest.approx(1 / 4)
    assert volume_factor(16, math.inf, 2) == pytest.approx(1 / 2)
    assert volume_factor(16, 2, 1) == pytest.approx(1 / 2)


def test_product_domination_at_k_equals_n():
    for s in (MultiplierSpec.finite(1.0), MultiplierSpec.exponential(0.5, 0.5)):
        for d in (1, 2):
            for N in (2, 5, 9):
                n = count_A(d, s.mode, N)
                rep = lower_bound_expr(s, n, 2, 2, d, N=N)
                assert rep.details["product_term"] >= 0.5 * rep.details["lambda_N"]


def test_chi_examples():
    s = MultiplierSpec.finite(1.0, mode="max")
    rep = chi_k(s, 10, 2, 1)
    assert rep.N == 6 and rep.value == pytest.approx(0.481, abs=1e-3)
    vals = [chi_k(s, k, 2, 1).value for k in (10, 20, 40, 80)]
    assert all(b < a for a, b in zip(vals, vals[1:]))
    e = MultiplierSpec.exponential(1, 1, "max")
    k = 200
    c = chi_k(e, k, 2, 1)
    N, a = sup_A(e, k - 1, 1)
    assert N == c.N
    assert c.value / math.exp(a) == pytest.approx(3.0, rel=1e-12)


def test_chi_montecarlo_is_seeded():
    s = MultiplierSpec.finite(1.0, mode="max")
    a = chi_k(s, 8, 4.0, 1, "montecarlo", 20000, 3)
    b = chi_k(s, 8, 4.0, 1, "montecarlo", 20000, 3)
    assert a == b
    assert a.details["volume_ratios"]["1"] >= 1.0  # B_(4) sits inside B_(2)
    with pytest.raises(InputError):
        chi_k(s, 8, 4.0, 1, "montecarlo", 20000, None)


def test_smallest_b():
    assert smallest_b(0.2, 0.5) == 2
    assert smallest_b(0.6, 0.5) == 0
    assert smallest_b(0.25, 0.5) == 1


def test_upper_bound_q2():
    rep = upper_bound_expr(EXP_MAX, 100, 2, 2, 1, 0.5)
    d = rep.details
    assert math.isfinite(rep.value)
    assert d["main"] == pytest.approx(math.sqrt(2))
    assert rep.value == pytest.approx(d["lambda_N"] * (d["main"] + d["tail"]))
    assert d["index"] == d["eta"] + d["b"] * rep.n
    assert d["eta"] == 100 + sum(d["m"])
    with pytest.raises(InputError):
        upper_bound_expr(EXP_MAX, 100, 1.5, 2, 1, 0.5)


def test_upper_eta_over_k():
    ratios = [upper_bound_expr(EXP_MAX, k, 2, 2, 1, 0.5).details["eta"] / k for k in (100, 1000, 10000)]
    assert ratios[-1] <= ratios[0] and abs(ratios[-1] - 1) < 0.05


@pytest.mark.parametrize("spec", [MultiplierSpec.finite(2.0), MultiplierSpec.exponential(1.0, 0.5)], ids=str)
@pytest.mark.parametrize("q", [2.0, math.inf])
def test_bounds_monotone_and_coherent(spec, q):
    ups, los = [], []
    for k in (16, 64, 256):
        u = upper_bound_expr(spec, k, 2, q, 2, 0.5)
        assert lower_bound_expr(spec, u.details["index"], 2, q, 2).value <= u.value
        ups.append(u.value)
        los.append(lower_bound_expr(spec, k, 2, q, 2).value)
    assert ups == sorted(ups, reverse=True)
    assert los == sorted(los, reverse=True)


def test_levy_p2_is_one():
    est = levy_mean_estimate(LayerWindow(-1, 15, "max"), ProductSpec.walsh(1), 2.0, 2000, 1)
    assert abs(est.estimate - 1.0) < 1e-12
    est4 = levy_mean_estimate(LayerWindow(-1, 15, "max"), ProductSpec.walsh(1), 4.0, 5000, 1)
    assert 1.0 - 3 * est4.stderr <= est4.estimate <= 2.0 * math.sqrt(4)
    again = levy_mean_estimate(LayerWindow(-1, 15, "max"), ProductSpec.walsh(1), 4.0, 5000, 1, chunk=777)
    assert again.estimate == est4.estimate
    with pytest.raises(InputError):
        levy_mean_estimate(LayerWindow(-1, 3, "max"), ProductSpec.walsh(1), 2.0, 10, 1)
