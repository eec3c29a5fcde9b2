import math

import numpy as np
import pytest
from conftest import read_csv

from vilentropy.errors import InputError, ResourceError
from vilentropy.radix_group import GroupPoint, ParityClass, RadixSequence, classify, neg, oplus, parse_radix
from vilentropy.vilenkin_basis import (
    OrderingMode,
    X,
    Y,
    basis_on_codes,
    integrate_cylinder,
    psi,
    psi_on_codes,
    real_basis,
    trig_basis,
    vilenkin_table,
    z_identity,
)

# documented misprints in the printed s=3 table: the Z column is right
S3_NEG_FIXES = {23: 16, 24: 12}


def _check_table(radix, rows, start, fixes=None):
    fixes = fixes or {}
    got = vilenkin_table(radix, len(rows), start)
    for want, have in zip(rows, got):
        n = int(want["n"])
        assert have["n"] == n
        cols = sorted((k for k in want if k.startswith("n") and k[1:].isdigit()), key=lambda k: int(k[1:]))
        for col in cols:
            pos = int(col[1:])
            digit = have["digits"][pos] if pos < len(have["digits"]) else 0
            assert digit == int(want[col]), (n, col)
        printed = int(want["neg"])
        expected = fixes.get(n, printed)
        assert have["neg"] == expected, n
        assert have["class"] == want["class"], n
        assert have["Z"] == want["Z"], n
        assert have["Ztilde"] == want["Ztilde"], n
        if n in fixes:
            assert printed != expected
            # the row's own Z entry pins the inverse: Z_n = Y_{(-)n} on L
            assert want["Z"] == f"Y_{expected}"


def test_golden_s3():
    _check_table(RadixSequence.constant(3), read_csv("vilenkin_s3_0_27.csv"), 0, S3_NEG_FIXES)


def test_golden_s4():
    r4 = RadixSequence.constant(4)
    _check_table(r4, read_csv("vilenkin_s4_0_15.csv"), 0)
    upper = read_csv("vilenkin_s4_32_47.csv")
    _check_table(r4, upper, 32)
    lower = read_csv("vilenkin_s4_0_15.csv")
    assert [r["class"] for r in upper] == [r["class"] for r in lower]


def test_s3_row27_digits_are_truncated_in_print():
    row = read_csv("vilenkin_s3_0_27.csv")[27]
    assert (row["n2"], row["n1"], row["n0"]) == ("0", "0", "0")
    assert vilenkin_table(RadixSequence.constant(3), 1, 27)[0]["digits"] == (0, 0, 0, 1)


def test_ztilde_is_not_z_of_inverse_on_K():
    r3 = RadixSequence.constant(3)
    assert z_identity(1, "ztilde", r3) == ("X", 1)
    assert z_identity(neg(1, r3), "z", r3) == ("Y", 1)


@pytest.mark.parametrize("pattern", ["2", "3", "4", "2,3"])
def test_character_laws(pattern):
    r = parse_radix(pattern)
    rng = np.random.default_rng(7)
    depth = 8
    codes = rng.integers(0, r.P(depth), size=64)
    for _ in range(60):
        n, m = (int(v) for v in rng.integers(0, r.P(depth), size=2))
        a, b = psi_on_codes(n, codes, depth, r), psi_on_codes(m, codes, depth, r)
        assert np.max(np.abs(psi_on_codes(oplus(n, m, r), codes, depth, r) - a * b)) <= 1e-12
        assert np.max(np.abs(psi_on_codes(neg(n, r), codes, depth, r) - np.conj(a))) <= 1e-12


def test_psi_scalar_matches_vector():
    r = parse_radix("2,3")
    codes = np.arange(r.P(4))
    for n in (0, 1, 5, 17, 35):
        vec = psi_on_codes(n, codes, 4, r)
        for c in (0, 7, 23):
            assert abs(psi(n, GroupPoint.from_code(c, r, 4), r) - vec[c]) < 1e-15


def test_real_functions():
    r4 = RadixSequence.constant(4)
    x = GroupPoint.from_code(7, r4, 2)
    assert Y(2, x, r4) == 0.0  # M class
    assert abs(X(1, x, r4) - math.sqrt(2) * psi(1, x, r4).real) < 1e-15
    assert abs(real_basis(3, "ztilde", x, r4) - Y(3, x, r4)) < 1e-15
    assert abs(real_basis(3, "z", x, r4) - Y(1, x, r4)) < 1e-15


@pytest.mark.parametrize("pattern,mode", [("3", "z"), ("3", "ztilde"), ("2,3", "z"), ("2,3", "ztilde"), ("4", "z")])
def test_orthonormal_on_cylinder(pattern, mode):
    r = parse_radix(pattern)
    depth = 3
    size = r.P(depth)
    codes = np.arange(size)
    B = np.array([basis_on_codes(n, mode, codes, depth, r) for n in range(size)])
    gram = B @ B.T / size
    assert np.max(np.abs(gram - np.eye(size))) <= 1e-12


def test_integrate_cylinder_and_budget(monkeypatch):
    r3 = RadixSequence.constant(3)
    assert integrate_cylinder(lambda c: np.ones(len(c)), 3, r3) == 1.0
    val = integrate_cylinder(lambda c: psi_on_codes(1, c, 3, r3), 3, r3)
    assert abs(val) < 1e-15
    monkeypatch.setenv("VILENTROPY_INTEGRATION_BUDGET", "10")
    with pytest.raises(ResourceError):
        integrate_cylinder(lambda c: np.ones(len(c)), 3, r3)
    with pytest.raises(InputError):
        integrate_cylinder(lambda c: np.ones(2), 1, r3)


def test_trig_basis():
    x = np.linspace(0, 2 * np.pi, 4096, endpoint=False)
    F = np.array([trig_basis(m, x) for m in range(9)])
    assert np.max(np.abs(F @ F.T / x.size - np.eye(9))) < 1e-12
    assert trig_basis(0, 1.0) == 1.0
    with pytest.raises(InputError):
        trig_basis(-1, 0.0)


def test_ordering_parse():
    assert OrderingMode.parse("ZTILDE") is OrderingMode.ZTILDE
    with pytest.raises(InputError):
        OrderingMode.parse("w")


def test_classes_of_s4_table():
    r4 = RadixSequence.constant(4)
    assert [classify(n, r4).value for n in range(4)] == ["M", "K", "M", "L"]
    assert classify(8, r4) is ParityClass.M
