import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from sympy import Rational
from sympy.physics.wigner import wigner_3j as sympy_3j

from rydcool.angular import (
    HalfInt,
    SqrtRational,
    dipole_angular_matrix,
    wigner_3j,
    wigner_3j_exact,
)


@st.composite
def valid_3j(draw, max_twice=8):
    t1 = draw(st.integers(0, max_twice))
    t2 = draw(st.integers(0, max_twice))
    lo, hi = abs(t1 - t2), t1 + t2
    t3 = draw(st.sampled_from(list(range(lo, hi + 1, 2))))
    u1 = draw(st.sampled_from(list(range(-t1, t1 + 1, 2))))
    u2 = draw(st.sampled_from(list(range(-t2, t2 + 1, 2))))
    u3 = -u1 - u2
    if abs(u3) > t3:
        u3 = None
    return [Fraction(x, 2) if x is not None else None for x in (t1, t2, t3, u1, u2, u3)]


def _sympy(args):
    return float(sympy_3j(*(Rational(x.numerator, x.denominator) for x in args)))


def test_halfint_parsing():
    assert HalfInt.of("3/2").twice_value == 3
    assert HalfInt.of(1.5) == HalfInt.of(Fraction(3, 2))
    assert str(HalfInt.of(-0.5)) == "-1/2"
    assert [str(m) for m in HalfInt.of(1).projections()] == ["-1", "0", "1"]
    with pytest.raises(ValueError):
        HalfInt.of(0.25)
    with pytest.raises(TypeError):
        HalfInt.of(True)


def test_3j_reference_values():
    assert wigner_3j(1, 1, 0, 0, 0, 0) == pytest.approx(-1 / math.sqrt(3), abs=1e-15)
    assert wigner_3j(1, 1, 1, 1, 1, 0) == 0.0
    assert wigner_3j(2, 1, 3, 2, 1, -3) == pytest.approx(math.sqrt(1 / 7), abs=1e-15)


def test_3j_is_exact():
    assert wigner_3j_exact(1, 1, 0, 0, 0, 0) == SqrtRational(-1, Fraction(1, 3))
    assert wigner_3j_exact(2, 1, 3, 2, 1, -3) == SqrtRational(1, Fraction(1, 7))


def test_3j_selection_rules_give_exact_zero():
    assert wigner_3j(1, 1, 3, 0, 0, 0) == 0.0  # triangle
    assert wigner_3j(1, 1, 1, 0, 0, 0) == 0.0  # odd J with all m = 0
    assert wigner_3j("1/2", "1/2", 1, "1/2", "1/2", 0) == 0.0  # m sum


@pytest.mark.parametrize(
    "args",
    [(1, 1, 1, "1/2", 0, "-1/2"), (-1, 1, 0, 0, 0, 0), ("1/2", "1/2", 1, 1, 0, -1)],
)
def test_3j_malformed_arguments(args):
    with pytest.raises(ValueError):
        wigner_3j(*args)


@settings(max_examples=300, deadline=None)
@given(valid_3j())
def test_3j_matches_sympy(args):
    if args[5] is None:
        return
    assert wigner_3j(*args) == pytest.approx(_sympy(args), abs=1e-14)


@settings(max_examples=200, deadline=None)
@given(valid_3j())
def test_3j_permutation_symmetry(args):
    if args[5] is None:
        return
    j1, j2, j3, m1, m2, m3 = args
    base = wigner_3j(*args)
    phase = -1 if int(j1 + j2 + j3) % 2 else 1
    assert wigner_3j(j2, j3, j1, m2, m3, m1) == pytest.approx(base, abs=1e-14)
    assert wigner_3j(j3, j1, j2, m3, m1, m2) == pytest.approx(base, abs=1e-14)
    assert wigner_3j(j2, j1, j3, m2, m1, m3) == pytest.approx(phase * base, abs=1e-14)
    assert wigner_3j(j1, j3, j2, m1, m3, m2) == pytest.approx(phase * base, abs=1e-14)
    assert wigner_3j(j1, j2, j3, -m1, -m2, -m3) == pytest.approx(phase * base, abs=1e-14)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 4), st.integers(0, 4))
def test_3j_orthogonality(t1, t2):
    j1, j2 = Fraction(t1, 2), Fraction(t2, 2)
    j3s = [Fraction(t, 2) for t in range(abs(t1 - t2), t1 + t2 + 1, 2)]
    m1s = [m.value for m in HalfInt(t1).projections()]
    m2s = [m.value for m in HalfInt(t2).projections()]
    for j3 in j3s:
        for j3p in j3s:
            for m3 in [m.value for m in HalfInt.of(j3).projections()]:
                for m3p in [m.value for m in HalfInt.of(j3p).projections()]:
                    s = sum(
                        (2 * j3 + 1) * wigner_3j(j1, j2, j3, m1, m2, m3) * wigner_3j(j1, j2, j3p, m1, m2, m3p)
                        for m1 in m1s
                        for m2 in m2s
                    )
                    want = 1.0 if (j3 == j3p and m3 == m3p) else 0.0
                    assert s == pytest.approx(want, abs=1e-12)


def test_3j_large_arguments_stay_exact():
    j1, j2 = 15, 12
    jj = j1 + j2
    # fully stretched: |value| = 1/sqrt(2J+1)
    assert wigner_3j(j1, j2, jj, j1, j2, -jj) == pytest.approx((-1) ** (j1 - j2 + jj) / math.sqrt(2 * jj + 1), rel=1e-13)
    args = [Fraction(x) for x in (40, 37, 21, 3, -5, 2)]
    assert wigner_3j(*args) == pytest.approx(_sympy(args), rel=1e-12)


# ---------------------------------------------------------------------------
# dipole-dipole angular matrix


def _cartesian_d(theta, phi):
    """Independent evaluator: spherical components of I - 3 n n^T."""
    n = np.array([math.sin(theta) * math.cos(phi), math.sin(theta) * math.sin(phi), math.cos(theta)])
    t = np.eye(3) - 3 * np.outer(n, n)
    e = {
        1: -np.array([1, 1j, 0]) / math.sqrt(2),
        0: np.array([0, 0, 1.0]),
        -1: np.array([1, -1j, 0]) / math.sqrt(2),
    }
    out = np.zeros((3, 3), dtype=complex)
    for q1 in (-1, 0, 1):
        for q2 in (-1, 0, 1):
            out[q1 + 1, q2 + 1] = (-1) ** (q1 + q2) * e[-q1] @ t @ e[-q2]
    return out


def test_d_matrix_special_angles():
    for phi in (0.0, 0.7, -2.0):
        assert np.allclose(dipole_angular_matrix(0.0, phi).entries, [[0, 0, -1], [0, -2, 0], [-1, 0, 0]], atol=1e-15)
    want = [[-1.5, 0, 0.5], [0, 1, 0], [0.5, 0, -1.5]]
    assert np.allclose(dipole_angular_matrix(math.pi / 2, 0.0).entries, want, atol=1e-15)


def test_d_matrix_entry_at_quarter_angle():
    d = dipole_angular_matrix(math.pi / 4, math.pi / 2)
    assert d[-1, 0] == pytest.approx(-3 / (2 * math.sqrt(2)) * 1j, abs=1e-15)


@settings(max_examples=100, deadline=None)
@given(st.floats(0, math.pi), st.floats(-math.pi, math.pi))
def test_d_matrix_matches_cartesian_construction(theta, phi):
    assert np.allclose(dipole_angular_matrix(theta, phi).entries, _cartesian_d(theta, phi), atol=1e-13)


@settings(max_examples=100, deadline=None)
@given(st.floats(0, math.pi), st.floats(-math.pi, math.pi))
def test_d_matrix_symmetries(theta, phi):
    d = dipole_angular_matrix(theta, phi)
    assert np.allclose(d.entries, np.conj(dipole_angular_matrix(theta, -phi).entries), atol=1e-15)
    for q in (-1, 0, 1):
        for qp in (-1, 0, 1):
            assert d[q, qp] == pytest.approx((-1) ** (q + qp) * np.conj(d[-qp, -q]), abs=1e-15)
