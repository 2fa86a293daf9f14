from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy import Rational
from sympy.physics.wigner import clebsch_gordan as sym_cg
from sympy.physics.wigner import wigner_6j as sym_6j

from he3light.angular import (HalfInteger, build_tensor_ops, clebsch_gordan, commutator_closed_form,
                              commutator_table, decompose, spin_matrices, wigner6j, wigner6j_squared)

half = st.integers(min_value=0, max_value=8).map(lambda k: Fraction(k, 2))


def test_half_integer_parsing():
    assert HalfInteger.of("3/2").twice_value == 3
    assert HalfInteger.of(1.5).value == Fraction(3, 2)
    assert float(HalfInteger.of(2)) == 2.0
    with pytest.raises(ValueError):
        HalfInteger.of(Fraction(1, 3))


def test_known_6j_values():
    # {1 1 1; 1 1 1} = 1/6, {1/2 1/2 1; 1/2 1/2 0} = 1/2 up to sign
    assert wigner6j(1, 1, 1, 1, 1, 1) == pytest.approx(1 / 6)
    assert wigner6j_squared(Fraction(1, 2), Fraction(1, 2), 1, Fraction(1, 2), Fraction(1, 2), 0) == Fraction(1, 4)


def test_6j_triangle_violation_is_zero():
    assert wigner6j(1, 1, 3, 1, 1, 1) == 0.0


@settings(max_examples=150, deadline=None)
@given(half, half, half, half, half, half)
def test_6j_matches_sympy(a, b, c, d, e, f):
    try:
        ref = float(sym_6j(*(Rational(x.numerator, x.denominator) for x in (a, b, c, d, e, f))))
    except ValueError:  # sympy rejects non-integer triads; the symbol is zero there
        ref = 0.0
    assert wigner6j(a, b, c, d, e, f) == pytest.approx(ref, abs=1e-13)


@settings(max_examples=150, deadline=None)
@given(half, half, half, half, half, half)
def test_6j_column_and_row_symmetries(a, b, c, d, e, f):
    v = wigner6j(a, b, c, d, e, f)
    assert wigner6j(b, a, c, e, d, f) == pytest.approx(v, abs=1e-14)
    assert wigner6j(a, c, b, d, f, e) == pytest.approx(v, abs=1e-14)
    assert wigner6j(d, e, c, a, b, f) == pytest.approx(v, abs=1e-14)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 4), st.integers(0, 4), st.data())
def test_cg_matches_sympy(tj1, tj2, data):
    j1, j2 = Fraction(tj1, 2), Fraction(tj2, 2)
    J = data.draw(st.sampled_from([abs(j1 - j2) + k for k in range(int(j1 + j2 - abs(j1 - j2)) + 1)]))
    m1 = data.draw(st.sampled_from([-j1 + k for k in range(tj1 + 1)]))
    m2 = data.draw(st.sampled_from([-j2 + k for k in range(tj2 + 1)]))
    R = lambda x: Rational(x.numerator, x.denominator)
    ref = float(sym_cg(R(j1), R(j2), R(J), R(m1), R(m2), R(m1 + m2))) if abs(m1 + m2) <= J else 0.0
    assert clebsch_gordan(j1, m1, j2, m2, J, m1 + m2) == pytest.approx(ref, abs=1e-13)


@pytest.mark.parametrize("F", [0.5, 1.5])
def test_spin_algebra(F):
    Fx, Fy, Fz, Fp, Fm = spin_matrices(F)
    assert np.allclose(Fx @ Fy - Fy @ Fx, 1j * Fz)
    assert np.allclose(Fx @ Fx + Fy @ Fy + Fz @ Fz, F * (F + 1) * np.eye(int(2 * F + 1)))
    assert np.allclose(Fp, Fx + 1j * Fy)


@pytest.mark.parametrize("F, count", [(0.5, 4), (1.5, 16)])
def test_tensor_basis_is_orthonormal_and_complete(F, count):
    ops = build_tensor_ops(F)
    assert len(ops.tensors) == count
    for (l, m), t in ops.tensors.items():
        for lm2, t2 in ops.tensors.items():
            assert np.trace(t.conj().T @ t2) == pytest.approx(float((l, m) == lm2), abs=1e-13)
        # Hermitian pairs
        assert np.allclose(ops.tensors[(l, -m)], (-1) ** m * t.conj().T)
    rng = np.random.default_rng(0)
    X = rng.normal(size=(ops.dim, ops.dim)) + 1j * rng.normal(size=(ops.dim, ops.dim))
    rebuilt = sum(c * ops.tensors[lm] for lm, c in decompose(X, ops).items())
    assert np.allclose(rebuilt, X)


def test_tensor_hermitian_combinations():
    ops = build_tensor_ops(1.5)
    for name, mat in ops.matrices.items():
        if name[0] in "RIT":
            assert np.allclose(mat, mat.conj().T), name


def test_rank_one_tensors_are_spin_components():
    ops = build_tensor_ops(1.5)
    Fz = ops.matrices["Fz"]
    assert np.allclose(ops.tensors[(1, 0)], Fz / np.sqrt(np.trace(Fz @ Fz).real))


@pytest.mark.parametrize("F", [0.5, 1.5])
def test_commutators_follow_closed_form(F):
    ops = build_tensor_ops(F)
    for (a, b), numeric in commutator_table(ops).items():
        closed = commutator_closed_form(ops, *a, *b)
        for key in set(numeric) | set(closed):
            assert abs(numeric.get(key, 0) - closed.get(key, 0)) < 1e-13, (a, b, key)


def test_unsupported_manifold():
    with pytest.raises(ValueError):
        build_tensor_ops(1)
