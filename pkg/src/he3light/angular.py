"""Exact angular-momentum coefficients and spin / irreducible tensor matrices.

Basis ordering for every matrix is increasing magnetic quantum number,
m = -F, ..., +F.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import factorial, sqrt
from typing import Dict, Iterator, Tuple, Union

import numpy as np

Number = Union[int, float, Fraction, str, "HalfInteger"]


@dataclass(frozen=True, order=True)
class HalfInteger:
    """Non-negative-or-signed half-integer stored as twice its value."""

    twice_value: int

    def __post_init__(self):
        if not isinstance(self.twice_value, (int, np.integer)):
            raise TypeError("twice_value must be an integer")

    @classmethod
    def of(cls, x: Number) -> "HalfInteger":
        if isinstance(x, HalfInteger):
            return x
        if isinstance(x, str):
            x = Fraction(x)
        twice = Fraction(x) * 2 if not isinstance(x, float) else Fraction(x).limit_denominator(2) * 2
        if twice.denominator != 1:
            raise ValueError(f"{x!r} is not a half-integer")
        return cls(int(twice))

    @property
    def value(self) -> Fraction:
        return Fraction(self.twice_value, 2)

    def __float__(self) -> float:
        return self.twice_value / 2

    def __repr__(self) -> str:
        v = self.value
        return f"HalfInteger({v.numerator}/{v.denominator})" if v.denominator == 2 else f"HalfInteger({v.numerator})"


def _twice(x: Number) -> int:
    return HalfInteger.of(x).twice_value


# ---------------------------------------------------------------------------
# Racah formulae (exact)
# ---------------------------------------------------------------------------

def _triangle_ok(a2: int, b2: int, c2: int) -> bool:
    return (a2 + b2 + c2) % 2 == 0 and abs(a2 - b2) <= c2 <= a2 + b2


def _delta_sq(a2: int, b2: int, c2: int) -> Fraction:
    # triangle coefficient squared, arguments given as twice the value
    return Fraction(
        factorial((a2 + b2 - c2) // 2) * factorial((a2 - b2 + c2) // 2) * factorial((-a2 + b2 + c2) // 2),
        factorial((a2 + b2 + c2) // 2 + 1),
    )


@lru_cache(maxsize=None)
def _sixj_parts(j1, j2, j3, j4, j5, j6) -> Tuple[Fraction, Fraction]:
    """Return (S, P) with {6j} = S * sqrt(P), both exact rationals."""
    triads = ((j1, j2, j3), (j1, j5, j6), (j4, j2, j6), (j4, j5, j3))
    if not all(_triangle_ok(*t) for t in triads):
        return Fraction(0), Fraction(1)
    pref = Fraction(1)
    for t in triads:
        pref *= _delta_sq(*t)
    # all sums below are integers because each triad has even parity
    a = [sum(t) // 2 for t in triads]
    b = [(j1 + j2 + j4 + j5) // 2, (j2 + j3 + j5 + j6) // 2, (j3 + j1 + j6 + j4) // 2]
    total = Fraction(0)
    for z in range(max(a), min(b) + 1):
        den = 1
        for ai in a:
            den *= factorial(z - ai)
        for bi in b:
            den *= factorial(bi - z)
        total += Fraction((-1) ** z * factorial(z + 1), den)
    return total, pref


def wigner6j(j1: Number, j2: Number, j3: Number, j4: Number, j5: Number, j6: Number) -> float:
    """Wigner 6j symbol {j1 j2 j3; j4 j5 j6}; zero if any triad is not a triangle."""
    args = tuple(_twice(j) for j in (j1, j2, j3, j4, j5, j6))
    if any(a < 0 for a in args):
        raise ValueError("angular momenta must be non-negative")
    s, p = _sixj_parts(*args)
    return float(s) * sqrt(p)


def wigner6j_squared(j1: Number, j2: Number, j3: Number, j4: Number, j5: Number, j6: Number) -> Fraction:
    """Exact square of the 6j symbol (always rational)."""
    args = tuple(_twice(j) for j in (j1, j2, j3, j4, j5, j6))
    if any(a < 0 for a in args):
        raise ValueError("angular momenta must be non-negative")
    s, p = _sixj_parts(*args)
    return s * s * p


@lru_cache(maxsize=None)
def _cg_parts(j1, m1, j2, m2, J, M) -> Tuple[Fraction, Fraction]:
    if m1 + m2 != M or not _triangle_ok(j1, j2, J):
        return Fraction(0), Fraction(1)
    for j, m in ((j1, m1), (j2, m2), (J, M)):
        if abs(m) > j or (j + m) % 2:
            return Fraction(0), Fraction(1)
    f = lambda k2: factorial(k2 // 2)
    pref = Fraction((J + 1) * f(J + j1 - j2) * f(J - j1 + j2) * f(j1 + j2 - J), f(j1 + j2 + J + 2))
    pref *= f(J + M) * f(J - M) * f(j1 - m1) * f(j1 + m1) * f(j2 - m2) * f(j2 + m2)
    total = Fraction(0)
    for k in range(0, (j1 + j2 + J) // 2 + 1):
        terms = [j1 + j2 - J - 2 * k, j1 - m1 - 2 * k, j2 + m2 - 2 * k,
                 J - j2 + m1 + 2 * k, J - j1 - m2 + 2 * k]
        if any(t < 0 for t in terms):
            continue
        den = factorial(k)
        for t in terms:
            den *= f(t)
        total += Fraction((-1) ** k, den)
    return total, pref


def clebsch_gordan(j1: Number, m1: Number, j2: Number, m2: Number, J: Number, M: Number) -> float:
    """Condon-Shortley coefficient <j1 m1 j2 m2 | J M>."""
    s, p = _cg_parts(*(_twice(x) for x in (j1, m1, j2, m2, J, M)))
    return float(s) * sqrt(p)


# ---------------------------------------------------------------------------
# Matrix representations
# ---------------------------------------------------------------------------

def spin_matrices(F: Number):
    """Return (Fx, Fy, Fz, F+, F-) for spin F, m increasing."""
    F = float(HalfInteger.of(F))
    d = int(round(2 * F + 1))
    m = np.arange(-F, F + 1)
    Fz = np.diag(m).astype(complex)
    Fp = np.zeros((d, d), complex)
    for k in range(d - 1):
        Fp[k + 1, k] = sqrt(F * (F + 1) - m[k] * (m[k] + 1))
    Fm = Fp.conj().T
    return (Fp + Fm) / 2, (Fp - Fm) / 2j, Fz, Fp, Fm


def _norm_factor(l: int, m: int) -> float:
    s = 1 if m >= 0 else -1
    table = {
        (0, 0): 0.5,
        (1, 0): 1 / sqrt(5), (1, 1): -s / sqrt(10),
        (2, 0): 1 / 6, (2, 1): -s / (2 * sqrt(6)), (2, 2): 1 / (2 * sqrt(6)),
        (3, 0): 1 / (3 * sqrt(5)), (3, 1): -s / (4 * sqrt(15)),
        (3, 2): 1 / (3 * sqrt(6)), (3, 3): -s / 6,
    }
    return table[(l, abs(m))]


def _tensor_polynomial(l: int, m: int, Fz, Fp, Fm, F2, eye):
    P = Fp if m >= 0 else Fm
    am = abs(m)
    if l == 0:
        return eye
    if l == 1:
        return Fz if am == 0 else P
    if l == 2:
        return {0: 3 * Fz @ Fz - F2, 1: P @ Fz + Fz @ P, 2: P @ P}[am]
    if l == 3:
        if am == 0:
            return (5 * Fz @ Fz - 3 * F2 + eye) @ Fz
        if am == 1:
            X = 5 * Fz @ Fz - F2 - 0.5 * eye
            return X @ P + P @ X
        if am == 2:
            return P @ P @ Fz + P @ Fz @ P + Fz @ P @ P
        return P @ P @ P
    raise ValueError(l)


@dataclass(frozen=True)
class TensorOperatorSet:
    """Spin and irreducible tensor matrices for one hyperfine manifold.

    ``tensors[(l, m)]`` is t^l_m; ``matrices`` additionally holds the labels
    Fx, Fy, Fz, F+, F- and R(l,m) / I(l,m) for the Hermitian combinations
    (t + t^dagger)/sqrt2 and (t - t^dagger)/(i sqrt2), m > 0.
    """

    F: HalfInteger
    tensors: Dict[Tuple[int, int], np.ndarray]
    matrices: Dict[str, np.ndarray]
    norms: Dict[Tuple[int, int], float] = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.F.twice_value + 1

    @property
    def max_rank(self) -> int:
        return self.F.twice_value

    def t(self, l: int, m: int) -> np.ndarray:
        if l > self.max_rank:
            return np.zeros((self.dim, self.dim), complex)
        return self.tensors[(l, m)]

    def labels(self) -> Iterator[Tuple[int, int]]:
        return iter(self.tensors)


def build_tensor_ops(F: Number) -> TensorOperatorSet:
    """Tensor operator set for F = 1/2 or F = 3/2 (ranks up to 2F)."""
    Fh = HalfInteger.of(F)
    if Fh.twice_value not in (1, 3):
        raise ValueError(f"unsupported F = {Fh.value}; only 1/2 and 3/2 are implemented")
    Fx, Fy, Fz, Fp, Fm = spin_matrices(Fh)
    d = Fh.twice_value + 1
    eye = np.eye(d, dtype=complex)
    F2 = Fx @ Fx + Fy @ Fy + Fz @ Fz
    tensors, norms = {}, {}
    for l in range(0, Fh.twice_value + 1):
        for m in range(-l, l + 1):
            if Fh.twice_value == 1:
                # spin-1/2 shares the rank<=1 polynomials; normalise by trace
                op = _tensor_polynomial(l, m, Fz, Fp, Fm, F2, eye)
                nrm = _sign_convention(l, m) / sqrt(np.trace(op @ op.conj().T).real)
            else:
                op = _tensor_polynomial(l, m, Fz, Fp, Fm, F2, eye)
                nrm = _norm_factor(l, m)
            tensors[(l, m)] = nrm * op
            norms[(l, m)] = nrm
    mats = {"Fx": Fx, "Fy": Fy, "Fz": Fz, "F+": Fp, "F-": Fm}
    for (l, m), t in tensors.items():
        if m > 0:
            mats[f"R{l}{m}"] = (t + t.conj().T) / sqrt(2)
            mats[f"I{l}{m}"] = (t - t.conj().T) / (1j * sqrt(2))
        elif m == 0:
            mats[f"T{l}0"] = t
    return TensorOperatorSet(Fh, tensors, mats, norms)


def _sign_convention(l: int, m: int) -> float:
    # odd positive m carries a minus sign, as in the F=3/2 table
    return -1.0 if (m > 0 and m % 2) else 1.0


def decompose(op: np.ndarray, ops: TensorOperatorSet) -> Dict[Tuple[int, int], complex]:
    """Coefficients c with op = sum c_{lm} t^l_m (orthonormal basis)."""
    return {lm: complex(np.trace(t.conj().T @ op)) for lm, t in ops.tensors.items()}


def commutator_closed_form(ops: TensorOperatorSet, l1: int, m1: int, l2: int, m2: int) -> Dict[Tuple[int, int], float]:
    """Expansion of [t^l1_m1, t^l2_m2] from the 6j / Clebsch-Gordan rule."""
    F = ops.F
    out = {}
    for L in range(0, ops.max_rank + 1):
        if (l1 + l2 + L) % 2 == 0:
            continue
        M = m1 + m2
        if abs(M) > L:
            continue
        coeff = ((-1) ** (L + F.twice_value) * sqrt((2 * l1 + 1) * (2 * l2 + 1))
                 * wigner6j(l1, l2, L, F, F, F) * clebsch_gordan(l1, m1, l2, m2, L, M) * 2)
        if coeff != 0.0:
            out[(L, M)] = coeff
    return out


def commutator_table(ops: TensorOperatorSet) -> Dict[Tuple[Tuple[int, int], Tuple[int, int]], Dict[Tuple[int, int], complex]]:
    """Numerically decompose every commutator [t^l1_m1, t^l2_m2] in the basis."""
    table = {}
    for a, ta in ops.tensors.items():
        for b, tb in ops.tensors.items():
            c = decompose(ta @ tb - tb @ ta, ops)
            table[(a, b)] = {k: v for k, v in c.items() if abs(v) > 1e-14}
    return table
