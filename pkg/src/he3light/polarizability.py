"""Vector/tensor polarizabilities, cross sections and the couplings chi, eta, mu.

Two independent routes give the couplings: the closed-form sums over the
transition table, and an assembly from cross sections (6j symbols) and
polarizability weights.  They must agree to rounding error.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .angular import HalfInteger, wigner6j_squared
from .constants import GHZ, CellParams, PhysicalConstants, TransitionTable, default_transition_table

NUCLEAR_SPIN = HalfInteger(1)


class NearResonanceError(ValueError):
    """Probe detuning lies within Gamma of a transition."""


def _check_branch(F: HalfInteger, Fp: HalfInteger) -> int:
    diff = Fp.twice_value - F.twice_value
    if diff not in (-2, 0, 2):
        raise ValueError(f"F'={Fp.value} not reachable from F={F.value}")
    return diff // 2


def alpha_vector(F, J, Fp, Jp) -> Fraction:
    F, Fp = HalfInteger.of(F), HalfInteger.of(Fp)
    branch = _check_branch(F, Fp)
    f = F.value
    pre = Fraction(3 * (2 * Jp + 1), 2 * (Fp.twice_value + 1) * (2 * J + 1))
    bracket = {-1: -(2 * f - 1) / f, 0: -(2 * f + 1) / (f * (f + 1)), 1: (2 * f + 3) / (f + 1)}[branch]
    return pre * bracket


def alpha_tensor(F, J, Fp, Jp) -> Fraction:
    """Raw tensor weight from the hyperfine formula; non-zero even for F = 1/2.

    The operator it multiplies vanishes identically for spin 1/2, so
    :func:`tensor_weight` is what enters the couplings.
    """
    F, Fp = HalfInteger.of(F), HalfInteger.of(Fp)
    branch = _check_branch(F, Fp)
    f = F.value
    pre = -Fraction(3, 2) * (f + 1) * (2 * Jp + 1) / ((Fp.twice_value + 1) * (2 * J + 1))
    bracket = {-1: 1 / f, 0: -(2 * f + 1) / (f * (f + 1)), 1: 1 / (f + 1)}[branch]
    return pre * bracket


def tensor_weight(F, J, Fp, Jp) -> Fraction:
    """alpha^T/(F+1), zero when the manifold has no rank-2 operators."""
    F = HalfInteger.of(F)
    if F.twice_value < 2:
        return Fraction(0)
    return alpha_tensor(F, J, Fp, Jp) / (F.value + 1)


def cross_section(F, J, Fp, Jp, I=NUCLEAR_SPIN) -> Fraction:
    """sigma_F' / sigma_2 (exact)."""
    F, Fp, I = HalfInteger.of(F), HalfInteger.of(Fp), HalfInteger.of(I)
    if abs(Fp.twice_value - F.twice_value) > 2:
        return Fraction(0)
    sq = wigner6j_squared(Jp, 1, J, F, I, Fp)
    return Fraction(2 * (2 * J + 1) * (Fp.twice_value + 1), 3) * sq


@dataclass(frozen=True)
class CouplingConstants:
    """chi, eta, mu as used by the dynamics (s^-1 per photon) plus reference values.

    ``*_dimless``: the bracketed sums with Delta in units of 2pi GHz, i.e. the
    couplings divided by sigma2*Gamma/(4A).  ``*_abs``: the closed-form expressions
    evaluated literally in SI (Delta in rad/s).
    """

    chi: float
    eta: float
    mu: float
    detuning: Optional[float] = None
    chi_dimless: float = float("nan")
    eta_dimless: float = float("nan")
    mu_dimless: float = float("nan")
    prefactor: float = float("nan")  # sigma2*Gamma/(4A)

    @property
    def chi_abs(self) -> float:
        return self.prefactor * self.chi_dimless / GHZ

    @property
    def eta_abs(self) -> float:
        return self.prefactor * self.eta_dimless / GHZ

    @property
    def mu_abs(self) -> float:
        return self.prefactor * self.mu_dimless / GHZ

    @classmethod
    def manual(cls, chi: float = 0.0, eta: float = 0.0, mu: float = 0.0) -> "CouplingConstants":
        return cls(chi, eta, mu)

    def only(self, *names: str) -> "CouplingConstants":
        """Copy with every coupling not listed set to zero."""
        unknown = set(names) - {"chi", "eta", "mu"}
        if unknown:
            raise ValueError(f"unknown couplings: {sorted(unknown)}")
        vals = {k: (getattr(self, k) if k in names else 0.0) for k in ("chi", "eta", "mu")}
        return CouplingConstants(detuning=self.detuning, chi_dimless=self.chi_dimless,
                                 eta_dimless=self.eta_dimless, mu_dimless=self.mu_dimless,
                                 prefactor=self.prefactor, **vals)

    def as_tuple(self) -> Tuple[float, float, float]:
        return self.chi, self.eta, self.mu


# closed-form coefficients: (transition index, weight); mu weights include the 2/5
_CHI = ((1, Fraction(2, 9)), (2, Fraction(-8, 9)), (4, Fraction(10, 9)), (8, Fraction(-4, 9)))
_ETA = ((3, Fraction(3, 5)), (5, Fraction(-2, 9)), (6, Fraction(-1, 9)), (7, Fraction(-2, 45)), (9, Fraction(-2, 9)))
_MU = tuple((i, Fraction(2, 5) * w) for i, w in
            ((3, Fraction(-1, 4)), (5, Fraction(5, 9)), (6, Fraction(-5, 36)), (7, Fraction(1, 9)), (9, Fraction(-5, 18))))


def _check_detuning(delta_p: float, table: TransitionTable, constants: PhysicalConstants) -> None:
    for e in table:
        if abs(delta_p - e.offset) < constants.gamma_decay:
            raise NearResonanceError(
                f"detuning {delta_p / GHZ:.6f} GHz is within Gamma of transition C{e.index} "
                f"({e.offset_ghz:.4f} GHz); the dispersive approximation does not hold")


def _finish(sums: Sequence[float], delta_p, constants, cell) -> CouplingConstants:
    cell = cell or CellParams()
    pref = constants.sigma2 * constants.gamma_decay / (4 * cell.beam_area)
    chi_d, eta_d, mu_d = sums
    r = cell.light_rate
    return CouplingConstants(chi_d * r, eta_d * r, mu_d * r, delta_p, chi_d, eta_d, mu_d, pref)


def coupling_closed_form(delta_p: float, constants: PhysicalConstants = PhysicalConstants(),
                         cell: Optional[CellParams] = None,
                         table: Optional[TransitionTable] = None) -> CouplingConstants:
    """Couplings from the three closed-form pole sums; ``delta_p`` in rad/s."""
    table = table or default_transition_table()
    _check_detuning(delta_p, table, constants)
    x = delta_p / GHZ
    sums = [sum(float(w) / (x - table[i].offset / GHZ) for i, w in coeffs) for coeffs in (_CHI, _ETA, _MU)]
    return _finish(sums, delta_p, constants, cell)


def structure_weights(table: Optional[TransitionTable] = None) -> Dict[str, List[Tuple[int, Fraction]]]:
    """Per-transition weights sigma_F'/sigma2 * alpha (exact) for each coupling."""
    return {k: list(v) for k, v in _weights(table or default_transition_table()).items()}


@lru_cache(maxsize=8)
def _weights(table: TransitionTable) -> Dict[str, Tuple[Tuple[int, Fraction], ...]]:
    out = {"chi": [], "eta": [], "mu": []}
    for e in table:
        sig = cross_section(e.F, e.J, e.Fp, e.Jp)
        vec = sig * alpha_vector(e.F, e.J, e.Fp, e.Jp)
        ten = sig * tensor_weight(e.F, e.J, e.Fp, e.Jp)
        if e.F.twice_value == 1:
            out["chi"].append((e.index, vec))
            assert ten == 0
        else:
            out["eta"].append((e.index, vec))
            out["mu"].append((e.index, ten))
    return {k: tuple(v) for k, v in out.items()}


def coupling_from_structure(delta_p: float, constants: PhysicalConstants = PhysicalConstants(),
                            cell: Optional[CellParams] = None,
                            table: Optional[TransitionTable] = None) -> CouplingConstants:
    """Couplings assembled from cross sections and polarizability weights."""
    table = table or default_transition_table()
    _check_detuning(delta_p, table, constants)
    x = delta_p / GHZ
    w = _weights(table)
    sums = [sum(float(c) / (x - table[i].offset / GHZ) for i, c in w[k]) for k in ("chi", "eta", "mu")]
    return _finish(sums, delta_p, constants, cell)


SPECTRUM_COLUMNS = ("detuning_GHz", "chi_dimless", "eta_dimless", "mu_dimless", "chi_abs", "eta_abs", "mu_abs")


def spectrum_scan(from_ghz: float, to_ghz: float, step_ghz: float,
                  constants: PhysicalConstants = PhysicalConstants(),
                  cell: Optional[CellParams] = None) -> List[CouplingConstants]:
    """Couplings on a uniform grid; points within Gamma of a pole are skipped."""
    if step_ghz <= 0:
        raise ValueError("step must be positive")
    n = int(np.floor((to_ghz - from_ghz) / step_ghz + 1e-9)) + 1
    rows = []
    for k in range(n):
        x = from_ghz + k * step_ghz
        try:
            rows.append(coupling_closed_form(x * GHZ, constants, cell))
        except NearResonanceError:
            continue
    return rows


def spectrum_rows(scan: Iterable[CouplingConstants]) -> List[Tuple[float, ...]]:
    return [(c.detuning / GHZ, c.chi_dimless, c.eta_dimless, c.mu_dimless, c.chi_abs, c.eta_abs, c.mu_abs)
            for c in scan]


def find_zero_crossings(which: str, from_ghz: float, to_ghz: float, step_ghz: float = 0.01,
                        tol_ghz: float = 1e-9) -> List[float]:
    """Bisection-refined sign changes of one coupling that are not poles."""
    table = default_transition_table()
    poles = [e.offset / GHZ for e in table]
    key = f"{which}_dimless"
    val = lambda x: getattr(coupling_closed_form(x * GHZ), key)
    xs = np.arange(from_ghz, to_ghz + step_ghz / 2, step_ghz)
    roots = []
    for a, b in zip(xs[:-1], xs[1:]):
        if any(a - 0.01 <= p <= b + 0.01 for p in poles):
            continue
        fa, fb = val(a), val(b)
        if fa == 0 or fa * fb > 0:
            continue
        lo, hi = a, b
        while hi - lo > tol_ghz:
            mid = 0.5 * (lo + hi)
            if val(lo) * val(mid) <= 0:
                hi = mid
            else:
                lo = mid
        roots.append(0.5 * (lo + hi))
    return roots


def write_spectrum_csv(path, scan: Iterable[CouplingConstants]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(SPECTRUM_COLUMNS)
        for row in spectrum_rows(scan):
            w.writerow([f"{v:.12g}" for v in row])
