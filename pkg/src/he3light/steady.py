"""Stationary state, linearized generators A and B, and Schur-complement elimination."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .constants import CellParams, PhysicalConstants
from .dynamics import INDEX, NSTATE, SemiclassicalState, make_full_rhs
from .polarizability import CouplingConstants

ORDER_A = ("Sy", "Sz", "Iy", "Iz", "Ky", "Kz", "Jy", "Jz", "RT21", "IT22", "T30", "IT31", "RT32", "IT33")
ORDER_B = ("S0", "Sx", "Ix", "Kx", "Jx", "T20", "IT21", "RT22", "RT31", "IT32", "RT33")
IDX_A = tuple(INDEX[k] for k in ORDER_A)
IDX_B = tuple(INDEX[k] for k in ORDER_B)


def stationary_state(M: float, cell: CellParams) -> SemiclassicalState:
    """Spin-temperature stationary point with an x-polarized beam (S0 = Sx = n_ph/2)."""
    if not abs(M) <= 1:
        raise ValueError("|M| must be <= 1")
    n, D = cell.n_cell, M * M + 3
    return SemiclassicalState.from_dict({
        "S0": cell.n_ph / 2, "Sx": cell.n_ph / 2,
        "Ix": M * cell.N_cell / 2,
        "Kx": M / 2 * (1 - M * M) / D * n,
        "Jx": M * (5 + M * M) / D * n,
        "T20": -M * M / D * n,
        "RT22": np.sqrt(3) * M * M / D * n,
        "RT31": np.sqrt(0.3) * M ** 3 / D * n,
        "RT33": -M ** 3 / D * n / np.sqrt(2),
    })


@dataclass
class LinearizedSystem:
    matrix_A: np.ndarray
    matrix_B: np.ndarray
    ordering_a: Sequence[str] = ORDER_A
    ordering_b: Sequence[str] = ORDER_B
    cross_ab: Optional[np.ndarray] = None  # d(a)/d(b), numeric only
    cross_ba: Optional[np.ndarray] = None

    def to_json(self) -> str:
        return json.dumps({"ordering_a": list(self.ordering_a), "ordering_b": list(self.ordering_b),
                           "A": self.matrix_A.tolist(), "B": self.matrix_B.tolist()})


def analytic_linearization(M: float, couplings: CouplingConstants, cell: CellParams,
                           constants: PhysicalConstants = PhysicalConstants()) -> LinearizedSystem:
    """A and B entry by entry (field along x)."""
    chi, eta, mu = couplings.as_tuple()
    N, n, T, tau, nph, Bx = cell.N_cell, cell.n_cell, cell.T, cell.tau, cell.n_ph, cell.B_x
    g, g12, gn = constants.gamma_threehalf, constants.gamma_half, constants.gamma_nuc
    r = np.sqrt
    M2 = M * M
    D = M2 + 3
    Nt = N * tau
    DN = Nt * D  # = M^2 N tau + 3 N tau
    k = N / (3 * n * T)
    q = M / (3 * r(3) * tau)
    A = np.array([
        [0, -6 * mu * M2 * n / D, 0, 0, 0, chi * nph / 2, 0, eta * nph / 2, 0, 0, 0, 0, 0, 0],
        [6 * mu * M2 * n / D, 0, 0, 0, 0, 0, 0, 0, 0, -r(3) * mu * nph, 0, 0, 0, 0],
        [0, 0, -1 / T, Bx * gn, -k, 0, k, 0, 0, 0, 0, 0, 0, 0],
        [0, 0, -Bx * gn, -1 / T, 0, -k, 0, k, 0, 0, 0, 0, 0, 0],
        [0, 0.5 * M * (4 / D - 1) * n * chi, -(n - M2 * n) / (3 * DN), 0, -7 / (9 * tau), g12 * Bx,
         1 / (9 * tau), 0, 0, -q, 0, 0, 0, 0],
        [0, 0, 0, -(n - M2 * n) / (3 * DN), -g12 * Bx, -7 / (9 * tau), 0, 1 / (9 * tau), q, 0, 0, 0, 0, 0],
        [0, eta * M * (M2 + 5) * n / D, 2 * (M2 + 5) * n / (3 * DN), 0, 10 / (9 * tau), 0, -4 / (9 * tau),
         g * Bx, 2 * r(3) * mu * nph, q, 0, 0, 0, 0],
        [-12 * mu * M2 * n / D, 0, 0, 2 * (M2 + 5) * n / (3 * DN), 0, 10 / (9 * tau), -g * Bx,
         -4 / (9 * tau), -q, 2 * r(3) * mu * nph, 0, 0, 0, 0],
        [2 * r(3) * mu * M * (M2 + 1) * n / D, 0, 0, -4 * M * n / (r(3) * DN), 0, -2 * q, -0.4 * r(3) * mu * nph,
         -q, -2 / (3 * tau), g * Bx, 0, -mu * nph / r(10), 0, r(1.5) * mu * nph],
        [0, 2 * r(3) * eta * M2 * n / D, 4 * M * n / (r(3) * DN), 0, 2 * q, 0, q, -0.4 * r(3) * mu * nph,
         -g * Bx, -2 / (3 * tau), r(0.6) * mu * nph, 0, -mu * nph, 0],
        [6 * mu * M2 * n / (r(5) * D), 0, 0, -2 * M2 * n / (r(5) * DN), 0, 0, 0, 0, M / (r(15) * tau),
         -r(0.6) * mu * nph, -1 / tau, r(6) * g * Bx, 0, 0],
        [0, r(0.3) * eta * M ** 3 * n / D, r(2 / 15) * M2 * n / DN, 0, 0, 0, 0, 0, mu * nph / r(10),
         M / (3 * r(10) * tau), -r(6) * g * Bx, -1 / tau, -r(2.5) * g * Bx, 0],
        [-2 * r(3) * mu * M2 * n / D, 0, 0, 2 * M2 * n / (r(3) * DN), 0, 0, 0, 0, -M / (3 * tau), mu * nph, 0,
         r(2.5) * g * Bx, -1 / tau, r(1.5) * g * Bx],
        [0, -3 * eta * M ** 3 * n / (r(2) * D), -r(2) * M2 * n / DN, 0, 0, 0, 0, 0, -r(1.5) * mu * nph,
         -M / (r(6) * tau), 0, 0, -r(1.5) * g * Bx, -1 / tau],
    ], dtype=float)
    B = np.array([
        [0] * 11,
        [0] * 11,
        [0, 0, -1 / T, -k, k, 0, 0, 0, 0, 0, 0],
        [0, 0, -(3 * M2 * n + n) / (3 * DN), -7 / (9 * tau), 1 / (9 * tau), M / (9 * tau), 0, -q, 0, 0, 0],
        [0, 0, (6 * M2 * n + 10 * n) / (3 * DN), 10 / (9 * tau), -4 / (9 * tau), -M / (9 * tau), 0, q, 0, 0, 0],
        [0, 0, -4 * M * n / (3 * DN), -2 * M / (9 * tau), -M / (9 * tau), -2 / (3 * tau), r(3) * g * Bx, 0, 0,
         r(3) * mu * nph, 0],
        [2 * r(3) * mu * M * n / D, -2 * r(3) * mu * M * n / D, 0, 0, 0, -r(3) * g * Bx, -2 / (3 * tau), -g * Bx,
         -r(2.5) * mu * nph, 0, -r(1.5) * mu * nph],
        [0, 0, 4 * M * n / (r(3) * DN), 2 * q, q, 0, g * Bx, -2 / (3 * tau), 0, mu * nph, 0],
        [0, 0, r(1.2) * M2 * n / DN, 0, 0, -r(2 / 15) * M / tau, r(2.5) * mu * nph, M / (3 * r(10) * tau),
         -1 / tau, r(2.5) * g * Bx, 0],
        [-2 * r(3) * mu * M2 * n / D, 2 * r(3) * mu * M2 * n / D, 0, 0, 0, -r(3) * mu * nph, -M / (3 * tau),
         -mu * nph, -r(2.5) * g * Bx, -1 / tau, -r(1.5) * g * Bx],
        [0, 0, -r(2) * M2 * n / DN, 0, 0, 0, r(1.5) * mu * nph, -M / (r(6) * tau), 0, r(1.5) * g * Bx, -1 / tau],
    ], dtype=float)
    return LinearizedSystem(A, B)


def full_jacobian(x0: np.ndarray, rhs, h: float = 1e-6, scale: Optional[np.ndarray] = None) -> np.ndarray:
    """Central-difference Jacobian of rhs(t, x) at x0 with per-component steps h*scale."""
    x0 = np.asarray(x0, float)
    if scale is None:
        scale = np.ones_like(x0)
    J = np.empty((x0.size, x0.size))
    for j in range(x0.size):
        step = h * scale[j]
        xp, xm = x0.copy(), x0.copy()
        xp[j] += step
        xm[j] -= step
        J[:, j] = (rhs(0.0, xp) - rhs(0.0, xm)) / (2 * step)
    return J


def component_scales(cell: CellParams) -> np.ndarray:
    """Natural size of each variable: photons for Stokes, N for I, n for the rest."""
    s = np.full(NSTATE, cell.n_cell)
    s[0:4] = cell.n_ph
    s[4:7] = cell.N_cell
    return s


def numeric_jacobian(M: float, couplings: CouplingConstants, cell: CellParams, h: float = 1e-6,
                     constants: PhysicalConstants = PhysicalConstants()) -> LinearizedSystem:
    x0 = stationary_state(M, cell).values
    J = full_jacobian(x0, make_full_rhs(couplings, cell, constants=constants), h, component_scales(cell))
    ia, ib = list(IDX_A), list(IDX_B)
    return LinearizedSystem(J[np.ix_(ia, ia)], J[np.ix_(ib, ib)],
                            cross_ab=J[np.ix_(ia, ib)], cross_ba=J[np.ix_(ib, ia)])


class SingularFastBlock(np.linalg.LinAlgError):
    pass


def adiabatic_eliminate(matrix: np.ndarray, fast_indices: Sequence[int], max_cond: float = 1e12) -> np.ndarray:
    """Schur complement A_ss - A_sf A_ff^-1 A_fs over the complement of ``fast_indices``."""
    matrix = np.asarray(matrix)
    n = matrix.shape[0]
    fast = sorted(set(int(i) for i in fast_indices))
    slow = [i for i in range(n) if i not in fast]
    Ass = matrix[np.ix_(slow, slow)]
    if not fast:
        return Ass.copy()
    Aff = matrix[np.ix_(fast, fast)]
    cond = np.linalg.cond(Aff)
    if not np.isfinite(cond) or cond > max_cond:
        raise SingularFastBlock(f"fast block is singular or ill-conditioned (condition number {cond:.3e})")
    return Ass - matrix[np.ix_(slow, fast)] @ np.linalg.solve(Aff, matrix[np.ix_(fast, slow)])


def eliminate_by_name(system: LinearizedSystem, fast: Sequence[str], sector: str = "a") -> np.ndarray:
    order = system.ordering_a if sector == "a" else system.ordering_b
    mat = system.matrix_A if sector == "a" else system.matrix_B
    return adiabatic_eliminate(mat, [order.index(k) for k in fast])
