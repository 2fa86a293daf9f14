"""Self-checks run by ``he3light validate``: oracle equivalences and algebraic invariants.

Each check returns a dict ``{"value", "limit", "passed"}``; ``value`` is the
worst deviation found.
"""

from __future__ import annotations

from typing import Dict

import numpy as np

from .constants import GHZ, CellParams, PhysicalConstants, default_transition_table
from .polarizability import CouplingConstants, coupling_closed_form, coupling_from_structure


def _item(value: float, limit: float) -> Dict:
    return {"value": float(value), "limit": float(limit), "passed": bool(value < limit)}


def random_detunings(n: int, rng: np.random.Generator, lo: float = -40.0, hi: float = 10.0) -> np.ndarray:
    """Detunings in GHz, redrawn until at least 10 Gamma away from every pole."""
    poles = np.array(default_transition_table().poles()) / GHZ
    gap = 10 * PhysicalConstants().gamma_decay / GHZ
    out = []
    while len(out) < n:
        x = rng.uniform(lo, hi)
        if np.min(np.abs(poles - x)) > gap:
            out.append(x)
    return np.array(out)


def check_coupling_pipeline(n: int = 1000, seed: int = 0) -> Dict:
    worst = 0.0
    for x in random_detunings(n, np.random.default_rng(seed)):
        a, b = coupling_closed_form(x * GHZ), coupling_from_structure(x * GHZ)
        for u, v in zip(a.as_tuple(), b.as_tuple()):
            worst = max(worst, abs(u - v) / abs(u))
    return _item(worst, 1e-12)


def check_oracles(n: int = 100, seed: int = 0) -> Dict[str, Dict]:
    from .oracles import hamiltonian_oracle_sweep, mec_oracle_sweep
    return {
        "mec_oracle": _item(max(mec_oracle_sweep(n, seed).values()), 1e-10),
        "light_oracle": _item(max(hamiltonian_oracle_sweep(n, seed + 1, "light").values()), 1e-10),
        "magnetic_oracle": _item(max(hamiltonian_oracle_sweep(n, seed + 2, "magnetic").values()), 1e-10),
    }


ACCEPTANCE_CELL = CellParams.from_ratio(1e3)
STATIONARY_M = (0.0, 0.02, 0.1, 0.5, 0.98)


def stationarity_residual(M: float, cell: CellParams = ACCEPTANCE_CELL, detuning_ghz: float = -2.0) -> float:
    """max |full rhs| at the stationary state over max |individual contribution|."""
    from .dynamics import full_rhs
    from .steady import stationary_state
    cell = cell.with_(M=M)
    parts = full_rhs(stationary_state(M, cell), coupling_closed_form(detuning_ghz * GHZ, cell=cell), cell)
    scale = max(np.max(np.abs(parts.light)), np.max(np.abs(parts.magnetic)), np.max(np.abs(parts.mec)),
                cell.n_cell / cell.tau)
    return float(np.max(np.abs(parts.total)) / scale)


def _entry_error(a: np.ndarray, b: np.ndarray) -> float:
    # nonzero analytic entries relatively, structural zeros against the largest entry
    nz = a != 0
    return max(float(np.max(np.abs(a[nz] - b[nz]) / np.abs(a[nz]), initial=0.0)),
               float(np.max(np.abs(b[~nz]), initial=0.0) / np.max(np.abs(a))))


def linearization_errors(ana, num):
    """(error in A, error in B, largest cross-block norm) between analytic and numeric linearizations."""
    cross = max(np.linalg.norm(num.cross_ab), np.linalg.norm(num.cross_ba))
    return _entry_error(ana.matrix_A, num.matrix_A), _entry_error(ana.matrix_B, num.matrix_B), float(cross)


def jacobian_errors(M: float, cell: CellParams = ACCEPTANCE_CELL, detuning_ghz: float = -2.0):
    """(max entrywise relative error over A and B, max cross-block norm)."""
    from .steady import analytic_linearization, numeric_jacobian
    cell = cell.with_(M=M)
    cpl = coupling_closed_form(detuning_ghz * GHZ, cell=cell)
    ea, eb, cross = linearization_errors(analytic_linearization(M, cpl, cell), numeric_jacobian(M, cpl, cell))
    return max(ea, eb), cross


def check_linearization() -> Dict[str, Dict]:
    res = max(stationarity_residual(M) for M in STATIONARY_M)
    errs = [jacobian_errors(M) for M in STATIONARY_M]
    return {
        "stationary_residual": _item(res, 1e-12),
        "jacobian_rel_error": _item(max(e[0] for e in errs), 1e-6),
        "jacobian_cross_norm": _item(max(e[1] for e in errs), 1e-8),
    }


def tensor_algebra_errors() -> Dict[str, float]:
    """Orthonormality, Hermitian pairs and closed-form commutators for F = 1/2, 3/2."""
    from .angular import build_tensor_ops, commutator_closed_form, commutator_table
    norm = herm = comm = 0.0
    for F in (0.5, 1.5):
        ops = build_tensor_ops(F)
        for (l, m), t in ops.tensors.items():
            herm = max(herm, np.max(np.abs(ops.tensors[(l, -m)] - (-1) ** m * t.conj().T)))
            for lm2, t2 in ops.tensors.items():
                norm = max(norm, abs(np.trace(t.conj().T @ t2) - ((l, m) == lm2)))
        for (a, b), numeric in commutator_table(ops).items():
            closed = commutator_closed_form(ops, *a, *b)
            for key in set(numeric) | set(closed):
                comm = max(comm, abs(numeric.get(key, 0) - closed.get(key, 0)))
    return {"tensor_normalization": float(norm), "hermitian_pairs": float(herm), "commutators": float(comm)}


def conservation_errors(n: int = 50, seed: int = 0) -> Dict[str, float]:
    """Relative rates of change of the conserved quantities on random states."""
    from .dynamics import INDEX, light_rhs, magnetic_rhs, mec_rhs
    rng = np.random.default_rng(seed)
    cell = CellParams.from_ratio(7.0, N_cell=2.0, tau=0.3)
    consts = PhysicalConstants()
    blocks = {"I": slice(4, 7), "K": slice(7, 10), "J": slice(10, 13), "T2": slice(13, 18), "T3": slice(18, 25)}
    out = {"light": 0.0, "magnetic": 0.0, "mec": 0.0}
    for _ in range(n):
        x = rng.normal(size=25)
        cpl = CouplingConstants.manual(*rng.normal(size=3))
        d = light_rhs(x, cpl)
        scale = np.max(np.abs(cpl.as_tuple())) * np.dot(x, x)
        S, K = slice(1, 4), slice(7, 10)
        out["light"] = max(out["light"], abs(d[0]) / scale, abs(x[S] @ d[S]) / scale,
                           abs(d[INDEX["Kz"]]) / scale, abs(x[K] @ d[K]) / scale)
        B = rng.normal(size=3) * 1e-3
        d = magnetic_rhs(x, B, consts)
        scale = np.linalg.norm(B) * abs(consts.gamma_half) * np.dot(x, x)
        out["magnetic"] = max(out["magnetic"], *(abs(x[s] @ d[s]) / scale for s in blocks.values()))
        d = mec_rhs(x, cell)
        scale = np.max(np.abs(d))
        out["mec"] = max(out["mec"], float(np.max(np.abs(d[4:7] + d[7:10] + d[10:13])) / scale))
    return out


def smallB_orders(M: float = 0.5) -> Dict[str, float]:
    """Observed order p of |exact - expansion| ~ B^p; 2 means the remainder is O(B^2)."""
    from .reduced import coefficients, smallB_ratios
    cell = CellParams.from_ratio(1e3, M=M)
    out = {}
    for config in (1, 2):
        b0 = 1e-2 * cell.B_x
        errs = []
        for B in (b0, b0 / 2):
            exact = coefficients(config, M, B, cell).ratios()
            approx = smallB_ratios(config, M, B, cell)
            errs.append(max(abs(exact[k] - approx[k]) for k in approx))
        out[f"config{config}"] = float(np.log2(errs[0] / errs[1]))
    return out


def check_algebra() -> Dict[str, Dict]:
    checks = {k: _item(v, 1e-12) for k, v in tensor_algebra_errors().items()}
    checks.update({f"conservation_{k}": _item(v, 1e-12) for k, v in conservation_errors().items()})
    checks.update({f"smallB_order_{k}": _item(abs(v - 2), 0.1) for k, v in smallB_orders().items()})
    return checks


def run_validation(n_samples: int = 100, seed: int = 0) -> Dict:
    checks = {"coupling_pipeline": check_coupling_pipeline(1000, seed)}
    checks.update(check_oracles(n_samples, seed))
    checks.update(check_linearization())
    checks.update(check_algebra())
    return {"checks": checks, "passed": all(c["passed"] for c in checks.values())}
