"""Brute-force validators for the collective equations of motion.

* Metastability exchange: evolve the one-body block density matrix
  (6x6 metastable, 2x2 ground) by partial-trace recombination and compare
  the induced expectation-value derivatives with ``dynamics.mec_rhs``.
* Light and magnetic field: evaluate i<[H, O]> with explicit matrices and
  compare with ``dynamics.light_rhs`` / ``dynamics.magnetic_rhs``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Dict, Optional, Sequence

import numpy as np
from scipy.linalg import expm

from .angular import build_tensor_ops, spin_matrices
from .constants import CellParams, PhysicalConstants
from .dynamics import (ATOMIC_NAMES, INDEX, NSTATE, STATE_NAMES, SemiclassicalState,
                       light_rhs, magnetic_rhs, mec_rhs)
from .polarizability import CouplingConstants

_OPS32 = build_tensor_ops("3/2")
_SX, _SY, _SZ, _, _ = spin_matrices("1/2")

# Hermitian operator basis for the F=3/2 manifold, keyed by state names
J_BASIS = {
    "Jx": _OPS32.matrices["Fx"], "Jy": _OPS32.matrices["Fy"], "Jz": _OPS32.matrices["Fz"],
    "T20": _OPS32.matrices["T20"], "RT21": _OPS32.matrices["R21"], "IT21": _OPS32.matrices["I21"],
    "RT22": _OPS32.matrices["R22"], "IT22": _OPS32.matrices["I22"],
    "T30": _OPS32.matrices["T30"], "RT31": _OPS32.matrices["R31"], "IT31": _OPS32.matrices["I31"],
    "RT32": _OPS32.matrices["R32"], "IT32": _OPS32.matrices["I32"],
    "RT33": _OPS32.matrices["R33"], "IT33": _OPS32.matrices["I33"],
}
HALF_BASIS = {"x": _SX, "y": _SY, "z": _SZ}


def _decoupled(ms: int, twice_mi: int) -> np.ndarray:
    v = np.zeros(6)
    v[(ms + 1) * 2 + (twice_mi + 1) // 2] = 1.0
    return v


_r = np.sqrt
# columns: hyperfine states |1>..|6> expressed in the decoupled |m_s, m_I> basis
U_HF = np.array([
    _decoupled(-1, -1),
    _r(2 / 3) * _decoupled(0, -1) + _r(1 / 3) * _decoupled(-1, 1),
    _r(2 / 3) * _decoupled(0, 1) + _r(1 / 3) * _decoupled(1, -1),
    _decoupled(1, 1),
    _r(1 / 3) * _decoupled(0, -1) - _r(2 / 3) * _decoupled(-1, 1),
    -_r(1 / 3) * _decoupled(0, 1) + _r(2 / 3) * _decoupled(1, -1),
]).T


class InvalidDensityMatrix(ValueError):
    pass


@dataclass(frozen=True)
class BlockDensityMatrix:
    rho_m: np.ndarray  # 6x6, basis |1>..|6>
    rho_f: np.ndarray  # 2x2, basis |9>, |0>

    def __post_init__(self):
        validate_block(self.rho_m, self.rho_f)


def validate_block(rho_m: np.ndarray, rho_f: np.ndarray, atol: float = 1e-10, derivative: bool = False) -> None:
    rho_m = np.asarray(rho_m)
    rho_f = np.asarray(rho_f)
    if rho_m.shape != (6, 6) or rho_f.shape != (2, 2):
        raise InvalidDensityMatrix("expected 6x6 metastable and 2x2 ground blocks")
    for name, r in (("rho_m", rho_m), ("rho_f", rho_f)):
        if not np.allclose(r, r.conj().T, atol=atol):
            raise InvalidDensityMatrix(f"{name} is not Hermitian")
    if np.abs(rho_m[:4, 4:]).max() > atol:
        raise InvalidDensityMatrix("coherences between F=3/2 and F=1/2 are not allowed")
    target = 0.0 if derivative else 1.0
    for name, r in (("rho_m", rho_m), ("rho_f", rho_f)):
        if abs(np.trace(r) - target) > atol:
            raise InvalidDensityMatrix(f"Tr {name} = {np.trace(r)} (expected {target})")
        if not derivative and np.linalg.eigvalsh(r).min() < -atol:
            raise InvalidDensityMatrix(f"{name} is not positive semidefinite")


def partial_traces(rho_m: np.ndarray):
    """(Tr_n rho_m [3x3 electronic], Tr_e rho_m [2x2 nuclear])."""
    D = (U_HF @ rho_m @ U_HF.conj().T).reshape(3, 2, 3, 2)
    return np.einsum("injn->ij", D), np.einsum("iaib->ab", D)


def mec_rho_rhs(rho: BlockDensityMatrix, cell: CellParams) -> BlockDensityMatrix:
    """Time derivative of the one-body density matrix under exchange collisions.

    The returned object holds derivatives, so it skips the density checks.
    """
    rho_e, rho_n = partial_traces(rho.rho_m)
    drf = (-rho.rho_f + rho_n) / cell.T
    drm = (-rho.rho_m + U_HF.conj().T @ np.kron(rho_e, rho.rho_f) @ U_HF) / cell.tau
    # hyperfine coherences are dropped; no collective variable depends on them
    drm[:4, 4:] = 0
    drm[4:, :4] = 0
    out = object.__new__(BlockDensityMatrix)
    object.__setattr__(out, "rho_m", drm)
    object.__setattr__(out, "rho_f", drf)
    validate_block(drm, drf, derivative=True)
    return out


def _embed(op: np.ndarray, manifold: str) -> np.ndarray:
    m = np.zeros((6, 6), complex)
    if manifold == "3/2":
        m[:4, :4] = op
    else:
        m[4:, 4:] = op
    return m


METASTABLE_OPS = {f"K{c}": _embed(o, "1/2") for c, o in HALF_BASIS.items()}
METASTABLE_OPS.update({k: _embed(o, "3/2") for k, o in J_BASIS.items()})


def expectations_from_rho(rho: BlockDensityMatrix, cell: CellParams) -> SemiclassicalState:
    """Collective atomic expectations; the Stokes entries are left at zero."""
    v = np.zeros(NSTATE)
    for c, o in HALF_BASIS.items():
        v[INDEX["I" + c]] = cell.N_cell * np.trace(o @ rho.rho_f).real
    for k, o in METASTABLE_OPS.items():
        v[INDEX[k]] = cell.n_cell * np.trace(o @ rho.rho_m).real
    return SemiclassicalState(v)


def random_block_density(rng: np.random.Generator) -> BlockDensityMatrix:
    g = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
    rm = g @ g.conj().T
    rm[:4, 4:] = 0
    rm[4:, :4] = 0
    rm /= np.trace(rm).real
    g = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    rf = g @ g.conj().T
    rf /= np.trace(rf).real
    return BlockDensityMatrix(rm, rf)


def spin_temperature_rho(M: float, axis: str = "x") -> BlockDensityMatrix:
    """Spin-temperature state with nuclear polarization M along ``axis``."""
    if not abs(M) < 1:
        raise ValueError("spin-temperature form needs |M| < 1")
    beta = np.log((1 + M) / (1 - M))
    s1 = spin_matrices(1)[{"x": 0, "y": 1, "z": 2}[axis]]
    i = HALF_BASIS[axis]
    total = np.kron(s1, np.eye(2)) + np.kron(np.eye(3), i)
    rm = U_HF.conj().T @ expm(beta * total) @ U_HF
    rm[:4, 4:] = 0  # exactly zero already; remove rounding
    rm[4:, :4] = 0
    rm = (rm + rm.conj().T) / 2
    rm /= np.trace(rm).real
    rf = expm(beta * i)
    rf /= np.trace(rf).real
    return BlockDensityMatrix(rm, rf)


# ---------------------------------------------------------------------------
# Hamiltonian-commutator oracle
# ---------------------------------------------------------------------------

def _expect(op: np.ndarray, basis: Dict[str, np.ndarray], x: np.ndarray) -> complex:
    """<op> for a traceless op from collective expectations of a Hermitian orthogonal basis."""
    return sum(np.trace(b @ op) / np.trace(b @ b) * x[INDEX[k]] for k, b in basis.items())


_EPS = np.zeros((3, 3, 3))
for (a, b, c) in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
    _EPS[a, b, c], _EPS[b, a, c] = 1, -1


def hamiltonian_rhs_oracle(state, couplings: Optional[CouplingConstants] = None, B: Sequence[float] = (0, 0, 0),
                           constants: PhysicalConstants = PhysicalConstants()) -> np.ndarray:
    """d<O>/dt = i<[H, O]> with H = H_light + H_B, semiclassically factorised."""
    x = state.values if isinstance(state, SemiclassicalState) else np.asarray(state, float)
    chi, eta, mu = couplings.as_tuple() if couplings is not None else (0.0, 0.0, 0.0)
    Bv = np.asarray(B, float)
    out = np.zeros(NSTATE)

    # per-manifold Hamiltonian pieces: atomic operator multiplying each Stokes component
    Jm = J_BASIS
    stokes_ops_J = {
        "S0": -2 * mu * Jm["T20"],
        "Sx": np.sqrt(12) * mu * Jm["RT22"],
        "Sy": np.sqrt(12) * mu * Jm["IT22"],
        "Sz": eta * Jm["Jz"],
    }
    stokes_ops_K = {"Sz": chi * _SZ}
    svals = {k: x[INDEX[k]] for k in ("S0", "Sx", "Sy", "Sz")}

    HJ = sum(op * svals[k] for k, op in stokes_ops_J.items())
    HJ = HJ - constants.gamma_threehalf * (Bv[0] * Jm["Jx"] + Bv[1] * Jm["Jy"] + Bv[2] * Jm["Jz"])
    HK = stokes_ops_K["Sz"] * svals["Sz"] - constants.gamma_half * (
        Bv[0] * _SX + Bv[1] * _SY + Bv[2] * _SZ)
    HI = -constants.gamma_nuc * (Bv[0] * _SX + Bv[1] * _SY + Bv[2] * _SZ)

    for k, o in Jm.items():
        out[INDEX[k]] = (1j * _expect(HJ @ o - o @ HJ, Jm, x)).real
    kb = {"K" + c: o for c, o in HALF_BASIS.items()}
    ib = {"I" + c: o for c, o in HALF_BASIS.items()}
    for k, o in kb.items():
        out[INDEX[k]] = (1j * _expect(HK @ o - o @ HK, kb, x)).real
    for k, o in ib.items():
        out[INDEX[k]] = (1j * _expect(HI @ o - o @ HI, ib, x)).real

    # Stokes: H = sum_a A_a S_a, [S_a, S_b] = i eps_abc S_c
    A = np.zeros(3)
    for a, name in enumerate(("Sx", "Sy", "Sz")):
        if name in stokes_ops_J:
            A[a] += _expect(stokes_ops_J[name], Jm, x).real
        if name in stokes_ops_K:
            A[a] += _expect(stokes_ops_K[name], kb, x).real
    S = np.array([svals["Sx"], svals["Sy"], svals["Sz"]])
    dS = -np.einsum("abc,a,c->b", _EPS, A, S)
    out[INDEX["Sx"]:INDEX["Sz"] + 1] = dS
    return out


# ---------------------------------------------------------------------------
# sweeps and report
# ---------------------------------------------------------------------------

def _relative(dev: np.ndarray, ref: np.ndarray) -> np.ndarray:
    scale = max(np.abs(ref).max(), 1e-300)
    return np.abs(dev) / scale


def mec_oracle_sweep(n_samples: int = 100, seed: int = 0, cell: Optional[CellParams] = None) -> Dict[str, float]:
    """Max relative deviation per atomic equation over random density matrices."""
    cell = cell or CellParams.from_ratio(50.0, N_cell=1.7, tau=0.6)
    rng = np.random.default_rng(seed)
    worst = {k: 0.0 for k in ATOMIC_NAMES}
    for _ in range(n_samples):
        rho = random_block_density(rng)
        ref = expectations_from_rho(mec_rho_rhs(rho, cell), cell).values
        got = mec_rhs(expectations_from_rho(rho, cell), cell)
        rel = _relative(got - ref, ref)
        for k in ATOMIC_NAMES:
            worst[k] = max(worst[k], float(rel[INDEX[k]]))
    return worst


def random_state(rng: np.random.Generator) -> SemiclassicalState:
    return SemiclassicalState(rng.normal(size=NSTATE))


def hamiltonian_oracle_sweep(n_samples: int = 100, seed: int = 0, part: str = "both") -> Dict[str, float]:
    """Compare light and/or magnetic equations against the commutator oracle."""
    rng = np.random.default_rng(seed)
    worst = {k: 0.0 for k in STATE_NAMES if k != "S0"}
    consts = PhysicalConstants()
    for _ in range(n_samples):
        st = random_state(rng)
        cpl = CouplingConstants.manual(*rng.normal(size=3)) if part in ("light", "both") else CouplingConstants.manual()
        B = rng.normal(size=3) * 1e-6 if part in ("magnetic", "both") else np.zeros(3)
        ref = hamiltonian_rhs_oracle(st, cpl, B, consts)
        got = light_rhs(st, cpl) + magnetic_rhs(st, B, consts)
        rel = _relative(got - ref, ref)
        for k in worst:
            worst[k] = max(worst[k], float(rel[INDEX[k]]))
    return worst


def validation_report(n_samples: int = 100, seed: int = 0) -> Dict[str, Dict[str, float]]:
    return {
        "mec": mec_oracle_sweep(n_samples, seed),
        "light": hamiltonian_oracle_sweep(n_samples, seed + 1, "light"),
        "magnetic": hamiltonian_oracle_sweep(n_samples, seed + 2, "magnetic"),
    }


def write_report(report: Dict, path) -> None:
    with open(path, "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
