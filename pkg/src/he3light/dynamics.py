"""The 25-variable semiclassical state and its equations of motion.

Three contributions are kept separate: light (dispersive Faraday + tensor
coupling), magnetic precession, and metastability-exchange collisions.  The
kernels work on flat float64 arrays and are compiled with numba so that the
same code serves single evaluations and the RK4 loop in ``integrator``.

Parameter vector layout (see :func:`pack_params`)::

    0 chi  1 eta  2 mu  3 Bx  4 By  5 Bz  6 gamma_nuc  7 gamma_1/2
    8 gamma_3/2  9 N  10 n  11 T  12 tau
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Dict, Iterable, Optional, Sequence

import numpy as np
from numba import njit

from .constants import CellParams, PhysicalConstants
from .polarizability import CouplingConstants

STATE_NAMES = (
    "S0", "Sx", "Sy", "Sz",
    "Ix", "Iy", "Iz",
    "Kx", "Ky", "Kz",
    "Jx", "Jy", "Jz",
    "T20", "RT21", "IT21", "RT22", "IT22",
    "T30", "RT31", "IT31", "RT32", "IT32", "RT33", "IT33",
)
INDEX = {name: i for i, name in enumerate(STATE_NAMES)}
NSTATE = len(STATE_NAMES)
ATOMIC_NAMES = STATE_NAMES[4:]

(S0, SX, SY, SZ, IX, IY, IZ, KX, KY, KZ, JX, JY, JZ,
 T20, R21, I21, R22, I22, T30, R31, I31, R32, I32, R33, I33) = range(25)

NPARAM = 13


def pack_params(couplings: CouplingConstants, cell: CellParams,
                B=None, constants: PhysicalConstants = PhysicalConstants()) -> np.ndarray:
    """Flatten couplings, field and cell into the kernel parameter vector.

    ``B`` defaults to (cell.B_x, 0, 0).
    """
    if B is None:
        B = (cell.B_x, 0.0, 0.0)
    Bx, By, Bz = B
    return np.array([couplings.chi, couplings.eta, couplings.mu, Bx, By, Bz,
                     constants.gamma_nuc, constants.gamma_half, constants.gamma_threehalf,
                     cell.N_cell, cell.n_cell, cell.T, cell.tau], dtype=np.float64)


# ---------------------------------------------------------------------------
# kernels
# ---------------------------------------------------------------------------

_R2 = np.sqrt(2.0)
_R3 = np.sqrt(3.0)
_R5 = np.sqrt(5.0)
_R6 = np.sqrt(6.0)
_R10 = np.sqrt(10.0)
_R12 = np.sqrt(12.0)
_R15 = np.sqrt(15.0)
_R35 = np.sqrt(3.0 / 5.0)
_R25 = np.sqrt(2.0 / 5.0)
_R32 = np.sqrt(1.5)
_R52 = np.sqrt(2.5)


@njit(cache=True)
def light_kernel(x, p, out):
    chi, eta, mu = p[0], p[1], p[2]
    s0, sx, sy, sz = x[S0], x[SX], x[SY], x[SZ]
    out[:] = 0.0
    out[SX] = -chi * x[KZ] * sy - eta * x[JZ] * sy + _R12 * mu * x[I22] * sz
    out[SY] = chi * x[KZ] * sx + eta * x[JZ] * sx - _R12 * mu * x[R22] * sz
    out[SZ] = _R12 * mu * (x[R22] * sy - x[I22] * sx)
    out[KX] = -chi * x[KY] * sz
    out[KY] = chi * x[KX] * sz
    out[JX] = -eta * x[JY] * sz + _R12 * mu * (x[I21] * (sx - s0) - x[R21] * sy)
    out[JY] = eta * x[JX] * sz + _R12 * mu * (x[R21] * (sx + s0) + x[I21] * sy)
    out[JZ] = 2 * _R12 * mu * (x[I22] * sx - x[R22] * sy)
    t10 = x[JZ] / _R5
    out[R22] = -2 * eta * sz * x[I22] + _R12 * mu * (sy * (2 * t10 - x[T30]) / _R5 + s0 * x[I32] / _R3)
    out[I22] = 2 * eta * sz * x[R22] - _R12 * mu * (sx * (2 * t10 - x[T30]) / _R5 + s0 * x[R32] / _R3)
    out[R21] = -eta * sz * x[I21] + _R6 * mu * (
        sx * (-_R35 * x[I31] - _R2 / 5 * x[JY] + x[I33])
        + s0 * (2 / _R15 * x[I31] - _R2 / 5 * x[JY])
        + sy * (_R35 * x[R31] + _R2 / 5 * x[JX] - x[R33]))
    out[I21] = eta * sz * x[R21] - _R6 * mu * (
        sx * (_R35 * x[R31] + _R2 / 5 * x[JX] + x[R33])
        + s0 * (2 / _R15 * x[R31] - _R2 / 5 * x[JX])
        + sy * (_R35 * x[I31] + _R2 / 5 * x[JY] + x[I33]))
    out[T20] = _R12 * mu * (sx * x[I32] - sy * x[R32])
    out[R33] = -3 * eta * sz * x[I33] + _R6 * mu * (sx * x[I21] + sy * x[R21])
    out[I33] = 3 * eta * sz * x[R33] - _R6 * mu * (sx * x[R21] - sy * x[I21])
    out[R32] = -2 * eta * sz * x[I32] + 2 * mu * (_R3 * sy * x[T20] + s0 * x[I22])
    out[I32] = 2 * eta * sz * x[R32] - 2 * mu * (_R3 * sx * x[T20] + s0 * x[R22])
    out[R31] = -eta * sz * x[I31] + _R25 * mu * ((2 * s0 + 3 * sx) * x[I21] - 3 * sy * x[R21])
    out[I31] = eta * sz * x[R31] - _R25 * mu * ((2 * s0 - 3 * sx) * x[R21] - 3 * sy * x[I21])
    out[T30] = -0.4 * _R15 * mu * (sx * x[I22] - sy * x[R22])


@njit(cache=True)
def magnetic_kernel(x, p, out):
    bx, by, bz = p[3], p[4], p[5]
    out[:] = 0.0
    for base, g in ((IX, p[6]), (KX, p[7]), (JX, p[8])):
        vx, vy, vz = x[base], x[base + 1], x[base + 2]
        out[base] = g * (vy * bz - vz * by)
        out[base + 1] = g * (vz * bx - vx * bz)
        out[base + 2] = g * (vx * by - vy * bx)
    g = p[8]
    out[R22] = g * (bx * x[I21] + by * x[R21] + 2 * bz * x[I22])
    out[I22] = g * (-bx * x[R21] + by * x[I21] - 2 * bz * x[R22])
    out[R21] = g * (bx * x[I22] + by * (_R3 * x[T20] - x[R22]) + bz * x[I21])
    out[I21] = g * (-bx * (_R3 * x[T20] + x[R22]) - by * x[I22] - bz * x[R21])
    out[T20] = g * _R3 * (bx * x[I21] - by * x[R21])
    out[R33] = g * (bx * _R32 * x[I32] + by * _R32 * x[R32] + 3 * bz * x[I33])
    out[I33] = g * (-bx * _R32 * x[R32] + by * _R32 * x[I32] - 3 * bz * x[R33])
    out[R32] = g * (bx * (_R52 * x[I31] + _R32 * x[I33]) + by * (_R52 * x[R31] - _R32 * x[R33]) + 2 * bz * x[I32])
    out[I32] = g * (bx * (-_R52 * x[R31] - _R32 * x[R33]) + by * (_R52 * x[I31] - _R32 * x[I33]) - 2 * bz * x[R32])
    out[R31] = g * (bx * _R52 * x[I32] + by * (_R6 * x[T30] - _R52 * x[R32]) + bz * x[I31])
    out[I31] = g * (-bx * (_R6 * x[T30] + _R52 * x[R32]) - by * _R52 * x[I32] - bz * x[R31])
    out[T30] = g * _R6 * (bx * x[I31] - by * x[R31])


@njit(cache=True)
def mec_kernel(x, p, out):
    N, n, T, tau = p[9], p[10], p[11], p[12]
    out[:] = 0.0
    ix, iy, iz = x[IX], x[IY], x[IZ]
    # alignment tensor Q from the rank-2 collective tensors
    qxx = (_R3 * x[R22] - x[T20]) / 6
    qyy = -(_R3 * x[R22] + x[T20]) / 6
    qzz = x[T20] / 3
    qxy = x[I22] / (2 * _R3)
    qxz = -x[R21] / (2 * _R3)
    qyz = -x[I21] / (2 * _R3)
    qi0 = qxx * ix + qxy * iy + qxz * iz
    qi1 = qxy * ix + qyy * iy + qyz * iz
    qi2 = qxz * ix + qyz * iy + qzz * iz
    qi = (qi0, qi1, qi2)
    for a in range(3):
        I_, K_, J_ = x[IX + a], x[KX + a], x[JX + a]
        out[IX + a] = -I_ / T + N / (3 * T * n) * (J_ - K_)
        out[KX + a] = -7 / (9 * tau) * K_ + J_ / (9 * tau) - n / (9 * tau * N) * I_ - 4 / (3 * tau * N) * qi[a]
        out[JX + a] = (-4 / (9 * tau) * J_ + 10 / (9 * tau) * K_ + 10 * n / (9 * tau * N) * I_
                       + 4 / (3 * tau * N) * qi[a])
    # electron spin Sigma = (2/3)(J + 2K)
    ex = 2.0 / 3.0 * (x[JX] + 2 * x[KX])
    ey = 2.0 / 3.0 * (x[JY] + 2 * x[KY])
    ez = 2.0 / 3.0 * (x[JZ] + 2 * x[KZ])
    d2 = -2 / (3 * tau)
    a = 1 / (_R3 * tau * N)
    out[R22] = d2 * x[R22] + a * (ix * ex - iy * ey)
    out[I22] = d2 * x[I22] + a * (ix * ey + iy * ex)
    out[R21] = d2 * x[R21] - a * (ix * ez + iz * ex)
    out[I21] = d2 * x[I21] - a * (iy * ez + iz * ey)
    out[T20] = d2 * x[T20] + 1 / (3 * tau * N) * (3 * iz * ez - (ix * ex + iy * ey + iz * ez))
    b = _R6 / (3 * tau * N)
    out[R33] = -x[R33] / tau - b * (ix * x[R22] - iy * x[I22])
    out[I33] = -x[I33] / tau - b * (ix * x[I22] + iy * x[R22])
    c = 2 / (3 * tau * N)
    out[R32] = -x[R32] / tau - c * (ix * x[R21] - iy * x[I21] - iz * x[R22])
    out[I32] = -x[I32] / tau - c * (ix * x[I21] + iy * x[R21] - iz * x[I22])
    d = 2 / (3 * _R10 * tau * N)
    out[R31] = -x[R31] / tau + d * (ix * (x[R22] - 2 * _R3 * x[T20]) + iy * x[I22] + 4 * iz * x[R21])
    out[I31] = -x[I31] / tau + d * (ix * x[I22] - iy * (x[R22] + 2 * _R3 * x[T20]) + 4 * iz * x[I21])
    e = 2 / (_R5 * tau * N)
    out[T30] = -x[T30] / tau + e * (_R3 / 3 * (ix * x[R21] + iy * x[I21]) + iz * x[T20])


@njit(cache=True)
def full_kernel(x, p, out, tmp):
    light_kernel(x, p, out)
    magnetic_kernel(x, p, tmp)
    for i in range(out.shape[0]):
        out[i] += tmp[i]
    mec_kernel(x, p, tmp)
    for i in range(out.shape[0]):
        out[i] += tmp[i]


# ---------------------------------------------------------------------------
# Python-facing API
# ---------------------------------------------------------------------------

@dataclass
class SemiclassicalState:
    """Named view over the flat 25-vector."""

    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.shape != (NSTATE,):
            raise ValueError(f"state must have {NSTATE} components")

    def __getattr__(self, name):
        if name in INDEX:
            return float(self.values[INDEX[name]])
        raise AttributeError(name)

    def __getitem__(self, name: str) -> float:
        return float(self.values[INDEX[name]])

    @classmethod
    def zeros(cls) -> "SemiclassicalState":
        return cls(np.zeros(NSTATE))

    @classmethod
    def from_dict(cls, d: Dict[str, float]) -> "SemiclassicalState":
        v = np.zeros(NSTATE)
        for k, val in d.items():
            v[INDEX[k]] = val
        return cls(v)

    def to_dict(self) -> Dict[str, float]:
        return {k: float(v) for k, v in zip(STATE_NAMES, self.values)}

    def replace(self, **kw) -> "SemiclassicalState":
        v = self.values.copy()
        for k, val in kw.items():
            v[INDEX[k]] = val
        return SemiclassicalState(v)

    def check_physical(self, cell: CellParams) -> None:
        """Soft range checks; warn only."""
        inorm = np.linalg.norm(self.values[IX:IZ + 1])
        if inorm > cell.N_cell / 2 * (1 + 1e-12):
            warnings.warn(f"|I| = {inorm:g} exceeds N/2", RuntimeWarning)
        if self.values[S0] < 0:
            warnings.warn("S0 < 0", RuntimeWarning)


@dataclass
class DerivativeBreakdown:
    light: np.ndarray
    magnetic: np.ndarray
    mec: np.ndarray

    @property
    def total(self) -> np.ndarray:
        return self.light + self.magnetic + self.mec


def _vec(state) -> np.ndarray:
    if isinstance(state, SemiclassicalState):
        return state.values
    return np.ascontiguousarray(state, dtype=np.float64)


def _call(kernel, state, p) -> np.ndarray:
    out = np.empty(NSTATE)
    kernel(_vec(state), p, out)
    return out


def light_rhs(state, couplings: CouplingConstants) -> np.ndarray:
    p = np.zeros(NPARAM)
    p[:3] = couplings.as_tuple()
    return _call(light_kernel, state, p)


def magnetic_rhs(state, B: Sequence[float], constants: PhysicalConstants = PhysicalConstants()) -> np.ndarray:
    p = np.zeros(NPARAM)
    p[3:6] = B
    p[6:9] = constants.gamma_nuc, constants.gamma_half, constants.gamma_threehalf
    return _call(magnetic_kernel, state, p)


def mec_rhs(state, cell: CellParams) -> np.ndarray:
    p = np.zeros(NPARAM)
    p[9:13] = cell.N_cell, cell.n_cell, cell.T, cell.tau
    return _call(mec_kernel, state, p)


def full_rhs(state, couplings: CouplingConstants, cell: CellParams, B=None,
             constants: PhysicalConstants = PhysicalConstants()) -> DerivativeBreakdown:
    p = pack_params(couplings, cell, B, constants)
    return DerivativeBreakdown(_call(light_kernel, state, p), _call(magnetic_kernel, state, p),
                               _call(mec_kernel, state, p))


def make_full_rhs(couplings: CouplingConstants, cell: CellParams, B=None,
                  constants: PhysicalConstants = PhysicalConstants()):
    """Closure f(t, x) -> dx/dt, with the packed parameters attached as ``.params``."""
    p = pack_params(couplings, cell, B, constants)
    tmp = np.empty(NSTATE)

    def rhs(t, x):
        out = np.empty(NSTATE)
        full_kernel(np.ascontiguousarray(x, dtype=np.float64), p, out, tmp)
        return out

    rhs.params = p
    rhs.kernel = "full"
    return rhs


# linear maps between Q and the rank-2 tensors

def q_from_tensors(state) -> np.ndarray:
    x = _vec(state)
    q = np.empty((3, 3))
    q[0, 0] = (_R3 * x[R22] - x[T20]) / 6
    q[1, 1] = -(_R3 * x[R22] + x[T20]) / 6
    q[2, 2] = x[T20] / 3
    q[0, 1] = q[1, 0] = x[I22] / (2 * _R3)
    q[0, 2] = q[2, 0] = -x[R21] / (2 * _R3)
    q[1, 2] = q[2, 1] = -x[I21] / (2 * _R3)
    return q


def tensors_from_q(q: np.ndarray) -> Dict[str, float]:
    """Inverse of :func:`q_from_tensors` for symmetric traceless Q."""
    return {"T20": 3 * q[2, 2], "RT22": _R3 * (q[0, 0] - q[1, 1]), "IT22": 2 * _R3 * q[0, 1],
            "RT21": -2 * _R3 * q[0, 2], "IT21": -2 * _R3 * q[1, 2]}


def electron_spin(state) -> np.ndarray:
    x = _vec(state)
    return 2.0 / 3.0 * (x[JX:JZ + 1] + 2 * x[KX:KZ + 1])
