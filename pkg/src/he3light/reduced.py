"""Three-spin reduced models (Config.1: F=1/2 coupling, Config.2: F=3/2 coupling).

Reduced variables: dSy, dSz (real) and the complex spins I+ = Iy + i Iz,
X+ = Xy + i Xz with X = K (Config.1) or J (Config.2).  Internally the model
is a real 6x6 generator acting on (Sy, Sz, Iy, Iz, Xy, Xz).

The closed-form coefficient ratios depend on B_x only through
B_x*gamma/gamma_m, where gamma_m is the configuration's rescaled
exchange rate (gamma_m^(1/2) or gamma_m^(3/2)).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np

from .constants import CellParams, PhysicalConstants
from .polarizability import CouplingConstants
from .steady import ORDER_A, adiabatic_eliminate, analytic_linearization, stationary_state

REDUCED_NAMES = {1: ("Sy", "Sz", "Iy", "Iz", "Ky", "Kz"), 2: ("Sy", "Sz", "Iy", "Iz", "Jy", "Jz")}


def _check_config(config: int) -> int:
    if config not in (1, 2):
        raise ValueError("config must be 1 or 2")
    return config


def rescaled_rates(config: int, M: float, cell: CellParams) -> Tuple[float, float]:
    """(gamma_f, gamma_m) for the given configuration."""
    M2 = M * M
    if _check_config(config) == 1:
        gf = (4 + M2) * (1 - M2) / ((8 - M2) * (3 + M2)) / cell.T
        gm = (4 + M2) / (8 - M2) / cell.tau
    else:
        gf = (4 + M2) * (5 + M2) / ((7 + M2) * (3 + M2)) / cell.T
        gm = (4 + M2) / (2 * (7 + M2)) / cell.tau
    return gf, gm


@dataclass(frozen=True)
class ReducedCoefficients:
    config: int
    M: float
    c: complex
    a1: complex
    a2: complex
    b1: complex
    b2: complex
    a3: complex = 0j
    b3: complex = 0j
    gamma_f_eff: float = 0.0
    gamma_m_eff: float = 0.0

    def ratios(self) -> Dict[str, complex]:
        out = {"a1": self.a1 / self.c, "a2": self.a2 / self.c, "b1": self.b1 / self.c, "b2": self.b2 / self.c}
        if self.config == 2:
            out["a3"] = self.a3 / self.c
            out["b3"] = self.b3 / self.c
        return out


def coefficients(config: int, M: float, B_x: float, cell: CellParams,
                 constants: PhysicalConstants = PhysicalConstants()) -> ReducedCoefficients:
    gf, gm = rescaled_rates(config, M, cell)
    M2 = M * M
    g1, g3 = constants.gamma_half, constants.gamma_threehalf
    if config == 1:
        if abs(abs(M) - 1) < 1e-15:
            raise ZeroDivisionError("Config.1 coefficients have a pole at M = +-1")
        y = B_x * g3 / gm
        c = 30j * (M2 + 4) * y + 27 * (M2 + 4) ** 2 * y * y / (M2 - 8) + (M2 - 8) ** 2
        a1 = (M2 - 8) / ((M2 + 4) * (M2 - 1)) * (
            (M2 + 3) * c + 4 * ((M2 - 8) * (2 * M2 + 5) - 1.5j * (M2 + 4) * (M2 + 5) * y))
        a2 = 9 * (M2 + 4) * y * y + (M2 - 8) ** 2
        b1 = -21 * (M2 + 4) * y * y - 2j * (M2 * M2 + 2 * M2 - 80) * y + (M2 - 8) ** 2
        return ReducedCoefficients(1, M, c, a1, a2, b1, a2, gamma_f_eff=gf, gamma_m_eff=gm)
    u = B_x / gm
    c = (6j * (M2 + 4) * u * (6 * g1 + 7 * g3) - 27 * (M2 + 4) ** 2 * g1 * g3 * u * u / (M2 + 7)
         + 8 * (M2 + 7) ** 2)
    a1 = (M2 + 7) / ((M2 + 4) * (M2 + 5)) * (
        (M2 + 3) * c - 8 * ((M2 + 1) * (M2 + 7) - 0.75j * (M2 - 1) * (M2 + 4) * g3 * u))
    a2 = 2 * (12j * (M2 + 7) * u * (g1 + g3) - 9 * (M2 + 4) * g1 * g3 * u * u + 4 * (M2 + 7) ** 2)
    a3 = 24 * M2 * (M2 + 7) / (M2 + 5)
    b1 = -4 * (1j * (M2 + 7) * u * ((M2 - 8) * g1 - 6 * g3) + 6 * (M2 + 4) * g1 * g3 * u * u
               - 2 * (M2 + 7) ** 2)
    b2 = a2 + a3 * 1j * u * (g1 + g3)
    b3 = 12 * M2 / (M2 + 5) * (-2 * (M2 + 7) + 3j * (M2 + 4) * g1 * u)
    return ReducedCoefficients(2, M, c, a1, a2, b1, b2, a3, b3, gf, gm)


def smallB_ratios(config: int, M: float, B_x: float, cell: CellParams,
                  constants: PhysicalConstants = PhysicalConstants()) -> Dict[str, complex]:
    """First-order-in-B_x expansions of the coefficient ratios."""
    _, gm = rescaled_rates(config, M, cell)
    M2 = M * M
    g1, g3 = constants.gamma_half, constants.gamma_threehalf
    if config == 1:
        y = B_x * g3 / gm
        a2 = 1 - 30j * (M2 + 4) / (M2 - 8) ** 2 * y
        return {
            "a1": 1 - 6j * (M2 * M2 + 37 * M2 + 60) / ((M2 - 8) ** 2 * (M2 - 1)) * y,
            "a2": a2,
            "b1": 1 - 2j * (M2 * M2 + 17 * M2 - 20) / (M2 - 8) ** 2 * y,
            "b2": a2,
        }
    u = B_x / gm
    w = 3 * M2 / (4 * (M2 + 5) * (M2 + 7) ** 3)
    return {
        "a1": 1 + 3j * u * (6 * (M2 + 1) * g1 + (M2 + 13) * M2 * g3) / (4 * (M2 + 5) * (M2 + 7) ** 2),
        "a2": 1 - 3j * u * (2 * (M2 - 2) * g1 + 3 * M2 * g3) / (4 * (M2 + 7) ** 2),
        "a3": w * (4 * (M2 + 7) ** 2 - 3j * (M2 + 4) * u * (6 * g1 + 7 * g3)),
        "b1": 1 - 1j * u * (2 * (M2 * M2 + 8 * M2 - 20) * g1 + 9 * M2 * g3) / (4 * (M2 + 7) ** 2),
        "b2": 1 + 3j * u * (2 * (M2 + 1) * (M2 + 10) * g1 + (M2 + 13) * M2 * g3) / (4 * (M2 + 5) * (M2 + 7) ** 2),
        "b3": w * (3j * (M2 + 4) * u * (2 * (M2 + 10) * g1 + 7 * g3) - 4 * (M2 + 7) ** 2),
    }


# ---------------------------------------------------------------------------
# reduced dynamics
# ---------------------------------------------------------------------------

@dataclass
class ReducedState:
    dSy: float = 0.0
    dSz: float = 0.0
    I_plus: complex = 0j
    X_plus: complex = 0j

    def to_real(self) -> np.ndarray:
        return np.array([self.dSy, self.dSz, self.I_plus.real, self.I_plus.imag,
                         self.X_plus.real, self.X_plus.imag])

    @classmethod
    def from_real(cls, v) -> "ReducedState":
        return cls(float(v[0]), float(v[1]), complex(v[2], v[3]), complex(v[4], v[5]))


def _block(z: complex) -> np.ndarray:
    return np.array([[z.real, -z.imag], [z.imag, z.real]])


def reduced_generator(config: int, M: float, couplings: CouplingConstants, cell: CellParams,
                      constants: PhysicalConstants = PhysicalConstants(),
                      coeffs: Optional[ReducedCoefficients] = None) -> np.ndarray:
    """Real 6x6 generator on (Sy, Sz, Iy, Iz, Xy, Xz) built from the closed forms."""
    _check_config(config)
    co = coeffs or coefficients(config, M, cell.B_x, cell, constants)
    r = co.ratios()
    gf, gm = co.gamma_f_eff, co.gamma_m_eff
    st = stationary_state(M, cell)
    B = cell.B_x
    G = np.zeros((6, 6))
    gx = constants.gamma_half if config == 1 else constants.gamma_threehalf
    kappa = couplings.chi if config == 1 else couplings.eta
    G[0, 5] = st.Sx * kappa
    G[2:4, 2:4] = _block(-gf * r["a1"] - 1j * B * constants.gamma_nuc)
    G[2:4, 4:6] = _block(gm * r["a2"])
    G[4:6, 4:6] = _block(-gm * r["b1"] - 1j * B * gx)
    G[4:6, 2:4] = _block(gf * r["b2"])
    if config == 1:
        drive_x = st.Kx * couplings.chi + 0j
        drive_i = 0j
    else:
        drive_x = (r["b3"] + 1) * st.Jx * couplings.eta
        drive_i = r["a3"] * st.Jx * couplings.eta
    G[2, 1], G[3, 1] = drive_i.real, drive_i.imag
    G[4, 1], G[5, 1] = drive_x.real, drive_x.imag
    return G


def reduced_rhs(config: int, state: ReducedState, coeffs: ReducedCoefficients, couplings: CouplingConstants,
                cell: CellParams, constants: PhysicalConstants = PhysicalConstants()) -> ReducedState:
    G = reduced_generator(config, coeffs.M, couplings, cell, constants, coeffs)
    return ReducedState.from_real(G @ state.to_real())


def _schur_generator(M, couplings, cell, constants, keep) -> np.ndarray:
    A = analytic_linearization(M, couplings, cell, constants).matrix_A
    keep_idx = [ORDER_A.index(k) for k in keep]
    fast = [i for i in range(len(ORDER_A)) if i not in keep_idx]
    G = adiabatic_eliminate(A, fast)
    return G


def schur_generator(config: int, M: float, couplings: CouplingConstants, cell: CellParams,
                    constants: PhysicalConstants = PhysicalConstants()) -> np.ndarray:
    """Elimination of the configuration's fast variables on A, non-dominant couplings zeroed."""
    cpl = couplings.only("chi") if _check_config(config) == 1 else couplings.only("eta")
    return _schur_generator(M, cpl, cell, constants, REDUCED_NAMES[config])


def full_adiabatic_config2(M: float, couplings: CouplingConstants, cell: CellParams,
                           constants: PhysicalConstants = PhysicalConstants()) -> np.ndarray:
    """Eliminate K and every tensor fluctuation from A keeping all couplings.

    Returns a 6x6 generator on (Sy, Sz, Iy, Iz, Jy, Jz).
    """
    return _schur_generator(M, couplings, cell, constants, REDUCED_NAMES[2])


# ---------------------------------------------------------------------------
# effective coupling
# ---------------------------------------------------------------------------

def f_half(M: float) -> float:
    return (1 - M * M) / (3 + M * M) * np.sqrt(M)


def f_threehalf(M: float) -> float:
    return 2 * (5 + M * M) / (3 + M * M) * np.sqrt(M)


def coupling_prefactor(cell: CellParams) -> float:
    """(n/N) sqrt(n_ph N)."""
    return cell.n_cell / cell.N_cell * np.sqrt(cell.n_ph * cell.N_cell)


@dataclass(frozen=True)
class EffectiveCoupling:
    omega: float   # kappa <X_x>/<I_x> sqrt(<S_x><I_x>)
    f: float       # f(M) scaling function
    kappa: float


def effective_coupling(config: int, M: float, couplings: CouplingConstants, cell: CellParams) -> EffectiveCoupling:
    if not M > 0:
        raise ValueError("effective coupling needs M > 0")
    st = stationary_state(M, cell)
    if _check_config(config) == 1:
        kappa, ratio, f = couplings.chi, st.Kx / st.Ix, f_half(M)
    else:
        kappa, ratio, f = couplings.eta, st.Jx / st.Ix, f_threehalf(M)
    omega = kappa * ratio * np.sqrt(st.Sx * st.Ix)
    return EffectiveCoupling(omega, f, kappa)


def scaling_from_omega(omega: float, kappa: float, cell: CellParams) -> float:
    """Convert an effective coupling to the f(M) normalization (sign of kappa dropped)."""
    return 2 * omega / (abs(kappa) * coupling_prefactor(cell))


@dataclass(frozen=True)
class QuadraturePair:
    X_S: float
    P_S: float
    X_I: float
    P_I: float


def quadratures(dSy, dSz, dIy, dIz, steady) -> QuadraturePair:
    ns, ni = np.sqrt(steady.Sx), np.sqrt(steady.Ix)
    return QuadraturePair(dSy / ns, dSz / ns, dIy / ni, dIz / ni)
