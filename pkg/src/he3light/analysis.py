"""Tilted initial conditions, trajectory comparison and effective-coupling extraction."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from typing import Dict, Mapping, Optional, Sequence

import numpy as np

from .constants import CellParams
from .dynamics import SemiclassicalState
from .integrator import Trajectory


def tilt_nuclear_spin(steady: SemiclassicalState, angle: float) -> SemiclassicalState:
    """Rotate (Ix, Iy, Iz) by ``angle`` about y so that a spin along x acquires Iz = Ix sin(angle)."""
    if not abs(angle) < np.pi / 2:
        raise ValueError("|angle| must be < pi/2")
    c, s = np.cos(angle), np.sin(angle)
    ix, iz = steady.Ix, steady.Iz
    return steady.replace(Ix=c * ix - s * iz, Iz=s * ix + c * iz)


def fluctuations(traj: Trajectory, reference: Mapping[str, float], names: Optional[Sequence[str]] = None,
                 model: Optional[str] = None) -> Trajectory:
    """Subtract stationary values (looked up by name) from selected columns."""
    names = tuple(names or traj.names)
    cols = np.column_stack([traj[k] - reference.get(k, 0.0) for k in names])
    return Trajectory(traj.times, cols, names, dict(traj.metadata), model or traj.model)


def reduced_trajectory(traj: Trajectory, config: int) -> Trajectory:
    """Name the columns of a reduced-model run (which integrates on Sy, Sz, Iy, Iz, Xy, Xz)."""
    from .reduced import REDUCED_NAMES
    return Trajectory(traj.times, traj.states, REDUCED_NAMES[config], dict(traj.metadata), traj.model)


@dataclass
class ComparisonReport:
    nrms: Dict[str, float]
    n_samples: int
    t_range: tuple

    def max(self, names: Optional[Sequence[str]] = None) -> float:
        return max(self.nrms[k] for k in (names or self.nrms))

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)


def compare_trajectories(reference: Trajectory, other: Trajectory, variables: Sequence[str]) -> ComparisonReport:
    """RMS(other - reference) / RMS(reference) per variable.

    ``other`` is interpolated linearly onto the reference times that lie inside
    both time ranges.
    """
    lo = max(reference.times[0], other.times[0])
    hi = min(reference.times[-1], other.times[-1])
    if not hi > lo:
        raise ValueError("trajectories have disjoint time ranges")
    mask = (reference.times >= lo) & (reference.times <= hi)
    t = reference.times[mask]
    out = {}
    for k in variables:
        ref = reference[k][mask]
        oth = np.interp(t, other.times, other[k])
        denom = np.sqrt(np.mean(ref ** 2))
        num = np.sqrt(np.mean((oth - ref) ** 2))
        out[k] = float(num / denom) if denom > 0 else (0.0 if num == 0 else float("inf"))
    return ComparisonReport(out, int(t.size), (float(lo), float(hi)))


def slow_mode(generator: np.ndarray, indices: Sequence[int] = (2, 3)) -> tuple:
    """(frequency, damping) of the oscillating eigenmode carried mostly by ``indices``.

    The default (2, 3) picks Iy, Iz in both the reduced ordering and the
    a-sector ordering, i.e. the collective nuclear precession mode.
    """
    ev, vec = np.linalg.eig(generator)
    osc = ev.imag > 1e-12 * np.max(np.abs(ev))
    if not np.any(osc):
        raise ValueError("generator has no oscillating mode")
    mag = np.abs(vec)
    weight = mag[list(indices)].sum(axis=0) / mag.sum(axis=0)
    k = int(np.argmax(np.where(osc, weight, -1.0)))
    return float(ev[k].imag), float(-ev[k].real)


@dataclass(frozen=True)
class CouplingFit:
    omega_eff: float
    amp_x: float
    amp_p: float
    residual: float   # worst relative fit residual of the two channels
    low_confidence: bool


def _fit_amplitude(t, y, w, decay):
    env = np.exp(-decay * t)
    basis = np.column_stack([env * np.sin(w * t), env * np.cos(w * t), np.ones_like(t)])
    coef, *_ = np.linalg.lstsq(basis, y, rcond=None)
    amp = float(np.hypot(coef[0], coef[1]))
    resid = y - basis @ coef
    rel = float(np.sqrt(np.mean(resid ** 2)) / amp) if amp > 0 else float("inf")
    return amp, rel


def extract_coupling(traj: Trajectory, omega: float, M: float, cell: CellParams, decay: float = 0.0,
                     steady: Optional[SemiclassicalState] = None, skip: Optional[float] = None,
                     threshold: float = 0.02) -> CouplingFit:
    """Effective coupling from the X_S and P_I oscillation amplitudes at angular frequency ``omega``.

    X_S = dSy/sqrt(Sx) and P_I = dIz/sqrt(Ix). The trajectory may hold absolute
    full-model values (stationary values are subtracted) or reduced-model
    fluctuations (columns Sy, Iz are already deviations). The fit window skips
    the first quarter period unless ``skip`` is given.
    """
    from .steady import stationary_state
    st = steady or stationary_state(M, cell)
    t = traj.times
    if t[-1] - t[0] < 3 * 2 * np.pi / omega * (1 - 1e-9):
        raise ValueError("trajectory must span at least three oscillation periods")
    start = t[0] + (np.pi / (2 * omega) if skip is None else skip)
    m = t >= start
    is_full = "Ix" in traj.names
    dsy = traj["Sy"] - (st.Sy if is_full else 0.0)
    diz = traj["Iz"] - (st.Iz if is_full else 0.0)
    xs = dsy[m] / np.sqrt(st.Sx)
    pi_ = diz[m] / np.sqrt(st.Ix)
    tt = t[m] - t[m][0]
    ax, rx = _fit_amplitude(tt, xs, omega, decay)
    ap, rp = _fit_amplitude(tt, pi_, omega, decay)
    # X_S is the integral of Omega * P_I, so its amplitude carries a 1/omega;
    # with damping the integral picks up |omega + i decay| instead.
    res = max(rx, rp)
    return CouplingFit(float(np.hypot(omega, decay) * ax / ap), ax, ap, res, res > threshold)


# ---------------------------------------------------------------------------
# scenarios shared by the command line and the acceptance suite
# ---------------------------------------------------------------------------

MODELS = ("full", "config1", "config2", "config2-full-adiab")
DEFAULT_DETUNING_GHZ = {1: -2.0, 2: -31.0}


def model_generator(model: str, M: float, couplings, cell: CellParams) -> np.ndarray:
    """6x6 linear generator on (Sy, Sz, Iy, Iz, Xy, Xz) for a reduced model name."""
    from .reduced import full_adiabatic_config2, reduced_generator
    if model == "config1":
        return reduced_generator(1, M, couplings, cell)
    if model == "config2":
        return reduced_generator(2, M, couplings, cell)
    if model == "config2-full-adiab":
        return full_adiabatic_config2(M, couplings, cell)
    raise ValueError(f"unknown reduced model {model!r}")


def simulate(model: str, M: float, couplings, cell: CellParams, tilt: float = 0.01, periods: float = 3.0,
             dt: Optional[float] = None, samples_per_period: int = 200) -> Trajectory:
    """Run ``model`` from the tilted stationary state for ``periods`` nuclear Larmor periods.

    The full model returns absolute values of all 25 variables; reduced models
    return fluctuations of their six variables.
    """
    from .constants import larmor_frequency
    from .dynamics import make_full_rhs
    from .integrator import LinearRHS, check_step, integrate
    from .reduced import REDUCED_NAMES
    from .steady import stationary_state
    if model not in MODELS:
        raise ValueError(f"model must be one of {MODELS}")
    w_i = larmor_frequency(cell)
    t_end = periods * 2 * np.pi / w_i
    dt = cell.tau / 20 if dt is None else dt
    check_step(dt, cell.tau)
    dt = t_end / np.ceil(t_end / dt)  # land exactly on t_end
    stride = max(1, int(round(t_end / dt / (periods * samples_per_period))))
    st = stationary_state(M, cell)
    x0 = tilt_nuclear_spin(st, tilt)
    md = {"M": M, "tilt": tilt, "periods": periods, "omega_I": w_i, "cell": cell.to_dict(),
          "couplings": {"chi": couplings.chi, "eta": couplings.eta, "mu": couplings.mu}}
    if model == "full":
        return integrate(make_full_rhs(couplings, cell), x0.values, t_end, dt, stride, metadata=md, model=model)
    G = model_generator(model, M, couplings, cell)
    r0 = np.zeros(6)
    r0[2], r0[3] = x0.Iy - st.Iy, x0.Iz - st.Iz
    names = REDUCED_NAMES[1 if model == "config1" else 2]
    return integrate(LinearRHS(G), r0, t_end, dt, stride, names=names, metadata=md, model=model)


@dataclass(frozen=True)
class CouplingPoint:
    M: float
    config: int
    source: str
    omega_extracted: float
    f_extracted: float
    f_analytic: float
    rel_error: float
    residual: float
    low_confidence: bool


def coupling_point(config: int, M: float, cell: CellParams, source: str = "reduced",
                   detuning_ghz: Optional[float] = None, tilt: float = 0.01, periods: float = 3.0) -> CouplingPoint:
    """Simulate one (configuration, M) point and extract the effective coupling.

    The fit frequency and decay rate are those of the collective nuclear mode
    of the generator that drives the simulated model.
    """
    from .constants import GHZ
    from .polarizability import coupling_closed_form
    from .reduced import effective_coupling, scaling_from_omega
    from .steady import analytic_linearization
    if source not in ("reduced", "full"):
        raise ValueError("source must be 'reduced' or 'full'")
    cell = cell.with_(M=M)
    delta = DEFAULT_DETUNING_GHZ[config] if detuning_ghz is None else detuning_ghz
    cpl = coupling_closed_form(delta * GHZ, cell=cell)
    if source == "full":
        gen = analytic_linearization(M, cpl, cell).matrix_A
        traj = simulate("full", M, cpl, cell, tilt, periods)
    else:
        model = f"config{config}"
        gen = model_generator(model, M, cpl, cell)
        traj = simulate(model, M, cpl, cell, tilt, periods)
    w, g = slow_mode(gen)
    fit = extract_coupling(traj, w, M, cell, decay=g)
    ec = effective_coupling(config, M, cpl, cell)
    f_ex = scaling_from_omega(fit.omega_eff, ec.kappa, cell)
    return CouplingPoint(M, config, source, fit.omega_eff, float(f_ex), float(ec.f), float(f_ex / ec.f - 1),
                         fit.residual, fit.low_confidence)
