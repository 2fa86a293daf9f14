"""Fixed-step classical RK4 integration with strided output.

Three execution paths give the same RK4 update:

* generic Python callables ``f(t, x)``;
* the full 25-variable model (``dynamics.make_full_rhs``), stepped inside a
  compiled loop;
* linear models ``dx/dt = G x`` (:class:`LinearRHS`), advanced with the RK4
  step matrix I + hG + (hG)^2/2 + (hG)^3/6 + (hG)^4/24.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, Optional, Sequence

import numpy as np
from numba import njit

from .dynamics import NSTATE, STATE_NAMES, full_kernel


class IntegrationError(RuntimeError):
    pass


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # shape (len(times), n_vars)
    names: Sequence[str]
    metadata: Dict = field(default_factory=dict)
    model: str = ""

    def __post_init__(self):
        self.times = np.asarray(self.times, float)
        self.states = np.asarray(self.states, float)
        if self.states.shape != (self.times.size, len(self.names)):
            raise ValueError("states shape does not match times / names")
        if self.times.size > 1 and not np.all(np.diff(self.times) > 0):
            raise ValueError("times must be strictly increasing")

    def __getitem__(self, name: str) -> np.ndarray:
        return self.states[:, list(self.names).index(name)]

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]

    def write_csv(self, path, time_scale: float = 1.0, time_label: str = "time") -> None:
        """CSV with a time column (times multiplied by ``time_scale``) and a JSON sidecar."""
        path = Path(path)
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow([time_label, *self.names])
            for t, row in zip(self.times, self.states):
                w.writerow([f"{t * time_scale:.12g}", *(f"{v:.12g}" for v in row)])
        side = dict(self.metadata, model=self.model, time_scale=time_scale, columns=[time_label, *self.names])
        path.with_suffix(".json").write_text(json.dumps(side, indent=2, sort_keys=True, default=_json_default))


def _json_default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, complex):
        return [o.real, o.imag]
    return str(o)


class LinearRHS:
    """dx/dt = G x."""

    def __init__(self, G: np.ndarray):
        self.G = np.asarray(G, float)

    def __call__(self, t, x):
        return self.G @ x


def _steps(t_end: float, dt: float, stride: int):
    if not dt > 0:
        raise ValueError("dt must be positive")
    if stride < 1:
        raise ValueError("output_stride must be >= 1")
    nsteps = int(round(t_end / dt))
    if nsteps < 1:
        raise ValueError("t_end must cover at least one step")
    nout = nsteps // stride
    return nsteps, nout


@njit(cache=True)
def _rk4_full_loop(x0, p, dt, nout, stride):
    n = x0.size
    out = np.empty((nout + 1, n))
    x = x0.copy()
    out[0] = x
    k1 = np.empty(n)
    k2 = np.empty(n)
    k3 = np.empty(n)
    k4 = np.empty(n)
    y = np.empty(n)
    tmp = np.empty(n)
    for j in range(nout):
        for _ in range(stride):
            full_kernel(x, p, k1, tmp)
            for i in range(n):
                y[i] = x[i] + 0.5 * dt * k1[i]
            full_kernel(y, p, k2, tmp)
            for i in range(n):
                y[i] = x[i] + 0.5 * dt * k2[i]
            full_kernel(y, p, k3, tmp)
            for i in range(n):
                y[i] = x[i] + dt * k3[i]
            full_kernel(y, p, k4, tmp)
            for i in range(n):
                x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
        for i in range(n):
            if not np.isfinite(x[i]):
                return out[: j + 1], j + 1
        out[j + 1] = x
    return out, -1


def rk4_step_matrix(G: np.ndarray, dt: float) -> np.ndarray:
    z = G * dt
    eye = np.eye(G.shape[0])
    z2 = z @ z
    return eye + z + z2 / 2 + z2 @ z / 6 + z2 @ z2 / 24


def _generic(rhs, x0, dt, nout, stride):
    x = np.array(x0, float)
    out = np.empty((nout + 1, x.size))
    out[0] = x
    t = 0.0
    for j in range(nout):
        for _ in range(stride):
            k1 = rhs(t, x)
            k2 = rhs(t + dt / 2, x + dt / 2 * k1)
            k3 = rhs(t + dt / 2, x + dt / 2 * k2)
            k4 = rhs(t + dt, x + dt * k3)
            x = x + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
            t += dt
        if not np.all(np.isfinite(x)):
            return out[: j + 1], j + 1
        out[j + 1] = x
    return out, -1


def _advance(rhs, x0, dt, nout, stride):
    if isinstance(rhs, LinearRHS):
        R = np.linalg.matrix_power(rk4_step_matrix(rhs.G, dt), stride)
        out = np.empty((nout + 1, x0.size))
        out[0] = x0
        for j in range(nout):
            out[j + 1] = R @ out[j]
            if not np.all(np.isfinite(out[j + 1])):
                return out[: j + 1], j + 1
        return out, -1
    if getattr(rhs, "kernel", None) == "full":
        return _rk4_full_loop(x0, rhs.params, float(dt), nout, int(stride))
    return _generic(rhs, x0, dt, nout, stride)


def integrate(rhs: Callable, initial, t_end: float, dt: float, output_stride: int = 1,
              names: Optional[Sequence[str]] = None, metadata: Optional[Dict] = None,
              model: str = "") -> Trajectory:
    """Integrate from t = 0 to t_end with fixed step dt, keeping every ``output_stride``-th state.

    The state after the last step is always included, so the final sample may
    follow a shorter gap than the others.
    """
    x0 = np.ascontiguousarray(getattr(initial, "values", initial), dtype=np.float64)
    nsteps, nout = _steps(t_end, dt, output_stride)
    out, bad = _advance(rhs, x0, dt, nout, output_stride)
    times = np.arange(out.shape[0]) * (dt * output_stride)
    rem = nsteps - nout * output_stride
    if bad < 0 and rem:
        tail, bad = _advance(rhs, np.ascontiguousarray(out[-1]), dt, 1, rem)
        if bad < 0:
            out = np.vstack([out, tail[1:]])
            times = np.append(times, nsteps * dt)
    if bad >= 0:
        raise IntegrationError(f"non-finite state after output sample {bad} (t ~ {bad * output_stride * dt:.6g}); "
                               f"last finite state: {out[-1].tolist()}")
    if names is None:
        names = STATE_NAMES if x0.size == NSTATE else tuple(f"x{i}" for i in range(x0.size))
    md = dict(metadata or {}, dt=dt, output_stride=output_stride, t_end=float(times[-1]))
    return Trajectory(times, out, tuple(names), md, model)


def check_step(dt: float, tau: float, omega_fastest: float = 0.0) -> None:
    """Enforce dt <= tau/20 and dt <= 2 pi / (20 omega_fastest)."""
    if dt > tau / 20 * (1 + 1e-12):
        raise ValueError(f"dt = {dt:g} exceeds tau/20 = {tau / 20:g}")
    if omega_fastest > 0 and dt > 2 * np.pi / (20 * omega_fastest) * (1 + 1e-12):
        raise ValueError("dt does not resolve the fastest oscillation")
