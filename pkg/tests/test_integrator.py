import json

import numpy as np
import pytest

from he3light.constants import CellParams, PhysicalConstants
from he3light.dynamics import NSTATE, make_full_rhs, magnetic_rhs
from he3light.integrator import (IntegrationError, LinearRHS, Trajectory, check_step, integrate, rk4_step_matrix)
from he3light.polarizability import CouplingConstants
from he3light.steady import stationary_state

GN = PhysicalConstants().gamma_nuc
B = 1e-2


def precession(t, x):
    return magnetic_rhs(x, (B, 0, 0))


def test_zero_rhs_is_constant():
    tr = integrate(lambda t, x: np.zeros_like(x), np.arange(3.0), 1.0, 0.1)
    assert np.all(tr.states == np.arange(3.0))
    assert tr.times[-1] == pytest.approx(1.0)


def test_nuclear_precession_preserves_length():
    w = abs(GN * B)
    x0 = np.zeros(NSTATE)
    x0[5], x0[6] = 0.3, 0.4
    tr = integrate(precession, x0, 10 * 2 * np.pi / w, 2 * np.pi / w / 1000, 250)
    norms = np.linalg.norm(tr.states[:, 4:7], axis=1)
    assert np.max(np.abs(norms - 0.5)) < 1e-10


def test_fourth_order_convergence():
    w = abs(GN * B)
    x0 = np.zeros(NSTATE)
    x0[5] = 1.0
    t_end = 2 * np.pi / w

    def err(n):
        x = integrate(precession, x0, t_end, t_end / n, n).final
        return np.linalg.norm(x[4:7] - x0[4:7])  # one full turn returns to the start
    ratio = err(20) / err(40)
    assert ratio == pytest.approx(16, rel=0.1)


def test_blow_up_is_reported():
    with pytest.raises(IntegrationError, match="non-finite"), np.errstate(over="ignore", invalid="ignore"):
        integrate(lambda t, x: x ** 2, np.array([1.0]), 2.0, 1e-2)


def test_linear_path_matches_generic(rng):
    G = rng.normal(size=(4, 4))
    x0 = rng.normal(size=4)
    a = integrate(LinearRHS(G), x0, 1.0, 0.01, 10)
    b = integrate(lambda t, x: G @ x, x0, 1.0, 0.01, 10)
    np.testing.assert_allclose(a.states, b.states, rtol=1e-12, atol=1e-12)
    one = integrate(lambda t, x: G @ x, x0, 0.01, 0.01).final
    np.testing.assert_allclose(rk4_step_matrix(G, 0.01) @ x0, one, rtol=1e-14)


def test_compiled_full_loop_matches_generic(cell, couplings_c1):
    rhs = make_full_rhs(couplings_c1, cell)
    x0 = stationary_state(0.3, cell).values.copy()
    x0[6] += 1e-3
    a = integrate(rhs, x0, 50.0, 0.05, 100)
    b = integrate(lambda t, x: rhs(t, x), x0, 50.0, 0.05, 100)
    np.testing.assert_allclose(a.states, b.states, rtol=1e-13, atol=1e-18)
    assert a.names[0] == "S0"


def test_trajectory_checks_and_csv(tmp_path):
    with pytest.raises(ValueError):
        Trajectory([0.0, 0.0], np.zeros((2, 1)), ("a",))
    with pytest.raises(ValueError):
        Trajectory([0.0, 1.0], np.zeros((2, 2)), ("a",))
    tr = Trajectory([0.0, 0.5], [[1.0], [2.0 / 3]], ("a",), {"k": np.float64(1.0)}, "demo")
    tr.write_csv(tmp_path / "t.csv", time_scale=2.0, time_label="tl")
    lines = (tmp_path / "t.csv").read_text().splitlines()
    assert lines == ["tl,a", "0,1", "1,0.666666666667"]
    side = json.loads((tmp_path / "t.json").read_text())
    assert side["model"] == "demo" and side["k"] == 1.0


def test_step_checks():
    check_step(0.05, 1.0)
    with pytest.raises(ValueError):
        check_step(0.06, 1.0)
    with pytest.raises(ValueError):
        check_step(0.01, 1.0, omega_fastest=100.0)
    with pytest.raises(ValueError):
        integrate(lambda t, x: x, [1.0], 1.0, 0.0)
    with pytest.raises(ValueError):
        integrate(lambda t, x: x, [1.0], 1.0, 0.1, output_stride=0)
