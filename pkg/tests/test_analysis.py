import numpy as np
import pytest

from he3light.analysis import (ComparisonReport, compare_trajectories, coupling_point, extract_coupling,
                               fluctuations, simulate, slow_mode, tilt_nuclear_spin)
from he3light.constants import CellParams
from he3light.integrator import Trajectory
from he3light.steady import analytic_linearization, stationary_state


def test_tilt():
    cell = CellParams()
    st = stationary_state(0.5, cell)
    assert np.array_equal(tilt_nuclear_spin(st, 0.0).values, st.values)
    t = tilt_nuclear_spin(st, 0.01)
    assert t.Iz == pytest.approx(0.01 * 0.25 * cell.N_cell, rel=1e-4)
    assert np.hypot(t.Ix, t.Iz) == pytest.approx(st.Ix, rel=1e-15)
    assert np.array_equal(np.delete(t.values, [4, 6]), np.delete(st.values, [4, 6]))
    with pytest.raises(ValueError):
        tilt_nuclear_spin(st, 2.0)


def _traj(t, **cols):
    return Trajectory(t, np.column_stack(list(cols.values())), tuple(cols))


def test_compare_identical_and_shifted():
    t = np.linspace(0, 10, 101)
    a = _traj(t, x=np.sin(t), y=np.cos(t))
    rep = compare_trajectories(a, a, ["x", "y"])
    assert rep.nrms == {"x": 0.0, "y": 0.0}
    b = _traj(t, x=1.1 * np.sin(t), y=np.cos(t))
    assert compare_trajectories(a, b, ["x"]).nrms["x"] == pytest.approx(0.1)
    # resampled onto the reference grid
    fine = np.linspace(0, 10, 1001)
    c = _traj(fine, x=np.sin(fine), y=np.cos(fine))
    assert compare_trajectories(a, c, ["x"]).max() < 1e-3
    assert isinstance(ComparisonReport({"x": 0.0}, 1, (0, 1)).to_json(), str)


def test_compare_disjoint_ranges():
    a = _traj(np.array([0.0, 1.0]), x=np.ones(2))
    b = _traj(np.array([2.0, 3.0]), x=np.ones(2))
    with pytest.raises(ValueError, match="disjoint"):
        compare_trajectories(a, b, ["x"])


def _synthetic(omega_eff, w, decay, t0=0.0, cell=CellParams(), M=0.5):
    # X_S' = Omega * P_I with P_I = P0 e^{-g t} cos(w t + 0.3)
    st = stationary_state(M, cell)
    t = np.linspace(t0, t0 + 4 * 2 * np.pi / w, 4001)
    p = 1e-2 * np.exp(-decay * t) * np.cos(w * t + 0.3)
    x = omega_eff * (1e-2 * np.exp((1j * w - decay) * t + 0.3j) / (1j * w - decay)).real + 0.7
    return _traj(t, Sy=x * np.sqrt(st.Sx), Iz=p * np.sqrt(st.Ix)), st


@pytest.mark.parametrize("decay", [0.0, 0.02])
def test_extraction_recovers_known_coupling(decay):
    w, om = 1.3, 0.37
    tr, st = _synthetic(om, w, decay * w)
    fit = extract_coupling(tr, w, 0.5, CellParams(), decay=decay * w, steady=st)
    assert fit.omega_eff == pytest.approx(om, rel=1e-3)
    assert not fit.low_confidence


def test_extraction_is_phase_agnostic():
    w, om = 1.3, 0.37
    a = extract_coupling(_synthetic(om, w, 0.0)[0], w, 0.5, CellParams())
    b = extract_coupling(_synthetic(om, w, 0.0, t0=1.234)[0], w, 0.5, CellParams())
    assert a.omega_eff == pytest.approx(b.omega_eff, rel=1e-6)


def test_extraction_flags_bad_fit_and_short_runs():
    w = 1.3
    tr, _ = _synthetic(0.37, w, 0.0)
    noisy = Trajectory(tr.times, tr.states * (1 + 0.5 * np.sin(7.7 * tr.times))[:, None], tr.names)
    assert extract_coupling(noisy, w, 0.5, CellParams()).low_confidence
    short = Trajectory(tr.times[:500], tr.states[:500], tr.names)
    with pytest.raises(ValueError):
        extract_coupling(short, w, 0.5, CellParams())


def test_slow_mode_selects_nuclear_precession(cell, couplings_c1):
    A = analytic_linearization(0.5, couplings_c1, cell).matrix_A
    w, g = slow_mode(A)
    wI = abs(cell.B_x * -2 * np.pi * 3.243e3)
    assert 1 < w / wI < 5 and 0 < g < 0.1 * w
    with pytest.raises(ValueError):
        slow_mode(-np.eye(3))


@pytest.mark.parametrize("config", [1, 2])
def test_reduced_model_extraction_tracks_scaling_function(config, cell):
    for M in (0.1, 0.5, 0.9):
        p = coupling_point(config, M, cell)
        assert abs(p.rel_error) < 0.05
        assert not p.low_confidence


def test_linear_response_regime(cell, couplings_c1):
    # doubling the tilt doubles every fluctuation (short full-model run)
    M = 0.5
    c = cell.with_(M=M)
    st = stationary_state(M, c)
    runs = [simulate("full", M, couplings_c1, c, tilt, periods=0.05) for tilt in (0.005, 0.01)]
    names = ("Sy", "Iy", "Iz", "Ky", "Kz", "Jy", "Jz")
    fl = [fluctuations(r, st.to_dict(), names) for r in runs]
    for k in names:
        a, b = np.max(np.abs(fl[0][k])), np.max(np.abs(fl[1][k]))
        assert b / a == pytest.approx(2.0, rel=0.01), k


def test_simulate_rejects_unknown_model(cell, couplings_c1):
    with pytest.raises(ValueError):
        simulate("config3", 0.5, couplings_c1, cell)
    with pytest.raises(ValueError):
        simulate("config1", 0.5, couplings_c1, cell, dt=1.0)
