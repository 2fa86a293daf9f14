import numpy as np
import pytest

from he3light.constants import CellParams
from he3light.dynamics import ATOMIC_NAMES, INDEX, mec_rhs
from he3light.oracles import (BlockDensityMatrix, InvalidDensityMatrix, expectations_from_rho,
                              hamiltonian_oracle_sweep, mec_oracle_sweep, mec_rho_rhs, partial_traces,
                              random_block_density, spin_temperature_rho, validate_block, write_report)
from he3light.steady import stationary_state


def test_block_validation_rejects_bad_input():
    rm, rf = np.eye(6) / 6, np.eye(2) / 2
    BlockDensityMatrix(rm, rf)
    bad = rm.copy()
    bad[0, 5] = bad[5, 0] = 0.01
    with pytest.raises(InvalidDensityMatrix):
        BlockDensityMatrix(bad, rf)
    with pytest.raises(InvalidDensityMatrix):
        BlockDensityMatrix(rm * 2, rf)
    with pytest.raises(InvalidDensityMatrix):
        validate_block(rm, np.diag([1.5, -0.5]))


def test_partial_traces_of_product_state(rng):
    rho = random_block_density(rng)
    re, rn = partial_traces(rho.rho_m)
    assert np.trace(re) == pytest.approx(1) and np.trace(rn) == pytest.approx(1)


def test_mec_oracle_agreement():
    worst = mec_oracle_sweep(100, seed=3)
    assert set(worst) == set(ATOMIC_NAMES)
    assert max(worst.values()) < 1e-10


@pytest.mark.parametrize("part", ["light", "magnetic", "both"])
def test_hamiltonian_oracle_agreement(part):
    assert max(hamiltonian_oracle_sweep(100, seed=5, part=part).values()) < 1e-10


@pytest.mark.parametrize("M", [0.0, 0.3, 0.9])
def test_spin_temperature_state_is_stationary_and_matches_closed_form(M):
    cell = CellParams.from_ratio(20.0, M=M)
    rho = spin_temperature_rho(M)
    drho = mec_rho_rhs(rho, cell)
    assert np.max(np.abs(drho.rho_m)) < 1e-14 and np.max(np.abs(drho.rho_f)) < 1e-14
    got = expectations_from_rho(rho, cell).values
    ref = stationary_state(M, cell).values
    np.testing.assert_allclose(got[4:], ref[4:], atol=1e-15)


def test_collective_mec_at_spin_temperature(rng):
    cell = CellParams.from_ratio(20.0)
    x = expectations_from_rho(spin_temperature_rho(0.4, "z"), cell)
    assert np.max(np.abs(mec_rhs(x, cell))) < 1e-15


def test_report_written(tmp_path):
    write_report({"a": {"b": 1.0}}, tmp_path / "r.json")
    assert (tmp_path / "r.json").read_text().startswith("{")
