import json

import numpy as np
import pytest

from he3light.constants import CellParams
from he3light.dynamics import full_rhs
from he3light.steady import (IDX_A, IDX_B, ORDER_A, ORDER_B, SingularFastBlock, adiabatic_eliminate,
                             analytic_linearization, eliminate_by_name, numeric_jacobian, stationary_state)
from he3light.validation import STATIONARY_M, jacobian_errors, stationarity_residual


def test_orderings_partition_the_state():
    assert len(ORDER_A) == 14 and len(ORDER_B) == 11
    assert sorted(IDX_A + IDX_B) == list(range(25))


def test_stationary_values(cell):
    st = stationary_state(0.5, cell)
    n, D = cell.n_cell, 3.25
    assert st.Ix == pytest.approx(0.25 * cell.N_cell)
    assert st.Jx == pytest.approx(0.5 * 5.25 / D * n)
    assert st.S0 == st.Sx == cell.n_ph / 2
    z = stationary_state(0.0, cell)
    assert np.all(z.values[4:] == 0)
    with pytest.raises(ValueError):
        stationary_state(1.5, cell)


@pytest.mark.parametrize("M", STATIONARY_M)
def test_stationary_residual(M):
    assert stationarity_residual(M) < 1e-12


@pytest.mark.parametrize("M", STATIONARY_M)
def test_numeric_jacobian_matches_analytic(M):
    err, cross = jacobian_errors(M)
    assert err < 1e-6
    assert cross < 1e-8


def test_tensor_couplings_vanish_at_zero_polarization(cell, couplings_c1):
    A = analytic_linearization(0.0, couplings_c1, cell).matrix_A
    assert A[0, 1] == 0 and A[1, 0] == 0


def test_linearization_json(cell, couplings_c1):
    d = json.loads(analytic_linearization(0.3, couplings_c1, cell).to_json())
    assert d["ordering_a"] == list(ORDER_A) and np.array(d["B"]).shape == (11, 11)


def test_elimination_identity_and_errors():
    M = np.array([[1.0, 2.0], [3.0, 4.0]])
    assert np.allclose(adiabatic_eliminate(M, []), M)
    assert adiabatic_eliminate(M, [1])[0, 0] == pytest.approx(1 - 2 * 3 / 4)
    with pytest.raises(SingularFastBlock):
        adiabatic_eliminate(np.array([[1.0, 1.0], [1.0, 0.0]]), [1])


def test_eliminate_by_name(cell, couplings_c1):
    lin = analytic_linearization(0.3, couplings_c1, cell)
    keep = ("Sy", "Sz", "Iy", "Iz")
    G = eliminate_by_name(lin, [k for k in ORDER_A if k not in keep])
    assert G.shape == (4, 4)
