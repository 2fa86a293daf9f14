import csv
from fractions import Fraction

import numpy as np
import pytest

from he3light.angular import HalfInteger
from he3light.constants import GHZ, CellParams, PhysicalConstants, default_transition_table
from he3light.polarizability import (SPECTRUM_COLUMNS, CouplingConstants, NearResonanceError, alpha_tensor,
                                     alpha_vector, coupling_closed_form, coupling_from_structure, cross_section,
                                     find_zero_crossings, spectrum_scan, structure_weights, tensor_weight,
                                     write_spectrum_csv)

H = HalfInteger.of


def at(ghz):
    return coupling_closed_form(ghz * GHZ)


def test_spot_values():
    c = at(-2)
    assert c.chi_dimless == pytest.approx(0.2391206, rel=1e-6)
    assert c.eta_dimless == pytest.approx(0.031391, rel=1e-4)
    assert c.mu_dimless == pytest.approx(0.017634, rel=1e-4)
    assert at(-31).eta_dimless == pytest.approx(-0.1138647, rel=1e-6)


def test_config2_tensor_part_is_small():
    c = at(-31)
    assert abs(c.mu / c.eta) == pytest.approx(0.07966, rel=1e-3)
    assert abs(c.eta) > abs(c.mu)


def test_cross_sections_sum_rule():
    # 6j orthogonality: summed over F', each (F, J') multiplet carries weight 2/3
    table = default_transition_table()
    for F in (H("1/2"), H("3/2")):
        for Jp in (0, 1, 2):
            s = sum(cross_section(e.F, e.J, e.Fp, e.Jp) for e in table if e.F == F and e.Jp == Jp)
            assert s == Fraction(2, 3)


def test_vector_and_tensor_weights():
    assert alpha_vector(H("1/2"), 1, H("1/2"), 0) == Fraction(-2, 3)
    assert alpha_tensor(H("3/2"), 1, H("5/2"), 2) == Fraction(-5, 12)
    # spin-1/2 carries no rank-2 operator even where alpha_T is nonzero
    assert alpha_tensor(H("1/2"), 1, H("1/2"), 1) != 0
    assert tensor_weight(H("1/2"), 1, H("1/2"), 1) == 0


def test_structure_weights_are_exact():
    w = structure_weights()
    assert [c for _, c in w["chi"]] == [Fraction(2, 9), Fraction(-8, 9), Fraction(10, 9), Fraction(-4, 9)]
    assert [c for _, c in w["mu"]] == [Fraction(-1, 10), Fraction(2, 9), Fraction(-1, 18), Fraction(2, 45),
                                       Fraction(-1, 9)]
    assert sum(c for _, c in w["eta"]) == 0


def test_generic_assembly_matches_closed_form(rng):
    for x in rng.uniform(-40, 10, 200):
        try:
            a = coupling_closed_form(x * GHZ)
        except NearResonanceError:
            continue
        b = coupling_from_structure(x * GHZ)
        np.testing.assert_allclose(a.as_tuple(), b.as_tuple(), rtol=1e-12)


def test_near_pole_raises():
    with pytest.raises(NearResonanceError):
        at(0.0)
    with pytest.raises(NearResonanceError):
        at(-27.6453 + 1e-4)


@pytest.mark.parametrize("entry", list(default_transition_table()), ids=lambda e: f"C{e.index}")
def test_pole_residues(entry):
    # each coupling diverges at its own poles with residue equal to the structure weight
    eps = 1e-2
    left, right = at(entry.offset_ghz - eps), at(entry.offset_ghz + eps)
    for name, weights in structure_weights().items():
        w = dict(weights).get(entry.index, 0)
        if w == 0:
            continue
        lo, hi = getattr(left, f"{name}_dimless"), getattr(right, f"{name}_dimless")
        assert (hi - lo) * eps / 2 == pytest.approx(float(w), rel=0.05)


def test_chi_has_no_regular_zero_below_c8():
    # between the highest F=1/2 pole under C8 and C8 itself chi stays positive
    scan = spectrum_scan(-27.4, -0.01, 0.01)
    vals = np.array([c.chi_dimless for c in scan])
    assert np.all(vals > 0)
    assert vals.min() == pytest.approx(0.063, abs=2e-3)
    assert find_zero_crossings("chi", -27.4, -0.05, 0.05) == []


def test_regular_zeros():
    eta_roots = find_zero_crossings("eta", -40, 10, 0.01)
    np.testing.assert_allclose(eta_roots, [-25.07, -20.91, -17.39], atol=0.01)
    mu_roots = find_zero_crossings("mu", -40, 10, 0.01)
    np.testing.assert_allclose(mu_roots, [-29.34], atol=0.01)


def test_rate_convention():
    cell = CellParams.from_ratio(1e3, tau=0.5)
    c = coupling_closed_form(-2 * GHZ, cell=cell)
    assert c.chi == pytest.approx(c.chi_dimless * 2.0)
    c = coupling_closed_form(-2 * GHZ, cell=cell.with_(coupling_scale=7.0))
    assert c.chi == pytest.approx(c.chi_dimless * 7.0)
    k = PhysicalConstants()
    assert c.chi_abs == pytest.approx(k.sigma2 * k.gamma_decay / (4 * cell.beam_area) * c.chi_dimless / GHZ)


def test_coupling_helpers():
    c = CouplingConstants.manual(1.0, 2.0, 3.0)
    assert c.only("eta").as_tuple() == (0.0, 2.0, 0.0)
    with pytest.raises(ValueError):
        c.only("nu")


def test_spectrum_scan_and_csv(tmp_path):
    scan = spectrum_scan(-40, 10, 0.05)
    assert len(scan) == 1000  # the grid point at C8 is skipped
    write_spectrum_csv(tmp_path / "s.csv", scan)
    rows = list(csv.reader(open(tmp_path / "s.csv")))
    assert tuple(rows[0]) == SPECTRUM_COLUMNS
    assert float(rows[1][0]) == -40.0
    with pytest.raises(ValueError):
        spectrum_scan(0, 1, 0)
