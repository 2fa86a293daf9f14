import json

import numpy as np
import pytest

from he3light.constants import (GHZ, CellParams, PhysicalConstants, RunConfig, default_field, default_transition_table,
                                dump_config, ghz_to_rad, larmor_frequency, load_config, rad_to_ghz)


def test_unit_round_trip():
    assert rad_to_ghz(ghz_to_rad(-31.0)) == pytest.approx(-31.0)
    assert GHZ == pytest.approx(2 * np.pi * 1e9)


def test_transition_table():
    table = default_transition_table()
    assert len(list(table)) == 9
    assert table[8].offset == 0.0
    assert len(table.poles()) == 9
    with pytest.raises(IndexError):
        table[10]


def test_gyromagnetic_ratios():
    c = PhysicalConstants()
    assert c.gamma_half == pytest.approx(4 * c.gamma_ms / 3)
    assert c.gamma_threehalf == pytest.approx(2 * c.gamma_ms / 3)


def test_cell_derived_quantities():
    cell = CellParams.from_ratio(1e3, tau=2.0)
    assert cell.T == pytest.approx(2e3)
    assert cell.ratio == pytest.approx(1e3)
    assert cell.light_rate == pytest.approx(0.5)
    assert abs(PhysicalConstants().gamma_threehalf) * cell.B_x * cell.tau == pytest.approx(1e-2)
    assert CellParams.from_times(T=50.0, tau=0.5).ratio == pytest.approx(100.0)


@pytest.mark.parametrize("kw", [dict(n_cell=0), dict(N_cell=1e-9, n_cell=1e-6), dict(M=1.5), dict(tau=-1)])
def test_cell_validation(kw):
    with pytest.raises(ValueError):
        CellParams(**kw)


def test_larmor_frequency(cell):
    assert larmor_frequency(cell) == pytest.approx(abs(PhysicalConstants().gamma_nuc * cell.B_x))
    assert larmor_frequency(cell, "threehalf") * cell.tau == pytest.approx(1e-2)


def test_config_round_trip(tmp_path):
    cfg = RunConfig(CellParams.from_ratio(1e4, M=0.3), -31.0)
    dump_config(cfg, tmp_path / "c.json")
    back = load_config(tmp_path / "c.json")
    assert back == cfg


def test_config_accepts_ratio(tmp_path):
    (tmp_path / "c.json").write_text(json.dumps({"cell": {"ratio": 500.0, "N_cell": 2.0}}))
    assert load_config(tmp_path / "c.json").cell.n_cell == pytest.approx(4e-3)
    (tmp_path / "bad.json").write_text(json.dumps({"cell": {"bogus": 1}}))
    with pytest.raises(ValueError):
        load_config(tmp_path / "bad.json")
