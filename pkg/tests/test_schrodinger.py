import math

from hypothesis import given, settings, strategies as st
import numpy as np
import pytest

from almostred.analytic import trig_polynomial
from almostred.cocycle import amo_potential
from almostred.errors import InvalidInput
from almostred.schrodinger import (SchrodingerConfig, classify_energy, dichotomy_report, ids,
                                   rotation_number, scan_minimal_energy)

FREE = trig_polynomial(constant=0.0)
SCAN = np.linspace(-3.2, 3.2, 65)


def test_free_rotation_number(golden):
    rho, err = rotation_number(golden, FREE, 2 * math.cos(2 * math.pi * 0.2), N=10 ** 5)
    assert abs(rho - 0.2) < 1e-4 and err < 1e-3
    assert rotation_number(golden, FREE, 3.0, N=10 ** 4)[0] == 0


def test_free_ids_closed_form(golden):
    E = np.linspace(-2, 2, 101)
    exact = 1 - np.arccos(np.clip(E / 2, -1, 1)) / math.pi
    assert np.abs(ids(golden, FREE, E) - exact).max() < 5e-3
    assert np.abs(ids(golden, FREE, E, "eigencount", 2000) - exact).max() < 5e-3


@pytest.mark.parametrize("lam", [0.5, 1.0, 3.0])
def test_ids_methods_agree(golden, lam):
    E = np.linspace(-2 - 2 * lam, 2 + 2 * lam, 41)
    a = ids(golden, amo_potential(lam), E, "rotation", 40000)
    b = ids(golden, amo_potential(lam), E, "eigencount", 2000)
    assert np.abs(a - b).max() < 5e-3
    assert np.all(np.diff(a) >= -1e-3) and np.all(np.diff(b) >= -1e-3)


def test_ids_guards(golden):
    with pytest.raises(InvalidInput):
        ids(golden, FREE, 0.0, "spectral")
    with pytest.raises(InvalidInput):
        ids(golden, FREE, 0.0, "eigencount", 10)
    with pytest.raises(InvalidInput):
        rotation_number(golden, trig_polynomial(sin=[1.0], scale=1j), 0.0)


def test_classify_gap_by_norm(golden):
    r = classify_energy(golden, amo_potential(0.5), -4.0)
    # below the spectrum solutions alternate sign every step
    assert r.cls == "gap" and r.uh and r.rho == 0.5 and r.ids == 0


def test_classify_amo_oracles(golden):
    v3 = amo_potential(3.0)
    E3 = scan_minimal_energy(golden, v3, SCAN)
    r = classify_energy(golden, v3, E3)
    assert r.cls == "supercritical" and abs(r.L0 - math.log(3)) < 2e-2
    assert abs(r.accel - 1) < 0.05 and r.quantized
    v5 = amo_potential(0.5)
    r = classify_energy(golden, v5, scan_minimal_energy(golden, v5, SCAN))
    assert r.cls == "subcritical" and r.L0 < 1e-2 and r.quantized


def test_classify_critical(golden):
    r = classify_energy(golden, amo_potential(1.0), 0.0)
    assert r.cls == "critical" and abs(r.accel - 1) < 0.05


def test_record_json_keys(golden):
    d = classify_energy(golden, amo_potential(0.5), -4.0).to_dict()
    for key in ("E", "class", "L0", "accel", "rho", "ids", "err"):
        assert key in d


@settings(max_examples=6, deadline=None)
@given(st.floats(min_value=0.1, max_value=0.9), st.floats(min_value=-1, max_value=1))
def test_subcritical_never_supercritical(lam, u):
    from almostred.arithmetic import cf_expand
    g = cf_expand("golden", 64)
    cfg = SchrodingerConfig(grid=256, N_max=1 << 12, uh_n_max=1 << 12, rotation_N=5000)
    E = u * (2 + 2 * lam)
    assert classify_energy(g, amo_potential(lam), E, cfg).cls != "supercritical"


@settings(max_examples=6, deadline=None)
@given(st.floats(min_value=1.5, max_value=4.0), st.floats(min_value=-1, max_value=1))
def test_supercritical_never_subcritical(lam, u):
    from almostred.arithmetic import cf_expand
    g = cf_expand("golden", 64)
    cfg = SchrodingerConfig(grid=256, N_max=1 << 12, uh_n_max=1 << 12, rotation_N=5000)
    E = u * (2 + 2 * lam)
    assert classify_energy(g, amo_potential(lam), E, cfg).cls != "subcritical"


@settings(max_examples=10, deadline=None)
@given(st.floats(min_value=0.1, max_value=3.0), st.floats(min_value=0.01, max_value=2.0),
       st.booleans())
def test_outer_bound_is_gap(lam, extra, sign):
    from almostred.arithmetic import cf_expand
    g = cf_expand("golden", 64)
    E = (2 + 2 * lam + extra) * (1 if sign else -1)
    cfg = SchrodingerConfig(grid=256, N_max=1 << 12, uh_n_max=1 << 12, rotation_N=2000)
    assert classify_energy(g, amo_potential(lam), E, cfg).cls == "gap"


def test_report_partition_small(golden):
    rep = dichotomy_report(golden, amo_potential(3.0), np.linspace(-6.5, 6.5, 9))
    assert rep.partition_ok()
    assert rep.summary["counts"]["sigma_minus"] == 0
    assert sum(r["count"] for r in rep.summary["runs"]) == 9
    assert len(rep.rows()) == 9 and rep.to_json()["records"][0]["E"] == -6.5


@pytest.mark.slow
def test_report_subcritical_grid(golden):
    rep = dichotomy_report(golden, amo_potential(0.5), np.linspace(-3.2, 3.2, 201))
    assert rep.partition_ok()
    assert rep.summary["counts"]["sigma_plus"] == 0
    assert all(r.cls in ("gap", "subcritical") for r in rep.records)
