import math
import time

import numpy as np
import pytest

from ejmshare.scenario import AXIS_ANGLES, SourceSpec
from ejmshare.serialize import SWEEP_COLUMNS, from_csv, sweep_record, to_csv
from ejmshare.sweep import (NO_VISIBILITY, base_config, evaluate_point, find_critical_visibility,
                            find_z_onset, g_grid, sweep_g, theta_scan, violation_windows,
                            visibility_margin)


def test_grid():
    assert g_grid(3) == [0.0, 0.5, 1.0]
    assert len(g_grid(101)) == 101
    with pytest.raises(ValueError):
        g_grid(0)
    with pytest.raises(ValueError):
        sweep_g(0, "square", [1.5])


def test_square_endpoint_minimizes_b22():
    rows = sweep_g(0.0, "square", g_grid(101))
    b22 = [r.B(2, 2) for r in rows]
    assert rows[-1].F == 0
    assert int(np.argmin(b22)) == len(rows) - 1


@pytest.mark.parametrize("pointer", ["square", "optimal"])
def test_b12_equals_b21(pointer):
    for r in sweep_g(math.pi / 8, pointer, g_grid(21)):
        assert r.B(1, 2) == pytest.approx(r.B(2, 1), abs=1e-10)


def test_sweep_cost():
    start = time.process_time()
    sweep_g(0.0, "optimal", g_grid(101))
    assert time.process_time() - start < 1.0


def test_parallel_equals_serial_and_deterministic():
    grid = g_grid(17)
    a = [sweep_record(r) for r in sweep_g(0.3, "optimal", grid)]
    b = [sweep_record(r) for r in sweep_g(0.3, "optimal", grid, workers=4)]
    c = [sweep_record(r) for r in sweep_g(0.3, "optimal", grid)]
    assert a == b == c


def test_rows_reproducible_from_serialized_inputs():
    rows = sweep_g(0.2, "square", g_grid(5))
    _, records = from_csv(to_csv(SWEEP_COLUMNS, [sweep_record(r) for r in rows]))
    cfg = base_config(0.2, "square")
    for rec in records:
        again = evaluate_point(cfg, float(rec["G"]))
        for n, m in ((1, 1), (1, 2), (2, 1), (2, 2)):
            assert again.B(n, m) == pytest.approx(rec[f"B_{n}{m}"], rel=1e-11, abs=1e-12)
            assert again.Z(n, m) == pytest.approx(rec[f"Z_{n}{m}"], rel=1e-11, abs=1e-12)


def test_violation_windows_on_known_function():
    w = violation_windows(lambda g: (g - 0.3137) * (0.7071 - g), step=1e-2, tol=1e-7)
    assert len(w) == 1
    assert w[0][0] == pytest.approx(0.3137, abs=1e-6)
    assert w[0][1] == pytest.approx(0.7071, abs=1e-6)
    assert violation_windows(lambda g: -1.0, step=0.1) == ()
    assert violation_windows(lambda g: 1.0, step=0.1) == ((0.0, 1.0),)


@pytest.mark.parametrize("pointer", ["square", "optimal"])
@pytest.mark.parametrize("mode", ["computed", "dial"])
def test_no_sharing_at_bell_measurement(pointer, mode):
    r = find_z_onset(math.pi / 2, pointer, mode=mode, step=1e-2)
    assert r.g_window == () and r.z_onset is None and not r.found


def test_dial_onset_consistent_with_best_point():
    r = find_z_onset(0.0, "optimal", mode="dial", step=1e-2)
    row = evaluate_point(base_config(0.0, "optimal"), r.best_G)
    assert min(rep.B for rep in row.reports.values()) == pytest.approx(r.best_min_B, abs=1e-9)
    # with the grid's best point as a floor
    grid_best = max(min(rep.B for rep in x.reports.values()) for x in sweep_g(0.0, "optimal", g_grid(101)))
    assert r.best_min_B >= grid_best - 1e-12


def test_theta_scan_order():
    res = theta_scan([0.1, 0.0], ["optimal", "square"], mode="dial", step=0.05)
    assert [(r.theta, r.pointer.value) for r in res] == [
        (0.1, "optimal"), (0.0, "optimal"), (0.1, "square"), (0.0, "square")]


def test_visibility_one_is_noiseless():
    m1, _ = visibility_margin(0.3, 0.0, "square", 1.0, g_steps=11)
    cfg = base_config(0.3, "square")
    m0 = max(min(r.reports[p].B - r.reports[p].bound for p in ((1, 1), (2, 2)))
             for r in (evaluate_point(cfg, g, 0.0) for g in g_grid(11)))
    assert m1 == pytest.approx(m0, abs=1e-14)


def test_critical_visibility_closed_form():
    # axis-aligned triads, strong limit: B11 = v + 3 v**2 at theta = 0
    res = find_critical_visibility(0.0, 0.0, "square", tol=1e-6, g_steps=11, pairs=((1, 1),),
                                   angles=AXIS_ANGLES)
    assert res.V == pytest.approx((math.sqrt(37) - 1) / 6, abs=2e-6)
    assert res.best_G == 1.0


def test_critical_visibility_sentinel():
    res = find_critical_visibility(0.0, 0.58, "square", g_steps=11)
    assert res.V is None and res.note == NO_VISIBILITY
    with pytest.raises(ValueError):
        find_critical_visibility(0.0, -0.1, "square")
