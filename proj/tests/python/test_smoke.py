import json
import math

import pytest

import projfree


def test_version():
    assert projfree.__version__ == "0.1.0"


def test_norms_and_oracles():
    assert projfree.lp_norm([3, 4], 2) == pytest.approx(5.0)
    assert projfree.dual_exponent(1.5) == pytest.approx(3.0)
    ball = projfree.FeasibleSet("lp", 2, 1, d=2)
    assert ball.lmo([3, 4]) == pytest.approx([-0.6, -0.8])
    assert ball.project([3, 4]) == pytest.approx([0.6, 0.8])
    assert ball.fw_gap([0, 0], [1, 0]) == pytest.approx(1.0)
    box = projfree.FeasibleSet("lp", math.inf, 2, d=3)
    assert box.lmo([1, -3, 0]) == [-2, 2, 0]
    nuc = projfree.FeasibleSet("schatten", 1, 1, m=2, n=2)
    assert nuc.contains(nuc.lmo([1, 2, 3, 4]), 1e-12)


def test_errors_are_translated():
    with pytest.raises(projfree.ProjfreeError, match="invalid-exponent"):
        projfree.lp_norm([1.0], 0.5)


def test_schedules_and_slope():
    assert projfree.spa_batch_size(2, 100) == 16
    assert projfree.step_size_predefined(3) == pytest.approx(0.5)
    fit = projfree.loglog_slope([(t, t ** -2.0) for t in range(1, 100)], 10)
    assert fit["slope"] == pytest.approx(-2.0, abs=1e-9)


def test_run_is_deterministic():
    cfg = json.dumps({
        "loss": {"kind": "quadratic"},
        "data": {"kind": "regression", "n": 60, "d": 4, "noise": 0.1, "seed": 3},
        "set": {"family": "lp", "p": 2, "r": 0.5},
        "optimizer": {"method": "pa", "iters": 30, "seed": 2},
    })
    a, b = projfree.run(cfg), projfree.run(cfg)
    assert len(a["records"]) == 30
    assert a["csv"] == b["csv"]
    assert a["csv"].splitlines()[0] == "t,loss_f,loss_h,fw_gap,gamma,batch,grad_norm,step_ms,oracle_ms,proj_ms"
    assert a["final_loss"] >= a["f_star"] - 1e-9


def test_oracle_criterion():
    ok, line = projfree.run_criterion(8)
    assert ok, line
