import json
import math

import numpy as np
import pytest

from zetanls import experiments as ex
from zetanls import field as fld
from zetanls import oracle
from zetanls.dynamics import Equation, StepperConfig, Variant
from zetanls.field import TorusGrid


def test_check_margins():
    c = ex.at_most("x", 0.5, 1.0)
    assert c.passed and c.margin == 0.5
    c = ex.at_least("y", 0.5, 1.0)
    assert not c.passed and c.margin == -0.5


def test_report_pass_ignores_unenforced():
    rep = ex.ExperimentReport("r", {})
    rep.checks.append(ex.at_most("ok", 0.0, 1.0))
    rep.checks.append(ex.at_most("info", 2.0, 1.0, enforced=False))
    assert rep.passed
    rep.checks.append(ex.at_most("bad", 2.0, 1.0))
    assert not rep.passed
    assert rep.check("bad").margin == -1.0
    with pytest.raises(KeyError):
        rep.check("missing")


def test_report_serialization(tmp_path):
    rep = ex.ExperimentReport("demo", {"a": 1.5, "b": [1, 2.0], "c": np.float64(2.0)},
                              series={"t": [0.0, 1.0], "y": [3.0, 4.0]})
    rep.checks.append(ex.Check("inf bound", math.inf, 1.0, math.inf, True))
    path = rep.write(tmp_path)
    doc = json.loads(path.read_text())
    assert doc["series_path"] == "demo.csv"
    assert doc["checks"][0]["bound"] == "inf"
    assert (tmp_path / "demo.csv").read_text().splitlines() == ["t,y", "0.0,3.0", "1.0,4.0"]
    assert path.read_text() == ex.dumps(doc)


def test_observed_orders():
    assert ex.observed_orders([4, 2, 1], [16.0, 4.0, 1.0]) == pytest.approx([2.0, 2.0])
    assert ex.observed_orders([2, 1], [1.0, 0.0]) == [math.inf]


def test_refinement_check_cases():
    c = ex.refinement_check("v", [4, 2, 1], [0.0, 0.0, 0.0], 1.8)
    assert c.passed and c.measured == math.inf
    c = ex.refinement_check("v", [4, 2, 1], [16e-6, 4e-6, 1e-6], 1.8)
    assert c.passed and c.measured == pytest.approx(2.0)
    c = ex.refinement_check("v", [4, 2, 1], [4e-6, 2e-6, 1e-6], 1.8)
    assert not c.passed


def test_lockstep_identical_runs_coincide():
    u0 = fld.random_smooth(TorusGrid(16), seed=3)
    v = Variant(Equation.ZETA)
    for _, (a, b), _ in ex.lockstep([u0, u0], [v, v], StepperConfig(dt=0.01), 0.2):
        assert np.array_equal(a, b)


def test_make_variant_drops_irrelevant_parameters():
    assert ex.make_variant("zeta", 1.0, eps=0.3, mu=2.0) == Variant(Equation.ZETA, 1.0)
    assert ex.make_variant("zeta_log", 1.0, eps=0.1, mu=0.5).mu == 0.5


def test_mass_decay_small():
    rep = ex.run_mass_decay(n=16, dt=2e-3, t_final=0.5)
    assert rep.passed, rep.lines()


def test_mass_decay_rejects_sign():
    with pytest.raises(ValueError):
        ex.run_mass_decay(variant="sign", n=8, t_final=0.1)


def test_gradient_small():
    rep = ex.run_gradient_monotonicity(n=16, t_final=0.3, dt_list=(4e-3, 2e-3, 1e-3))
    assert rep.passed, rep.lines()
    with pytest.raises(ValueError):
        ex.run_gradient_monotonicity(n=16, dt_list=(1e-3, 2e-3, 4e-3))


def test_uniqueness_small():
    rep = ex.run_uniqueness_contraction(n=16, dt=2e-3, t_final=0.5, same_horizon=0.1)
    assert rep.passed, rep.lines()
    assert rep.series["diff"][0] == pytest.approx(1e-3, rel=1e-12)


def test_comparison_small():
    rep = ex.run_comparison(n=16, dt=2e-3, t_final=1.0)
    assert rep.passed, rep.lines()
    assert rep.series["diff"][0] == 0.0


def test_comparison_peak_check_present_when_reached():
    rep = ex.run_comparison(n=8, dt=1e-2, t_final=3.5)
    assert any("envelope peak" in c.description for c in rep.checks)


def test_sign_extinction_small():
    # the linear flow does not preserve the sup norm, so on coarse grids the last
    # points can outlive sup|u0|/lam slightly; extinction itself must still occur
    rep = ex.run_sign_extinction(n=16, dt=2e-3, t_final=1.0)
    assert rep.check("mass non-increasing (max step increase)").passed
    assert rep.params["first_full_extinction_t"] is not None
    assert rep.checks[0].measured >= 0.95
    assert rep.series["extinct_fraction"][-1] == 1.0


def test_eps_convergence_constant_data_matches_scalar_oracle():
    g = TorusGrid(4)
    c = 0.8
    u0 = fld.constant(g, c)
    eps_list = (0.2, 0.1, 0.05)
    rep = ex.run_eps_convergence(dt=1e-3, t_final=0.6, eps_list=eps_list, u0=u0, early_exit=False)
    ts = np.array(rep.series["t"])
    pick = np.arange(0, len(ts), 50)
    for e in eps_list:
        d = np.array(rep.series[f"d_eps_{e:g}"])
        for i in pick:
            ref = abs(oracle.amplitude_ode_reference(c, 1.0, e, ts[i])
                      - oracle.amplitude_ode_reference(c, 1.0, 0.0, ts[i]))
            assert abs(d[i] - 2 * math.pi * ref) < 1e-8


def test_eps_convergence_early_exit_keeps_maximum():
    u0 = fld.random_smooth(TorusGrid(16), seed=2)
    kw = dict(dt=2e-3, t_final=0.8, eps_list=(0.2, 0.1), u0=u0)
    full = ex.run_eps_convergence(early_exit=False, **kw)
    short = ex.run_eps_convergence(**kw)
    assert short.params["reference_extinct_at"] is not None
    assert short.params["d(0.2)"] == full.params["d(0.2)"]
    assert short.params["d(0.1)"] == full.params["d(0.1)"]


def test_eps_list_validation():
    with pytest.raises(ValueError):
        ex.run_eps_convergence(n=8, eps_list=(0.1, 0.2))
    with pytest.raises(ValueError):
        ex.run_eps_convergence(n=8, eps_list=(0.1,))


def test_eps_log_variant_is_report_only():
    rep = ex.run_eps_convergence(n=8, dt=5e-3, t_final=0.2, eps_list=(0.2, 0.1, 0.0),
                                 variant="zeta_log", mu=0.5)
    assert rep.name == "eps_convergence_log"
    assert all(not c.enforced for c in rep.checks)


def test_splitting_initial_stays_away_from_zero():
    u0 = ex.splitting_initial()
    assert np.min(np.abs(u0.values)) >= 1.5


def test_property_battery_small():
    rep = ex.run_property_battery(samples=20_000, kernel_points=2000)
    assert rep.passed, rep.lines()
    assert rep.params["kernel_min"] == pytest.approx(0.5772156649, abs=1e-6)


def test_suite_validation():
    with pytest.raises(ValueError):
        ex.suite_reports("nope")


def test_summary_shape():
    rep = ex.ExperimentReport("x", {})
    doc = ex.summary([rep], "specfun", {"seed": 1})
    assert doc == {"suite": "specfun", "params": {"seed": 1}, "passed": True,
                   "reports": [rep.as_dict()]}
