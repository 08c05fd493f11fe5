import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from zetanls import dynamics as dyn
from zetanls import field as fld
from zetanls import oracle
from zetanls.dynamics import Equation, SimulationError, StepperConfig, Variant
from zetanls.field import ComplexField, TorusGrid

ZETA = Variant(Equation.ZETA, 1.0)
SIGN = Variant(Equation.SIGN, 1.0)


def scalar_field(n, c):
    return fld.constant(TorusGrid(n), c)


# -- configuration ----------------------------------------------------------


def test_variant_invariants():
    with pytest.raises(ValueError):
        Variant(Equation.ZETA, 0.0)
    with pytest.raises(ValueError):
        Variant(Equation.ZETA, 1.0, eps=0.1)
    with pytest.raises(ValueError):
        Variant(Equation.SIGN, 1.0, eps=0.1)
    with pytest.raises(ValueError):
        Variant(Equation.ZETA_EPS, 1.0, mu=0.5, eps=0.1)
    with pytest.raises(ValueError):
        Variant(Equation.ZETA_EPS, 1.0, eps=-0.1)
    assert Variant("zeta-log", 1.0, mu=-2.0, eps=0.1).tag is Equation.ZETA_LOG


def test_stepper_config_invariants():
    with pytest.raises(ValueError):
        StepperConfig(dt=0.2)
    with pytest.raises(ValueError):
        StepperConfig(dt=0.0)
    with pytest.raises(ValueError):
        StepperConfig(ode_substeps=0)


# -- linear part ------------------------------------------------------------


def test_linear_half_step_keeps_zero_mode_and_moduli():
    f = fld.random_smooth(TorusGrid(16), seed=1)
    s = fld.to_spectrum(f)
    out = dyn.linear_half_step(s, 0.37)
    assert out.coeffs[0, 0] == s.coeffs[0, 0]
    assert np.allclose(np.abs(out.coeffs), np.abs(s.coeffs), rtol=1e-15, atol=0)
    assert math.isclose(fld.spectral_mass(out), fld.spectral_mass(s), rel_tol=1e-14)


def test_linear_half_step_matches_dense_exponential():
    g = TorusGrid(8)
    f = fld.random_smooth(g, seed=3, decay_p=2.0)
    t = 0.05
    ref = (oracle.dense_linear_propagator(g, t) @ f.values.ravel()).reshape(8, 8)
    ref_c = fld.to_spectrum(ComplexField(g, ref)).coeffs
    got = dyn.linear_half_step(fld.to_spectrum(f), t).coeffs
    assert np.max(np.abs(got - ref_c)) <= 1e-12


# -- nonlinear substep ------------------------------------------------------


def test_sign_substep_exact():
    cfg = StepperConfig()
    u = np.array([[1.0 * np.exp(0.3j), 0.1], [0.0, -2.0]])
    g = ComplexField(TorusGrid(2), u)
    out = dyn.nonlinear_step(g, SIGN, 0.25, cfg).values
    assert out[0, 0] == pytest.approx(0.75 * np.exp(0.3j), abs=1e-15)
    assert out[0, 1] == 0 and out[1, 0] == 0
    assert out[1, 1] == pytest.approx(-1.75, abs=1e-15)


def test_zeta_substep_matches_scalar_oracle():
    out = dyn.nonlinear_step(scalar_field(2, 1.0), ZETA, 0.1, StepperConfig(dt=0.1)).values
    ref = oracle.amplitude_ode_reference(1.0, 1.0, 0.0, 0.1, tol=1e-13)
    assert np.max(np.abs(out - ref)) <= 1e-10


@given(st.floats(1e-6, 5.0), st.sampled_from([0.0, 0.01, 0.3]), st.floats(1e-4, 0.05))
def test_substep_tracks_oracle_at_fourth_order(r0, eps, dt):
    v = Variant(Equation.ZETA_EPS if eps else Equation.ZETA, 1.3, eps=eps)
    ref = oracle.amplitude_ode_reference(r0, 1.3, eps, dt, tol=1e-13)
    errs = []
    for sub in (8, 16):
        out = dyn.nonlinear_step(scalar_field(2, r0), v, dt, StepperConfig(dt=dt, ode_substeps=sub)).values
        assert out[0, 0].imag == 0
        errs.append(abs(out[0, 0].real - ref))
    assert errs[0] <= 1e-6 * max(1.0, r0)
    if ref > 0:
        # RK4: halving the inner step divides the error by ~16; 1e-11 absorbs oracle noise
        assert errs[1] <= errs[0] / 8 + 1e-11


def test_zero_points_stay_zero_and_phase_kept():
    u = np.array([[0.0, 0.5j], [0.2 - 0.1j, 0.0]])
    f = ComplexField(TorusGrid(2), u)
    for v in (ZETA, SIGN, Variant(Equation.ZETA_EPS, 1.0, eps=0.1)):
        out = dyn.nonlinear_step(f, v, 0.01, StepperConfig()).values
        assert out[0, 0] == 0 and out[1, 1] == 0
        nz = u != 0
        assert np.allclose(np.angle(out[nz]), np.angle(u[nz]), atol=1e-15)


def test_log_phase_matches_oracle():
    v = Variant(Equation.ZETA_LOG, 1.0, mu=0.7, eps=0.05)
    out = dyn.nonlinear_step(scalar_field(2, 0.4), v, 0.02, StepperConfig(dt=0.02)).values[0, 0]
    r, phi = oracle.amplitude_phase_reference(0.4, 1.0, 0.05, 0.7, 0.02)
    assert abs(abs(out) - r) < 1e-11
    assert abs(np.angle(out) - phi) < 1e-11


def test_extinction_inside_substep_matches_oracle_time():
    t_ext = oracle.extinction_time_reference(0.05, 1.0)
    f = scalar_field(2, 0.05)
    before = dyn.nonlinear_step(f, ZETA, t_ext * 0.999, StepperConfig(dt=0.1, ode_substeps=64)).values
    after = dyn.nonlinear_step(f, ZETA, t_ext * 1.001, StepperConfig(dt=0.1, ode_substeps=64)).values
    assert np.all(before != 0) and np.all(after == 0)


def test_nonlinear_step_rejects_bad_input():
    f = scalar_field(2, 1.0)
    with pytest.raises(ValueError):
        dyn.nonlinear_step(f, ZETA, -0.1, StepperConfig())
    f.values[0, 0] = np.nan
    with pytest.raises(SimulationError):
        dyn.nonlinear_step(f, ZETA, 0.1, StepperConfig())


def test_amplitude_rate_continuation():
    r = np.array([-1e-3, -1e-6])
    assert np.allclose(dyn.amplitude_rate(r, 0.0), 1 + 0.5772156649015329 * r, atol=1e-6)
    assert np.all(dyn.amplitude_rate(r, 0.05) < 0)


# -- strang step ------------------------------------------------------------


def test_unit_surrogate_decays_mass_exactly():
    f = fld.random_smooth(TorusGrid(16), seed=4)
    v = Variant(Equation.ZETA, 0.8, surrogate="unit")
    out = dyn.strang_step(f, v, StepperConfig(dt=0.01))
    assert math.isclose(fld.mass(out), math.exp(-0.8 * 0.01) * fld.mass(f), rel_tol=1e-14)


def test_constant_field_strang_equals_nonlinear():
    f = scalar_field(16, 0.3 - 0.2j)
    cfg = StepperConfig(dt=0.01)
    a = dyn.strang_step(f, ZETA, cfg).values
    b = dyn.nonlinear_step(f, ZETA, 0.01, cfg).values
    assert np.max(np.abs(a - b)) < 1e-15


@pytest.mark.parametrize("v", [ZETA, SIGN, Variant(Equation.ZETA_EPS, 2.0, eps=0.1),
                               Variant(Equation.ZETA_LOG, 1.0, mu=0.5, eps=0.1)])
def test_per_step_mass_contraction(v):
    f = fld.random_smooth(TorusGrid(32), seed=6)
    dt = 0.01
    out = dyn.strang_step(f, v, StepperConfig(dt=dt))
    assert fld.mass(out) <= fld.mass(f)
    if v.tag is not Equation.SIGN:
        assert fld.mass(out) <= math.exp(-v.lam * dt) * fld.mass(f) * (1 + 1e-12)


# -- evolve -----------------------------------------------------------------


def test_constant_data_follow_scalar_oracle():
    c = 0.6 * np.exp(0.4j)
    u, s = dyn.evolve(scalar_field(16, c), ZETA, StepperConfig(dt=1e-3), 0.3)
    for t in (0.1, 0.2, 0.3):
        i = int(round(t / 1e-3))
        r = oracle.amplitude_ode_reference(abs(c), 1.0, 0.0, t, tol=1e-13)
        assert abs(s.mass[i] - 2 * math.pi * r) <= 1e-9
    assert np.ptp(np.abs(u.values)) == 0


@pytest.mark.parametrize("mode", [(1, 0), (2, 3)])
def test_plane_wave_reduction(mode):
    g = TorusGrid(16)
    a = 0.5
    u0 = fld.plane_wave(g, a, mode)
    t = 0.2
    u, _ = dyn.evolve(u0, ZETA, StepperConfig(dt=1e-3), t)
    r = oracle.amplitude_ode_reference(a, 1.0, 0.0, t, tol=1e-13)
    k2 = mode[0] ** 2 + mode[1] ** 2
    expected = u0.values / a * r * np.exp(-1j * k2 * t)
    assert np.max(np.abs(u.values - expected)) < 1e-9


def test_sign_field_vanishes_after_sup_over_lambda():
    u0 = fld.random_smooth(TorusGrid(32), seed=7)
    m = fld.sup_norm(u0)
    u, s = dyn.evolve(u0, Variant(Equation.SIGN, 2.0), StepperConfig(dt=1e-3), m / 2.0 + 0.05)
    assert s.extinct_fraction[-1] == 1.0
    assert not np.any(u.values)
    assert all(b <= a for a, b in zip(s.mass, s.mass[1:]))


def test_last_step_lands_on_t_final():
    u0 = fld.random_smooth(TorusGrid(8), seed=1)
    _, s = dyn.evolve(u0, ZETA, StepperConfig(dt=0.03), 0.1)
    assert s.times[-1] == 0.1
    assert len(s.times) == 5
    assert s.times[-2] == pytest.approx(0.09)


def test_record_every():
    u0 = fld.random_smooth(TorusGrid(8), seed=1)
    _, s = dyn.evolve(u0, ZETA, StepperConfig(dt=0.01, record_every=3), 0.1)
    assert s.times == pytest.approx([0.0, 0.03, 0.06, 0.09, 0.1])


def test_evolve_preconditions():
    u0 = fld.random_smooth(TorusGrid(8), seed=1)
    with pytest.raises(ValueError):
        dyn.evolve(u0, ZETA, StepperConfig(dt=0.01), 0.001)
    bad = u0.copy()
    bad.values[1, 1] = np.inf
    with pytest.raises(SimulationError) as e:
        dyn.evolve(bad, ZETA, StepperConfig(dt=0.01), 0.1)
    assert e.value.step == 0


def test_nan_mid_run_reports_step(monkeypatch):
    u0 = fld.random_smooth(TorusGrid(8), seed=1)
    real = dyn.nonlinear_values
    calls = {"n": 0}

    def poisoned(u, *a, **k):
        calls["n"] += 1
        out, dead = real(u, *a, **k)
        if calls["n"] == 3:
            out = out.copy()
            out[0, 0] = np.nan
        return out, dead

    monkeypatch.setattr(dyn, "nonlinear_values", poisoned)
    with pytest.raises(SimulationError) as e:
        dyn.evolve(u0, ZETA, StepperConfig(dt=0.01), 0.1)
    assert e.value.step == 3


def test_mass_series_non_increasing():
    u0 = fld.random_smooth(TorusGrid(32), seed=12)
    for v in (ZETA, Variant(Equation.ZETA_EPS, 1.0, eps=0.05)):
        _, s = dyn.evolve(u0, v, StepperConfig(dt=2e-3), 0.4)
        m = np.array(s.mass)
        assert np.all(np.diff(m) <= 1e-12 * m[0])
        assert np.all(m <= np.exp(-np.array(s.times)) * m[0] * (1 + 1e-8))


def test_series_csv_round_trip(tmp_path):
    u0 = fld.random_smooth(TorusGrid(8), seed=1)
    _, s = dyn.evolve(u0, ZETA, StepperConfig(dt=0.01), 0.05)
    s.to_csv(tmp_path / "s.csv")
    assert (tmp_path / "s.csv").read_text().splitlines()[0] == "t,mass,grad,sup,extinct_fraction"
    back = dyn.DiagnosticsSeries.from_csv(tmp_path / "s.csv")
    assert list(back.rows()) == list(s.rows())


def test_equation_parse():
    assert Equation.parse("SignNLS") is Equation.SIGN
    assert Equation.parse("regularized") is Equation.ZETA_EPS
    with pytest.raises(ValueError):
        Equation.parse("heat")
