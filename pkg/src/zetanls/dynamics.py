"""Strang-split time stepping for the zeta-damped Schrodinger family.

The linear part i u_t + Lap u = 0 is propagated exactly in Fourier space.
The damping part is a pointwise ODE in the amplitude r = |u| (and, for the
log-perturbed equation, the phase), integrated with fixed-step RK4 and an
absorbing state at r = 0.
"""
from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import field as fld
from .field import ComplexField, SpectrumField
from .specfun import FAST, ZetaEval


class Equation(str, enum.Enum):
    ZETA = "zeta"            # i u_t + Lap u + i lam u zeta(|u|+1) = 0
    ZETA_EPS = "zeta_eps"    # zeta(|u|+1+eps)
    ZETA_LOG = "zeta_log"    # ... + mu u log(|u|+eps)
    SIGN = "sign"            # i v_t + Lap v + i lam v/|v| = 0

    @classmethod
    def parse(cls, name: str) -> "Equation":
        aliases = {"zetanls": cls.ZETA, "zeta-eps": cls.ZETA_EPS, "zetanlsregularized": cls.ZETA_EPS,
                   "regularized": cls.ZETA_EPS, "log": cls.ZETA_LOG, "zeta-log": cls.ZETA_LOG,
                   "zetalog": cls.ZETA_LOG, "signnls": cls.SIGN}
        key = name.strip().lower()
        if key in aliases:
            return aliases[key]
        return cls(key)


class SimulationError(RuntimeError):
    def __init__(self, msg: str, step: int | None = None):
        super().__init__(msg)
        self.step = step


@dataclass(frozen=True)
class Variant:
    """Equation choice plus its physical parameters.

    ``surrogate`` is a test hook replacing the zeta factor of the damping:
    ``"unit"`` gives linear damping u_t = -lam u, ``"off"`` removes the
    nonlinear substep entirely.
    """

    tag: Equation = Equation.ZETA
    lam: float = 1.0
    mu: float = 0.0
    eps: float = 0.0
    surrogate: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "tag", Equation.parse(self.tag) if isinstance(self.tag, str) else self.tag)
        for name in ("lam", "mu", "eps"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if not self.lam > 0:
            raise ValueError(f"lambda must be positive, got {self.lam}")
        if self.eps < 0:
            raise ValueError(f"eps must be nonnegative, got {self.eps}")
        if self.tag in (Equation.ZETA, Equation.SIGN) and self.eps != 0:
            raise ValueError(f"eps must be 0 for {self.tag.value}")
        if self.tag is not Equation.ZETA_LOG and self.mu != 0:
            raise ValueError("mu is only meaningful for zeta_log")
        if self.surrogate not in (None, "unit", "off"):
            raise ValueError(f"unknown surrogate {self.surrogate!r}")


@dataclass(frozen=True)
class StepperConfig:
    dt: float = 1e-3
    ode_substeps: int = 4
    record_every: int = 1

    def __post_init__(self):
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.dt > 0.1:
            raise ValueError(f"dt <= 0.1 required for splitting accuracy, got {self.dt}")
        if self.ode_substeps < 1 or self.record_every < 1:
            raise ValueError("ode_substeps and record_every must be >= 1")


@dataclass
class DiagnosticsSeries:
    times: list = field(default_factory=list)
    mass: list = field(default_factory=list)
    grad: list = field(default_factory=list)
    sup: list = field(default_factory=list)
    extinct_fraction: list = field(default_factory=list)

    def record(self, t: float, f: ComplexField, extinct_fraction: float) -> None:
        self.times.append(float(t))
        self.mass.append(fld.mass(f))
        self.grad.append(fld.grad_seminorm(f))
        self.sup.append(fld.sup_norm(f))
        self.extinct_fraction.append(float(extinct_fraction))

    def rows(self):
        return zip(self.times, self.mass, self.grad, self.sup, self.extinct_fraction)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["t", "mass", "grad", "sup", "extinct_fraction"])
            for row in self.rows():
                w.writerow([repr(float(x)) for x in row])

    @classmethod
    def from_csv(cls, path) -> "DiagnosticsSeries":
        out = cls()
        with open(path, newline="") as fh:
            for rec in csv.DictReader(fh):
                out.times.append(float(rec["t"]))
                out.mass.append(float(rec["mass"]))
                out.grad.append(float(rec["grad"]))
                out.sup.append(float(rec["sup"]))
                out.extinct_fraction.append(float(rec["extinct_fraction"]))
        return out


# -- linear part ------------------------------------------------------------


def linear_multiplier(grid: fld.TorusGrid, dt: float) -> np.ndarray:
    return np.exp(-1j * grid.k2 * dt)


def linear_half_step(s: SpectrumField, dt_half: float) -> SpectrumField:
    """Exact flow of i u_t + Lap u = 0 over dt_half, applied to Fourier coefficients."""
    return SpectrumField(s.grid, s.coeffs * linear_multiplier(s.grid, dt_half))


# -- nonlinear part ---------------------------------------------------------


def amplitude_rate(r: np.ndarray, eps: float, ev: ZetaEval = FAST) -> np.ndarray:
    """G(r) in r' = -lam G(r), G(r) = r zeta(r + 1 + eps).

    RK stages may step slightly below zero just before extinction; there the
    analytic continuation is used (Laurent series for eps = 0, the series
    itself for -eps < r < 0).
    """
    r = np.asarray(r, dtype=float)
    out = np.empty_like(r)
    pos = r >= 0
    if np.any(pos):
        out[pos] = ev.gain(r[pos], eps).value
    neg = ~pos
    if np.any(neg):
        if eps == 0.0:
            out[neg] = ev.laurent_gain(np.maximum(r[neg], -ev.r_small))[0]
        else:
            rn = np.maximum(r[neg], -0.5 * eps)
            sig = eps + rn
            near = sig < ev.r_small
            p, _ = ev.regular_part(sig)
            out[neg] = np.where(near, rn / sig + rn * p, rn * ev.zeta(np.where(near, 2.0, 1.0 + sig)))
    return out


def _phase_rate(r: np.ndarray, eps: float) -> np.ndarray:
    return np.log(np.maximum(np.abs(r) + eps, 1e-300))


def _rk4_amplitude(r0, lam, eps, h, substeps, ev, mu=0.0):
    """Integrate r' = -lam G(r) (and phi' = mu log(r + eps)) over h; r absorbed at 0."""
    r = r0.copy()
    phi = np.zeros_like(r) if mu else None
    alive = np.ones(r.shape, dtype=bool)
    dh = h / substeps
    for _ in range(substeps):
        idx = np.flatnonzero(alive)
        if idx.size == 0:
            break
        ra = r[idx]
        k1 = -lam * amplitude_rate(ra, eps, ev)
        r2 = ra + 0.5 * dh * k1
        k2 = -lam * amplitude_rate(r2, eps, ev)
        r3 = ra + 0.5 * dh * k2
        k3 = -lam * amplitude_rate(r3, eps, ev)
        r4 = ra + dh * k3
        k4 = -lam * amplitude_rate(r4, eps, ev)
        rn = ra + dh / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        if mu:
            p = (_phase_rate(ra, eps) + 2 * _phase_rate(r2, eps) + 2 * _phase_rate(r3, eps)
                 + _phase_rate(r4, eps))
            phi[idx] += mu * dh / 6.0 * p
        dead = rn <= 0.0
        rn[dead] = 0.0
        r[idx] = rn
        alive[idx[dead]] = False
    return r, phi


def nonlinear_values(u: np.ndarray, v: Variant, dt: float, cfg: StepperConfig,
                     ev: ZetaEval = FAST) -> tuple[np.ndarray, int]:
    """Pointwise damping substep on raw values; returns (new values, number of extinct points)."""
    if dt < 0:
        raise ValueError("dt must be nonnegative")
    if not np.all(np.isfinite(u)):
        raise SimulationError("non-finite field entering nonlinear substep")
    if v.surrogate == "off" or dt == 0:
        return u.copy(), int(np.count_nonzero(u == 0))
    if v.surrogate == "unit":
        return u * math.exp(-v.lam * dt), int(np.count_nonzero(u == 0))

    r0 = np.abs(u)
    live = r0 > 0
    out = np.zeros_like(u)
    if v.tag is Equation.SIGN:
        r1 = np.maximum(r0[live] - v.lam * dt, 0.0)
        out[live] = u[live] * (r1 / r0[live])
    else:
        mu = v.mu if v.tag is Equation.ZETA_LOG else 0.0
        r1, phi = _rk4_amplitude(r0[live], v.lam, v.eps, dt, cfg.ode_substeps, ev, mu)
        ratio = r1 / r0[live]
        if mu:
            out[live] = u[live] * ratio * np.exp(1j * phi)
        else:
            out[live] = u[live] * ratio
    return out, int(np.count_nonzero(out == 0))


def nonlinear_step(f: ComplexField, v: Variant, dt: float, cfg: StepperConfig,
                   ev: ZetaEval = FAST) -> ComplexField:
    vals, _ = nonlinear_values(f.values, v, dt, cfg, ev)
    return ComplexField(f.grid, vals)


# -- composition ------------------------------------------------------------


def _strang(values, grid, v, dt, cfg, ev, half=None):
    if half is None:
        half = linear_multiplier(grid, 0.5 * dt)
    w = fld.sfft.ifft2(fld.sfft.fft2(values, workers=fld._WORKERS) * half, workers=fld._WORKERS)
    w, n_dead = nonlinear_values(w, v, dt, cfg, ev)
    if n_dead == w.size:
        return w, n_dead
    w = fld.sfft.ifft2(fld.sfft.fft2(w, workers=fld._WORKERS) * half, workers=fld._WORKERS)
    return w, n_dead


def strang_step(f: ComplexField, v: Variant, cfg: StepperConfig, dt: float | None = None,
                ev: ZetaEval = FAST) -> ComplexField:
    """Linear half step, damping step, linear half step."""
    dt = cfg.dt if dt is None else dt
    vals, _ = _strang(f.values, f.grid, v, dt, cfg, ev)
    return ComplexField(f.grid, vals)


def step_count(t_final: float, dt: float) -> int:
    return max(1, math.ceil(t_final / dt - 1e-9))


def iterate(u0: ComplexField, v: Variant, cfg: StepperConfig, t_final: float,
            ev: ZetaEval = FAST):
    """Yield (step, t, values, extinct_fraction) after every step, starting at step 0.

    The yielded array is owned by the caller for the current iteration only.
    """
    if not t_final >= cfg.dt:
        raise ValueError(f"t_final must be >= dt ({t_final} < {cfg.dt})")
    if not u0.is_finite():
        raise SimulationError("non-finite initial data", step=0)
    grid = u0.grid
    n_steps = step_count(t_final, cfg.dt)
    half = linear_multiplier(grid, 0.5 * cfg.dt)
    u = u0.values.copy()
    size = u.size
    yield 0, 0.0, u, np.count_nonzero(u == 0) / size
    for step in range(1, n_steps + 1):
        if step < n_steps:
            u, n_dead = _strang(u, grid, v, cfg.dt, cfg, ev, half)
            t = step * cfg.dt
        else:
            u, n_dead = _strang(u, grid, v, t_final - (n_steps - 1) * cfg.dt, cfg, ev)
            t = t_final
        if not np.all(np.isfinite(u)):
            raise SimulationError(f"non-finite values after step {step}", step=step)
        yield step, t, u, n_dead / size


def evolve(u0: ComplexField, v: Variant, cfg: StepperConfig, t_final: float,
           ev: ZetaEval = FAST, record: bool = True) -> tuple[ComplexField, DiagnosticsSeries]:
    """Advance u0 to exactly t_final; the last step is shortened if needed.

    ``extinct_fraction`` is the share of grid points clamped to exactly zero by
    the most recent damping substep.
    """
    grid = u0.grid
    n_steps = step_count(t_final, cfg.dt)
    series = DiagnosticsSeries()
    u = u0.values
    for step, t, u, ext in iterate(u0, v, cfg, t_final, ev):
        if record and (step % cfg.record_every == 0 or step == n_steps):
            series.record(t, ComplexField(grid, u), ext)
    return ComplexField(grid, u.copy()), series
