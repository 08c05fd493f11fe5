"""Slow, independent reference computations used to judge the main code.

Nothing here goes through ``specfun`` or ``dynamics``: zeta comes from plain
partial sums, scipy or mpmath, transforms are dense matrices, and the time
integrators are generic.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np
import scipy.integrate
import scipy.linalg
import scipy.special
from scipy.integrate import solve_ivp

from .field import ComplexField, TorusGrid

MAX_MOL_N = 16


@dataclass(frozen=True)
class Bracket:
    lo: float
    hi: float

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"empty bracket [{self.lo}, {self.hi}]")

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def contains(self, q: float) -> bool:
        return self.lo <= q <= self.hi


# -- zeta -------------------------------------------------------------------


def _outward(lo: float, hi: float, ulps: int = 8) -> Bracket:
    # partial sums carry a few ulps of rounding; widen so the bracket stays rigorous
    slack_lo = ulps * math.ulp(abs(lo))
    slack_hi = ulps * math.ulp(abs(hi))
    return Bracket(lo - slack_lo, hi + slack_hi)


def _check_s(s: float) -> None:
    if not math.isfinite(s) or s <= 1.0:
        raise ValueError(f"need finite s > 1, got {s}")


def zeta_bracket(s: float, n_terms: int) -> Bracket:
    """Sum n^-s for n <= N plus integral bounds on the tail."""
    _check_s(s)
    if n_terms < 1:
        raise ValueError("n_terms must be >= 1")
    n = np.arange(n_terms, 0, -1, dtype=float)
    # fsum: the only rounding left is <= 1 ulp per term, covered by the outward widening
    partial = math.fsum(np.exp(-s * np.log(n)))
    big = float(n_terms)
    lo = partial + (big + 1.0) ** (1.0 - s) / (s - 1.0)
    hi = partial + big ** (1.0 - s) / (s - 1.0)
    return _outward(lo, hi)


def zeta_prime_bracket(s: float, n_terms: int) -> Bracket:
    """Bracket for zeta'(s) = -sum ln(n) n^-s; needs N >= 3 so ln(x)/x^s decreases past N."""
    _check_s(s)
    if n_terms < 3:
        raise ValueError("n_terms must be >= 3")
    n = np.arange(n_terms, 1, -1, dtype=float)
    ln = np.log(n)
    partial = math.fsum(ln * np.exp(-s * ln))

    def tail(a: float) -> float:
        return a ** (1.0 - s) * (math.log(a) / (s - 1.0) + 1.0 / (s - 1.0) ** 2)

    big = float(n_terms)
    # magnitudes: |zeta'| in [partial + tail(N+1), partial + tail(N)]
    b = _outward(partial + tail(big + 1.0), partial + tail(big))
    return Bracket(-b.hi, -b.lo)


def euler_gamma_limit(n: int = 2000) -> float:
    return stieltjes_limit(0, n)


def stieltjes_limit(k: int, n: int = 2000) -> float:
    """gamma_k = lim [sum_{m<=N} ln^k m / m - ln^{k+1} N / (k+1)], with the
    first Euler-Maclaurin corrections f(N)/2 and f'(N)/12 removed."""
    m = np.arange(n, 0, -1, dtype=float)
    ln = np.log(m)
    s = math.fsum(ln**k / m)
    L = math.log(n)
    f = L**k / n
    df = ((k * L ** (k - 1) if k else 0.0) - L**k) / n**2
    return s - L ** (k + 1) / (k + 1) - 0.5 * f - df / 12.0


# -- scalar amplitude ODE ---------------------------------------------------

_MP_DPS = 30


def _dps_for(x: float) -> int:
    return _MP_DPS + max(0, int(math.ceil(-math.log10(abs(x))))) if x else _MP_DPS


def _gain_ref_scalar(r: float, eps: float) -> float:
    """r * zeta(r + 1 + eps); mpmath near the pole (exact argument), scipy elsewhere."""
    if r == 0.0:
        return 1.0 if eps == 0.0 else 0.0
    if r + eps < 0.1:
        # enough digits that 1 + r + eps does not round to the pole
        with mpmath.workdps(_dps_for(r + eps)):
            R = mpmath.mpf(r)
            return float(R * mpmath.zeta(1 + R + mpmath.mpf(eps)))
    return r * float(scipy.special.zeta(r + 1.0 + eps, 1.0))


def gain_reference(r, eps: float = 0.0) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    flat = [_gain_ref_scalar(float(x), eps) for x in r.ravel()]
    return np.array(flat).reshape(r.shape)


def amplitude_phase_reference(r0: float, lam: float, eps: float, mu: float, t: float,
                              tol: float = 1e-13) -> tuple[float, float]:
    """Integrate r' = -lam r zeta(r+1+eps), phi' = mu log(r+eps) with DOP853.

    r = 0 is absorbing; the run stops at the first zero crossing.
    """
    if r0 < 0 or t < 0:
        raise ValueError("need r0 >= 0 and t >= 0")
    if r0 == 0.0 or t == 0.0:
        return 0.0 if r0 == 0.0 else r0, 0.0

    def rhs(_, y):
        r = y[0]
        # past-zero stage values: the analytic continuation of r zeta(1 + r)
        if r < 0 and eps == 0.0:
            with mpmath.workdps(_dps_for(r)):
                g = float(mpmath.mpf(r) * mpmath.zeta(1 + mpmath.mpf(r)))
        else:
            g = _gain_ref_scalar(max(r, 0.0), eps)
        ph = mu * math.log(max(abs(r) + eps, 1e-300)) if mu else 0.0
        return [-lam * g, ph]

    def hit_zero(_, y):
        return y[0]

    hit_zero.terminal = True
    hit_zero.direction = -1
    sol = solve_ivp(rhs, (0.0, t), [r0, 0.0], method="DOP853", rtol=tol, atol=tol,
                    events=hit_zero)
    if sol.status == 1:
        return 0.0, float(sol.y_events[0][0][1])
    return max(float(sol.y[0, -1]), 0.0), float(sol.y[1, -1])


def amplitude_ode_reference(r0: float, lam: float, eps: float, t: float,
                            tol: float = 1e-13) -> float:
    return amplitude_phase_reference(r0, lam, eps, 0.0, t, tol)[0]


def extinction_time_reference(r0: float, lam: float) -> float:
    """Time for r' = -lam r zeta(r+1) to reach 0: integral of dr / (lam g(r)) by quadrature."""
    val, _ = scipy.integrate.quad(lambda r: 1.0 / _gain_ref_scalar(r, 0.0), 0.0, r0,
                                  epsabs=1e-14, epsrel=1e-13)
    return val / lam


# -- dense transforms -------------------------------------------------------


def dft_matrix(n: int) -> np.ndarray:
    j = np.arange(n)
    return np.exp(-2j * math.pi * np.outer(j, j) / n)


def dense_dft2(values: np.ndarray) -> np.ndarray:
    """Direct O(n^4) 2-D DFT, unnormalized forward convention."""
    n = values.shape[0]
    j = np.arange(n)
    out = np.zeros((n, n), dtype=complex)
    for p in range(n):
        for q in range(n):
            phase = np.exp(-2j * math.pi * (p * j[:, None] + q * j[None, :]) / n)
            out[p, q] = np.sum(values * phase)
    return out


def dense_idft2(coeffs: np.ndarray) -> np.ndarray:
    n = coeffs.shape[0]
    return np.conj(dense_dft2(np.conj(coeffs))) / n**2


def dense_laplacian(grid: TorusGrid) -> np.ndarray:
    """Spectral Laplacian as an (n^2 x n^2) matrix acting on row-major flattened fields."""
    n = grid.n
    if n > MAX_MOL_N:
        raise ValueError(f"dense operators limited to n <= {MAX_MOL_N}")
    w = np.kron(dft_matrix(n), dft_matrix(n))
    m = np.fft.fftfreq(n, d=1.0 / n) * (2.0 * math.pi / grid.l)
    k2 = (m[:, None] ** 2 + m[None, :] ** 2).ravel()
    return np.conj(w.T) @ np.diag(-k2) @ w / n**2


def dense_linear_propagator(grid: TorusGrid, t: float) -> np.ndarray:
    """exp(i t Lap) by scipy's dense matrix exponential."""
    return scipy.linalg.expm(1j * t * dense_laplacian(grid))


# -- method of lines --------------------------------------------------------


def _pointwise_rhs(u: np.ndarray, tag: str, lam: float, eps: float, mu: float,
                   surrogate: str | None) -> np.ndarray:
    if surrogate == "off":
        return np.zeros_like(u)
    if surrogate == "unit":
        return -lam * u
    r = np.abs(u)
    out = np.zeros_like(u)
    live = r > 0
    if tag == "sign":
        out[live] = -lam * u[live] / r[live]
        return out
    rl = r[live]
    z = gain_reference(rl, eps) / rl
    out[live] = -lam * u[live] * z
    if tag == "zeta_log" and mu:
        out[live] += 1j * mu * u[live] * np.log(rl + eps)
    return out


def mol_reference(u0: ComplexField, variant, t: float, tol: float = 1e-10,
                  dt0: float | None = None, max_halvings: int = 12) -> ComplexField:
    """Whole-equation reference: dense spectral Laplacian + classical RK4,
    halving dt until two successive results differ by less than ``tol`` (L2)."""
    grid = u0.grid
    if grid.n > MAX_MOL_N:
        raise ValueError(f"method-of-lines reference limited to n <= {MAX_MOL_N}, got {grid.n}")
    lap = dense_laplacian(grid)
    tag = variant.tag.value if hasattr(variant.tag, "value") else str(variant.tag)
    args = (tag, variant.lam, variant.eps, variant.mu, variant.surrogate)
    n = grid.n

    def rhs(y):
        return 1j * (lap @ y) + _pointwise_rhs(y, *args)

    def run(steps: int) -> np.ndarray:
        h = t / steps
        y = u0.values.ravel().astype(complex)
        for _ in range(steps):
            k1 = rhs(y)
            k2 = rhs(y + 0.5 * h * k1)
            k3 = rhs(y + 0.5 * h * k2)
            k4 = rhs(y + h * k3)
            y = y + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        return y

    k2max = 2.0 * (math.pi * n / grid.l) ** 2
    h0 = dt0 if dt0 is not None else min(0.01, 1.0 / max(k2max, 1.0))
    steps = max(1, math.ceil(t / h0))
    prev = run(steps)
    quad = grid.dx
    for _ in range(max_halvings):
        steps *= 2
        cur = run(steps)
        if quad * np.linalg.norm(cur - prev) < tol:
            return ComplexField(grid, cur.reshape(n, n))
        prev = cur
    raise RuntimeError(f"method-of-lines reference did not reach tol={tol}")
