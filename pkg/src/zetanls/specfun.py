"""Riemann zeta on the real half-line s > 1 and the damping gain r * zeta(r + 1 + eps).

Evaluation is a truncated direct sum with an Euler-Maclaurin tail. Near the
pole the gain is taken from the Laurent expansion in Stieltjes constants, so
``gain(0, 0) == 1`` comes out without cancellation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

# B_2, B_4, B_6, B_8, B_10, B_12
_BERNOULLI = (1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0, 5.0 / 66.0, -691.0 / 2730.0)

# gamma_0 .. gamma_4, regenerated by scripts/derive_stieltjes.py
STIELTJES = (
    0.57721566490153286061,
    -0.072815845483676724861,
    -0.0096903631928723184845,
    0.0020538344203033458662,
    0.0023253700654673000575,
)

LN2 = math.log(2.0)
MONOTONICITY_CONSTANT = 1.0 - LN2


class DomainError(ValueError):
    """Argument outside the real domain where the series converges."""


def _euler_gamma_limit(n: int = 2000) -> float:
    # H_n - ln n with the asymptotic correction; independent of the literal table
    k = np.arange(n, 0, -1, dtype=float)
    h = math.fsum(1.0 / k)
    return h - math.log(n) - 1.0 / (2 * n) + 1.0 / (12 * n**2) - 1.0 / (120 * n**4)


@dataclass(frozen=True)
class GainValue:
    value: np.ndarray | float
    derivative: np.ndarray | float | None = None


@dataclass(frozen=True)
class ZetaEval:
    """Configured evaluator for zeta, zeta' and the gain.

    ``r_small`` is the switch-over radius for the Laurent branch of the gain.
    With five Stieltjes constants the truncation error there is about
    ``gamma_5 r**6 / 120``, which is what keeps the default small.
    """

    n_direct: int = 64
    n_bernoulli: int = 4
    r_small: float = 0.03
    stieltjes: tuple[float, ...] = field(default=STIELTJES)

    def __post_init__(self):
        if self.n_direct < 8:
            raise ValueError(f"n_direct must be >= 8, got {self.n_direct}")
        if not 2 <= self.n_bernoulli <= len(_BERNOULLI):
            raise ValueError(f"n_bernoulli must be in [2, {len(_BERNOULLI)}], got {self.n_bernoulli}")
        if not 0.0 < self.r_small <= 0.5:
            raise ValueError(f"r_small must be in (0, 0.5], got {self.r_small}")
        if len(self.stieltjes) < 1:
            raise ValueError("need at least gamma_0")
        if abs(self.stieltjes[0] - _euler_gamma_limit()) > 1e-12:
            raise ValueError("stieltjes[0] disagrees with the Euler-Mascheroni limit")
        n = np.arange(1, self.n_direct + 1, dtype=float)
        object.__setattr__(self, "_logn", np.log(n))
        # n^-s from prime powers: exp only at primes, products elsewhere
        plan = []
        for m in range(2, self.n_direct + 1):
            p = next(q for q in range(2, m + 1) if m % q == 0)
            plan.append((m - 1, p - 1, m // p - 1) if p < m else (m - 1, None, None))
        object.__setattr__(self, "_plan", tuple(plan))

    # -- zeta and zeta' ---------------------------------------------------

    def _check_s(self, s) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        if not np.all(np.isfinite(s)):
            raise DomainError("zeta argument must be finite")
        if np.any(s <= 1.0):
            raise DomainError("zeta is evaluated only for real s > 1")
        return s

    def _tail_terms(self, s: np.ndarray, derivative: bool) -> np.ndarray:
        big_n = float(self.n_direct)
        ln_n = math.log(big_n)
        base = np.exp(-s * ln_n)  # N^{-s}
        if not derivative:
            out = big_n * base / (s - 1.0) - 0.5 * base
        else:
            out = -ln_n * big_n * base / (s - 1.0) - big_n * base / (s - 1.0) ** 2 + 0.5 * ln_n * base
        # Bernoulli corrections B_2k/(2k)! * s(s+1)...(s+2k-2) * N^{-s-2k+1}
        poch = np.ones_like(s)
        dpoch = np.zeros_like(s)
        fact = 1.0
        for k in range(1, self.n_bernoulli + 1):
            for j in range(max(2 * k - 3, 0), 2 * k - 1):
                dpoch = dpoch * (s + j) + poch
                poch = poch * (s + j)
            fact *= (2 * k - 1) * (2 * k)
            power = base * big_n ** (1 - 2 * k)
            coef = _BERNOULLI[k - 1] / fact
            if not derivative:
                out = out + coef * poch * power
            else:
                out = out + coef * (dpoch - ln_n * poch) * power
        return out

    def _powers(self, s: np.ndarray) -> np.ndarray:
        """Table of n^-s, n = 1..N, along the first axis."""
        pw = np.empty((self.n_direct,) + s.shape)
        pw[0] = 1.0
        for i, a, b in self._plan:
            if a is None:
                pw[i] = np.exp(-s * self._logn[i])
            else:
                pw[i] = pw[a] * pw[b]
        return pw

    def zeta(self, s):
        """zeta(s) for real s > 1 (scalar or array)."""
        s = self._check_s(s)
        # summed smallest-first
        val = self._powers(s)[::-1].sum(axis=0) + self._tail_terms(s, derivative=False)
        return float(val) if val.ndim == 0 else val

    def zeta_prime(self, s):
        """zeta'(s) for real s > 1; always negative."""
        s = self._check_s(s)
        terms = self._powers(s) * self._logn.reshape((-1,) + (1,) * s.ndim)
        val = -terms[::-1].sum(axis=0) + self._tail_terms(s, derivative=True)
        return float(val) if val.ndim == 0 else val

    # -- gain -------------------------------------------------------------

    def laurent_gain(self, r):
        """r*zeta(1+r) from the Stieltjes expansion; valid for |r| small, either sign."""
        r = np.asarray(r, dtype=float)
        val = np.ones_like(r)
        der = np.zeros_like(r)
        rk = np.ones_like(r)
        for k, g in enumerate(self.stieltjes):
            c = (-1) ** k * g / math.factorial(k)
            der = der + c * (k + 1) * rk
            rk = rk * r
            val = val + c * rk
        return val, der

    def regular_part(self, sigma):
        """P(sigma) = zeta(1+sigma) - 1/sigma and P'(sigma), from the Stieltjes series."""
        sigma = np.asarray(sigma, dtype=float)
        p = np.zeros_like(sigma)
        dp = np.zeros_like(sigma)
        sk = np.ones_like(sigma)
        for k, g in enumerate(self.stieltjes):
            c = (-1) ** k * g / math.factorial(k)
            if k:
                dp = dp + c * k * sk
                sk = sk * sigma
            p = p + c * sk
        return p, dp

    def gain(self, r, eps=0.0, derivative: bool = False) -> GainValue:
        """g(r, eps) = r * zeta(r + 1 + eps), continuously extended by g(0, 0) = 1."""
        r = np.asarray(r, dtype=float)
        eps = np.asarray(eps, dtype=float)
        if not (np.all(np.isfinite(r)) and np.all(np.isfinite(eps))):
            raise DomainError("gain arguments must be finite")
        if np.any(r < 0) or np.any(eps < 0):
            raise DomainError("gain needs r >= 0 and eps >= 0")
        if eps.ndim == 0 and r.ndim and not derivative:
            lo = float(r.min()) if r.size else 1.0
            if lo > 0 and lo + eps >= self.r_small:
                return GainValue(r * self.zeta(r + 1.0 + eps))
        r, eps = np.broadcast_arrays(r, eps)
        val = np.empty(r.shape)
        der = np.empty(r.shape) if derivative else None

        near = (eps == 0.0) & (r < self.r_small)
        if np.any(near):
            lv, ld = self.laurent_gain(r[near])
            val[near] = lv
            if derivative:
                der[near] = ld

        zero = (r == 0.0) & (eps > 0.0)
        val[zero] = 0.0
        if derivative and np.any(zero):
            e = eps[zero]
            small = e < self.r_small
            # zeta(1+eps); the Laurent form avoids forming 1+eps-1 near the pole
            pz, _ = self.regular_part(e)
            der[zero] = np.where(small, 1.0 / e + pz, self.zeta(np.where(small, 2.0, 1.0 + e)))

        # regularized and close to the pole: expand in sigma = r + eps directly
        close = (eps > 0.0) & (r > 0.0) & (r + eps < self.r_small)
        if np.any(close):
            rc = r[close]
            sig = rc + eps[close]
            p, dp = self.regular_part(sig)
            val[close] = rc / sig + rc * p
            if derivative:
                der[close] = 1.0 / sig + p + rc * (dp - 1.0 / sig**2)

        rest = ~(near | zero | close)
        if np.any(rest):
            s = r[rest] + 1.0 + eps[rest]
            z = np.atleast_1d(self.zeta(s))
            val[rest] = r[rest] * z
            if derivative:
                der[rest] = z + r[rest] * np.atleast_1d(self.zeta_prime(s))

        if val.ndim == 0:
            return GainValue(float(val), None if der is None else float(der))
        return GainValue(val, der)

    def gain_derivative(self, r, eps=0.0):
        """d/dr [r zeta(r+1+eps)] = zeta(r+1+eps) + r zeta'(r+1+eps)."""
        return self.gain(r, eps, derivative=True).derivative


DEFAULT = ZetaEval()
# Lighter truncation for the time stepper; agrees with DEFAULT to ~1e-14 on s > 1.
FAST = ZetaEval(n_direct=16)


def zeta(s):
    return DEFAULT.zeta(s)


def zeta_prime(s):
    return DEFAULT.zeta_prime(s)


def gain(r, eps=0.0, derivative: bool = False) -> GainValue:
    return DEFAULT.gain(r, eps, derivative=derivative)


# -- bound predicates -------------------------------------------------------


@dataclass
class PredicateResult:
    name: str
    passed: bool
    worst_margin: float
    detail: dict = field(default_factory=dict)


@dataclass
class BoundReport:
    samples: int
    seed: int
    predicates: list[PredicateResult]

    @property
    def passed(self) -> bool:
        return all(p.passed for p in self.predicates)

    def by_name(self, name: str) -> PredicateResult:
        for p in self.predicates:
            if p.name == name:
                return p
        raise KeyError(name)


def _log_uniform(rng: np.random.Generator, lo: float, hi: float, size: int) -> np.ndarray:
    return np.exp(rng.uniform(math.log(lo), math.log(hi), size))


def verify_bound_predicates(samples: int, seed: int, ev: ZetaEval = DEFAULT,
                            chunk: int = 200_000) -> BoundReport:
    """Sample the zeta bound inequalities and return per-predicate verdicts with worst margins.

    Margins are ``bound - measured`` scaled so that negative means violated.
    The Lipschitz-type predicate has no stated constant; the smallest constant
    consistent with the samples is reported instead of checked.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = np.random.default_rng(seed)
    worst = {"zeta_bounds": math.inf, "zeta_prime_bound": math.inf, "zeta_prime_negative": math.inf,
             "gain_increasing": math.inf, "gain_slope": math.inf}
    c_emp = 0.0
    c_arg = None
    slope_min = math.inf
    done = 0
    while done < samples:
        m = min(chunk, samples - done)
        done += m
        x = _log_uniform(rng, 1e-3, 1e3, m)
        y = _log_uniform(rng, 1e-3, 1e3, m)
        e = rng.uniform(0.0, 1.0, m)
        d = rng.uniform(0.0, 1.0, m)

        # (a) and (b) at s = 1 + x, covering s in (1.001, 1001)
        s = 1.0 + x
        z = ev.zeta(s)
        pole = 1.0 / x
        worst["zeta_bounds"] = min(worst["zeta_bounds"], float(np.min(z - pole)),
                                   float(np.min(pole + 1.0 - z)))
        zp = ev.zeta_prime(s)
        worst["zeta_prime_bound"] = min(worst["zeta_prime_bound"], float(np.min(pole**2 + 1.0 + zp)))
        worst["zeta_prime_negative"] = min(worst["zeta_prime_negative"], float(np.min(-zp)))

        # (c) x -> x zeta(x+1+eps) increasing, slope >= 1 - ln 2
        order = np.argsort(x)
        xs = x[order]
        eps_fixed = float(e[0])
        gv = ev.gain(xs, eps_fixed, derivative=True)
        dg = np.diff(gv.value)
        distinct = np.diff(xs) > 0
        if np.any(distinct):
            worst["gain_increasing"] = min(worst["gain_increasing"], float(np.min(dg[distinct])))
        slope = ev.gain_derivative(x, e)
        slope_min = min(slope_min, float(np.min(slope)))
        worst["gain_slope"] = min(worst["gain_slope"], float(np.min(slope - MONOTONICITY_CONSTANT)))

        # (d) empirical Lipschitz-type constant
        fx = ev.gain(x, e).value
        fy = ev.gain(y, d).value
        denom = np.abs(x - y) + np.abs(e - d)
        ok = denom > 0
        ratio = np.abs(fx - fy)[ok] * np.minimum(x, y)[ok] / denom[ok]
        if ratio.size:
            i = int(np.argmax(ratio))
            if ratio[i] > c_emp:
                c_emp = float(ratio[i])
                c_arg = {"x": float(x[ok][i]), "y": float(y[ok][i]),
                         "eps": float(e[ok][i]), "delta": float(d[ok][i])}

    tol = 1e-12
    preds = [
        PredicateResult("zeta_bounds", worst["zeta_bounds"] >= -tol, worst["zeta_bounds"]),
        PredicateResult("zeta_prime_bound", worst["zeta_prime_bound"] >= -tol,
                        worst["zeta_prime_bound"]),
        PredicateResult("zeta_prime_negative", worst["zeta_prime_negative"] > 0.0,
                        worst["zeta_prime_negative"]),
        PredicateResult("gain_increasing", worst["gain_increasing"] > 0.0, worst["gain_increasing"]),
        PredicateResult("gain_slope", worst["gain_slope"] >= -tol, worst["gain_slope"],
                        {"min_slope": slope_min, "bound": MONOTONICITY_CONSTANT}),
        PredicateResult("lipschitz_constant", math.isfinite(c_emp), 0.0,
                        {"empirical_C": c_emp, "argmax": c_arg}),
    ]
    return BoundReport(samples, seed, preds)
