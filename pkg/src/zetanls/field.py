"""Complex fields on the flat torus [0, l)^2 with an FFT spectral representation."""
from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.fft as sfft

_WORKERS = 1


def set_fft_workers(workers: int) -> None:
    """Thread count for 2-D transforms. Row/column FFTs are independent, so
    the result is bitwise identical for any worker count."""
    global _WORKERS
    _WORKERS = max(1, int(workers))


@dataclass(frozen=True)
class TorusGrid:
    n: int = 64
    l: float = 2.0 * math.pi

    def __post_init__(self):
        if self.n < 2 or self.n & (self.n - 1):
            raise ValueError(f"n must be an even power of two, got {self.n}")
        if not (self.l > 0 and math.isfinite(self.l)):
            raise ValueError(f"side length must be positive, got {self.l}")
        k1 = 2.0 * math.pi / self.l * sfft.fftfreq(self.n, d=1.0 / self.n)
        kx, ky = np.meshgrid(k1, k1, indexing="ij")
        object.__setattr__(self, "k1", k1)
        object.__setattr__(self, "kx", kx)
        object.__setattr__(self, "ky", ky)
        object.__setattr__(self, "k2", kx**2 + ky**2)

    @property
    def dx(self) -> float:
        return self.l / self.n

    @property
    def area(self) -> float:
        return self.l**2

    def coords(self):
        x = np.arange(self.n) * self.dx
        return np.meshgrid(x, x, indexing="ij")


@dataclass
class ComplexField:
    grid: TorusGrid
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != (self.grid.n, self.grid.n):
            raise ValueError(f"expected {(self.grid.n, self.grid.n)} values, got {self.values.shape}")

    def copy(self) -> "ComplexField":
        return ComplexField(self.grid, self.values.copy())

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.values)))

    def __sub__(self, other: "ComplexField") -> "ComplexField":
        return ComplexField(self.grid, self.values - other.values)

    def __add__(self, other: "ComplexField") -> "ComplexField":
        return ComplexField(self.grid, self.values + other.values)


@dataclass
class SpectrumField:
    grid: TorusGrid
    coeffs: np.ndarray


def constant(grid: TorusGrid, c: complex) -> ComplexField:
    return ComplexField(grid, np.full((grid.n, grid.n), c, dtype=complex))


def plane_wave(grid: TorusGrid, amplitude: complex, mode: tuple[int, int]) -> ComplexField:
    """amplitude * exp(i k.x) with integer mode numbers (m1, m2), k = 2 pi m / l."""
    x, y = grid.coords()
    kx, ky = (2.0 * math.pi / grid.l * m for m in mode)
    return ComplexField(grid, amplitude * np.exp(1j * (kx * x + ky * y)))


def to_spectrum(f: ComplexField) -> SpectrumField:
    return SpectrumField(f.grid, sfft.fft2(f.values, workers=_WORKERS))


def from_spectrum(s: SpectrumField) -> ComplexField:
    return ComplexField(s.grid, sfft.ifft2(s.coeffs, workers=_WORKERS))


def _sum_sq(a: np.ndarray) -> float:
    # fixed pairwise order (numpy's contiguous reduction), independent of threads
    with np.errstate(over="ignore"):
        return float(np.sum(a.real**2 + a.imag**2))


def _norm2(a: np.ndarray) -> float:
    """sqrt(sum |a|^2), rescaled by an exact power of two if the squares under/overflow."""
    ss = _sum_sq(a)
    if 1e-280 < ss < 1e280 or ss == 0.0 and not np.any(a):
        return math.sqrt(ss)
    big = float(np.max(np.abs(a)))
    if big == 0.0 or not math.isfinite(big):
        return math.sqrt(ss)
    e = -math.frexp(big)[1]
    # two factors so subnormal inputs do not overflow the scale itself
    s1, s2 = math.ldexp(1.0, e // 2), math.ldexp(1.0, e - e // 2)
    return math.sqrt(_sum_sq(a * s1 * s2)) / s1 / s2


def mass(f: ComplexField) -> float:
    """Rectangle-rule L2 norm sqrt(dx^2 sum |u|^2)."""
    return f.grid.dx * _norm2(f.values)


def spectral_mass(s: SpectrumField) -> float:
    g = s.grid
    return g.dx / g.n * _norm2(s.coeffs)


def grad_seminorm(f: ComplexField | SpectrumField) -> float:
    """Spectral H1 seminorm, weighted to match the Parseval convention of ``mass``."""
    s = f if isinstance(f, SpectrumField) else to_spectrum(f)
    g = s.grid
    return g.dx / g.n * math.sqrt(float(np.sum(g.k2 * (s.coeffs.real**2 + s.coeffs.imag**2))))


def sup_norm(f: ComplexField) -> float:
    return float(np.max(np.abs(f.values))) if f.values.size else 0.0


def random_smooth(grid: TorusGrid, seed: int, decay_p: float = 3.0,
                  target_mass: float = 1.0) -> ComplexField:
    """Seeded random field with Fourier amplitudes ~ (1 + |k|^2)^(-decay_p / 2)."""
    if decay_p < 2:
        raise ValueError(f"decay_p must be >= 2, got {decay_p}")
    if not target_mass > 0:
        raise ValueError(f"target_mass must be positive, got {target_mass}")
    rng = np.random.default_rng(seed)
    shape = (grid.n, grid.n)
    coeffs = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / math.sqrt(2.0)
    coeffs *= (1.0 + grid.k2) ** (-decay_p / 2.0)
    f = from_spectrum(SpectrumField(grid, coeffs))
    f.values *= target_mass / mass(f)
    return f


# -- snapshots --------------------------------------------------------------

_HEADER = struct.Struct("<3d")


def write_field(path, f: ComplexField, time: float = 0.0) -> None:
    """Binary snapshot: little-endian float64 header (n, l, time), then
    row-major (re, im) float64 pairs."""
    body = np.ascontiguousarray(f.values, dtype="<c16")
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(float(f.grid.n), f.grid.l, float(time)))
        fh.write(body.tobytes(order="C"))


def read_field(path) -> tuple[ComplexField, float]:
    raw = Path(path).read_bytes()
    n, l, time = _HEADER.unpack_from(raw)
    n = int(n)
    data = np.frombuffer(raw, dtype="<c16", offset=_HEADER.size)
    if data.size != n * n:
        raise ValueError(f"snapshot holds {data.size} values, header says {n}x{n}")
    return ComplexField(TorusGrid(n, l), data.reshape(n, n).astype(complex)), time


def write_abs_csv(path, f: ComplexField) -> None:
    np.savetxt(path, np.abs(f.values), delimiter=",", fmt="%.17g")
