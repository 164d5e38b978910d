"""Partial sums, convergence on rectangles, zero tracking and zero statistics."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

from gmpy2 import mpc, mpfr

from .coefficients import CoeffSeries, FunctionSpec
from .companion_spectrum import REAL_TOL, ZeroSet, _classify, zeros_of_partial_sum
from .mp_basis import BasisSpec, clenshaw, mp_eval_all
from .precision import Precision, to_mpc, workprec
from .reference_values import lhat_chi1, rotated_chi1, xi_completed


class RegionError(ValueError):
    pass


def partial_sum_eval(coeffs: CoeffSeries, n: int, t) -> mpc:
    """S_n(t) = sum_{k<=n} a_k q_k(it), Clenshaw at the series precision."""
    if n < 0 or n > coeffs.N:
        raise ValueError(f"n must lie in [0, {coeffs.N}]")
    with workprec(coeffs.precision_bits):
        return clenshaw(coeffs.values, coeffs.nu, to_mpc(t), n)


def reference_function(fs: FunctionSpec, bits: int) -> Callable:
    if fs.reference is not None:
        return fs.reference
    p = Precision(bits)
    if fs.kind == "xi":
        return lambda t: xi_completed(t, p)
    if fs.kind == "lhat_chi1":
        return lambda t: lhat_chi1(t, p)
    if fs.kind == "rotated_chi1":
        return lambda t: rotated_chi1(t, p)
    raise ValueError("custom FunctionSpec has no reference function")


@dataclass(frozen=True)
class Region:
    """Rectangle |Re t| <= R, |Im t| <= H."""

    R: float
    H: float

    def grid(self, density: int) -> list:
        if density < 10:
            raise ValueError("grid density must be at least 10 points per unit")
        nx = int(round(2 * self.R * density))
        ny = int(round(2 * self.H * density))
        xs = [-self.R + 2 * self.R * i / nx for i in range(nx + 1)] if nx else [0.0]
        ys = [-self.H + 2 * self.H * j / ny for j in range(ny + 1)] if ny else [0.0]
        return [complex(x, y) for y in ys for x in xs]


@dataclass(frozen=True)
class ConvergenceReport:
    degrees: tuple
    sup_errors: tuple
    region: Region
    argmax: tuple = ()

    @property
    def strictly_decreasing(self) -> bool:
        e = self.sup_errors
        return all(b < a for a, b in zip(e, e[1:]))


def check_region(fs: FunctionSpec, region: Region):
    strip = fs.strip_halfwidth
    if region.R < 0 or region.H < 0:
        raise RegionError("region half-sizes must be nonnegative")
    if not region.H < strip:
        raise RegionError(f"|Im t| <= {region.H} leaves the convergence strip E(f) = {{|Im t| < {strip}}}")


def convergence_study(coeffs: CoeffSeries, fs: FunctionSpec, degrees: Sequence[int], region: Region,
                      grid_density: int = 10, bits: int = 128) -> ConvergenceReport:
    """sup over a grid of the rectangle of |f(t) - S_n(t)| for each degree."""
    check_region(fs, region)
    for n in degrees:
        if n < 0 or n > coeffs.N:
            raise ValueError(f"degree {n} outside the series")
    pts = region.grid(grid_density)
    ref = reference_function(fs, bits)
    with workprec(bits):
        fvals = [to_mpc(ref(mpc(z))) for z in pts]
        sups, where = [], []
        for n in degrees:
            best, at = mpfr(-1), None
            for z, f in zip(pts, fvals):
                e = abs(f - clenshaw(coeffs.values, coeffs.nu, mpc(z), n))
                if e > best:
                    best, at = e, z
            sups.append(float(best))
            where.append(at)
    return ConvergenceReport(tuple(degrees), tuple(sups), region, tuple(where))


def tail_bound(coeffs: CoeffSeries, n: int, points: Sequence[complex], bits: int = 128) -> float:
    """sum_{n<k<=N} |a_k| max_grid |q_k(it)| over the available coefficients."""
    spec = BasisSpec(coeffs.nu, Precision(bits))
    N = coeffs.N
    maxq = [mpfr(0)] * (N + 1)
    with workprec(bits):
        for z in points:
            q = mp_eval_all(spec, N, z)
            for k in range(n + 1, N + 1):
                a = abs(q[k])
                if a > maxq[k]:
                    maxq[k] = a
        return float(sum(abs(coeffs.values[k]) * maxq[k] for k in range(n + 1, N + 1)))


@dataclass(frozen=True)
class ZeroTrack:
    target: object
    degrees: tuple
    approximants: tuple
    distances: tuple

    @property
    def final_distance(self) -> float:
        return self.distances[-1]

    def eventually_decreasing(self, tail: int = 3) -> bool:
        d = self.distances[-tail:]
        return all(b < a for a, b in zip(d, d[1:]))


def nearest_zero(zs: ZeroSet, target):
    """Euclidean nearest zero; ties go to the smaller |Im|."""
    target = to_mpc(target)
    return min(zs.zeros, key=lambda z: (abs(z - target), abs(z.imag)))


def track_zero(coeffs: CoeffSeries, target, degrees: Sequence[int], zero_sets: Optional[dict] = None,
               **zero_kw) -> ZeroTrack:
    """Nearest zero of S_n to ``target`` for each n in ``degrees``.

    ``zero_sets`` maps degree to an already computed ZeroSet and is filled in
    for degrees that had to be solved.
    """
    zero_sets = {} if zero_sets is None else zero_sets
    approx, dist = [], []
    for n in degrees:
        if n not in zero_sets:
            zero_sets[n] = zeros_of_partial_sum(coeffs, n, **zero_kw)
        z = nearest_zero(zero_sets[n], target)
        approx.append(z)
        dist.append(float(abs(z - to_mpc(target))))
    return ZeroTrack(target, tuple(degrees), tuple(approx), tuple(dist))


@dataclass(frozen=True)
class ZeroStatistics:
    n: int
    status: str  # "ok" or "inconclusive"
    real_count: Optional[int]
    complex_count: Optional[int]
    max_abs: float
    max_abs_over_n: float
    complex_locations: tuple
    max_relative_residual: float
    threshold: float = REAL_TOL


def zero_statistics(zs: ZeroSet) -> ZeroStatistics:
    """Counts by classification, or "inconclusive" when any residual is suspect."""
    max_abs = float(max(abs(z) for z in zs.zeros))
    worst = max(zs.relative_residuals)
    if zs.suspect:
        return ZeroStatistics(zs.n, "inconclusive", None, None, max_abs, max_abs / zs.n, (), worst,
                              zs.threshold)
    cx = tuple(complex(z) for z, c in zip(zs.zeros, zs.classification) if c == "complex")
    return ZeroStatistics(zs.n, "ok", zs.n - len(cx), len(cx), max_abs, max_abs / zs.n, cx, worst,
                          zs.threshold)


def classification_sweep(zs: ZeroSet, thresholds=(1e-4, 1e-6, 1e-8, 1e-10, 1e-12)) -> dict:
    """complex-zero count at each threshold, to show it does not hinge on the choice."""
    out = {}
    for tol in thresholds:
        cls = _classify(list(zs.zeros), zs.conj_symmetric, tol)
        out[tol] = cls.count("complex")
    return out
