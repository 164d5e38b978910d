"""MP-coefficient engines.

* quadrature against Laguerre functions for any Mellin preimage phi,
* the F_n recursion and the c_n series for the chi_{-1} L-function,
* triple-product linearization and the product convolution,
* the two-pole asymptotic predictor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import gmpy2
import numpy as np
from gmpy2 import mpc, mpfr

from .precision import Precision, as_precision, to_mpc, to_mpfr, workprec
from .quadrature import gauss_laguerre, gauss_legendre
from .special_functions import _log_gamma, pochhammer

KINDS = ("xi", "lhat_chi1", "rotated_chi1", "custom")
ENGINES = ("quadrature", "mordell_chi1", "convolution", "file")
NATURAL_NU = {"xi": 1.5, "lhat_chi1": 0.5, "rotated_chi1": 0.5}


class QuadratureNonconvergence(ArithmeticError):
    pass


class TruncationNonconvergence(ArithmeticError):
    pass


class InsufficientInput(ValueError):
    pass


@dataclass(frozen=True)
class FunctionSpec:
    """Which function is expanded.

    For ``custom`` supply ``phi`` (the preimage on (0, inf), called with a
    gmpy2 mpfr at working precision), optionally ``reference`` (the function
    of t itself, for convergence studies) and ``strip`` (half-width of the
    convergence strip |Im t| < strip).
    """

    kind: str
    phi: Optional[Callable] = None
    reference: Optional[Callable] = None
    strip: Optional[float] = None
    bounds: tuple = (1e-6, 50.0)
    even_real: bool = False

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown function kind {self.kind!r}")
        if self.kind == "custom" and self.phi is None:
            raise ValueError("custom FunctionSpec needs phi")

    @property
    def strip_halfwidth(self) -> float:
        if self.strip is not None:
            return self.strip
        if self.kind == "xi":
            return 0.25
        if self.kind in ("lhat_chi1", "rotated_chi1"):
            return math.inf
        return 0.0

    @property
    def is_even_real(self) -> bool:
        return self.even_real or self.kind in ("xi", "lhat_chi1")


def xi_spec() -> FunctionSpec:
    return FunctionSpec("xi")


def lhat_spec() -> FunctionSpec:
    return FunctionSpec("lhat_chi1")


@dataclass(frozen=True)
class CoeffSeries:
    nu: object
    values: tuple
    source: str
    engine: str
    precision_bits: int
    trunc_params: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.values) == 0:
            raise ValueError("empty coefficient series")
        if self.engine not in ENGINES:
            raise ValueError(f"unknown engine {self.engine!r}")
        for v in self.values:
            if not (gmpy2.is_finite(v.real) and gmpy2.is_finite(v.imag)):
                raise ValueError("non-finite coefficient")

    @property
    def N(self) -> int:
        return len(self.values) - 1

    def __len__(self):
        return len(self.values)

    def __getitem__(self, n):
        return self.values[n]

    def scale(self) -> mpfr:
        return max(abs(v) for v in self.values)

    def truncated(self, n: int) -> "CoeffSeries":
        return replace(self, values=self.values[: n + 1])


def make_series(values, nu=1.5, source="custom", engine="file", bits=256, **trunc) -> CoeffSeries:
    with workprec(bits):
        vals = tuple(to_mpc(v) for v in values)
    return CoeffSeries(nu, vals, source, engine, bits, dict(trunc))


def phi_xi(u: mpfr) -> mpfr:
    """Preimage of Xi under M_{3/2}."""
    y = 2 * gmpy2.sqrt(gmpy2.const_pi() * u)
    return gmpy2.sqrt(gmpy2.const_pi() / u) * (1 / gmpy2.expm1(y) - 1 / y)


def phi_lhat(u: mpfr) -> mpfr:
    """Preimage of L^(1/2+2it, chi_{-1}) under M_{1/2}."""
    return gmpy2.sech(gmpy2.sqrt(gmpy2.const_pi() * u)) / 2


def phi_rotated(u: mpfr) -> mpc:
    """(1/2) sech(sqrt(pi i u)), principal square root."""
    z = gmpy2.sqrt(mpc(0, 1) * gmpy2.const_pi() * u)
    return 1 / (2 * gmpy2.cosh(z))


def preimage(fs: FunctionSpec) -> Callable:
    if fs.kind == "xi":
        return phi_xi
    if fs.kind == "lhat_chi1":
        return phi_lhat
    if fs.kind == "rotated_chi1":
        return phi_rotated
    return fs.phi


def check_custom_preimage(fs: FunctionSpec, nu, samples: int = 400) -> float:
    """Numerical value of int |phi|^2 u^(nu-1) du over the declared bounds."""
    lo, hi = map(float, fs.bounds)
    phi = preimage(fs)
    xs = np.geomspace(lo, hi, samples)
    vals = []
    with workprec(64):
        for u in xs:
            v = phi(mpfr(u))
            vals.append(float(abs(v)) ** 2 * u ** (float(nu) - 1))
    total = float(np.trapz(np.asarray(vals) * xs, np.log(xs)))
    if not math.isfinite(total):
        raise ValueError("phi is not square integrable on the declared bounds")
    return total


def default_nodes(nmax: int) -> int:
    return max(4 * nmax, 600)


def _quadrature_points(phi, nu, m, m_leg, split, bits):
    """Nodes u_j and weights W_j such that int_0^inf phi(u) e^-u u^(nu-1) g(u) du
    is approximated by sum_j W_j g(u_j) for polynomial-like g."""
    xl, wl = gauss_legendre(m_leg, bits)
    xg, wg = gauss_laguerre(m, 0, bits)
    us, ws = [], []
    with workprec(bits):
        nu = to_mpfr(nu)
        c = to_mpfr(split)
        rc = gmpy2.sqrt(c)
        # [0, c] with u = v^2, v in [0, sqrt c]
        for x, w in zip(xl, wl):
            v = (x + 1) * rc / 2
            u = v * v
            us.append(u)
            ws.append(w * rc * v ** (2 * nu - 1) * phi(u) * gmpy2.exp(-u))
        # [c, inf) with u = c + x
        ec = gmpy2.exp(-c)
        for x, w in zip(xg, wg):
            u = c + x
            us.append(u)
            ws.append(w * ec * phi(u) * u ** (nu - 1))
    return np.array(us, dtype=object), np.array(ws, dtype=object)


def _laguerre_moments(us, ws, nu, nmax, bits):
    with workprec(bits):
        a = to_mpfr(nu) - 1
        x = 2 * us
        p0 = np.full(len(us), mpfr(1), dtype=object)
        out = [sum(ws)]
        if nmax >= 1:
            p1 = (1 + a) - x
            out.append(sum(ws * p1))
        for k in range(1, nmax):
            p0, p1 = p1, ((2 * k + 1 + a - x) * p1 - (k + a) * p0) / (k + 1)
            out.append(sum(ws * p1))
        return out


def _run_quadrature(fs, nu, nmax, m, bits, split):
    phi = preimage(fs)
    m_leg = nmax + 64 + bits // 2
    us, ws = _quadrature_points(phi, nu, m, m_leg, split, bits)
    mom = _laguerre_moments(us, ws, nu, nmax, bits)
    with workprec(bits):
        v = to_mpfr(nu)
        pref = gmpy2.exp(v * gmpy2.log(mpfr(2)) - gmpy2.lgamma(v)[0])
        out = []
        poch = mpfr(1)
        fac = mpfr(1)
        for n in range(nmax + 1):
            if n:
                poch *= v + n - 1
                fac *= n
            out.append(to_mpc(mom[n] * fac / poch * pref))
    return out, m_leg


def coeffs_by_quadrature(fs: FunctionSpec, nu, nmax: int, nodes: Optional[int] = None,
                         precision: Precision | int | None = None, verify: bool = False,
                         split: float = 16.0, rtol: float = 1e-25) -> CoeffSeries:
    """a_n = (n!/(nu)_n) (2^nu/Gamma(nu)) int phi(u) e^-u L_n^(nu-1)(2u) u^(nu-1) du.

    [0, split] is integrated with Gauss-Legendre in v = sqrt(u), which absorbs
    the u^(-1/2)-type endpoint behaviour; [split, inf) with Gauss-Laguerre.
    With ``verify`` the run is repeated with twice the Laguerre nodes and
    QuadratureNonconvergence is raised if any coefficient moves by more than
    ``rtol`` times the largest coefficient.
    """
    if nmax < 0:
        raise ValueError("nmax must be nonnegative")
    p = as_precision(precision)
    m = nodes if nodes is not None else default_nodes(nmax)
    if m < 4 * nmax:
        raise ValueError(f"need at least 4*nmax = {4 * nmax} nodes, got {m}")
    bits = p.bits + 32
    vals, m_leg = _run_quadrature(fs, nu, nmax, m, bits, split)
    trunc = {"nodes": m, "legendre_nodes": m_leg, "split": split}
    if verify:
        vals2, _ = _run_quadrature(fs, nu, nmax, 2 * m, bits, split)
        with workprec(bits):
            scale = max(abs(v) for v in vals2)
            diff = max(abs(a - b) for a, b in zip(vals, vals2))
        if diff > rtol * scale:
            raise QuadratureNonconvergence(
                f"doubling the nodes moved a coefficient by {float(diff / scale):.3g} (relative)")
        trunc["doubling_change"] = float(diff / scale) if scale else 0.0
        vals = vals2
        trunc["nodes"] = 2 * m
    if fs.is_even_real:
        # odd coefficients of an even real function vanish; check, then zero them
        with workprec(bits):
            scale = max(abs(v) for v in vals)
            odd = max((abs(v) for v in vals[1::2]), default=mpfr(0))
            imag = max(abs(v.imag) for v in vals)
        worst = max(odd, imag)
        if worst > 10 * rtol * scale:
            raise QuadratureNonconvergence(
                f"odd or imaginary parts reach {float(worst / scale):.3g} of the largest coefficient")
        trunc["odd_max"] = float(worst)
        with workprec(bits):
            vals = [mpc(v.real) if n % 2 == 0 else mpc(0) for n, v in enumerate(vals)]
    with workprec(p.bits):
        vals = tuple(+v for v in vals)
    return CoeffSeries(nu, vals, fs.kind, "quadrature", p.bits, trunc)


# --- chi_{-1}: F_n recursion and the c_n series -------------------------------

def _F_guard_bits(M: int) -> int:
    # forward substitution amplifies rounding roughly like M! (8/pi)^M
    return int(math.lgamma(M + 1) / math.log(2) + M * math.log2(8 / math.pi)) + 64


_F_cache: dict = {}


def mordell_F(nmax: int, precision: Precision | int | None = None) -> list:
    """F_0..F_nmax from sum_k n!(-2 pi i)^k/((n-k)!(2k)!) F_{n-k} = ((-1)^n sqrt(i) - i)/sqrt(2).

    Forward substitution; the k=0 term isolates F_n. The substitution is run
    with enough guard bits to absorb its error growth and the results are
    rounded to the requested precision.
    """
    if nmax < 0:
        raise ValueError("nmax must be nonnegative")
    p = as_precision(precision)
    key = (nmax, p.bits)
    if key in _F_cache:
        return list(_F_cache[key])
    work = p.bits + _F_guard_bits(nmax)
    with workprec(work):
        pi = gmpy2.const_pi()
        sqi = gmpy2.exp(mpc(0, 1) * pi / 4)
        r2 = gmpy2.sqrt(mpfr(2))
        tp = mpc(0, -2) * pi
        # c[k] = (-2 pi i)^k / (2k)!
        c = [mpc(1)]
        for k in range(1, nmax + 1):
            c.append(c[-1] * tp / ((2 * k - 1) * (2 * k)))
        F = []
        for n in range(nmax + 1):
            rhs = ((sqi if n % 2 == 0 else -sqi) - mpc(0, 1)) / r2
            s = mpc(0)
            ff = mpfr(1)  # n!/(n-k)!
            for k in range(1, n + 1):
                ff *= n - k + 1
                s += ff * c[k] * F[n - k]
            F.append(rhs - s)
    with workprec(p.bits):
        out = [+f for f in F]
    _F_cache[key] = tuple(out)
    return out


def mordell_F_residual(F, precision: Precision | int | None = None) -> mpfr:
    """Largest residual of the defining identity over n < len(F)."""
    p = as_precision(precision)
    with workprec(p.bits):
        pi = gmpy2.const_pi()
        sqi = gmpy2.exp(mpc(0, 1) * pi / 4)
        worst = mpfr(0)
        for n in range(len(F)):
            s = mpc(0)
            coef = mpc(1)
            for k in range(n + 1):
                if k:
                    coef = coef * (n - k + 1) * mpc(0, -2) * pi / ((2 * k - 1) * (2 * k))
                s += coef * F[n - k]
            rhs = ((sqi if n % 2 == 0 else -sqi) - mpc(0, 1)) / gmpy2.sqrt(mpfr(2))
            worst = max(worst, abs(s - rhs))
        return worst


def aprime(n: int, F) -> mpc:
    """MP-coefficient a'_n of i^(-it-1/4) L^(1/2+2it, chi_{-1}); equals F_n."""
    if len(F) <= n:
        raise InsufficientInput(f"need F_{n}, got {len(F)} values")
    return F[n]


def _binom_row(nu, n, J):
    # binom(-nu-n, j) for j = 0..J
    out = [mpfr(1)]
    s = -nu - n
    for j in range(1, J + 1):
        out.append(out[-1] * (s - j + 1) / j)
    return out


def _chi1_at_r(F, nmax, r, J, nu):
    """c_n(r) for n <= nmax, outer sums truncated at J; also the term magnitudes."""
    w = mpc(0, -1) * r
    beta = gmpy2.exp(gmpy2.log(mpc(0, 1) * (1 + r * r)) / 4)
    H = np.array(F[: J + nmax + 1], dtype=object)
    wp = np.empty(J + 1, dtype=object)
    wp[0] = mpc(1)
    for j in range(1, J + 1):
        wp[j] = wp[j - 1] * w
    out, tails, peaks = [], [], []
    for n in range(nmax + 1):
        terms = np.array(_binom_row(nu, n, J), dtype=object) * wp * H[: J + 1]
        tot = sum(terms)
        mags = [abs(x) for x in terms]
        out.append(beta * tot)
        tails.append(mags[-10:])
        peaks.append(max(mags))
        H = w * H[:-1] + H[1:]
    return out, tails, peaks


def _auto_J(F_mag_model, nmax, r, drop_bits):
    # first j past the peak where C(j+n, n) r^j |F_{j+n}| is 2^-drop_bits below the peak
    lr = math.log(r)
    best = -math.inf
    j = 0
    while True:
        v = (math.lgamma(j + nmax + 0.5) - math.lgamma(j + 1) - math.lgamma(nmax + 0.5)
             + j * lr + F_mag_model(j + nmax))
        best = max(best, v)
        if j > 20 and v < best - drop_bits * math.log(2):
            return j
        j += 1


def _fit_window(nmax, J, r_lo, r_hi, drop_bits):
    """Shrink the window so a fixed J still resolves the outer sum at its top end.

    The top moves down to the largest r whose modelled terms fall drop_bits
    below their peak within J terms; the bottom scales with it.
    """
    if _auto_J(_F_log_model, nmax, r_hi, drop_bits) <= J:
        return r_lo, r_hi
    lo, hi = 0.0, r_hi
    for _ in range(40):
        mid = (lo + hi) / 2
        if _auto_J(_F_log_model, nmax, mid, drop_bits) <= J:
            lo = mid
        else:
            hi = mid
    if lo < 0.1:
        raise TruncationNonconvergence(f"J={J} is too small to resolve the outer sums for n <= {nmax}")
    return round(r_lo * lo / r_hi, 4), round(lo, 4)


def _F_log_model(j):
    # |F_j| ~ 10^(-0.77 sqrt j), measured from the recursion
    return -0.77 * math.sqrt(j) * math.log(10) + 2


def chi1_coeffs(nmax: int, J: Optional[int] = None, precision: Precision | int | None = None,
                window: tuple = (0.3, 0.65), points: int = 32, odd_tol: float = 1e-8) -> CoeffSeries:
    """MP-coefficients c_n of L^(1/2+2it, chi_{-1}) (nu = 1/2) from the F_n.

    c_n(r) = (i(1+r^2))^(1/4) sum_j binom(-1/2-n, j) (-ir)^j
             sum_k binom(n,k) (-ir)^(n-k) F_{j+k}
    is the product expansion of the a'_n = F_n with the coefficients of
    i^(it+1/4) damped by r < 1. The outer sum is truncated at J (chosen per r
    when not given) and c_n = lim_{r->1} c_n(r) is taken by Chebyshev
    interpolation in theta = 2 atan(r) - pi/2 over ``window``, evaluated at
    theta = 0. A fixed J that cannot resolve the window shrinks it toward
    smaller r (less accurate extrapolation). Odd c_n are checked against
    ``odd_tol`` and set to zero.
    """
    if nmax < 0:
        raise ValueError("nmax must be nonnegative")
    if J is not None and J < 1:
        raise ValueError("J must be >= 1")
    p = as_precision(precision)
    r_lo, r_hi = window
    if not 0 < r_lo < r_hi < 1:
        raise ValueError("window must satisfy 0 < r_lo < r_hi < 1")
    # guard bits: cancellation in the outer sum (about 3 bits per unit of n)
    # and the growth of the Chebyshev extrapolation (about 3 bits per point)
    # the extrapolation caps the attainable accuracy near 1e-20, so the
    # truncation target does not follow the requested precision beyond 160 bits
    drop = min(p.bits, 160) + 3 * nmax + 3 * points + 32
    work = drop + 64
    if J is not None:
        r_lo, r_hi = _fit_window(nmax, J, r_lo, r_hi, 64 + 3 * points)
    Js = []
    with workprec(work):
        pi = gmpy2.const_pi()
        th_a = 2 * gmpy2.atan(to_mpfr(r_lo)) - pi / 2
        th_b = 2 * gmpy2.atan(to_mpfr(r_hi)) - pi / 2
        mid, half = (th_a + th_b) / 2, (th_b - th_a) / 2
        xs = [gmpy2.cos(pi * (i + mpfr(0.5)) / points) for i in range(points)]
        rs = [gmpy2.tan((mid + half * x + pi / 2) / 2) for x in xs]
        for r in rs:
            Js.append(J if J is not None else _auto_J(_F_log_model, nmax, float(r), drop))
    M = max(Js) + nmax
    F = mordell_F(M, Precision(work))
    vals = []
    with workprec(work):
        nu = mpfr(0.5)
        for r, Jr in zip(rs, Js):
            out, tails, peaks = _chi1_at_r(F, nmax, r, Jr, nu)
            for n in range(nmax + 1):
                # |F_j| oscillates, so compare the envelope of the last five
                # terms with the five before them
                last = tails[n]
                tiny = max(last) < mpfr(2) ** (8 - drop) * peaks[n]
                decreasing = max(last[5:]) < max(last[:5])
                if not (tiny or decreasing):
                    raise TruncationNonconvergence(
                        f"outer sum for c_{n} at r={float(r):.4f} not decaying at J={Jr}")
            vals.append(out)
        # Chebyshev coefficients of the interpolant, then evaluate at theta=0
        x0 = -mid / half
        cheb = _chebyshev_coeffs(xs, vals, nmax, points)
        T = [mpfr(1), x0]
        for k in range(2, points):
            T.append(2 * x0 * T[-1] - T[-2])
        res, errs = [], []
        for n in range(nmax + 1):
            cn = sum(cheb[k][n] * T[k] for k in range(points))
            est = abs(cheb[points - 1][n] * T[points - 1]) + abs(cheb[points - 2][n] * T[points - 2])
            res.append(cn)
            errs.append(est)
        odd_max = mpfr(0)
        for n in range(1, nmax + 1, 2):
            odd_max = max(odd_max, abs(res[n]))
            if abs(res[n]) > odd_tol:
                raise TruncationNonconvergence(
                    f"odd coefficient c_{n} = {float(abs(res[n])):.3g} exceeds {odd_tol}")
            res[n] = mpc(0)
        # the target function is real on the real axis, so are its c_n
        imag_max = max(abs(v.imag) for v in res)
        if imag_max > odd_tol:
            raise TruncationNonconvergence(f"imaginary parts reach {float(imag_max):.3g}")
        res = [mpc(v.real) for v in res]
    with workprec(p.bits):
        values = tuple(+v for v in res)
    trunc = {"J": max(Js), "J_min": min(Js), "window": f"{r_lo}:{r_hi}", "points": points,
             "extrapolation_error": float(max(errs)), "odd_max": float(odd_max),
             "imag_max": float(imag_max), "working_bits": work}
    return CoeffSeries(mpfr(0.5), values, "lhat_chi1", "mordell_chi1", p.bits, trunc)


def _chebyshev_coeffs(xs, vals, nmax, P):
    # interpolant sum_k c_k T_k(x) through (xs[i], vals[i][n]) at Chebyshev points
    out = []
    for k in range(P):
        row = []
        Tk = [gmpy2.cos(k * gmpy2.acos(x)) for x in xs]
        for n in range(nmax + 1):
            s = mpc(0)
            for i in range(P):
                s += vals[i][n] * Tk[i]
            row.append(s * (1 if k == 0 else 2) / P)
        out.append(row)
    return out


# --- products ---------------------------------------------------------------

def triple_product(l: int, m: int, n: int, nu, precision: Precision | int | None = None) -> mpfr:
    """Q_lmn = int q_l q_m q_n dM_nu in closed form, symmetric in (l, m, n).

    On the real line conj(q_n(it)) = (-1)^n q_n(it), so the integral with
    conj(q_n) is (-1)^n Q_lmn.
    """
    if min(l, m, n) < 0:
        raise ValueError("indices must be nonnegative")
    total = l + m + n
    if total % 2 or not (abs(n - l) <= m <= n + l):
        return mpfr(0)
    h = total // 2
    p = as_precision(precision)
    with workprec(p.bits + 16):
        num = pochhammer(nu, h, Precision(p.bits + 16))
        den = gmpy2.fac(h - n) * gmpy2.fac(h - l) * gmpy2.fac(h - m)
        q = num / den
        if h % 2:
            q = -q
    with workprec(p.bits):
        return +q


def product_coeffs(a: CoeffSeries, b: CoeffSeries, nmax: int, J: int) -> CoeffSeries:
    """Coefficients of the product of two MP-expansions by the convolution

    c_n = sum_{j<=J} binom(-nu-n, j) sum_k binom(n,k) a_{j+k} b_{j+n-k}.
    The last outer term is reported as ``tail`` in trunc_params.
    """
    if float(a.nu) != float(b.nu):
        raise ValueError("series must share nu")
    need = J + nmax + 1
    if len(a) < need or len(b) < need:
        raise InsufficientInput(f"need {need} coefficients from each series")
    bits = max(a.precision_bits, b.precision_bits)
    with workprec(bits + 32):
        nu = to_mpfr(a.nu)
        out, tail = [], mpfr(0)
        for n in range(nmax + 1):
            binom_k = [mpfr(1)]
            for k in range(1, n + 1):
                binom_k.append(binom_k[-1] * (n - k + 1) / k)
            bj = mpfr(1)
            tot = mpc(0)
            last = mpc(0)
            for j in range(J + 1):
                if j:
                    bj = bj * (-nu - n - j + 1) / j
                inner = mpc(0)
                for k in range(n + 1):
                    inner += binom_k[k] * a.values[j + k] * b.values[j + n - k]
                last = bj * inner
                tot += last
            out.append(tot)
            tail = max(tail, abs(last))
    with workprec(bits):
        vals = tuple(+v for v in out)
    return CoeffSeries(a.nu, vals, "custom", "convolution", bits, {"J": J, "tail": float(tail)})


def product_coeffs_qform(a: CoeffSeries, b: CoeffSeries, nmax: int) -> CoeffSeries:
    """Finite-series product via the linearization c_n = (-1)^n (n!/(nu)_n) sum_{l,m} a_l b_m Q_lmn."""
    bits = max(a.precision_bits, b.precision_bits)
    with workprec(bits + 32):
        out = []
        for n in range(nmax + 1):
            s = mpc(0)
            for l in range(len(a)):
                for m in range(len(b)):
                    q = triple_product(l, m, n, a.nu, bits + 32)
                    if q:
                        s += a.values[l] * b.values[m] * q
            s = s * gmpy2.fac(n) / pochhammer(a.nu, n, bits + 32)
            out.append(s if n % 2 == 0 else -s)
    with workprec(bits):
        vals = tuple(+v for v in out)
    return CoeffSeries(a.nu, vals, "custom", "convolution", bits, {"form": "linearization"})


def damped_rotation_coeffs(r, N: int, precision: Precision | int | None = None) -> CoeffSeries:
    """b_n(r) = (i(1+r^2))^(1/4) (-ir)^n, the nu=1/2 coefficients of
    (i(1+r^2))^(1/4) (1+r^2)^(-1/4) ((1+ir)/(1-ir))^(it), which tends to i^(it+1/4) as r -> 1."""
    p = as_precision(precision)
    with workprec(p.bits):
        r = to_mpfr(r)
        beta = gmpy2.exp(gmpy2.log(mpc(0, 1) * (1 + r * r)) / 4)
        w = mpc(0, -1) * r
        vals = [beta]
        for _ in range(N):
            vals.append(vals[-1] * w)
    return CoeffSeries(mpfr(0.5), tuple(vals), "custom", "file", p.bits, {"r": str(r)})


def aprime_series(N: int, precision: Precision | int | None = None) -> CoeffSeries:
    p = as_precision(precision)
    F = mordell_F(N, p)
    return CoeffSeries(mpfr(0.5), tuple(F), "rotated_chi1", "mordell_chi1", p.bits, {"N": N})


# --- asymptotics and norms -----------------------------------------------------

def coeff_asymptote(s_minus, s_plus, res_minus, res_plus, nu, n: int,
                    precision: Precision | int | None = None) -> mpc:
    """a_n ~ A_- n^(s_- - nu/2) + (-1)^(n+1) A_+ n^(-s_+ - nu/2), with
    A_- = 2^(s_- + nu/2) Res_- Gamma(-s_- + nu/2),
    A_+ = 2^(-s_+ + nu/2) Res_+ Gamma(s_+ + nu/2)."""
    p = as_precision(precision)
    bits = p.bits + 16
    with workprec(bits):
        sm, sp = to_mpc(s_minus), to_mpc(s_plus)
        if not (sm.real < 0 < sp.real):
            raise ValueError("need Re s_- < 0 < Re s_+")
        rm, rp = to_mpc(res_minus), to_mpc(res_plus)
        v = to_mpfr(nu)
        ln2 = gmpy2.log(mpfr(2))
        lnn = gmpy2.log(mpfr(n))
        out = mpc(0)
        if rm != 0:
            out += rm * gmpy2.exp((sm + v / 2) * ln2 + _log_gamma(-sm + v / 2, bits) + (sm - v / 2) * lnn)
        if rp != 0:
            term = rp * gmpy2.exp((-sp + v / 2) * ln2 + _log_gamma(sp + v / 2, bits) + (-sp - v / 2) * lnn)
            out += term if n % 2 else -term
    with workprec(p.bits):
        return +out


def parseval_sum(cs: CoeffSeries, N: Optional[int] = None) -> mpfr:
    """sum_{n<=N} (nu)_n/n! |a_n|^2."""
    N = cs.N if N is None else N
    with workprec(cs.precision_bits):
        v = to_mpfr(cs.nu)
        w = mpfr(1)
        s = mpfr(0)
        for n in range(N + 1):
            if n:
                w = w * (v + n - 1) / n
            s += w * gmpy2.norm(cs.values[n])
        return s


def decay_exponent(cs: CoeffSeries, lo: int, hi: int, step: int = 2) -> float:
    """Least-squares slope of log|a_n| against log n over n in [lo, hi]."""
    ns = [n for n in range(lo, hi + 1, step) if cs.values[n] != 0]
    x = np.log(ns)
    y = np.log([float(abs(cs.values[n])) for n in ns])
    return float(np.polyfit(x, y, 1)[0])
