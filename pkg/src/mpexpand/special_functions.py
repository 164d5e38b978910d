"""Log-gamma, Pochhammer symbols, binomials, Laguerre polynomials and the MP weight."""

from __future__ import annotations

import functools
import math
import threading
from fractions import Fraction

import gmpy2
from gmpy2 import mpc, mpfr

from .precision import Precision, as_precision, to_mpc, to_mpfr, workprec


class GammaPoleError(ValueError):
    pass


_bern_lock = threading.Lock()
_bern_cache: list[Fraction] = []


def _tangent_numbers(n: int) -> list[int]:
    # Brent-Harvey in-place recurrence, T_1..T_n
    T = [0] * (n + 1)
    T[1] = 1
    for k in range(2, n + 1):
        T[k] = (k - 1) * T[k - 1]
    for k in range(2, n + 1):
        for j in range(k, n + 1):
            T[j] = (j - k) * T[j - 1] + (j - k + 2) * T[j]
    return T


def bernoulli_even(k: int) -> Fraction:
    """B_{2k} as an exact fraction (k >= 1). The table grows on demand."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if k > len(_bern_cache):
        with _bern_lock:
            if k > len(_bern_cache):
                n = max(k, 2 * len(_bern_cache), 32)
                T = _tangent_numbers(n)
                table = []
                for j in range(1, n + 1):
                    four = 4 ** j
                    sign = 1 if j % 2 else -1
                    table.append(Fraction(sign * 2 * j * T[j], four * (four - 1)))
                _bern_cache[:] = table
    return _bern_cache[k - 1]


def _stirling_radius(bits: int) -> float:
    # smallest Stirling term is about exp(-2 pi |w|)
    return max(16.0, bits * math.log(2) / (2 * math.pi) + 4)


def _check_pole(z: mpc, bits: int):
    if z.imag != 0:
        return
    x = z.real
    if x > 0:
        return
    r = gmpy2.rint(x)
    ulp = gmpy2.mul_2exp(mpfr(1), gmpy2.get_exp(x) - bits) if x != 0 else mpfr(0)
    if abs(x - r) <= ulp:
        raise GammaPoleError(f"Gamma has a pole at {int(r)}")


@functools.lru_cache(maxsize=4096)
def _stirling_coeff(k: int, bits: int) -> mpfr:
    # B_2k / (2k(2k-1)), rounded once per precision
    b = bernoulli_even(k)
    with workprec(bits):
        return mpfr(b.numerator) / b.denominator / ((2 * k) * (2 * k - 1))


def _log_gamma(z: mpc, bits: int) -> mpc:
    """Body of log_gamma; caller sets the working precision."""
    R = _stirling_radius(bits)
    acc = mpc(0)
    w = z
    if not (w.real > 0 and abs(w) >= R):
        n = int(math.ceil(R - float(w.real)))
        for k in range(n):
            acc += gmpy2.log(w + k)
        w = w + n
    # (w - 1/2) log w - w + log(2 pi)/2 + sum B_2k / (2k(2k-1) w^(2k-1))
    s = (w - mpfr(0.5)) * gmpy2.log(w) - w + gmpy2.log(2 * gmpy2.const_pi()) / 2
    inv = 1 / w
    inv2 = inv * inv
    pw = inv
    tol = mpfr(2) ** (-bits - 4)
    k = 1
    while True:
        term = pw * _stirling_coeff(k, bits)
        s += term
        if abs(term) < tol * (1 + abs(s)):
            break
        k += 1
        pw *= inv2
        if k > 4 * bits:
            raise ArithmeticError("Stirling series did not converge")
    return s - acc


def _log_abs_gamma(z: mpc, bits: int) -> mpfr:
    """log|Gamma(z)|; the shift is taken as one product since no branch is involved."""
    R = _stirling_radius(bits)
    prod = mpc(1)
    w = z
    if not (w.real > 0 and abs(w) >= R):
        n = int(math.ceil(R - float(w.real)))
        for k in range(n):
            prod *= w + k
        w = w + n
    return _log_gamma(w, bits).real - gmpy2.log(abs(prod))


@functools.lru_cache(maxsize=64)
def _weight_const(nu: mpfr, bits: int) -> mpfr:
    with workprec(bits):
        return nu * gmpy2.log(mpfr(2)) - gmpy2.lgamma(nu)[0] - gmpy2.log(2 * gmpy2.const_pi())


def log_gamma(z, p: Precision | int | None = None) -> mpc:
    """Principal log Gamma(z), analytic off the negative real axis.

    Arguments with small modulus are pushed to Re z >= R by the upward
    recurrence (R >= 16, larger for high precision) and the log-terms are
    summed one by one, which keeps the standard branch everywhere,
    including Re z < 0.
    """
    p = as_precision(p)
    out_bits = p.bits
    bits = p.bits + 24
    with workprec(bits):
        z = to_mpc(z)
        _check_pole(z, out_bits)
        if z == 1 or z == 2:
            res = mpc(0)
        else:
            res = _log_gamma(z, bits)
    with workprec(out_bits):
        return +res


def gamma(z, p: Precision | int | None = None) -> mpc:
    p = as_precision(p)
    with workprec(p.bits + 24):
        g = gmpy2.exp(log_gamma(z, Precision(p.bits + 24)))
    with workprec(p.bits):
        return +g


def pochhammer(nu, n: int, p: Precision | int | None = None) -> mpfr:
    if n < 0:
        raise ValueError("n must be nonnegative")
    p = as_precision(p)
    with workprec(p.bits):
        v = to_mpfr(nu)
        r = mpfr(1)
        for k in range(n):
            r *= v + k
        return r


def binomial_general(s, k: int, p: Precision | int | None = None) -> mpc:
    """binom(s, k) for complex s by the falling-factorial product."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    p = as_precision(p)
    with workprec(p.bits):
        s = to_mpc(s)
        r = mpc(1)
        for j in range(1, k + 1):
            r = r * (s - j + 1) / j
        return r


def laguerre_all(nmax: int, alpha, x, p: Precision | int | None = None) -> list:
    """[L_0^(alpha)(x), ..., L_nmax^(alpha)(x)] by the forward recurrence."""
    p = as_precision(p)
    with workprec(p.bits):
        a = to_mpfr(alpha)
        x = to_mpc(x) if isinstance(x, (complex, mpc)) else to_mpfr(x)
        out = [mpfr(1) if not isinstance(x, mpc) else mpc(1)]
        if nmax >= 1:
            out.append(a + 1 - x)
        for k in range(1, nmax):
            out.append(((2 * k + 1 + a - x) * out[k] - (k + a) * out[k - 1]) / (k + 1))
        return out


def laguerre(n: int, alpha, x, p: Precision | int | None = None):
    if n < 0:
        raise ValueError("n must be nonnegative")
    return laguerre_all(n, alpha, x, p)[n]


def measure_weight(t, nu, p: Precision | int | None = None):
    """Density of M_nu: (1/2pi) 2^nu/Gamma(nu) Gamma(nu/2+it) Gamma(nu/2-it).

    For real t this is the positive weight |Gamma(it+nu/2)|^2 scaled; complex
    t gives its analytic continuation.
    """
    p = as_precision(p)
    bits = p.bits + 16
    with workprec(bits):
        v = to_mpfr(nu)
        if v <= 0:
            raise ValueError("nu must be positive")
        t = to_mpc(t)
        half = v / 2
        if t.imag == 0:
            lg = 2 * _log_abs_gamma(mpc(half, t.real), bits)
        else:
            lg = _log_gamma(mpc(half, 0) + mpc(0, 1) * t, bits) + _log_gamma(mpc(half, 0) - mpc(0, 1) * t, bits)
        lg += _weight_const(v, bits)
        w = gmpy2.exp(lg)
    with workprec(p.bits):
        if t.imag == 0:
            return +mpfr(w.real) if isinstance(w, mpc) else +w
        return +w
