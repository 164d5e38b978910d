"""Reference values computed without MP expansions.

zeta by Euler-Maclaurin, Dirichlet beta by the Cohen-Villegas-Zagier
accelerated alternating series, and the completed functions built on them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import gmpy2
from gmpy2 import mpc, mpfr

from .precision import Precision, as_precision, to_mpc, to_mpfr, workprec
from .special_functions import _log_gamma, bernoulli_even


class PoleError(ValueError):
    pass


@dataclass(frozen=True)
class EvalPoint:
    t: object

    @property
    def s(self):
        return mpc(0.5) + mpc(0, 2) * to_mpc(self.t)

    @classmethod
    def from_s(cls, s):
        s = to_mpc(s)
        return cls((s - mpfr(0.5)) / mpc(0, 2))


def _em_zeta(s: mpc, a: mpfr, bits: int) -> mpc:
    """Hurwitz zeta(s, a) by Euler-Maclaurin; a > 0."""
    # the smallest tail term is about exp(-2 pi N) once N > |s|, so
    # N ~ bits ln2 / (2 pi) plus |s| puts the tail below 2^(-bits-8)
    sabs = float(abs(s))
    N = int((bits + 16) * math.log(2) / (2 * math.pi) * 1.25 + sabs) + 10
    tol = mpfr(2) ** (-bits - 8)
    total = mpc(0)
    for k in range(N):
        total += gmpy2.exp(-s * gmpy2.log(a + k))
    x = a + N
    lx = gmpy2.log(x)
    xs = gmpy2.exp(-s * lx)  # x^-s
    total += x * xs / (s - 1) + xs / 2
    # sum_j B_2j/(2j)! (s)_{2j-1} x^(-s-2j+1)
    fact = mpfr(1)
    rising = s  # (s)_{2j-1}
    pw = xs / x
    inv2 = 1 / (x * x)
    j = 1
    while True:
        fact *= (2 * j - 1) * (2 * j)
        b = bernoulli_even(j)
        term = (mpfr(b.numerator) / b.denominator) / fact * rising * pw
        total += term
        # next-term magnitude bounds the remainder for Re(s + 2j + 1) > 0
        if abs(term) < tol * abs(total) and j > 2:
            break
        rising *= (s + 2 * j - 1) * (s + 2 * j)
        pw *= inv2
        j += 1
        if j > 8 * bits:
            raise ArithmeticError("Euler-Maclaurin series failed to converge")
    return total


def riemann_zeta(s, p: Precision | int | None = None) -> mpc:
    p = as_precision(p)
    bits = p.bits + 24
    with workprec(bits):
        s = to_mpc(s)
        if s == 1:
            raise PoleError("zeta has a pole at s=1")
        if s.real < mpfr(-0.5):
            # zeta(s) = 2^s pi^(s-1) sin(pi s/2) Gamma(1-s) zeta(1-s)
            pi = gmpy2.const_pi()
            r = (gmpy2.exp(s * gmpy2.log(mpfr(2)) + (s - 1) * gmpy2.log(pi) + _log_gamma(1 - s, bits))
                 * gmpy2.sin(pi * s / 2) * _em_zeta(1 - s, mpfr(1), bits))
        else:
            r = _em_zeta(s, mpfr(1), bits)
    with workprec(p.bits):
        return +r


def zeta_functional_residual(s, p: Precision | int | None = None) -> mpfr:
    """|zeta(s) - 2^s pi^(s-1) sin(pi s/2) Gamma(1-s) zeta(1-s)| / |zeta(s)|, both sides by Euler-Maclaurin."""
    p = as_precision(p)
    bits = p.bits + 24
    with workprec(bits):
        s = to_mpc(s)
        pi = gmpy2.const_pi()
        lhs = _em_zeta(s, mpfr(1), bits)
        rhs = (gmpy2.exp(s * gmpy2.log(mpfr(2)) + (s - 1) * gmpy2.log(pi) + _log_gamma(1 - s, bits))
               * gmpy2.sin(pi * s / 2) * _em_zeta(1 - s, mpfr(1), bits))
        r = abs(lhs - rhs) / abs(lhs)
    with workprec(p.bits):
        return +r


def _cvz_beta(s: mpc, bits: int) -> mpc:
    # sum_k (-1)^k (2k+1)^-s, Cohen-Villegas-Zagier algorithm 1
    extra = math.pi * abs(float(s.imag)) / 2 / math.log(2)
    n = int((bits + extra) / math.log2(3 + math.sqrt(8))) + 8
    with workprec(bits + int(extra) + 16):
        d = (3 + gmpy2.sqrt(mpfr(8))) ** n
        d = (d + 1 / d) / 2
        b = mpfr(-1)
        c = -d
        total = mpc(0)
        for k in range(n):
            c = b - c
            total += c * gmpy2.exp(-s * gmpy2.log(mpfr(2 * k + 1)))
            b = b * (k + n) * (k - n) / ((k + mpfr(0.5)) * (k + 1))
        return total / d


def dirichlet_beta(s, p: Precision | int | None = None) -> mpc:
    p = as_precision(p)
    bits = p.bits + 24
    with workprec(bits):
        s = to_mpc(s)
        if s.real < 0:
            # beta(s) = (pi/2)^(s-1) cos(pi s/2) Gamma(1-s) beta(1-s)... written via beta(1-s)
            pi = gmpy2.const_pi()
            r = (gmpy2.exp((s - 1) * gmpy2.log(pi / 2) + _log_gamma(1 - s, bits))
                 * gmpy2.sin(pi * (1 - s) / 2) * _cvz_beta(1 - s, bits))
        else:
            r = _cvz_beta(s, bits)
    with workprec(p.bits):
        return +r


def xi_completed(t, p: Precision | int | None = None) -> mpc:
    """pi^(-s/2) Gamma(s/2) zeta(s) at s = 1/2 + 2it."""
    p = as_precision(p)
    bits = p.bits + 24
    with workprec(bits):
        s = EvalPoint(to_mpc(t)).s
        if s == 0 or s == 1:
            raise PoleError("Xi(t) has poles at t = +-i/4")
        pi = gmpy2.const_pi()
        r = gmpy2.exp(-s / 2 * gmpy2.log(pi) + _log_gamma(s / 2, bits)) * riemann_zeta(s, Precision(bits))
    with workprec(p.bits):
        return +r


def lhat_chi1(t, p: Precision | int | None = None) -> mpc:
    """4^(s/2) pi^(-(s+1)/2) Gamma((s+1)/2) beta(s) at s = 1/2 + 2it."""
    p = as_precision(p)
    bits = p.bits + 24
    with workprec(bits):
        s = EvalPoint(to_mpc(t)).s
        pi = gmpy2.const_pi()
        r = (gmpy2.exp(s * gmpy2.log(mpfr(2)) - (s + 1) / 2 * gmpy2.log(pi) + _log_gamma((s + 1) / 2, bits))
             * dirichlet_beta(s, Precision(bits)))
    with workprec(p.bits):
        return +r


def rotated_chi1(t, p: Precision | int | None = None) -> mpc:
    """i^(-it-1/4) L^(1/2+2it, chi_{-1}) with i^z = exp(i pi z/2).

    This is the function whose MP-coefficients are the F_n of
    ``coefficients.mordell_F`` (image of (1/2)sech(sqrt(pi i u)) under M_{1/2}).
    """
    p = as_precision(p)
    bits = p.bits + 24
    with workprec(bits):
        t = to_mpc(t)
        z = -mpc(0, 1) * t - mpfr(0.25)
        r = gmpy2.exp(z * mpc(0, 1) * gmpy2.const_pi() / 2) * lhat_chi1(t, Precision(bits))
    with workprec(p.bits):
        return +r


def xi_real(t, p: Precision | int | None = None) -> mpfr:
    return xi_completed(t, p).real


def bisect_xi_zero(lo, hi, p: Precision | int | None = None, tol=None) -> mpfr:
    """Locate a sign change of Xi on [lo, hi] (real t) by bisection."""
    p = as_precision(p)
    with workprec(p.bits):
        a, b = to_mpfr(lo), to_mpfr(hi)
        fa, fb = xi_real(a, p), xi_real(b, p)
        if fa * fb > 0:
            raise ValueError("Xi has no sign change on the bracket")
        tol = to_mpfr(tol) if tol is not None else mpfr(2) ** (-(p.bits - 16))
        while b - a > tol * (1 + abs(a)):
            m = (a + b) / 2
            fm = xi_real(m, p)
            if fm == 0:
                return m
            if (fm > 0) == (fa > 0):
                a, fa = m, fm
            else:
                b = m
        return (a + b) / 2


XI_ZERO_BRACKETS = ((6.9, 7.2), (10.3, 10.7), (12.3, 12.7))


def xi_zero(k: int = 1, p: Precision | int | None = None) -> mpfr:
    """k-th positive zero of Xi(t) (gamma_k / 2), by bisection on a fixed bracket."""
    lo, hi = XI_ZERO_BRACKETS[k - 1]
    return bisect_xi_zero(lo, hi, p)
