"""Gauss-Laguerre and Gauss-Legendre rules at arbitrary precision.

Nodes start from double-precision guesses and are polished by Newton
iteration on the three-term recurrence, doubling the working precision at
each step. Arrays are numpy object arrays of gmpy2 numbers so the
recurrences run elementwise without Python-level loops over nodes.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

import gmpy2
import numpy as np
from gmpy2 import mpfr

from .precision import to_mpfr, workprec


class QuadratureError(ArithmeticError):
    pass


def _obj(values, bits):
    with workprec(bits):
        return np.array([mpfr(v) for v in values], dtype=object)


def _round(arr, bits):
    with workprec(bits):
        return np.array([+v for v in arr], dtype=object)


def _laguerre_pair(m, a, x):
    # returns L_m(x), L_{m-1}(x)
    p0 = np.full(len(x), mpfr(1), dtype=object)
    p1 = (1 + a) - x
    for k in range(1, m):
        p0, p1 = p1, ((2 * k + 1 + a - x) * p1 - (k + a) * p0) / (k + 1)
    return p1, p0


def _legendre_pair(m, x):
    p0 = np.full(len(x), mpfr(1), dtype=object)
    p1 = x.copy()
    for k in range(1, m):
        p0, p1 = p1, ((2 * k + 1) * x * p1 - k * p0) / (k + 1)
    return p1, p0


def _precision_ladder(bits):
    steps = [bits + 32]
    while steps[-1] > 120:
        steps.append(steps[-1] // 2 + 8)
    return steps[::-1]


@lru_cache(maxsize=16)
def _gauss_laguerre(m: int, alpha: str, bits: int):
    with workprec(bits + 32):
        a_hi = to_mpfr(Fraction(alpha))
    af = float(a_hi)
    k = np.arange(m, dtype=float)
    jac = np.diag(2 * k + 1 + af) + np.diag(np.sqrt(k[1:] * (k[1:] + af)), -1)
    guess = np.linalg.eigvalsh(jac, UPLO="L")
    x = _obj(guess, 64)
    for b in _precision_ladder(bits):
        with workprec(b):
            a = +a_hi
            x = _round(x, b)
            for _ in range(3):
                lm, lm1 = _laguerre_pair(m, a, x)
                dp = (m * lm - (m + a) * lm1) / x
                dx = lm / dp
                x = x - dx
                worst = max(abs(d / v) for d, v in zip(dx, x))
                if worst < mpfr(2) ** (-(b - 8)):
                    break
    with workprec(bits + 32):
        a = +a_hi
        lm, lm1 = _laguerre_pair(m, a, x)
        worst = max(abs(l) for l in lm / lm1)
        if not worst < mpfr(2) ** (-(bits // 2)) * 4 * m:
            raise QuadratureError("Gauss-Laguerre nodes failed to converge")
        if any(x[i] >= x[i + 1] for i in range(m - 1)) or x[0] <= 0:
            raise QuadratureError("Gauss-Laguerre nodes not distinct")
        lg = gmpy2.lgamma(m + a + 1)[0] - gmpy2.lgamma(mpfr(m + 1))[0]
        w = gmpy2.exp(lg) * x / ((m + a) ** 2 * lm1 * lm1)
    return _round(x, bits), _round(w, bits)


def gauss_laguerre(m: int, alpha, bits: int):
    """Nodes and weights for the weight x^alpha e^-x on (0, inf)."""
    if m < 1:
        raise ValueError("m must be positive")
    return _gauss_laguerre(m, str(Fraction(alpha)), bits)


@lru_cache(maxsize=16)
def _gauss_legendre(m: int, bits: int):
    guess = np.cos(math.pi * (np.arange(1, m + 1) - 0.25) / (m + 0.5))
    x = _obj(guess, 64)
    for b in _precision_ladder(bits):
        with workprec(b):
            x = _round(x, b)
            for _ in range(6):
                pm, pm1 = _legendre_pair(m, x)
                dp = m * (x * pm - pm1) / (x * x - 1)
                dx = pm / dp
                x = x - dx
                worst = max(abs(d) for d in dx)
                if worst < mpfr(2) ** (-(b - 8)):
                    break
    with workprec(bits + 32):
        pm, pm1 = _legendre_pair(m, x)
        dp = m * (x * pm - pm1) / (x * x - 1)
        if max(abs(v) for v in pm / dp) > mpfr(2) ** (-(bits // 2)):
            raise QuadratureError("Gauss-Legendre nodes failed to converge")
        w = 2 / ((1 - x * x) * dp * dp)
    order = np.argsort([float(v) for v in x])
    return _round(x[order], bits), _round(w[order], bits)


def gauss_legendre(m: int, bits: int):
    """Nodes and weights on [-1, 1], ascending."""
    if m < 1:
        raise ValueError("m must be positive")
    return _gauss_legendre(m, bits)
