"""Meixner-Pollaczek polynomials q_n^(nu,0)(it): values, norms, generating function."""

from __future__ import annotations

from dataclasses import dataclass, field

import gmpy2
from gmpy2 import mpc, mpfr

from .precision import Precision, as_precision, to_mpc, to_mpfr, workprec
from .special_functions import _log_gamma, measure_weight, pochhammer


class BranchError(ValueError):
    pass


@dataclass(frozen=True)
class BasisSpec:
    nu: object = 1.5
    precision: Precision = field(default_factory=Precision)

    def __post_init__(self):
        if not float(self.nu) > 0:
            raise ValueError("nu must be positive")
        object.__setattr__(self, "precision", as_precision(self.precision))

    @property
    def bits(self) -> int:
        return self.precision.bits


def mp_eval_all(spec: BasisSpec, nmax: int, t) -> list:
    """[q_0(it), ..., q_nmax(it)] by the forward three-term recurrence."""
    if nmax < 0:
        raise ValueError("nmax must be nonnegative")
    with workprec(spec.bits):
        nu = to_mpfr(spec.nu)
        x = mpc(0, 2) * to_mpc(t)  # 2it
        q = [mpc(1)]
        if nmax >= 1:
            q.append(-x)
        for n in range(1, nmax):
            q.append(((n + nu - 1) * q[n - 1] - x * q[n]) / (n + 1))
        return q


def mp_norm(spec: BasisSpec, n: int) -> mpfr:
    """(nu)_n / n!"""
    with workprec(spec.bits):
        return pochhammer(spec.nu, n, spec.precision) / gmpy2.fac(n)


def mp_generating_residual(spec: BasisSpec, w, t, N: int) -> mpfr:
    """|sum_{n<=N} q_n(it) w^n - (1-w^2)^(-nu/2) ((1-w)/(1+w))^(it)|."""
    with workprec(spec.bits):
        w = to_mpc(w)
        if abs(w) > mpfr("0.9"):
            raise ValueError("|w| must be <= 0.9")
        for z in (1 - w, 1 + w):
            if z.imag == 0 and z.real <= 0:
                raise BranchError("1 +- w lies on the branch cut")
        q = mp_eval_all(spec, N, t)
        s = mpc(0)
        pw = mpc(1)
        for qn in q:
            s += qn * pw
            pw *= w
        nu = to_mpfr(spec.nu)
        it = mpc(0, 1) * to_mpc(t)
        closed = gmpy2.exp(-nu / 2 * gmpy2.log(1 - w * w)
                           + it * (gmpy2.log(1 - w) - gmpy2.log(1 + w)))
        return abs(s - closed)


def mp_asymptotic(spec: BasisSpec, n: int, t) -> mpc:
    """Two-term leading behaviour of q_n(it) for large n.

    2^(it-nu/2) (-1)^n n^(it+nu/2-1) / Gamma(it+nu/2)
      + 2^(-it-nu/2) n^(-it+nu/2-1) / Gamma(-it+nu/2)
    """
    n = int(n)
    if n < 2:
        raise ValueError("n must be >= 2")
    bits = spec.bits + 16
    with workprec(bits):
        nu = to_mpfr(spec.nu)
        it = mpc(0, 1) * to_mpc(t)
        ln2 = gmpy2.log(mpfr(2))
        lnn = gmpy2.log(mpfr(n))
        out = mpc(0)
        for sgn in (1, -1):
            a = sgn * it + nu / 2
            lg = _log_gamma(a, bits)
            term = gmpy2.exp((a - nu) * ln2 + (a - 1) * lnn - lg)
            if sgn == 1 and n % 2:
                term = -term
            out += term
    with workprec(spec.bits):
        return +out


def mp_asymptotic_error(spec: BasisSpec, n: int, t) -> float:
    """Relative error of mp_asymptotic over the parity pair (n, n+1).

    For real t the two leading terms are conjugate, so q_n itself oscillates
    through zero like cos(t log n + phase) and a pointwise relative error is
    dominated by those near-zeros. Pairing n with n+1 (cos with sin) removes
    the phase: sqrt(e_n^2 + e_{n+1}^2) / sqrt(q_n^2 + q_{n+1}^2).
    """
    n = int(n)
    q = mp_eval_all(spec, n + 1, t)
    with workprec(spec.bits):
        err = [abs(mp_asymptotic(spec, k, t) - q[k]) for k in (n, n + 1)]
        mag = [abs(q[k]) for k in (n, n + 1)]
        return float(gmpy2.sqrt(err[0] ** 2 + err[1] ** 2) / gmpy2.sqrt(mag[0] ** 2 + mag[1] ** 2))


def clenshaw(coeffs, nu, t, n: int | None = None, derivative: bool = False):
    """S(t) = sum_{k<=n} c_k q_k(it) by the backward recurrence.

    q_{k+1} = alpha_k q_k + beta_k q_{k-1} with alpha_k = -2it/(k+1) and
    beta_k = (k+nu-1)/(k+1). With ``derivative`` returns (S, dS/dt).
    Runs at the caller's precision.
    """
    n = len(coeffs) - 1 if n is None else n
    nu = to_mpfr(nu)
    x = mpc(0, -2) * t  # -2it
    dx = mpc(0, -2)
    b1 = b2 = mpc(0)
    d1 = d2 = mpc(0)
    for k in range(n, -1, -1):
        alpha = x / (k + 1)
        beta = (k + nu) / (k + 2)  # beta_{k+1}
        b0 = coeffs[k] + alpha * b1 + beta * b2
        if derivative:
            d0 = alpha * d1 + dx / (k + 1) * b1 + beta * d2
            d2, d1 = d1, d0
        b2, b1 = b1, b0
    return (b1, d1) if derivative else b1


def mp_line_integral(spec: BasisSpec, f, tol=1e-30, cutoff=1e-40, h0=0.25, max_levels=10):
    """Integral over the real line of f(t) M_nu(dt), f returning a numpy object vector.

    The range is cut at the first T (multiple of 5) where |f(+-T)| times the
    weight drops below ``cutoff``; the trapezoid rule is then halved until two
    levels agree to ``tol`` (trapezoid converges geometrically here because
    the integrand is analytic in |Im t| < nu/2).
    """
    bits = spec.bits
    with workprec(bits):
        def g(t):
            return f(t) * measure_weight(t, spec.nu, bits)

        T = 10
        while True:
            tail = max(max(abs(v) for v in g(mpfr(s * T))) for s in (1, -1))
            if tail < cutoff:
                break
            T += 5
            if T > 2000:
                raise ArithmeticError("integrand does not decay")
        m = max(2, int(2 * T / h0))
        h = mpfr(2 * T) / m
        total = sum((g(-T + k * h) for k in range(1, m)), g(mpfr(-T)) * 0)
        est = total * h
        for _ in range(max_levels):
            total = total + sum(g(-T + (k + mpfr(0.5)) * h) for k in range(m))
            m, h = 2 * m, h / 2
            new = total * h
            diff = max(abs(a - b) for a, b in zip(new, est))
            est = new
            if diff < tol:
                return est
        raise ArithmeticError(f"trapezoid rule did not reach {tol} after {max_levels} halvings")


def mp_gram(spec: BasisSpec, nmax: int, tol=1e-30):
    """Matrix of <q_m, q_n> = int q_m(it) conj(q_n(it)) M_nu(dt), m, n <= nmax."""
    import numpy as np

    def f(t):
        q = np.array(mp_eval_all(spec, nmax, t), dtype=object)
        qc = np.array([v.conjugate() for v in q], dtype=object)
        return np.outer(q, qc).ravel()

    flat = mp_line_integral(spec, f, tol)
    return np.array(flat, dtype=object).reshape(nmax + 1, nmax + 1)
