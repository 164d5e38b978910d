"""Companion matrices of MP partial sums and their spectra.

B_n = H_n + (n/a_n) e_n (a_0, ..., a_{n-1}) where H_n carries the
recurrence: superdiagonal -1, ..., -(n-1) and subdiagonal nu, ..., nu+n-2.
Its eigenvalues are 2i times the zeros of S_n. The eigensolver is a
Hessenberg QR (Francis double shift for real matrices, single Wilkinson
shift for complex ones) on numpy object arrays of gmpy2 numbers.
"""

from __future__ import annotations

from dataclasses import dataclass

import gmpy2
import numpy as np
from gmpy2 import mpc, mpfr

from .coefficients import CoeffSeries
from .mp_basis import clenshaw
from .precision import to_mpc, to_mpfr, workprec


class ZeroLeadingCoefficient(ValueError):
    pass


class EigenNonconvergence(ArithmeticError):
    pass


REAL_TOL = 1e-8
REFINE_TOL = 1e-14
RESIDUAL_TOL = 1e-10


@dataclass
class CompanionMatrix:
    n: int
    nu: object
    entries: np.ndarray
    scale_exponent: float = 0.0
    bits: int = 256

    @property
    def is_real(self) -> bool:
        return not any(isinstance(v, mpc) for v in self.entries.flat)


@dataclass(frozen=True)
class ZeroSet:
    zeros: tuple
    residuals: tuple
    scales: tuple
    n: int
    classification: tuple
    threshold: float = REAL_TOL
    bits: int = 256
    conj_symmetric: bool = False

    def __post_init__(self):
        if len(self.zeros) != self.n:
            raise ValueError("a ZeroSet of degree n holds n zeros")

    @property
    def relative_residuals(self) -> list:
        return [float(r / s) if s else float(r) for r, s in zip(self.residuals, self.scales)]

    @property
    def suspect(self) -> bool:
        return any(r > RESIDUAL_TOL for r in self.relative_residuals)


def _is_real_series(values) -> bool:
    return all(v.imag == 0 for v in values)


def _is_even_real_series(values) -> bool:
    # then S_n(conj t) = conj S_n(t): zeros come in conjugate pairs
    return _is_real_series(values) and all(v == 0 for v in values[1::2])


def build_companion(coeffs: CoeffSeries, n: int) -> CompanionMatrix:
    if n < 1:
        raise ValueError("n must be >= 1")
    if n > coeffs.N:
        raise ValueError(f"series has only {coeffs.N + 1} coefficients")
    a = coeffs.values
    if a[n] == 0:
        raise ZeroLeadingCoefficient(f"a_{n} = 0")
    real = _is_real_series(a[: n + 1])
    bits = coeffs.precision_bits
    with workprec(bits):
        nu = to_mpfr(coeffs.nu)
        zero = mpfr(0) if real else mpc(0)
        B = np.full((n, n), zero, dtype=object)
        for i in range(n - 1):
            B[i, i + 1] = zero - (i + 1)
            B[i + 1, i] = zero + nu + i
        lead = a[n].real if real else a[n]
        for j in range(n):
            aj = a[j].real if real else a[j]
            B[n - 1, j] = B[n - 1, j] + n * aj / lead
    return CompanionMatrix(n, coeffs.nu, B, 0.0, bits)


def balance(B: CompanionMatrix, a) -> CompanionMatrix:
    """diag(1, 2^a, ..., n^a)^-1 B diag(1, 2^a, ..., n^a); entry (i,j) times (j/i)^a."""
    if a < 0:
        raise ValueError("balancing exponent must be >= 0")
    if a == 0:
        return CompanionMatrix(B.n, B.nu, B.entries.copy(), B.scale_exponent, B.bits)
    with workprec(B.bits):
        e = to_mpfr(a)
        d = np.array([gmpy2.exp(e * gmpy2.log(mpfr(k))) for k in range(1, B.n + 1)], dtype=object)
        M = B.entries * d[np.newaxis, :] / d[:, np.newaxis]
    return CompanionMatrix(B.n, B.nu, M, B.scale_exponent + float(a), B.bits)


def estimate_balance_exponent(coeffs: CoeffSeries, n: int) -> float:
    """Decay exponent alpha in |a_j| ~ j^-alpha fitted on the nonzero tail j in [n/2, n]."""
    js = [j for j in range(max(1, n // 2), n + 1) if coeffs.values[j] != 0]
    if len(js) < 3:
        return 0.0
    x = np.log(js)
    y = np.log([float(abs(coeffs.values[j])) for j in js])
    alpha = -float(np.polyfit(x, y, 1)[0])
    return min(max(alpha, 0.0), 3.0)


# --- eigensolver ------------------------------------------------------------------

def _to_object_matrix(M, bits):
    if isinstance(M, CompanionMatrix):
        M = M.entries
    A = np.array(M, dtype=object)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("matrix must be square")
    real = True
    with workprec(bits):
        out = np.empty(A.shape, dtype=object)
        for idx, v in np.ndenumerate(A):
            z = to_mpc(v)
            if not (gmpy2.is_finite(z.real) and gmpy2.is_finite(z.imag)):
                raise ValueError("matrix entries must be finite")
            out[idx] = z
            if z.imag != 0:
                real = False
        if real:
            for idx, v in np.ndenumerate(out):
                out[idx] = v.real
    return out, real


def _is_upper_hessenberg(A):
    n = A.shape[0]
    return all(A[i, j] == 0 for i in range(n) for j in range(i - 1))


def _hessenberg(A):
    """Reduction to upper Hessenberg form by stabilized elimination (row pivoting)."""
    n = A.shape[0]
    for m in range(1, n - 1):
        col = A[m:, m - 1]
        mags = [abs(v) for v in col]
        piv = int(np.argmax(mags)) + m
        x = A[piv, m - 1]
        if piv != m:
            A[[piv, m], m - 1:] = A[[m, piv], m - 1:]
            A[:, [piv, m]] = A[:, [m, piv]]
        if x == 0:
            continue
        for i in range(m + 1, n):
            y = A[i, m - 1]
            if y != 0:
                y = y / x
                A[i, m - 1:] = A[i, m - 1:] - y * A[m, m - 1:]
                A[i, m - 1] = A[i, m - 1] * 0
                A[:, m] = A[:, m] + y * A[:, i]
    return A


def _sign(a, b):
    return abs(a) if b >= 0 else -abs(a)


def _hqr(A, bits, max_sweeps):
    """Eigenvalues of a real upper Hessenberg matrix, Francis double-shift QR."""
    n = A.shape[0]
    eps = mpfr(2) ** (-(bits - 2))
    anorm = sum(abs(A[i, j]) for i in range(n) for j in range(max(i - 1, 0), n))
    wr = [mpfr(0)] * n
    wi = [mpfr(0)] * n
    nn = n - 1
    t = mpfr(0)
    zero = mpfr(0)
    while nn >= 0:
        its = 0
        while True:
            l = nn
            while l >= 1:
                s = abs(A[l - 1, l - 1]) + abs(A[l, l])
                if s == 0:
                    s = anorm
                if abs(A[l, l - 1]) <= eps * s:
                    A[l, l - 1] = zero
                    break
                l -= 1
            x = A[nn, nn]
            if l == nn:
                wr[nn] = x + t
                wi[nn] = zero
                nn -= 1
                break
            y = A[nn - 1, nn - 1]
            w = A[nn, nn - 1] * A[nn - 1, nn]
            if l == nn - 1:
                p = (y - x) / 2
                q = p * p + w
                z = gmpy2.sqrt(abs(q))
                x = x + t
                if q >= 0:
                    z = p + _sign(z, p)
                    wr[nn - 1] = wr[nn] = x + z
                    if z != 0:
                        wr[nn] = x - w / z
                    wi[nn - 1] = wi[nn] = zero
                else:
                    wr[nn - 1] = wr[nn] = x + p
                    wi[nn - 1] = -z
                    wi[nn] = z
                nn -= 2
                break
            if its >= max_sweeps:
                raise EigenNonconvergence(f"no deflation after {its} sweeps")
            if its and its % 10 == 0:
                # exceptional shift
                t += x
                for i in range(nn + 1):
                    A[i, i] -= x
                s = abs(A[nn, nn - 1]) + abs(A[nn - 1, nn - 2])
                x = y = s * mpfr(0.75)
                w = -mpfr(0.4375) * s * s
            its += 1
            m = nn - 2
            while m >= l:
                z = A[m, m]
                r = x - z
                s = y - z
                p = (r * s - w) / A[m + 1, m] + A[m, m + 1]
                q = A[m + 1, m + 1] - z - r - s
                r = A[m + 2, m + 1]
                s = abs(p) + abs(q) + abs(r)
                p, q, r = p / s, q / s, r / s
                if m == l:
                    break
                u = abs(A[m, m - 1]) * (abs(q) + abs(r))
                v = abs(p) * (abs(A[m - 1, m - 1]) + abs(z) + abs(A[m + 1, m + 1]))
                if u <= eps * v:
                    break
                m -= 1
            for i in range(m + 2, nn + 1):
                A[i, i - 2] = zero
                if i != m + 2:
                    A[i, i - 3] = zero
            k = m
            while k <= nn - 1:
                if k != m:
                    p = A[k, k - 1]
                    q = A[k + 1, k - 1]
                    r = A[k + 2, k - 1] if k != nn - 1 else zero
                    x = abs(p) + abs(q) + abs(r)
                    if x != 0:
                        p, q, r = p / x, q / x, r / x
                s = _sign(gmpy2.sqrt(p * p + q * q + r * r), p)
                if s != 0:
                    if k == m:
                        if l != m:
                            A[k, k - 1] = -A[k, k - 1]
                    else:
                        A[k, k - 1] = -s * x
                    p = p + s
                    x = p / s
                    y = q / s
                    z = r / s
                    q = q / p
                    r = r / p
                    # rows k..k+2, columns k..nn
                    if k != nn - 1:
                        pr = A[k, k:nn + 1] + q * A[k + 1, k:nn + 1] + r * A[k + 2, k:nn + 1]
                        A[k + 2, k:nn + 1] = A[k + 2, k:nn + 1] - pr * z
                    else:
                        pr = A[k, k:nn + 1] + q * A[k + 1, k:nn + 1]
                    A[k + 1, k:nn + 1] = A[k + 1, k:nn + 1] - pr * y
                    A[k, k:nn + 1] = A[k, k:nn + 1] - pr * x
                    # columns k..k+2, rows l..min(nn, k+3)
                    mmin = min(nn, k + 3)
                    if k != nn - 1:
                        pc = x * A[l:mmin + 1, k] + y * A[l:mmin + 1, k + 1] + z * A[l:mmin + 1, k + 2]
                        A[l:mmin + 1, k + 2] = A[l:mmin + 1, k + 2] - pc * r
                    else:
                        pc = x * A[l:mmin + 1, k] + y * A[l:mmin + 1, k + 1]
                    A[l:mmin + 1, k + 1] = A[l:mmin + 1, k + 1] - pc * q
                    A[l:mmin + 1, k] = A[l:mmin + 1, k] - pc
                k += 1
    return [mpc(a, b) for a, b in zip(wr, wi)]


def _comqr(A, bits, max_sweeps):
    """Eigenvalues of a complex upper Hessenberg matrix, implicit single-shift QR."""
    n = A.shape[0]
    eps = mpfr(2) ** (-(bits - 2))
    out = [None] * n
    nn = n - 1
    zero = mpc(0)
    while nn >= 0:
        its = 0
        while True:
            l = nn
            while l >= 1:
                s = abs(A[l - 1, l - 1]) + abs(A[l, l])
                if abs(A[l, l - 1]) <= eps * s:
                    A[l, l - 1] = zero
                    break
                l -= 1
            if l == nn:
                out[nn] = A[nn, nn]
                nn -= 1
                break
            if l == nn - 1:
                a, b, c, d = A[nn - 1, nn - 1], A[nn - 1, nn], A[nn, nn - 1], A[nn, nn]
                tr2 = (a + d) / 2
                disc = gmpy2.sqrt(((a - d) / 2) ** 2 + b * c)
                out[nn - 1] = tr2 + disc
                out[nn] = tr2 - disc
                nn -= 2
                break
            if its >= max_sweeps:
                raise EigenNonconvergence(f"no deflation after {its} sweeps")
            its += 1
            if its % 10 == 0:
                mu = A[nn, nn] + abs(A[nn, nn - 1].real) + abs(A[nn - 1, nn - 2].real)
            else:
                a, b, c, d = A[nn - 1, nn - 1], A[nn - 1, nn], A[nn, nn - 1], A[nn, nn]
                tr2 = (a + d) / 2
                disc = gmpy2.sqrt(((a - d) / 2) ** 2 + b * c)
                l1, l2 = tr2 + disc, tr2 - disc
                mu = l1 if abs(l1 - d) < abs(l2 - d) else l2
            x = A[l, l] - mu
            y = A[l + 1, l]
            for k in range(l, nn):
                if k > l:
                    x = A[k, k - 1]
                    y = A[k + 1, k - 1]
                ax = abs(x)
                rho = gmpy2.sqrt(ax * ax + gmpy2.norm(y))
                if rho == 0:
                    continue
                if ax == 0:
                    c, s = mpfr(0), mpc(1)
                else:
                    c = ax / rho
                    s = (x / ax) * y.conjugate() / rho
                sc = s.conjugate()
                j0 = max(l, k - 1)
                rk = A[k, j0:nn + 1]
                rk1 = A[k + 1, j0:nn + 1]
                A[k, j0:nn + 1], A[k + 1, j0:nn + 1] = c * rk + s * rk1, c * rk1 - sc * rk
                i1 = min(k + 2, nn) + 1
                ck = A[l:i1, k]
                ck1 = A[l:i1, k + 1]
                A[l:i1, k], A[l:i1, k + 1] = c * ck + sc * ck1, c * ck1 - s * ck
                if k > l:
                    A[k + 1, k - 1] = zero
    return out


def eigenvalues(M, bits: int = 256) -> list:
    """All eigenvalues of a square matrix at ``bits`` of working precision.

    Lower Hessenberg input is transposed, other non-Hessenberg input is
    reduced by stabilized elimination. Real matrices use the Francis double
    shift, complex ones a single Wilkinson shift. Raises EigenNonconvergence
    if an eigenvalue needs more than 40 n sweeps to deflate.
    """
    A, real = _to_object_matrix(M, bits)
    n = A.shape[0]
    if n == 0:
        return []
    with workprec(bits):
        if not _is_upper_hessenberg(A):
            if _is_upper_hessenberg(A.T):
                A = A.T.copy()
            else:
                A = _hessenberg(A)
        if n == 1:
            return [to_mpc(A[0, 0])]
        sweeps = 40 * n
        vals = _hqr(A, bits, sweeps) if real else _comqr(A, bits, sweeps)
        return [+v for v in vals]


# --- zeros of partial sums -------------------------------------------------------

def _scale_at(values, nu, n, t):
    # max_k |a_k q_k(it)|
    x = mpc(0, 2) * t
    q0, q1 = mpc(1), -x
    best = abs(values[0])
    if n >= 1:
        best = max(best, abs(values[1] * q1))
    for k in range(1, n):
        q0, q1 = q1, ((k + nu - 1) * q0 - x * q1) / (k + 1)
        best = max(best, abs(values[k + 1] * q1))
    return best


def _newton(values, nu, n, t, scale_fn, max_step):
    start = t
    for _ in range(20):
        s, ds = clenshaw(values, nu, t, n, derivative=True)
        if abs(s) < REFINE_TOL * scale_fn(t) or ds == 0:
            break
        t = t - s / ds
        if abs(t - start) > max_step:
            return start
    return t


def _classify(zeros, conj_symmetric, tol):
    cls = []
    for z in zeros:
        cls.append("real" if abs(z.imag) < tol * (1 + abs(z)) else "complex")
    if conj_symmetric:
        used = set()
        for i, z in enumerate(zeros):
            if cls[i] != "complex" or i in used:
                continue
            zc = z.conjugate()
            best, bj = None, None
            for j, w in enumerate(zeros):
                if j != i and j not in used and cls[j] == "complex":
                    d = abs(w - zc)
                    if best is None or d < best:
                        best, bj = d, j
            if bj is not None and best < mpfr(1e-6) * (1 + abs(z)):
                used.update((i, bj))
            elif abs(z.imag) < mpfr(1e-3) * (1 + abs(z)):
                # an unpaired near-real zero of a conjugate-symmetric S_n is real
                cls[i] = "real"
    return cls


def zeros_of_partial_sum(coeffs: CoeffSeries, n: int, refine: bool = True, eig_bits: int | None = None,
                         balance_exponent: float | None = None, real_tol: float = REAL_TOL) -> ZeroSet:
    """Zeros of S_n as eigenvalues of the (balanced) companion matrix divided by 2i.

    The eigensolve runs at ``eig_bits``, by default the coefficient precision
    for n <= 100 and twice that above. Refinement is Newton on S_n with
    Clenshaw values and derivatives.
    """
    B = build_companion(coeffs, n)
    bits = eig_bits or (coeffs.precision_bits * 2 if n > 100 else coeffs.precision_bits)
    a = estimate_balance_exponent(coeffs, n) if balance_exponent is None else balance_exponent
    Bb = balance(B, a)
    lam = eigenvalues(Bb.entries, bits)
    with workprec(bits):
        nu = to_mpfr(coeffs.nu)
        values = [to_mpc(v) for v in coeffs.values[: n + 1]]
        zeros = [l / mpc(0, 2) for l in lam]

        def scale_fn(t):
            return _scale_at(values, nu, n, t)

        if refine:
            refined = []
            for i, z in enumerate(zeros):
                gap = min((abs(z - w) for j, w in enumerate(zeros) if j != i), default=mpfr(1))
                refined.append(_newton(values, nu, n, z, scale_fn, gap / 4))
            zeros = refined
        symmetric = _is_even_real_series(values)
        residuals = tuple(abs(clenshaw(values, nu, z, n)) for z in zeros)
        scales = tuple(scale_fn(z) for z in zeros)
        cls = _classify(zeros, symmetric, real_tol)
        order = sorted(range(n), key=lambda i: (float(zeros[i].real), float(zeros[i].imag)))
    return ZeroSet(tuple(zeros[i] for i in order), tuple(residuals[i] for i in order),
                   tuple(scales[i] for i in order), n, tuple(cls[i] for i in order), real_tol, bits,
                   symmetric)


def gerschgorin_disks(B) -> list:
    """(center, radius) per column; radius is the off-diagonal absolute column sum."""
    M = B.entries if isinstance(B, CompanionMatrix) else np.asarray(B, dtype=object)
    n = M.shape[0]
    out = []
    for j in range(n):
        r = sum(abs(M[i, j]) for i in range(n) if i != j)
        out.append((M[j, j], r))
    return out


def gerschgorin_bound(B) -> mpfr:
    """max_j (|b_jj| + r_j): every eigenvalue has modulus at most this."""
    return max(abs(c) + r for c, r in gerschgorin_disks(B))


def in_gerschgorin_union(lam, disks, slack=0) -> bool:
    return any(abs(lam - c) <= r * (1 + slack) + slack for c, r in disks)


def square_sum_predicted(coeffs: CoeffSeries, n: int, nu=None) -> mpc:
    """-tr(B_n^2)/4 = (1/2) sum_{k<n} k(k+nu-1) + (1/2) n(n-1) a_{n-2}/a_n - (1/4)(n a_{n-1}/a_n)^2."""
    if n < 2:
        raise ValueError("n must be >= 2")
    a = coeffs.values
    if a[n] == 0:
        raise ZeroLeadingCoefficient(f"a_{n} = 0")
    with workprec(coeffs.precision_bits):
        v = to_mpfr(coeffs.nu if nu is None else nu)
        poly = sum(k * (k + v - 1) for k in range(1, n)) / 2
        return poly + n * (n - 1) * a[n - 2] / a[n] / 2 - (n * a[n - 1] / a[n]) ** 2 / 4


def square_sum_printed(coeffs: CoeffSeries, n: int) -> mpc:
    """(1/24) n(n-1)(4n+1) + (1/2)(n-1) a_{n-2}/a_n, the nu=3/2 even-series form without the factor n."""
    a = coeffs.values
    with workprec(coeffs.precision_bits):
        return mpfr(n * (n - 1) * (4 * n + 1)) / 24 + (n - 1) * a[n - 2] / a[n] / 2


def square_sum_observed(zs: ZeroSet) -> mpc:
    with workprec(zs.bits):
        return sum((z * z for z in zs.zeros), mpc(0))
