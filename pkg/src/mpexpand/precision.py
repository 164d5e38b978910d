"""Working-precision plumbing on top of gmpy2.

Every numerical routine in the package takes a ``Precision`` and runs its
arithmetic inside ``workprec`` so results do not depend on the caller's
global context.
"""

from __future__ import annotations

import math
import os
from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction

import gmpy2
from gmpy2 import mpc, mpfr

DEFAULT_BITS = 256
ENV_BITS = "MPEXPAND_BITS"


@dataclass(frozen=True)
class Precision:
    bits: int = DEFAULT_BITS

    def __post_init__(self):
        if not isinstance(self.bits, int) or self.bits < 53:
            raise ValueError(f"precision must be an integer >= 53 bits, got {self.bits!r}")

    def scaled(self, factor: float = 2.0, extra: int = 0) -> "Precision":
        return Precision(int(math.ceil(self.bits * factor)) + extra)

    @property
    def eps(self) -> mpfr:
        return mpfr(2) ** (-self.bits)

    @property
    def digits(self) -> int:
        """Decimal digits that round-trip a value at this precision."""
        return int(math.ceil(self.bits * math.log10(2))) + 2

    @classmethod
    def from_env(cls, default: int = DEFAULT_BITS) -> "Precision":
        raw = os.environ.get(ENV_BITS)
        return cls(int(raw)) if raw else cls(default)


def as_precision(p) -> Precision:
    if p is None:
        return Precision()
    if isinstance(p, Precision):
        return p
    return Precision(int(p))


@contextmanager
def workprec(bits: int):
    with gmpy2.context(gmpy2.get_context(), precision=bits,
                       real_prec=bits, imag_prec=bits,
                       allow_complex=False):
        yield


def to_mpfr(x) -> mpfr:
    """Convert int, float, Fraction, str or gmpy2 types at the current precision."""
    if isinstance(x, Fraction):
        return mpfr(x.numerator) / x.denominator
    if isinstance(x, mpc):
        if x.imag != 0:
            raise ValueError(f"expected a real value, got {x}")
        return mpfr(x.real)
    if isinstance(x, complex):
        if x.imag != 0:
            raise ValueError(f"expected a real value, got {x}")
        return mpfr(x.real)
    if hasattr(x, "_mpf_"):
        sign, man, exp, _ = x._mpf_
        if not man:
            return mpfr(0)
        v = gmpy2.mul_2exp(mpfr(man), exp)
        return -v if sign else v
    return mpfr(x)


def to_mpc(z) -> mpc:
    if isinstance(z, mpc):
        return +z
    if isinstance(z, complex):
        return mpc(mpfr(z.real), mpfr(z.imag))
    if hasattr(z, "_mpc_"):
        return mpc(to_mpfr(z.real), to_mpfr(z.imag))
    if isinstance(z, str):
        return mpc(z.replace(" ", "").replace("i", "j"))
    return mpc(to_mpfr(z), 0)


def is_zero(z) -> bool:
    return gmpy2.is_zero(z.real) and gmpy2.is_zero(z.imag) if isinstance(z, mpc) else gmpy2.is_zero(z)


def real_str(x: mpfr, digits: int) -> str:
    """Deterministic scientific notation with ``digits`` significant digits."""
    if gmpy2.is_zero(x):
        return "0"
    if not gmpy2.is_finite(x):
        raise ValueError("non-finite value")
    mant, exp, _ = x.digits(10, digits)
    sign = ""
    if mant.startswith("-"):
        sign, mant = "-", mant[1:]
    mant = mant.rstrip("0") or "0"
    e = exp - 1
    body = mant[0] + ("." + mant[1:] if len(mant) > 1 else "")
    return f"{sign}{body}e{e:+d}"
