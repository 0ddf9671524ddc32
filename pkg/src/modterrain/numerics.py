"""Arbitrary-precision complex arithmetic with explicit working precision.

Every value carries its mantissa width in bits; arithmetic between two
values runs at the wider of the two precisions and the result records that
width. MPFR/MPC (via gmpy2) back the representation, so exponent range is
effectively unbounded and rounding is correct to 1/2 ulp per operation.

Precision never drops below 53 bits (hardware-double equivalent). The
escalation ladder doubles precision, 53 -> 128 -> 256 -> 512 -> 1024, until
two successive runs of a computation agree.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import gmpy2

from .errors import PrecisionEscalationError

MIN_PRECISION_BITS = 53

_contexts: dict[int, gmpy2.context] = {}


def context_for(bits: int) -> gmpy2.context:
    """Return a cached rounding context with the given mantissa width."""
    if bits < MIN_PRECISION_BITS:
        raise ValueError(f"precision must be >= {MIN_PRECISION_BITS} bits, got {bits}")
    ctx = _contexts.get(bits)
    if ctx is None:
        ctx = gmpy2.context(precision=bits)
        _contexts[bits] = ctx
    return ctx


def next_rung(bits: int) -> int:
    """Next step of the doubling precision ladder (53 jumps to 128)."""
    return 128 if bits < 128 else 2 * bits


def _to_mpfr(x, bits: int):
    if isinstance(x, str):
        return gmpy2.mpfr(x, bits)
    if isinstance(x, Fraction):
        x = gmpy2.mpq(x)
    # adding to an exact zero rounds x to the context width
    return context_for(bits).add(gmpy2.mpfr(0), x)


class APComplex:
    """Immutable complex number with an explicit precision in bits.

    The real and imaginary parts are MPFR floats rounded to
    ``precision_bits``. Instances are hashable and safe to share between
    threads.
    """

    __slots__ = ("_val", "_bits")

    def __init__(self, re=0, im=0, precision_bits: int = MIN_PRECISION_BITS):
        if isinstance(re, complex):
            if im != 0:
                raise TypeError("pass a complex OR separate re/im, not both")
            re, im = re.real, re.imag
        self._val = gmpy2.mpc(_to_mpfr(re, precision_bits),
                              _to_mpfr(im, precision_bits),
                              precision_bits)
        self._bits = precision_bits

    @classmethod
    def _raw(cls, val, bits: int) -> "APComplex":
        z = object.__new__(cls)
        z._val = val
        z._bits = bits
        return z

    @property
    def re(self):
        return self._val.real

    @property
    def im(self):
        return self._val.imag

    @property
    def precision_bits(self) -> int:
        return self._bits

    def with_precision(self, bits: int) -> "APComplex":
        """Re-round to a new width. Widening pads with zero bits exactly."""
        return APComplex._raw(gmpy2.mpc(_to_mpfr(self._val.real, bits),
                                        _to_mpfr(self._val.imag, bits),
                                        bits), bits)

    def __complex__(self) -> complex:
        return complex(float(self._val.real), float(self._val.imag))

    def __repr__(self) -> str:
        return f"APComplex({self._val.real!r}, {self._val.imag!r}, bits={self._bits})"

    def __eq__(self, other) -> bool:
        if isinstance(other, APComplex):
            return self._val == other._val
        if isinstance(other, (int, float, complex)):
            return self._val == other
        return NotImplemented

    def __hash__(self):
        return hash(self._val)

    # arithmetic: result precision is the max of the operand precisions

    def _binop(self, other, op_name: str, swap: bool = False):
        if isinstance(other, APComplex):
            bits = max(self._bits, other._bits)
            rhs = other._val
        elif isinstance(other, (int, float)):
            bits = self._bits
            rhs = other
        elif isinstance(other, Fraction):
            bits = self._bits
            rhs = gmpy2.mpq(other)
        elif isinstance(other, complex):
            bits = self._bits
            rhs = gmpy2.mpc(other)
        elif isinstance(other, (type(gmpy2.mpfr(0)), type(gmpy2.mpq(0)), type(gmpy2.mpz(0)))):
            bits = self._bits
            rhs = other
        else:
            return NotImplemented
        ctx = context_for(bits)
        op = getattr(ctx, op_name)
        val = op(rhs, self._val) if swap else op(self._val, rhs)
        return APComplex._raw(gmpy2.mpc(val, precision=bits), bits)

    def __add__(self, other):
        return self._binop(other, "add")

    __radd__ = __add__

    def __sub__(self, other):
        return self._binop(other, "sub")

    def __rsub__(self, other):
        return self._binop(other, "sub", swap=True)

    def __mul__(self, other):
        return self._binop(other, "mul")

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self._binop(other, "div")

    def __rtruediv__(self, other):
        return self._binop(other, "div", swap=True)

    def __neg__(self):
        # negation is exact at any width; bypass context rounding
        return APComplex._raw(gmpy2.mpc(-gmpy2.mpfr(self._val.real, self._bits),
                                        -gmpy2.mpfr(self._val.imag, self._bits),
                                        self._bits), self._bits)

    def conjugate(self) -> "APComplex":
        return APComplex._raw(gmpy2.mpc(gmpy2.mpfr(self._val.real, self._bits),
                                        -gmpy2.mpfr(self._val.imag, self._bits),
                                        self._bits), self._bits)

    def abs(self):
        """Modulus as an MPFR float at this value's precision."""
        return context_for(self._bits).abs(self._val)

    def is_finite(self) -> bool:
        return gmpy2.is_finite(self._val)


@dataclass(frozen=True)
class PolarForm:
    """Magnitude/phase pair with theta in (-pi, pi]; theta of zero is 0."""

    r: object
    theta: object

    def __iter__(self):
        return iter((self.r, self.theta))


def polar(z: APComplex) -> PolarForm:
    """Polar decomposition r*e^(i*theta) of z at z's working precision."""
    ctx = context_for(z.precision_bits)
    r = ctx.abs(z._val)
    if r == 0:
        return PolarForm(r, gmpy2.mpfr(0))
    theta = ctx.phase(z._val)
    # MPFR's atan2 returns -pi for a negative real with -0 imaginary part;
    # fold that onto +pi so theta stays in (-pi, pi].
    if theta == -_pi(z.precision_bits):
        theta = -theta
    return PolarForm(r, theta)


def _pi(bits: int):
    return gmpy2.const_pi(precision=bits)


def two_pi_i(bits: int) -> APComplex:
    """The constant 2*pi*i rounded to the requested width."""
    ctx = context_for(bits)
    return APComplex._raw(gmpy2.mpc(gmpy2.mpfr(0), ctx.mul(_pi(bits), 2), bits), bits)


def cexp(z: APComplex) -> APComplex:
    """e^z at z's working precision.

    Raises OverflowError when the real part exceeds the exponent range;
    for points in the upper half-plane (where the q-expansion lives) the
    exponent is negative and this cannot happen.
    """
    ctx = context_for(z.precision_bits)
    val = ctx.exp(z._val)
    if not gmpy2.is_finite(val):
        raise OverflowError(f"exp overflow for Re(z) = {z.re}")
    return APComplex._raw(val, z.precision_bits)


def cpow_int(z: APComplex, k: int) -> APComplex:
    """z**k by binary exponentiation for integer k.

    Intermediate products carry guard bits so the rounded result agrees
    with exp(k*log z) to a few ulp. A zero base with negative k raises
    ZeroDivisionError.
    """
    bits = z.precision_bits
    if k == 0:
        return APComplex(1, 0, bits)
    if z._val == 0:
        if k < 0:
            raise ZeroDivisionError("0 cannot be raised to a negative power")
        return APComplex(0, 0, bits)
    guard = context_for(bits + 16)
    base = gmpy2.mpc(z._val, precision=bits + 16)
    n = abs(k)
    acc = None
    while n:
        if n & 1:
            acc = base if acc is None else guard.mul(acc, base)
        n >>= 1
        if n:
            base = guard.mul(base, base)
    if k < 0:
        acc = guard.div(gmpy2.mpc(1), acc)
    return APComplex._raw(gmpy2.mpc(acc, precision=bits), bits)


def agree(a: APComplex, b: APComplex, rel_tol, abs_floor=0) -> bool:
    """True when |a-b| <= rel_tol*max(|a|,|b|) or |a-b| <= abs_floor."""
    bits = max(a.precision_bits, b.precision_bits)
    ctx = context_for(bits)
    diff = ctx.abs(ctx.sub(a._val, b._val))
    if diff <= abs_floor:
        return True
    scale = max(ctx.abs(a._val), ctx.abs(b._val))
    return diff <= ctx.mul(gmpy2.mpfr(rel_tol), scale)


def escalate(compute: Callable[[int], APComplex],
             initial_bits: int,
             max_bits: int,
             rel_tol,
             abs_floor=0) -> APComplex:
    """Rerun ``compute(bits)`` at doubling precision until two successive
    results agree to ``rel_tol`` (relative) or ``abs_floor`` (absolute).

    Returns the higher-precision result of the first agreeing pair. Raises
    PrecisionEscalationError, carrying the last two disagreeing values, if
    the ladder reaches ``max_bits`` without agreement.
    """
    if initial_bits > max_bits:
        raise ValueError("initial_bits must not exceed max_bits")
    bits = max(initial_bits, MIN_PRECISION_BITS)
    prev = compute(bits)
    cur = prev
    while bits < max_bits:
        bits = min(next_rung(bits), max_bits)
        prev = cur
        cur = compute(bits)
        if agree(prev, cur, rel_tol, abs_floor):
            return cur
    raise PrecisionEscalationError(prev, cur, max_bits)
