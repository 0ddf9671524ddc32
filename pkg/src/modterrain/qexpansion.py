"""Modular form evaluation from q-expansions.

The discriminant form Delta is available two independent ways: as the
infinite product q*prod((1-q^n)^24) and as the series sum(tau(n) q^n) with
exact integer coefficients expanded from the product. Arbitrary forms
evaluate from stored coefficient lists. Accuracy comes from three levers:
fundamental-domain reduction (level 1), a truncation bound driven by a
coefficient-growth majorant, and precision escalation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import gmpy2

from . import moebius
from .errors import (
    BelowEvaluationFloorError,
    EvaluationError,
    InsufficientCoefficientsError,
    TooCloseToBoundaryError,
    UpperHalfPlaneError,
)
from .numerics import (
    APComplex,
    MIN_PRECISION_BITS,
    cexp,
    context_for,
    escalate,
    polar,
    two_pi_i,
)

ZERO = Fraction(0)
ONE = Fraction(1)

TRUNCATION_TERM_LIMIT = 10 ** 6


@dataclass(frozen=True)
class FormDescriptor:
    """A modular form: label, level, weight, and q-expansion coefficients.

    Coefficients are exact rationals (re, im) for n = 1..coefficient_count,
    converted to binary floats only at evaluation time so that precision
    escalation can re-convert at any width.
    """

    label: str
    level: int
    weight: int
    coefficients: tuple
    has_real_coefficients: bool = True

    def __post_init__(self):
        if self.level < 1:
            raise ValueError(f"level must be >= 1, got {self.level}")
        if len(self.coefficients) < 1:
            raise ValueError("at least one coefficient is required")
        a1 = self.coefficients[0]
        if a1 != (ONE, ZERO):
            raise ValueError(f"newform normalization a_1 = 1 violated: {a1}")
        really_real = all(im == 0 for _, im in self.coefficients)
        if really_real != self.has_real_coefficients:
            raise ValueError("has_real_coefficients flag contradicts the data")
        object.__setattr__(self, "_converted", {})

    @property
    def coefficient_count(self) -> int:
        return len(self.coefficients)

    def coefficients_at(self, bits: int) -> list:
        """Coefficients as MPC values rounded to ``bits`` (cached)."""
        cached = self._converted.get(bits)
        if cached is None:
            ctx = context_for(bits)
            zero = gmpy2.mpfr(0)
            cached = [
                gmpy2.mpc(ctx.add(zero, gmpy2.mpq(re)),
                          ctx.add(zero, gmpy2.mpq(im)), bits)
                for re, im in self.coefficients
            ]
            self._converted[bits] = cached
        return cached

    def __getstate__(self):
        state = {f: getattr(self, f) for f in
                 ("label", "level", "weight", "coefficients", "has_real_coefficients")}
        return state

    def __setstate__(self, state):
        for k, v in state.items():
            object.__setattr__(self, k, v)
        object.__setattr__(self, "_converted", {})


@dataclass(frozen=True)
class EvalOptions:
    """Accuracy and precision policy for form evaluation."""

    target_rel_err: float = 1e-12
    initial_bits: int = MIN_PRECISION_BITS
    max_bits: int = 1024
    y_floor: float = 0.05

    def __post_init__(self):
        if not 0 < self.target_rel_err < 1:
            raise ValueError("target_rel_err must be in (0, 1)")
        if self.initial_bits > self.max_bits:
            raise ValueError("initial_bits must not exceed max_bits")
        if not self.y_floor > 0:
            raise ValueError("y_floor must be positive")


# --- exact Delta coefficients -------------------------------------------------

def _square_truncated(series: list, length: int) -> list:
    out = [0] * length
    nonzero = [(i, a) for i, a in enumerate(series) if a]
    for pos, (i, ai) in enumerate(nonzero):
        if 2 * i < length:
            out[2 * i] += ai * ai
        for j, aj in nonzero[pos + 1:]:
            if i + j >= length:
                break
            out[i + j] += 2 * ai * aj
    return out


def delta_coefficients(n_max: int) -> list:
    """Exact Ramanujan tau values tau(1..n_max) as Python integers.

    Expands q*prod((1-q^n)^24) formally: the cube of the Euler product is
    the sparse Jacobi series sum((-1)^k (2k+1) q^(k(k+1)/2)), and three
    truncated squarings raise it to the 24th power.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    length = n_max  # need prod^24 up to q^(n_max-1)
    cube = [0] * length
    k = 0
    while k * (k + 1) // 2 < length:
        cube[k * (k + 1) // 2] = (-1) ** k * (2 * k + 1)
        k += 1
    p6 = _square_truncated(cube, length)
    p12 = _square_truncated(p6, length)
    p24 = _square_truncated(p12, length)
    return p24  # tau(n) = coefficient of q^(n-1) in prod^24


def delta_form(n_terms: int = 1000) -> FormDescriptor:
    """Descriptor for the discriminant form (label 1.12.a.a)."""
    taus = delta_coefficients(n_terms)
    coeffs = tuple((Fraction(t), ZERO) for t in taus)
    return FormDescriptor("1.12.a.a", 1, 12, coeffs, True)


# --- direct evaluation --------------------------------------------------------

def _require_upper(z: APComplex):
    if not z.im > 0:
        raise UpperHalfPlaneError(f"Im(z) must be positive, got {z.im}")


def delta_product(z: APComplex, num_factors: int) -> APComplex:
    """Delta(z) as q * prod_{n=1..num_factors} (1-q^n)^24."""
    _require_upper(z)
    if num_factors < 1:
        raise ValueError("num_factors must be >= 1")
    bits = z.precision_bits
    ctx = context_for(bits)
    q = cexp(two_pi_i(bits) * z)._val
    one = gmpy2.mpc(1, 0, bits)
    acc = q
    q_pow = q
    for n in range(1, num_factors + 1):
        if n > 1:
            q_pow = ctx.mul(q_pow, q)
        factor = ctx.sub(one, q_pow)
        # (1-q^n)^24 = (((1-q^n)^2)^2 * (1-q^n))^... use pow, cheap and exact enough
        acc = ctx.mul(acc, ctx.pow(factor, 24))
    return APComplex._raw(gmpy2.mpc(acc, precision=bits), bits)


def eval_series(form: FormDescriptor, z: APComplex, n_terms: int) -> APComplex:
    """Horner evaluation of sum_{n=1..n_terms} a_n q^n at z."""
    _require_upper(z)
    if n_terms < 1:
        raise ValueError("n_terms must be >= 1")
    if n_terms > form.coefficient_count:
        raise InsufficientCoefficientsError(n_terms, form.coefficient_count)
    bits = z.precision_bits
    ctx = context_for(bits)
    coeffs = form.coefficients_at(bits)
    q = cexp(two_pi_i(bits) * z)._val
    acc = coeffs[n_terms - 1]
    for n in range(n_terms - 2, -1, -1):
        acc = ctx.add(ctx.mul(acc, q), coeffs[n])
    acc = ctx.mul(acc, q)
    return APComplex._raw(gmpy2.mpc(acc, precision=bits), bits)


# --- truncation analysis ------------------------------------------------------

@lru_cache(maxsize=4096)
def truncation_terms(y: float, weight: int, target_rel_err: float) -> int:
    """Smallest N with majorant tail sum_{n>N} n^weight e^(-2 pi n y) below
    target_rel_err * e^(-2 pi y).

    The majorant takes coefficient growth |a_n| <= n^weight (conservative
    against the true n^((k-1)/2) d(n) bound), and the comparison scale is
    the leading series term. Computed by direct summation of the majorant.
    Raises TooCloseToBoundaryError when more than 10^6 terms would be
    needed; callers should reduce into the fundamental domain instead.
    """
    y = float(y)
    if not y > 0:
        raise ValueError(f"y must be positive, got {y}")
    if not 0 < target_rel_err < 1:
        raise ValueError("target_rel_err must be in (0, 1)")
    w = int(weight)

    # quick closed-form screen: if the single term at the limit still tops
    # the threshold the full sum certainly does
    log_thresh = math.log(target_rel_err) - 2 * math.pi * y
    n_lim = TRUNCATION_TERM_LIMIT
    if w * math.log(n_lim) - 2 * math.pi * y * n_lim > log_thresh:
        raise TooCloseToBoundaryError(
            f"majorant needs more than {n_lim} terms at y = {y}"
        )

    ctx = context_for(64)
    e = ctx.exp(gmpy2.mpfr(-2 * math.pi * y, 64))
    threshold = ctx.mul(gmpy2.mpfr(target_rel_err, 64), e)
    terms = []
    e_pow = gmpy2.mpfr(1)
    n = 0
    remainder = None
    while True:
        n += 1
        e_pow = ctx.mul(e_pow, e)
        t = ctx.mul(ctx.pow(gmpy2.mpfr(n), w), e_pow)
        terms.append(t)
        ratio = ctx.mul(gmpy2.mpfr((1 + 1 / n) ** w), e)
        if ratio < 1:
            bound = ctx.div(ctx.mul(t, ratio), ctx.sub(gmpy2.mpfr(1), ratio))
            if bound < ctx.mul(threshold, gmpy2.mpfr(1e-9)):
                remainder = bound
                break
        if n > 2 * TRUNCATION_TERM_LIMIT:
            raise TooCloseToBoundaryError(
                f"majorant failed to converge within {n} terms at y = {y}"
            )

    tail = remainder
    n_smallest = len(terms)
    for idx in range(len(terms) - 1, -1, -1):
        new_tail = ctx.add(tail, terms[idx])
        if new_tail < threshold:
            tail = new_tail
            n_smallest = idx  # tail beyond N = idx is still below threshold
        else:
            break
    if n_smallest > TRUNCATION_TERM_LIMIT:
        raise TooCloseToBoundaryError(
            f"majorant needs {n_smallest} terms at y = {y}"
        )
    return n_smallest


def _terms_bucketed(y: float, weight: int, target_rel_err: float) -> int:
    """truncation_terms at y rounded *down* to 1/64 so grid evaluations hit
    the cache; a smaller y only ever demands more terms, which stays safe."""
    yq = math.floor(y * 64) / 64
    if yq <= 0:
        yq = y
    return truncation_terms(yq, weight, target_rel_err)


# --- reduced / level-N evaluation --------------------------------------------

def eval_reduced_at_bits(form: FormDescriptor, z: APComplex, bits: int,
                         target_rel_err: float) -> APComplex:
    """One fixed-precision evaluation via fundamental-domain reduction.

    This is the pure function the escalation ladder reruns: reduce z, pick
    the truncation from the reduced height, evaluate the series there, then
    strip the automorphy factor: f(z) = f(mz) / (cz+d)^k.
    """
    if form.level != 1:
        raise EvaluationError(
            f"reduction-based evaluation requires level 1, got {form.level}"
        )
    zb = z.with_precision(bits)
    red = moebius.reduce(zb)
    n_terms = _terms_bucketed(float(red.z_reduced.im), form.weight, target_rel_err)
    value = eval_series(form, red.z_reduced, n_terms)
    factor = moebius.automorphy_factor(red.matrix, zb, form.weight)
    return value / factor


def _value_floor(y_leading: float, target_rel_err: float, extra_scale=None):
    """Absolute agreement floor target * e^(-2 pi y): the leading-term scale.

    Keeps the escalation ladder from chasing exact zeros of a form forever.
    """
    ctx = context_for(64)
    floor = ctx.mul(gmpy2.mpfr(target_rel_err),
                    ctx.exp(gmpy2.mpfr(-2 * math.pi * y_leading)))
    if extra_scale is not None:
        floor = ctx.mul(floor, extra_scale)
    return floor


def eval_reduced(form: FormDescriptor, z: APComplex, opts: EvalOptions) -> "EvalResult":
    """Evaluate a level-1 form anywhere in H, stable to opts.target_rel_err.

    Wraps eval_reduced_at_bits in the precision ladder and returns the
    polar form of the stabilized value.
    """
    _require_upper(z)
    if form.level != 1:
        raise EvaluationError(
            f"reduction-based evaluation requires level 1, got {form.level}"
        )
    probe = moebius.reduce(z.with_precision(MIN_PRECISION_BITS))
    ctx = context_for(64)
    den = probe.z_reduced.im / z.with_precision(MIN_PRECISION_BITS).im
    scale = ctx.pow(ctx.sqrt(den), form.weight)  # |cz+d|^-k = (y0/y)^(k/2)
    floor = _value_floor(float(probe.z_reduced.im), opts.target_rel_err, scale)

    used = []

    def compute(bits):
        used.append(bits)
        return eval_reduced_at_bits(form, z, bits, opts.target_rel_err)

    value = escalate(compute, opts.initial_bits, opts.max_bits,
                     opts.target_rel_err, abs_floor=floor)
    return EvalResult(polar(value), value, used[-1])


def eval_general_level(form: FormDescriptor, z: APComplex,
                       opts: EvalOptions) -> "EvalResult":
    """Evaluate any form by translation-only normalization.

    Only the q-periodicity f(z+1) = f(z) is exploited; no inversion is
    available off level 1, so Im(z) must clear opts.y_floor. Character
    factors for level-N functional equations are deliberately not modeled.
    """
    _require_upper(z)
    n = int(gmpy2.rint(z.re))
    zt = z - n if n else z
    y = float(zt.im)
    if y < opts.y_floor:
        raise BelowEvaluationFloorError(
            f"Im(z) = {y} is below the evaluation floor {opts.y_floor}"
        )
    n_terms = _terms_bucketed(y, form.weight, opts.target_rel_err)
    if n_terms > form.coefficient_count:
        raise InsufficientCoefficientsError(n_terms, form.coefficient_count)
    floor = _value_floor(y, opts.target_rel_err)

    used = []

    def compute(bits):
        used.append(bits)
        return eval_series(form, zt.with_precision(bits), n_terms)

    value = escalate(compute, opts.initial_bits, opts.max_bits,
                     opts.target_rel_err, abs_floor=floor)
    return EvalResult(polar(value), value, used[-1])


@dataclass(frozen=True)
class EvalResult:
    """Polar value plus the complex value and final precision that made it."""

    polar: object
    value: APComplex
    precision_bits: int

    @property
    def r(self):
        return self.polar.r

    @property
    def theta(self):
        return self.polar.theta
