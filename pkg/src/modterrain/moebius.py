"""Integer matrix action on the upper half-plane.

Provides the SL(2,Z) reduction into the standard fundamental domain
{|Re z| <= 1/2, |z| >= 1} and the automorphy factor (cz+d)^k. Reduction
moves any point to a region where q-expansions converge rapidly while
recording the matrix that got it there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import gmpy2

from .errors import ReductionIterationError, UpperHalfPlaneError
from .numerics import APComplex, context_for, cpow_int


@dataclass(frozen=True)
class UnimodularMatrix:
    """2x2 integer matrix with determinant 1; acts on H by (az+b)/(cz+d)."""

    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        if self.a * self.d - self.b * self.c != 1:
            raise ValueError(f"determinant must be 1, got matrix {self.entries()}")

    def entries(self) -> tuple[int, int, int, int]:
        return (self.a, self.b, self.c, self.d)

    def __matmul__(self, other: "UnimodularMatrix") -> "UnimodularMatrix":
        return UnimodularMatrix(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inverse(self) -> "UnimodularMatrix":
        return UnimodularMatrix(self.d, -self.b, -self.c, self.a)

    @classmethod
    def identity(cls) -> "UnimodularMatrix":
        return cls(1, 0, 0, 1)

    @classmethod
    def translation(cls, n: int) -> "UnimodularMatrix":
        """T^n: z -> z + n."""
        return cls(1, n, 0, 1)

    @classmethod
    def inversion(cls) -> "UnimodularMatrix":
        """S: z -> -1/z."""
        return cls(0, -1, 1, 0)


IDENTITY = UnimodularMatrix.identity()
S = UnimodularMatrix.inversion()


@dataclass(frozen=True)
class ReductionResult:
    """Outcome of fundamental-domain reduction.

    ``matrix`` satisfies matrix . z_original = z_reduced, and ``steps``
    counts the inversions applied (0 when the point was already reduced).
    """

    z_reduced: APComplex
    matrix: UnimodularMatrix
    steps: int


def apply(m: UnimodularMatrix, z: APComplex) -> APComplex:
    """Moebius action (az+b)/(cz+d); preserves the upper half-plane."""
    if not z.im > 0:
        raise UpperHalfPlaneError(f"Im(z) must be positive, got {z.im}")
    num = z * m.a + m.b
    den = z * m.c + m.d
    return num / den


def default_epsilon(bits: int):
    """Boundary tolerance 2^(-bits/2) used to accept near-boundary points."""
    return gmpy2.mpfr(2, bits) ** (-(bits // 2))


def reduce(z: APComplex, epsilon=None) -> ReductionResult:
    """Translate-and-invert z into the standard fundamental domain.

    Repeatedly recenters Re(z) into [-1/2, 1/2] by integer translation
    (ties round half-to-even) and applies z -> -1/z while |z| < 1 - epsilon.
    Points within epsilon of the unit circle are accepted un-inverted so the
    loop terminates on the boundary arc.
    """
    if not z.im > 0:
        raise UpperHalfPlaneError(f"Im(z) must be positive, got {z.im}")
    bits = z.precision_bits
    ctx = context_for(bits)
    if epsilon is None:
        epsilon = default_epsilon(bits)
    else:
        epsilon = gmpy2.mpfr(epsilon, bits)
        if not epsilon >= 0 or epsilon >= 1:
            raise ValueError(f"epsilon must be in [0, 1), got {epsilon}")
    one_minus_eps = ctx.sub(gmpy2.mpfr(1), epsilon)

    y = float(z.im)
    cap = max(16, math.ceil(10.0 * (1.0 + max(0.0, math.log2(1.0 / y)))))

    cur = z
    acc = IDENTITY
    inversions = 0
    for _ in range(cap):
        n = int(gmpy2.rint(cur.re))
        if n != 0:
            cur = cur - n
            acc = UnimodularMatrix.translation(-n) @ acc
        if ctx.abs(cur._val) < one_minus_eps:
            cur = -1 / cur
            acc = S @ acc
            inversions += 1
        else:
            return ReductionResult(cur, acc, inversions)
    raise ReductionIterationError(
        f"no convergence after {cap} iterations from z = {z!r}"
    )


def automorphy_factor(m: UnimodularMatrix, z: APComplex, k: int) -> APComplex:
    """The weight-k multiplier (cz+d)^k relating f(mz) to f(z)."""
    if not z.im > 0:
        raise UpperHalfPlaneError(f"Im(z) must be positive, got {z.im}")
    return cpow_int(z * m.c + m.d, k)
