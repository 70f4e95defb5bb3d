"""Exact arithmetic in Q(sqrt 2) and small nonnegative integer matrices."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from typing import Union

Rational = Union[int, Fraction]


class NonPrimitive(ValueError):
    """Raised when no power of a matrix is strictly positive."""


def _frac(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, int):
        return Fraction(v)
    raise TypeError(f"expected int or Fraction, got {type(v).__name__}")


@total_ordering
class QuadNum:
    """The number a + b*sqrt(2) with rational a and b."""

    __slots__ = ("a", "b")

    def __init__(self, a: Rational = 0, b: Rational = 0):
        self.a = _frac(a)
        self.b = _frac(b)

    @staticmethod
    def coerce(v) -> QuadNum:
        if isinstance(v, QuadNum):
            return v
        return QuadNum(v, 0)

    def __add__(self, other) -> QuadNum:
        other = QuadNum.coerce(other)
        return QuadNum(self.a + other.a, self.b + other.b)

    __radd__ = __add__

    def __neg__(self) -> QuadNum:
        return QuadNum(-self.a, -self.b)

    def __sub__(self, other) -> QuadNum:
        return self + (-QuadNum.coerce(other))

    def __rsub__(self, other) -> QuadNum:
        return QuadNum.coerce(other) - self

    def __mul__(self, other) -> QuadNum:
        other = QuadNum.coerce(other)
        return QuadNum(self.a * other.a + 2 * self.b * other.b,
                       self.a * other.b + self.b * other.a)

    __rmul__ = __mul__

    def conj(self) -> QuadNum:
        return QuadNum(self.a, -self.b)

    def norm(self) -> Fraction:
        return self.a * self.a - 2 * self.b * self.b

    def __truediv__(self, other) -> QuadNum:
        other = QuadNum.coerce(other)
        n = other.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero in Q(sqrt 2)")
        p = self * other.conj()
        return QuadNum(p.a / n, p.b / n)

    def __rtruediv__(self, other) -> QuadNum:
        return QuadNum.coerce(other) / self

    def __pow__(self, k: int) -> QuadNum:
        if k < 0:
            return QuadNum(1) / (self ** -k)
        result, base = QuadNum(1), self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def sign(self) -> int:
        """Exact sign of a + b*sqrt(2)."""
        sa = (self.a > 0) - (self.a < 0)
        sb = (self.b > 0) - (self.b < 0)
        if sa == sb or sb == 0:
            return sa
        if sa == 0:
            return sb
        # opposite signs: compare a^2 with 2 b^2
        diff = self.a * self.a - 2 * self.b * self.b
        return sa if diff > 0 else sb

    def __abs__(self) -> QuadNum:
        return -self if self.sign() < 0 else self

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = QuadNum(other)
        if not isinstance(other, QuadNum):
            return NotImplemented
        return self.a == other.a and self.b == other.b

    def __lt__(self, other) -> bool:
        return (self - QuadNum.coerce(other)).sign() < 0

    def __hash__(self) -> int:
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b))

    def __bool__(self) -> bool:
        return bool(self.a) or bool(self.b)

    def __float__(self) -> float:
        return float(self.a) + float(self.b) * math.sqrt(2.0)

    def __repr__(self) -> str:
        return f"QuadNum({self.a}, {self.b})"

    def __str__(self) -> str:
        if self.b == 0:
            return str(self.a)
        if self.a == 0:
            return f"{self.b}*sqrt2"
        op = "+" if self.b > 0 else "-"
        return f"{self.a}{op}{abs(self.b)}*sqrt2"


SQRT2 = QuadNum(0, 1)


def quad_mul(p: QuadNum, q: QuadNum) -> QuadNum:
    return p * q


@dataclass(frozen=True)
class IntMatrix2:
    """A 2x2 matrix of nonnegative integers, row-major."""

    m00: int
    m01: int
    m10: int
    m11: int

    def __post_init__(self):
        for v in (self.m00, self.m01, self.m10, self.m11):
            if not isinstance(v, int) or v < 0:
                raise ValueError("IntMatrix2 entries must be nonnegative ints")

    @classmethod
    def from_rows(cls, rows) -> IntMatrix2:
        (a, b), (c, d) = rows
        return cls(int(a), int(b), int(c), int(d))

    @classmethod
    def identity(cls) -> IntMatrix2:
        return cls(1, 0, 0, 1)

    def rows(self) -> list[list[int]]:
        return [[self.m00, self.m01], [self.m10, self.m11]]

    def trace(self) -> int:
        return self.m00 + self.m11

    def det(self) -> int:
        return self.m00 * self.m11 - self.m01 * self.m10

    def apply(self, v: tuple[int, int]) -> tuple[int, int]:
        """Matrix times column vector."""
        return (self.m00 * v[0] + self.m01 * v[1], self.m10 * v[0] + self.m11 * v[1])

    def __matmul__(self, o: IntMatrix2) -> IntMatrix2:
        return mat_mul(self, o)


def mat_mul(p: IntMatrix2, q: IntMatrix2) -> IntMatrix2:
    return IntMatrix2(p.m00 * q.m00 + p.m01 * q.m10, p.m00 * q.m01 + p.m01 * q.m11,
                      p.m10 * q.m00 + p.m11 * q.m10, p.m10 * q.m01 + p.m11 * q.m11)


def mat_pow(M: IntMatrix2, k: int) -> IntMatrix2:
    if k < 0:
        raise ValueError("mat_pow needs k >= 0")
    result, base = IntMatrix2.identity(), M
    while k:
        if k & 1:
            result = mat_mul(result, base)
        base = mat_mul(base, base)
        k >>= 1
    return result


def is_primitive(M: IntMatrix2) -> bool:
    # for 2x2 nonnegative matrices, primitive iff M or M^2 is strictly positive
    for P in (M, mat_mul(M, M)):
        if min(P.m00, P.m01, P.m10, P.m11) > 0:
            return True
    return False


@dataclass(frozen=True)
class EigenPair:
    """Perron-Frobenius data: eigenvalue and positive left eigenvector (d1, d2)."""

    lam: QuadNum | float
    d: tuple
    exact: bool
    tolerance: float = 0.0


def _isqrt_exact(n: int) -> int | None:
    if n < 0:
        return None
    r = math.isqrt(n)
    return r if r * r == n else None


def _certified_root(M: IntMatrix2) -> tuple[float, float]:
    """Bracket the largest root of x^2 - tr x + det by exact sign changes."""
    tr, det = M.trace(), M.det()

    def charpoly(x: Fraction) -> Fraction:
        return x * x - tr * x + det

    disc = tr * tr - 4 * det
    lo = Fraction(tr, 2)  # the larger root lies above the vertex
    hi = Fraction(tr, 2) + Fraction(math.isqrt(disc) + 1, 2)
    assert charpoly(lo) <= 0 < charpoly(hi)
    while hi - lo > Fraction(1, 10 ** 15):
        mid = (lo + hi) / 2
        if charpoly(mid) <= 0:
            lo = mid
        else:
            hi = mid
    return float((lo + hi) / 2), float(hi - lo)


def pf_eigendata(M: IntMatrix2) -> EigenPair:
    """Perron-Frobenius eigenvalue and left eigenvector d with d M = lambda d.

    Exact in Q(sqrt 2) whenever the discriminant allows it, otherwise a float
    whose bracketing interval width is reported as the tolerance.
    """
    if not is_primitive(M):
        raise NonPrimitive(f"matrix {M.rows()} has no strictly positive power")
    tr, det = M.trace(), M.det()
    disc = tr * tr - 4 * det
    r = _isqrt_exact(disc)
    s = _isqrt_exact(disc // 2) if disc % 2 == 0 else None
    if r is not None:
        lam = QuadNum(Fraction(tr + r, 2))
    elif s is not None:
        lam = QuadNum(Fraction(tr, 2), Fraction(s, 2))
    else:
        val, width = _certified_root(M)
        d1 = (val - M.m11) / M.m01
        return EigenPair(val, (d1, 1.0), exact=False, tolerance=max(width, 1e-15))
    d1 = (lam - M.m11) / M.m01
    return EigenPair(lam, (d1, QuadNum(1)), exact=True)


def left_defect(M: IntMatrix2, e: EigenPair):
    """The vector d M - lambda d; zero for an exact eigenpair."""
    d1, d2 = e.d
    return (d1 * M.m00 + d2 * M.m10 - e.lam * d1, d1 * M.m01 + d2 * M.m11 - e.lam * d2)
