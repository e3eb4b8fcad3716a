"""Exact integer polynomial arithmetic.

Two shapes are needed: dense univariate polynomials in the transform
variable s, and sparse multivariate polynomials in the branch variables
z_i truncated at total degree 2.  All coefficients are Python ints, so
everything is exact at any magnitude.
"""

from __future__ import annotations

from dataclasses import dataclass, field

try:
    from gmpy2 import mpz
except ImportError:  # pragma: no cover - gmpy2 is a hard dependency in practice
    mpz = int


def _trim(coeffs: list[int]) -> tuple[int, ...]:
    n = len(coeffs)
    while n and coeffs[n - 1] == 0:
        n -= 1
    return tuple(coeffs[:n])


_offset_cache: dict[tuple[int, int], tuple] = {}


def _offsets(stride: int, count: int):
    key = (stride, count)
    hit = _offset_cache.get(key)
    if hit is None:
        half = 1 << (stride - 1)
        # sum of half * 2**(stride*t) for t < count, built without division
        offset = int.from_bytes(half.to_bytes(stride // 8, "little") * count, "little")
        hit = (half, mpz(offset))
        _offset_cache[key] = hit
    return hit


def pack_coeffs(coeffs, stride: int):
    """Evaluate a coefficient sequence at 2**stride, as an mpz.

    Equivalent to the polynomial's value at that point; linear-time via a
    byte buffer (each coefficient offset to non-negative fixed width).
    Requires |coeff| < 2**(stride-1) and stride % 8 == 0.
    """
    count = len(coeffs)
    if count == 0:
        return mpz(0)
    half, offset = _offsets(stride, count)
    width = stride // 8
    buf = b"".join(int(c + half).to_bytes(width, "little") for c in coeffs)
    return mpz(int.from_bytes(buf, "little")) - offset


def unpack_value(value, stride: int, count: int) -> list[int]:
    """Inverse of pack_coeffs for values whose balanced digits fit the
    stride; exactness is asserted by repacking."""
    half, offset = _offsets(stride, count)
    raw = int(value + offset)
    assert raw >= 0, "unpack underflow: stride too small"
    width = stride // 8
    buf = raw.to_bytes(width * count + 16, "little")
    out = [
        int.from_bytes(buf[t * width : (t + 1) * width], "little") - half
        for t in range(count)
    ]
    assert not any(buf[width * count :]), "unpack overflow: stride too small"
    return out


def _packed_mul(a, b) -> list[int]:
    """Exact convolution through one big-integer product.

    Coefficients are packed at a stride wide enough that no convolution
    coefficient can reach half the digit base; the product of the packed
    values is the packed convolution, recovered digit by digit.
    """
    bound = min(len(a), len(b)) * max(map(abs, a)) * max(map(abs, b))
    stride = ((bound.bit_length() + 10) // 8 + 1) * 8
    prod = pack_coeffs(a, stride) * pack_coeffs(b, stride)
    return unpack_value(prod, stride, len(a) + len(b) - 1)


@dataclass(frozen=True)
class UniPoly:
    """Dense univariate polynomial, coefficients in ascending powers."""

    coeffs: tuple[int, ...] = ()

    def __post_init__(self):
        if self.coeffs and self.coeffs[-1] == 0:
            object.__setattr__(self, "coeffs", _trim(list(self.coeffs)))

    @staticmethod
    def const(c: int) -> UniPoly:
        return UniPoly((c,) if c else ())

    @staticmethod
    def linear(c0: int, c1: int) -> UniPoly:
        """c0 + c1*s; handy for the primary factors (s - alpha)."""
        return UniPoly((c0, c1))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __add__(self, other: UniPoly) -> UniPoly:
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return UniPoly(_trim(out))

    def __neg__(self) -> UniPoly:
        return UniPoly(tuple(-c for c in self.coeffs))

    def __sub__(self, other: UniPoly) -> UniPoly:
        return self + (-other)

    def __mul__(self, other: UniPoly) -> UniPoly:
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return UniPoly()
        if len(a) * len(b) > 50:
            return UniPoly(_trim(_packed_mul(a, b)))
        out = [0] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    out[i + j] += ai * bj
        return UniPoly(_trim(out))

    def scale(self, c: int) -> UniPoly:
        if c == 0:
            return UniPoly()
        return UniPoly(tuple(c * x for x in self.coeffs))

    def shift(self, k: int) -> UniPoly:
        """Multiply by s**k."""
        if not self.coeffs:
            return self
        return UniPoly((0,) * k + self.coeffs)

    def divexact(self, other: UniPoly) -> UniPoly:
        """Exact division; raises if `other` does not divide exactly.

        Only used with monic-up-to-sign divisors, so no rationals appear.
        """
        if other.is_zero():
            raise ZeroDivisionError("division by zero polynomial")
        if self.is_zero():
            return UniPoly()
        rem = list(self.coeffs)
        den = other.coeffs
        lead = den[-1]
        dd = len(den) - 1
        out = [0] * (len(rem) - dd)
        for i in range(len(rem) - 1, dd - 1, -1):
            c = rem[i]
            if c == 0:
                continue
            q, r = divmod(c, lead)
            if r:
                raise ArithmeticError("inexact polynomial division")
            out[i - dd] = q
            for j, dj in enumerate(den):
                rem[i - dd + j] -= q * dj
        if any(rem):
            raise ArithmeticError("inexact polynomial division")
        return UniPoly(_trim(out))

    def evaluate(self, x: int) -> int:
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def max_abs_coeff(self) -> int:
        return max((abs(c) for c in self.coeffs), default=0)

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for k, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if k == 0:
                parts.append(str(c))
            elif k == 1:
                parts.append(f"{c}*s")
            else:
                parts.append(f"{c}*s^{k}")
        return " + ".join(reversed(parts))


ONE = UniPoly((1,))
ZERO = UniPoly()


def s_minus(alpha: int) -> UniPoly:
    return UniPoly((-alpha, 1))


def product(polys) -> UniPoly:
    acc = ONE
    for p in polys:
        acc = acc * p
    return acc


def det2x2(m) -> UniPoly:
    """Determinant of a 2x2 matrix of UniPoly: m[0][0]m[1][1] - m[0][1]m[1][0]."""
    return m[0][0] * m[1][1] - m[0][1] * m[1][0]


@dataclass(frozen=True)
class TruncPoly2:
    """Multivariate polynomial in the branch variables, truncated at total
    degree 2.

    `linear` maps branch index -> coefficient; `quadratic` maps an ordered
    pair (i, j) with i <= j -> coefficient.  Zero coefficients are never
    stored, so equality is structural.
    """

    constant: int = 0
    linear: dict[int, int] = field(default_factory=dict)
    quadratic: dict[tuple[int, int], int] = field(default_factory=dict)

    @staticmethod
    def const(c: int) -> TruncPoly2:
        return TruncPoly2(constant=c)

    @staticmethod
    def var(i: int) -> TruncPoly2:
        return TruncPoly2(linear={i: 1})

    def is_zero(self) -> bool:
        return self.constant == 0 and not self.linear and not self.quadratic

    def __add__(self, other: TruncPoly2) -> TruncPoly2:
        lin = dict(self.linear)
        for i, c in other.linear.items():
            v = lin.get(i, 0) + c
            if v:
                lin[i] = v
            else:
                lin.pop(i, None)
        quad = dict(self.quadratic)
        for ij, c in other.quadratic.items():
            v = quad.get(ij, 0) + c
            if v:
                quad[ij] = v
            else:
                quad.pop(ij, None)
        return TruncPoly2(self.constant + other.constant, lin, quad)

    def __sub__(self, other: TruncPoly2) -> TruncPoly2:
        return self + other.scale(-1)

    def scale(self, c: int) -> TruncPoly2:
        if c == 0:
            return TruncPoly2()
        return TruncPoly2(
            self.constant * c,
            {i: v * c for i, v in self.linear.items()},
            {ij: v * c for ij, v in self.quadratic.items()},
        )

    def __mul__(self, other: TruncPoly2) -> TruncPoly2:
        """Product with every total-degree >= 3 term discarded."""
        a0, b0 = self.constant, other.constant
        lin: dict[int, int] = {}
        quad: dict[tuple[int, int], int] = {}
        if b0:
            for i, c in self.linear.items():
                lin[i] = lin.get(i, 0) + c * b0
            for ij, c in self.quadratic.items():
                quad[ij] = quad.get(ij, 0) + c * b0
        if a0:
            for i, c in other.linear.items():
                lin[i] = lin.get(i, 0) + c * a0
            for ij, c in other.quadratic.items():
                quad[ij] = quad.get(ij, 0) + c * a0
        for i, ci in self.linear.items():
            for j, cj in other.linear.items():
                key = (i, j) if i <= j else (j, i)
                quad[key] = quad.get(key, 0) + ci * cj
        return TruncPoly2(
            a0 * b0,
            {i: v for i, v in lin.items() if v},
            {ij: v for ij, v in quad.items() if v},
        )

    def mul_var(self, i: int) -> TruncPoly2:
        """Multiply by the variable z_i (a common inner-loop case)."""
        lin = {i: self.constant} if self.constant else {}
        quad: dict[tuple[int, int], int] = {}
        for j, c in self.linear.items():
            key = (i, j) if i <= j else (j, i)
            quad[key] = quad.get(key, 0) + c
        return TruncPoly2(0, lin, {ij: v for ij, v in quad.items() if v})

    def quadratic_part(self) -> TruncPoly2:
        return TruncPoly2(quadratic=dict(self.quadratic))

    def linear_part(self) -> TruncPoly2:
        return TruncPoly2(linear=dict(self.linear))

    def evaluate(self, values: dict[int, int]) -> int:
        acc = self.constant
        for i, c in self.linear.items():
            acc += c * values[i]
        for (i, j), c in self.quadratic.items():
            acc += c * values[i] * values[j]
        return acc

    def __str__(self) -> str:
        parts = []
        if self.constant:
            parts.append(str(self.constant))
        for i in sorted(self.linear):
            parts.append(f"{self.linear[i]}*z{i}")
        for i, j in sorted(self.quadratic):
            c = self.quadratic[(i, j)]
            parts.append(f"{c}*z{i}*z{j}" if i != j else f"{c}*z{i}^2")
        return " + ".join(parts) if parts else "0"
