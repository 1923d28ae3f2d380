"""Exact arithmetic over the golden field Q(phi), phi = (1+sqrt5)/2.

Every lattice generator, partition vertex and orbit point in this package
is a pair of :class:`Golden` coordinates, so all geometric predicates
(signs, floors, point location) are decided exactly.  The basis is
{1, phi} with the single reduction rule phi^2 = phi + 1.
"""

from __future__ import annotations

from fractions import Fraction
from math import isqrt as _isqrt
from typing import Union

Rational = Fraction
_RatLike = Union[int, Fraction]


class SingularMatrixError(ZeroDivisionError):
    """2x2 matrix with zero determinant where an inverse is required."""


class GoldenParseError(ValueError):
    """Text does not match the golden-literal grammar."""


class Golden:
    """An element a + b*phi of Q(phi), in canonical (a, b) form.

    Immutable; supports field arithmetic, exact ordering and hashing.
    Mixed arithmetic with int/Fraction promotes the scalar.
    """

    __slots__ = ("a", "b")

    def __init__(self, a: _RatLike = 0, b: _RatLike = 0):
        object.__setattr__(self, "a", a if type(a) is Fraction else Fraction(a))
        object.__setattr__(self, "b", b if type(b) is Fraction else Fraction(b))

    def __setattr__(self, *_):
        raise AttributeError("Golden is immutable")

    # -- ring structure -------------------------------------------------

    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return Golden(self.a + other.a, self.b + other.b)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return Golden(self.a - other.a, self.b - other.b)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return Golden(other.a - self.a, other.b - self.b)

    def __mul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        # (a+b phi)(c+d phi) = ac + bd + (ad + bc + bd) phi
        a, b, c, d = self.a, self.b, other.a, other.b
        return Golden(a * c + b * d, a * d + b * c + b * d)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other * self.inverse()

    def __neg__(self):
        return Golden(-self.a, -self.b)

    def __pos__(self):
        return self

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def conjugate(self) -> "Golden":
        """Image under the field automorphism phi -> 1 - phi."""
        return Golden(self.a + self.b, -self.b)

    def norm(self) -> Fraction:
        """Field norm a^2 + ab - b^2 (zero only for zero)."""
        return self.a * self.a + self.a * self.b - self.b * self.b

    def inverse(self) -> "Golden":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero golden number")
        conj = self.conjugate()
        return Golden(conj.a / n, conj.b / n)

    # -- exact order ----------------------------------------------------

    def sign(self) -> int:
        """Exact sign of the real number a + b*phi; no floating point."""
        # Clear denominators: sign(a + b phi) = sign(A + B phi) with integers
        # A = a.num * b.den, B = b.num * a.den (overall positive scale).
        a, b = self.a, self.b
        A = a.numerator * b.denominator
        B = b.numerator * a.denominator
        if B == 0:
            return 0 if A == 0 else (1 if A > 0 else -1)
        if A == 0:
            return 1 if B > 0 else -1
        if A > 0 and B > 0:
            return 1
        if A < 0 and B < 0:
            return -1
        # Mixed signs: A + B*phi > 0  iff  sign(B) * (A^2 + AB - B^2) < 0,
        # from comparing |A/B| against phi via t > phi <=> t^2 - t - 1 > 0.
        n = A * A + A * B - B * B
        return 1 if (n < 0) == (B > 0) else -1

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def floor(self) -> int:
        """Greatest integer <= a + b*phi, decided exactly via integer isqrt.

        Writes x = (P + Q*sqrt5)/R with integers P, Q and R > 0, seeds with
        floor(Q*sqrt5) = isqrt(5 Q^2) and certifies by exact comparisons, so
        arbitrarily large coefficients stay correct.
        """
        a, b = self.a, self.b
        an, ad = a.numerator, a.denominator
        bn, bd = b.numerator, b.denominator
        P = 2 * an * bd + bn * ad
        Q = bn * ad
        R = 2 * ad * bd
        if Q == 0:
            return P // R
        s = _isqrt(5 * Q * Q)
        n = s if Q > 0 else -s - 1  # floor(Q*sqrt5); 5Q^2 is never a square
        k = (P + n) // R
        while _cmp_q_sqrt5(Q, k * R - P) < 0:  # x < k
            k -= 1
        while _cmp_q_sqrt5(Q, (k + 1) * R - P) >= 0:  # x >= k+1
            k += 1
        return k

    def __lt__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return (self - other).sign() < 0

    def __le__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return (self - other).sign() <= 0

    def __gt__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return (self - other).sign() > 0

    def __ge__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return (self - other).sign() >= 0

    def __eq__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.a == other.a and self.b == other.b

    def __hash__(self):
        return hash((self.a, self.b))

    # -- conversions ----------------------------------------------------

    def __float__(self):
        return float(self.a) + float(self.b) * _PHI_FLOAT

    def is_integer(self) -> bool:
        return self.b == 0 and self.a.denominator == 1

    def as_integer(self) -> int:
        if not self.is_integer():
            raise ValueError(f"{self!r} is not an integer")
        return int(self.a)

    def __repr__(self):
        return f"Golden({format_golden(self)!r})"

    def __str__(self):
        return format_golden(self)


def _cmp_q_sqrt5(q: int, m: int) -> int:
    """Sign of q*sqrt5 - m, integers q, m."""
    if q < 0:
        return -_cmp_q_sqrt5(-q, -m)
    if m <= 0:
        return 1 if (q > 0 or m < 0) else 0
    # both positive; equality impossible since 5 q^2 is not a square
    return 1 if 5 * q * q > m * m else -1


def _coerce(value) -> "Golden":
    if isinstance(value, Golden):
        return value
    if isinstance(value, (int, Fraction)):
        return Golden(value)
    return NotImplemented


ZERO = Golden(0)
ONE = Golden(1)
PHI = Golden(0, 1)

_PHI_FLOAT = (1 + 5 ** 0.5) / 2


def golden(a: _RatLike = 0, b: _RatLike = 0) -> Golden:
    return Golden(a, b)


def floor_div(x: Golden, m: Golden) -> int:
    """floor(x / m) for m != 0, exact."""
    return (x / m).floor()


def mod1(x: Golden) -> Golden:
    """Fractional part x - floor(x), in [0, 1)."""
    return x - x.floor()


# -- text grammar -------------------------------------------------------
#
#   literal := term | term ('+'|'-') term
#   term    := rat | [rat '*'] 'phi'
#   rat     := ['-'] int ['/' posint]
#
# Both orders are accepted ("3/2*phi-1", "-1+3/2*phi"); the canonical
# writer puts the rational part first.


def parse_golden(text: str) -> Golden:
    s = text.replace(" ", "")
    if not s:
        raise GoldenParseError("empty golden literal")
    terms = _split_terms(s)
    a = Fraction(0)
    b = Fraction(0)
    seen_rat = seen_phi = False
    for term in terms:
        coeff, is_phi = _parse_term(term)
        if is_phi:
            if seen_phi:
                raise GoldenParseError(f"two phi terms in {text!r}")
            seen_phi = True
            b = coeff
        else:
            if seen_rat:
                raise GoldenParseError(f"two rational terms in {text!r}")
            seen_rat = True
            a = coeff
    return Golden(a, b)


def _split_terms(s: str) -> list[str]:
    terms = []
    start = 0
    for i, ch in enumerate(s):
        if ch in "+-" and i > start and s[i - 1] not in "+-*/":
            terms.append(s[start:i])
            start = i
    terms.append(s[start:])
    if len(terms) > 2:
        raise GoldenParseError(f"too many terms in {s!r}")
    return terms


def _parse_term(term: str) -> tuple[Fraction, bool]:
    if not term or term in "+-":
        raise GoldenParseError(f"bad term {term!r}")
    is_phi = term.endswith("phi")
    if is_phi:
        head = term[:-3]
        if head in ("", "+"):
            coeff = Fraction(1)
        elif head == "-":
            coeff = Fraction(-1)
        else:
            if not head.endswith("*"):
                raise GoldenParseError(f"missing '*' before phi in {term!r}")
            coeff = _parse_rat(head[:-1])
    else:
        coeff = _parse_rat(term)
    return coeff, is_phi


def _parse_rat(s: str) -> Fraction:
    try:
        f = Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise GoldenParseError(f"bad rational {s!r}") from exc
    return f


def format_golden(x: Golden) -> str:
    """Canonical text form; parse(format(x)) == x."""
    if x.b == 0:
        return _fmt_rat(x.a)
    phi_part = "phi" if abs(x.b) == 1 else f"{_fmt_rat(abs(x.b))}*phi"
    if x.a == 0:
        return phi_part if x.b > 0 else "-" + phi_part
    sign = "+" if x.b > 0 else "-"
    return f"{_fmt_rat(x.a)}{sign}{phi_part}"


def _fmt_rat(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


# -- points and 2x2 matrices --------------------------------------------


class GPoint:
    """Point of Q(phi)^2."""

    __slots__ = ("x", "y")

    def __init__(self, x, y):
        object.__setattr__(self, "x", x if isinstance(x, Golden) else Golden(x))
        object.__setattr__(self, "y", y if isinstance(y, Golden) else Golden(y))

    def __setattr__(self, *_):
        raise AttributeError("GPoint is immutable")

    def __add__(self, other: "GPoint") -> "GPoint":
        return GPoint(self.x + other.x, self.y + other.y)

    def __sub__(self, other: "GPoint") -> "GPoint":
        return GPoint(self.x - other.x, self.y - other.y)

    def __neg__(self):
        return GPoint(-self.x, -self.y)

    def scale(self, c) -> "GPoint":
        return GPoint(self.x * c, self.y * c)

    def cross(self, other: "GPoint") -> Golden:
        return self.x * other.y - self.y * other.x

    def dot(self, other: "GPoint") -> Golden:
        return self.x * other.x + self.y * other.y

    def __eq__(self, other):
        return isinstance(other, GPoint) and self.x == other.x and self.y == other.y

    def __hash__(self):
        return hash((self.x, self.y))

    def __iter__(self):
        return iter((self.x, self.y))

    def as_floats(self) -> tuple[float, float]:
        return float(self.x), float(self.y)

    def __repr__(self):
        return f"GPoint({format_golden(self.x)!r}, {format_golden(self.y)!r})"


class GMatrix2:
    """2x2 matrix over Q(phi), rows (m00 m01; m10 m11)."""

    __slots__ = ("m00", "m01", "m10", "m11")

    def __init__(self, m00, m01, m10, m11):
        for name, v in (("m00", m00), ("m01", m01), ("m10", m10), ("m11", m11)):
            object.__setattr__(self, name, v if isinstance(v, Golden) else Golden(v))

    def __setattr__(self, *_):
        raise AttributeError("GMatrix2 is immutable")

    @classmethod
    def from_columns(cls, c0: GPoint, c1: GPoint) -> "GMatrix2":
        return cls(c0.x, c1.x, c0.y, c1.y)

    def column(self, j: int) -> GPoint:
        return GPoint(self.m00, self.m10) if j == 0 else GPoint(self.m01, self.m11)

    def det(self) -> Golden:
        return self.m00 * self.m11 - self.m01 * self.m10

    def inverse(self) -> "GMatrix2":
        d = self.det()
        if d.is_zero():
            raise SingularMatrixError("matrix is singular")
        inv = d.inverse()
        return GMatrix2(self.m11 * inv, -self.m01 * inv, -self.m10 * inv, self.m00 * inv)

    def mul_point(self, p: GPoint) -> GPoint:
        return GPoint(self.m00 * p.x + self.m01 * p.y, self.m10 * p.x + self.m11 * p.y)

    def mul_matrix(self, other: "GMatrix2") -> "GMatrix2":
        return GMatrix2(
            self.m00 * other.m00 + self.m01 * other.m10,
            self.m00 * other.m01 + self.m01 * other.m11,
            self.m10 * other.m00 + self.m11 * other.m10,
            self.m10 * other.m01 + self.m11 * other.m11,
        )

    def __eq__(self, other):
        return (
            isinstance(other, GMatrix2)
            and self.m00 == other.m00
            and self.m01 == other.m01
            and self.m10 == other.m10
            and self.m11 == other.m11
        )

    def __hash__(self):
        return hash((self.m00, self.m01, self.m10, self.m11))

    def __repr__(self):
        return (
            f"GMatrix2([{format_golden(self.m00)}, {format_golden(self.m01)}; "
            f"{format_golden(self.m10)}, {format_golden(self.m11)}])"
        )


IDENTITY2 = GMatrix2(1, 0, 0, 1)


def parse_gpoint(text: str) -> GPoint:
    """Parse "gx,gy" with golden-literal coordinates."""
    parts = text.split(",")
    if len(parts) != 2:
        raise GoldenParseError(f"expected 'x,y', got {text!r}")
    return GPoint(parse_golden(parts[0]), parse_golden(parts[1]))


def format_gpoint(p: GPoint) -> str:
    return f"{format_golden(p.x)},{format_golden(p.y)}"
