"""Exact scalar tower: rationals, rational functions of a formal parameter,
and rational functions of x over that parameter field.

Three layers, each built on the one below:

  Fraction     -- arbitrary-precision rationals (stdlib)
  ParamScalar  -- p(a)/q(a) with Fraction coefficients, `a` a formal symbol
  RatFunc      -- P(x)/Q(x) with ParamScalar coefficients

All values are immutable and kept in a unique canonical form: denominators
are monic and never zero, numerator and denominator share no factor, and
the zero value is ()/(1).  Equality is structural, so two values are equal
iff their canonical coefficient tuples agree.

Polynomials are dense coefficient tuples, low index = low degree.  The zero
polynomial is the empty tuple; its degree is the NEG_INF sentinel, which
compares below every integer and absorbs addition, keeping degree
arithmetic total.

There is exactly one formal parameter.  It is written `a` by default; code
working with a differently named constant (lam, k2, ...) passes the display
name to str() methods.  No floating point appears anywhere in this module.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union


class ExactError(ValueError):
    """Base class for exact-arithmetic failures."""


class DivisionByZero(ExactError, ZeroDivisionError):
    """Raised when a denominator is identically zero."""


class SingularSpecialization(ExactError):
    """Substituting the parameter would zero a denominator.

    Carries the offending denominator factor so a report can show exactly
    which expression became singular.
    """

    def __init__(self, factor):
        self.factor = factor
        super().__init__(f"singular specialization: denominator {factor} vanishes")


class _NegInf:
    """Degree of the zero polynomial; below every int, absorbs addition."""

    __slots__ = ()

    def __lt__(self, other):
        return not isinstance(other, _NegInf)

    def __le__(self, other):
        return True

    def __gt__(self, other):
        return False

    def __ge__(self, other):
        return isinstance(other, _NegInf)

    def __add__(self, other):
        return self

    __radd__ = __add__

    def __neg__(self):
        raise ArithmeticError("cannot negate -inf degree")

    def __repr__(self):
        return "-inf"


NEG_INF = _NegInf()

Degree = Union[int, _NegInf]


def rat(v) -> Fraction:
    """Coerce an int, string 'p/q', or Fraction to an exact rational."""
    if isinstance(v, Fraction):
        return v
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, str):
        return Fraction(v.strip())
    raise TypeError(f"cannot build exact rational from {v!r}")


def rat_str(q: Fraction) -> str:
    """Canonical text form 'p/q' (or 'p' for integers)."""
    return str(q)


# ---------------------------------------------------------------------------
# Dense univariate polynomial helpers, generic over an exact field.
#
# Coefficients may be Fraction or ParamScalar (anything with field dunders
# and truthiness-as-nonzero).  Tuples only; zero polynomial is ().
# ---------------------------------------------------------------------------


def poly_trim(cs: Sequence) -> tuple:
    """Drop trailing zero coefficients."""
    n = len(cs)
    while n and not cs[n - 1]:
        n -= 1
    return tuple(cs[:n])


def poly_deg(p: Sequence) -> Degree:
    return len(p) - 1 if p else NEG_INF


def poly_add(p, q):
    if len(p) < len(q):
        p, q = q, p
    out = list(p)
    for i, c in enumerate(q):
        out[i] = out[i] + c
    return poly_trim(out)


def poly_neg(p):
    return tuple(-c for c in p)


def poly_sub(p, q):
    return poly_add(p, poly_neg(q))


def poly_mul(p, q):
    if not p or not q:
        return ()
    out = [None] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if not a:
            continue
        for j, b in enumerate(q):
            t = a * b
            out[i + j] = t if out[i + j] is None else out[i + j] + t
    zero = p[0] - p[0]
    return poly_trim([zero if c is None else c for c in out])


def poly_scale(p, c):
    if not c:
        return ()
    return poly_trim([x * c for x in p])


def poly_divmod(p, q):
    """Exact long division over the coefficient field; q must be nonzero."""
    if not q:
        raise DivisionByZero("division by zero")
    if len(p) < len(q):
        return (), tuple(p)
    rem = list(p)
    lead = q[-1]
    qd = len(q) - 1
    quot = [p[0] - p[0]] * (len(p) - qd)
    for i in range(len(p) - 1, qd - 1, -1):
        c = rem[i]
        if not c:
            continue
        f = c / lead
        quot[i - qd] = f
        for j, b in enumerate(q):
            rem[i - qd + j] = rem[i - qd + j] - f * b
    return poly_trim(quot), poly_trim(rem)


def poly_mod(p, q):
    return poly_divmod(p, q)[1]


def poly_monic(p):
    """Scale to leading coefficient 1 (zero polynomial stays zero)."""
    if not p:
        return ()
    lead = p[-1]
    return tuple(c / lead for c in p)


def poly_gcd(p, q):
    """Monic gcd by the Euclidean algorithm over the coefficient field."""
    p, q = poly_trim(p), poly_trim(q)
    while q:
        p, q = q, poly_mod(p, q)
        q = poly_monic(q)  # keep remainders tame
    return poly_monic(p)


def poly_deriv(p):
    return poly_trim([c * i for i, c in enumerate(p)][1:])


def poly_eval(p, v, zero):
    """Horner evaluation; `zero` supplies the result for the zero poly."""
    if not p:
        return zero
    acc = zero
    for c in reversed(p):
        acc = acc * v + c
    return acc


def poly_shift(p, k: int):
    """Multiply by x^k (k >= 0)."""
    if not p:
        return ()
    zero = p[0] - p[0]
    return (zero,) * k + tuple(p)


def _format_terms(terms: list[tuple[str, bool]]) -> str:
    """Join (text, negative) pairs with ' + ' / ' - '."""
    if not terms:
        return "0"
    out = []
    for i, (txt, neg) in enumerate(terms):
        if i == 0:
            out.append(f"-{txt}" if neg else txt)
        else:
            out.append(f" - {txt}" if neg else f" + {txt}")
    return "".join(out)


def _frac_poly_str(p: Sequence[Fraction], var: str) -> str:
    """Print a Fraction-coefficient polynomial, highest degree first."""
    terms = []
    for i in range(len(p) - 1, -1, -1):
        c = p[i]
        if not c:
            continue
        neg = c < 0
        c = abs(c)
        if i == 0:
            txt = str(c)
        else:
            xs = var if i == 1 else f"{var}^{i}"
            txt = xs if c == 1 else f"{c}*{xs}"
        terms.append((txt, neg))
    return _format_terms(terms)


def _nterms(p: Sequence) -> int:
    return sum(1 for c in p if c)


_PSVal = Union[int, Fraction, "ParamScalar"]


class ParamScalar:
    """A rational function p(a)/q(a) of the formal parameter, in canonical
    form: q monic, gcd(p, q) = 1, zero stored as ()/(1).

    Supports full field arithmetic, exact specialization of the parameter,
    and structural equality/hashing.  Instances are immutable.
    """

    __slots__ = ("num", "den")

    def __init__(self, num=(), den=(Fraction(1),)):
        num = poly_trim([rat(c) for c in num])
        den = poly_trim([rat(c) for c in den])
        if not den:
            raise DivisionByZero("division by zero")
        if not num:
            den = (Fraction(1),)
        else:
            g = poly_gcd(num, den)
            if poly_deg(g) > 0:
                num = poly_divmod(num, g)[0]
                den = poly_divmod(den, g)[0]
            lead = den[-1]
            if lead != 1:
                num = tuple(c / lead for c in num)
                den = tuple(c / lead for c in den)
        object.__setattr__(self, "num", tuple(num))
        object.__setattr__(self, "den", tuple(den))

    def __setattr__(self, *a):
        raise AttributeError("ParamScalar is immutable")

    # -- constructors -------------------------------------------------------

    @classmethod
    def const(cls, v) -> "ParamScalar":
        return cls((rat(v),))

    @classmethod
    def sym(cls) -> "ParamScalar":
        """The formal parameter itself."""
        return cls((Fraction(0), Fraction(1)))

    @classmethod
    def coerce(cls, v: _PSVal) -> "ParamScalar":
        if isinstance(v, ParamScalar):
            return v
        return cls.const(v)

    # -- predicates ----------------------------------------------------------

    def __bool__(self) -> bool:
        return bool(self.num)

    def is_constant(self) -> bool:
        return len(self.num) <= 1 and len(self.den) == 1

    def as_fraction(self) -> Fraction:
        if not self.is_constant():
            raise ExactError(f"{self} is not a constant")
        return self.num[0] if self.num else Fraction(0)

    def is_polynomial(self) -> bool:
        return len(self.den) == 1

    def degree_pair(self) -> tuple[Degree, Degree]:
        return poly_deg(self.num), poly_deg(self.den)

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other):
        o = _ps(other)
        if o is NotImplemented:
            return NotImplemented
        return ParamScalar(
            poly_add(poly_mul(self.num, o.den), poly_mul(o.num, self.den)),
            poly_mul(self.den, o.den),
        )

    __radd__ = __add__

    def __neg__(self):
        return ParamScalar(poly_neg(self.num), self.den)

    def __sub__(self, other):
        o = _ps(other)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = _ps(other)
        if o is NotImplemented:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = _ps(other)
        if o is NotImplemented:
            return NotImplemented
        return ParamScalar(poly_mul(self.num, o.num), poly_mul(self.den, o.den))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = _ps(other)
        if o is NotImplemented:
            return NotImplemented
        if not o:
            raise DivisionByZero("division by zero")
        return ParamScalar(poly_mul(self.num, o.den), poly_mul(self.den, o.num))

    def __rtruediv__(self, other):
        o = _ps(other)
        if o is NotImplemented:
            return NotImplemented
        return o / self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return ParamScalar.const(1) / self ** (-k)
        out = ParamScalar.const(1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        o = _ps(other)
        if o is NotImplemented:
            return NotImplemented
        return self.num == o.num and self.den == o.den

    def __hash__(self):
        return hash((self.num, self.den))

    # -- specialization ------------------------------------------------------

    def specialize(self, a0) -> Fraction:
        """Exact value at parameter = a0; singular if the denominator dies."""
        a0 = rat(a0)
        dv = poly_eval(self.den, a0, Fraction(0))
        if dv == 0:
            raise SingularSpecialization(_frac_poly_str(self.den, "a"))
        return poly_eval(self.num, a0, Fraction(0)) / dv

    # -- printing ------------------------------------------------------------

    def __str__(self):
        return self.str()

    def str(self, name: str = "a") -> str:
        ns = _frac_poly_str(self.num, name)
        if len(self.den) == 1:
            return ns
        ds = _frac_poly_str(self.den, name)
        if _nterms(self.num) > 1:
            ns = f"({ns})"
        if _nterms(self.den) > 1:
            ds = f"({ds})"
        return f"{ns}/{ds}"

    def __repr__(self):
        return f"ParamScalar({self.str()})"


def _ps(v):
    if isinstance(v, ParamScalar):
        return v
    if isinstance(v, (int, Fraction)):
        return ParamScalar.const(v)
    return NotImplemented


PS_ZERO = ParamScalar()
PS_ONE = ParamScalar.const(1)
PARAM = ParamScalar.sym()


def _ps_poly_str(p: Sequence[ParamScalar], var: str, name: str) -> str:
    """Print a ParamScalar-coefficient polynomial in `var`, high degree first.

    Non-constant coefficients are always parenthesized so canonical prints
    stay parseable by the expression grammar.
    """
    terms = []
    for i in range(len(p) - 1, -1, -1):
        c = p[i]
        if not c:
            continue
        if c.is_constant():
            f = c.as_fraction()
            neg = f < 0
            f = abs(f)
            if i == 0:
                txt = str(f)
            else:
                xs = var if i == 1 else f"{var}^{i}"
                txt = xs if f == 1 else f"{f}*{xs}"
            terms.append((txt, neg))
        else:
            cs = f"({c.str(name)})"
            if i == 0:
                txt = cs
            else:
                xs = var if i == 1 else f"{var}^{i}"
                txt = f"{cs}*{xs}"
            terms.append((txt, False))
    return _format_terms(terms)


_RFVal = Union[int, Fraction, ParamScalar, "RatFunc"]


class RatFunc:
    """A rational function P(x)/Q(x) with ParamScalar coefficients.

    Canonical form: Q monic in x, gcd(P, Q) = 1, zero stored as ()/(1).
    Content sits in the numerator.  Immutable; equality is structural.
    """

    __slots__ = ("num", "den")

    def __init__(self, num=(), den=(PS_ONE,)):
        num = poly_trim([ParamScalar.coerce(c) for c in num])
        den = poly_trim([ParamScalar.coerce(c) for c in den])
        if not den:
            raise DivisionByZero("division by zero")
        if not num:
            den = (PS_ONE,)
        else:
            g = poly_gcd(num, den)
            if poly_deg(g) > 0:
                num = poly_divmod(num, g)[0]
                den = poly_divmod(den, g)[0]
            lead = den[-1]
            if lead != PS_ONE:
                num = tuple(c / lead for c in num)
                den = tuple(c / lead for c in den)
        object.__setattr__(self, "num", tuple(num))
        object.__setattr__(self, "den", tuple(den))

    def __setattr__(self, *a):
        raise AttributeError("RatFunc is immutable")

    # -- constructors -------------------------------------------------------

    @classmethod
    def const(cls, v) -> "RatFunc":
        return cls((ParamScalar.coerce(v),))

    @classmethod
    def x(cls) -> "RatFunc":
        return cls((PS_ZERO, PS_ONE))

    @classmethod
    def x_power(cls, k: int) -> "RatFunc":
        """x^k for any integer k (negative k puts the power below)."""
        if k >= 0:
            return cls((PS_ZERO,) * k + (PS_ONE,))
        return cls((PS_ONE,), (PS_ZERO,) * (-k) + (PS_ONE,))

    @classmethod
    def from_poly(cls, coeffs: Iterable) -> "RatFunc":
        return cls(tuple(coeffs))

    @classmethod
    def coerce(cls, v: _RFVal) -> "RatFunc":
        if isinstance(v, RatFunc):
            return v
        return cls.const(v)

    # -- predicates ----------------------------------------------------------

    def __bool__(self):
        return bool(self.num)

    def is_polynomial(self) -> bool:
        return len(self.den) == 1

    def as_poly(self) -> tuple[ParamScalar, ...]:
        if not self.is_polynomial():
            raise ExactError(f"{self} is not a polynomial in x")
        return self.num

    def is_constant(self) -> bool:
        return self.is_polynomial() and len(self.num) <= 1

    def as_scalar(self) -> ParamScalar:
        if not self.is_constant():
            raise ExactError(f"{self} is not constant in x")
        return self.num[0] if self.num else PS_ZERO

    def is_laurent(self) -> bool:
        """True iff the denominator is a pure power of x."""
        return all(not c for c in self.den[:-1])

    def laurent_parts(self) -> tuple[int, tuple[ParamScalar, ...]]:
        """Return (t, numerator) with self = numerator / x^t."""
        if not self.is_laurent():
            raise ExactError(f"non-Laurent coefficient: {self}")
        return len(self.den) - 1, self.num

    def degree(self) -> Degree:
        """Degree of the numerator (use with is_polynomial for bounds)."""
        return poly_deg(self.num)

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other):
        o = _rf(other)
        if o is NotImplemented:
            return NotImplemented
        return RatFunc(
            poly_add(poly_mul(self.num, o.den), poly_mul(o.num, self.den)),
            poly_mul(self.den, o.den),
        )

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(poly_neg(self.num), self.den)

    def __sub__(self, other):
        o = _rf(other)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = _rf(other)
        if o is NotImplemented:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = _rf(other)
        if o is NotImplemented:
            return NotImplemented
        return RatFunc(poly_mul(self.num, o.num), poly_mul(self.den, o.den))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = _rf(other)
        if o is NotImplemented:
            return NotImplemented
        if not o:
            raise DivisionByZero("division by zero")
        return RatFunc(poly_mul(self.num, o.den), poly_mul(self.den, o.num))

    def __rtruediv__(self, other):
        o = _rf(other)
        if o is NotImplemented:
            return NotImplemented
        return o / self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return RatFunc.const(1) / self ** (-k)
        out = RatFunc.const(1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        o = _rf(other)
        if o is NotImplemented:
            return NotImplemented
        return self.num == o.num and self.den == o.den

    def __hash__(self):
        return hash((self.num, self.den))

    def deriv(self) -> "RatFunc":
        """Exact d/dx by the quotient rule."""
        n, d = self.num, self.den
        if len(d) == 1:
            return RatFunc(poly_deriv(n), d)
        return RatFunc(
            poly_sub(poly_mul(poly_deriv(n), d), poly_mul(n, poly_deriv(d))),
            poly_mul(d, d),
        )

    # -- specialization ------------------------------------------------------

    def specialize(self, a0) -> "RatFunc":
        """Substitute the parameter; result has constant coefficients."""
        num = tuple(ParamScalar.const(c.specialize(a0)) for c in self.num)
        den = tuple(ParamScalar.const(c.specialize(a0)) for c in self.den)
        den = poly_trim(den)
        if not den:
            raise SingularSpecialization(self.str())
        return RatFunc(num, den)

    # -- printing ------------------------------------------------------------

    def __str__(self):
        return self.str()

    def str(self, name: str = "a") -> str:
        ns = _ps_poly_str(self.num, "x", name)
        if self.is_polynomial():
            return ns
        ds = _ps_poly_str(self.den, "x", name)
        if _nterms(self.num) > 1:
            ns = f"({ns})"
        if _nterms(self.den) > 1:
            ds = f"({ds})"
        return f"{ns}/{ds}"

    def __repr__(self):
        return f"RatFunc({self.str()})"


def _rf(v):
    if isinstance(v, RatFunc):
        return v
    if isinstance(v, (int, Fraction, ParamScalar)):
        return RatFunc.const(v)
    return NotImplemented


RF_ZERO = RatFunc()
RF_ONE = RatFunc.const(1)
RF_X = RatFunc.x()


@dataclass(frozen=True, order=True)
class QuasiExponent:
    """An exponent offset + a_part * a; sort order is (a_part, offset)."""

    a_part: Fraction
    offset: Fraction

    @classmethod
    def make(cls, offset, a_part=0) -> "QuasiExponent":
        return cls(rat(a_part), rat(offset))

    def shift(self, k) -> "QuasiExponent":
        return QuasiExponent(self.a_part, self.offset + rat(k))

    def __add__(self, other):
        if isinstance(other, QuasiExponent):
            return QuasiExponent(self.a_part + other.a_part, self.offset + other.offset)
        return self.shift(other)

    def __sub__(self, other):
        if isinstance(other, QuasiExponent):
            return QuasiExponent(self.a_part - other.a_part, self.offset - other.offset)
        return self.shift(-rat(other))

    def __neg__(self):
        return QuasiExponent(-self.a_part, -self.offset)

    def is_plain(self) -> bool:
        return self.a_part == 0

    def to_param(self) -> ParamScalar:
        """offset + a_part * a as an element of the parameter field."""
        return ParamScalar((self.offset, self.a_part))

    def specialize(self, a0) -> "QuasiExponent":
        return QuasiExponent(Fraction(0), self.offset + self.a_part * rat(a0))

    def __str__(self):
        return self.str()

    def str(self, name: str = "a") -> str:
        return _frac_poly_str((self.offset, self.a_part), name)


QE_ZERO = QuasiExponent(Fraction(0), Fraction(0))
QE_A = QuasiExponent(Fraction(1), Fraction(0))


def qexp(offset, a_part=0) -> QuasiExponent:
    return QuasiExponent.make(offset, a_part)


# ---------------------------------------------------------------------------
# Named entry points: explicit normalize / arith / specialize functions.
# Constructors normalize eagerly, so normalize is the identity on values
# already built through this module; it exists for round-trip checking.
# ---------------------------------------------------------------------------


def normalize(v):
    """Rebuild a scalar value; idempotent by construction."""
    if isinstance(v, Fraction):
        return Fraction(v.numerator, v.denominator)
    if isinstance(v, ParamScalar):
        return ParamScalar(v.num, v.den)
    if isinstance(v, RatFunc):
        return RatFunc(v.num, v.den)
    raise TypeError(f"cannot normalize {v!r}")


_ARITH = {
    "add": lambda x, y: x + y,
    "sub": lambda x, y: x - y,
    "mul": lambda x, y: x * y,
    "div": lambda x, y: x / y,
}


def arith(op: str, lhs, rhs):
    """Field arithmetic by name: add, sub, mul, div (exact, canonical)."""
    try:
        f = _ARITH[op]
    except KeyError:
        raise ValueError(f"unknown arith op {op!r}") from None
    return f(lhs, rhs)


def specialize(v, a0):
    """Evaluate the formal parameter at a0 (exact; singular poles raise)."""
    if isinstance(v, (ParamScalar, RatFunc, QuasiExponent)):
        return v.specialize(a0)
    raise TypeError(f"cannot specialize {v!r}")
