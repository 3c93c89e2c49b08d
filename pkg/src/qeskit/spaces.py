"""Invariant spaces spanned by {1..x^n} plus x^a{1..x^m}, their generator
catalogue, invariance checking, and bounded-ansatz classification of all
preserving operators.

The space parameter a is either the formal symbol (generic) or an explicit
rational.  Generic-a membership compares the plain and the x^a exponent
ladders separately; a rational a collapses everything to one merged ladder
of plain exponents.

The degree of an ansatz monomial x^i d^j is the exponent shift i - j it
induces on monomials; search windows are expressed in that grading (the
raising generator has degree +1, the pure derivative -1, the downward jump
operator -k).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

from . import linalg
from .operators import (
    DiffOp,
    QuasiDiffOp,
    QuasiPoly,
    act,
    compose,
    conjugate_by_power,
)
from .scalars import (
    ExactError,
    PARAM,
    PS_ONE,
    PS_ZERO,
    ParamScalar,
    QuasiExponent,
    RatFunc,
    qexp,
    rat,
)

AValue = Union[None, int, Fraction]  # None means the generic symbol


def _a_scalar(a: AValue) -> ParamScalar:
    return PARAM if a is None else ParamScalar.const(a)


class V1Space:
    """The direct-sum space P_n + x^a P_m (P_m part absent when m is None).

    For rational a the two exponent ladders may collide; the merged basis
    drops duplicates and the collision flag records whether that happened.
    """

    __slots__ = ("n", "m", "a")

    def __init__(self, n: int, m: Optional[int] = None, a: AValue = None):
        if n < 0 or (m is not None and m < 0):
            raise ValueError("degrees must be nonnegative")
        if a is not None:
            a = rat(a)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "a", a)

    def __setattr__(self, *_):
        raise AttributeError("V1Space is immutable")

    def __eq__(self, other):
        if not isinstance(other, V1Space):
            return NotImplemented
        return (self.n, self.m, self.a) == (other.n, other.m, other.a)

    def __hash__(self):
        return hash((self.n, self.m, self.a))

    # -- derived quantities ---------------------------------------------------

    @property
    def delta(self) -> int:
        """|m - n|, the width of the exchange-operator family."""
        if self.m is None:
            raise ExactError("delta undefined without the x^a part")
        return abs(self.m - self.n)

    @property
    def p_max(self) -> int:
        """max(m, n)."""
        if self.m is None:
            return self.n
        return max(self.m, self.n)

    def is_generic(self) -> bool:
        return self.a is None

    def has_collision(self) -> bool:
        """Rational a landing in {-m, ..., n} merges the two ladders."""
        if self.a is None or self.m is None:
            return False
        a = self.a
        return a.denominator == 1 and -self.m <= a <= self.n

    def a_scalar(self) -> ParamScalar:
        return _a_scalar(self.a)

    # -- basis and membership ---------------------------------------------------

    def basis(self) -> list[QuasiExponent]:
        """Exponents 0..n then a..a+m; merged regime drops duplicates."""
        poly = [qexp(i) for i in range(self.n + 1)]
        if self.m is None:
            return poly
        if self.a is None:
            return poly + [qexp(j, 1) for j in range(self.m + 1)]
        seen = set(e.offset for e in poly)
        out = list(poly)
        for j in range(self.m + 1):
            off = self.a + j
            if off not in seen:
                seen.add(off)
                out.append(qexp(off))
        return out

    def contains_exponent(self, e: QuasiExponent) -> bool:
        if self.a is None:
            if e.a_part == 0:
                return e.offset.denominator == 1 and 0 <= e.offset <= self.n
            if self.m is not None and e.a_part == 1:
                return e.offset.denominator == 1 and 0 <= e.offset <= self.m
            return False
        if e.a_part != 0:
            return False
        off = e.offset
        if off.denominator == 1 and 0 <= off <= self.n:
            return True
        if self.m is None:
            return False
        j = off - self.a
        return j.denominator == 1 and 0 <= j <= self.m

    def basis_vectors(self) -> list[QuasiPoly]:
        return [QuasiPoly.monomial(e) for e in self.basis()]

    def exponents_param(self) -> list[ParamScalar]:
        """Basis exponents as parameter-field elements (for set algebra)."""
        return [e.to_param() for e in self.basis()]

    def __str__(self):
        a = "a" if self.a is None else str(self.a)
        if self.m is None:
            return f"V1({self.n})"
        return f"V1({self.n}, {self.m}, {a})"

    __repr__ = __str__


# ---------------------------------------------------------------------------
# Generator catalogue
# ---------------------------------------------------------------------------


def make_sl2(n: int, a: AValue = None) -> dict[str, DiffOp]:
    """The classical triple preserving P_n: raising, diagonal, lowering."""
    Dv = DiffOp.euler()
    n_s = ParamScalar.const(n)
    return {
        "jp": compose(DiffOp.mult(RatFunc.x()), Dv - n_s),
        "j0": Dv - n_s / 2,
        "jm": DiffOp.d(),
    }


def make_k(n: int, a: AValue = None) -> dict[str, DiffOp]:
    """The sl2 triple conjugated by x^a (acts on the x^a ladder)."""
    a_s = _a_scalar(a)
    js = make_sl2(n)
    return {
        "kp": conjugate_by_power(js["jp"], a_s),
        "k0": conjugate_by_power(js["j0"], a_s),
        "km": conjugate_by_power(js["jm"], a_s),
    }


def make_bosonic(n: int, m: int, a: AValue = None) -> dict[str, DiffOp]:
    """The second-order triple preserving both ladders at once."""
    Dv = DiffOp.euler()
    a_s = _a_scalar(a)
    Jp = compose(DiffOp.mult(RatFunc.x()), compose(Dv - n, Dv - (m + a_s)))
    J0 = Dv - ParamScalar.const(Fraction(m + n + 1, 2))
    Jm = compose(Dv + (1 - a_s), DiffOp.d())
    return {"Jp": Jp, "J0": J0, "Jm": Jm}


def make_kernels(n: int, m: int, a: AValue = None) -> dict[str, DiffOp]:
    """K kills the polynomial ladder; Kprime kills the x^a ladder."""
    Dv = DiffOp.euler()
    a_s = _a_scalar(a)
    K = DiffOp.identity()
    for i in range(n + 1):
        K = compose(K, Dv - (n - i))
    Kp = DiffOp.identity()
    for i in range(m + 1):
        Kp = compose(Kp, Dv - (m + a_s - i))
    return {"K": K, "Kprime": Kp}


class MappingContractError(ExactError):
    """Neither orientation of the exchange formulas maps as promised."""


@dataclass(frozen=True)
class MixingOps:
    """Exchange operators for one alpha, plus which orientation verified."""

    Q: QuasiDiffOp
    Qbar: QuasiDiffOp
    alpha: int
    orientation: str  # "n>=m", "n<=m", or "either (n=m)"


def _qbar_factor(s: V1Space, alpha: int) -> DiffOp:
    """prod_{i<alpha} (D - (p+1-delta) - i) ∘ d^(delta-alpha)."""
    Dv = DiffOp.euler()
    out = DiffOp.d(s.delta - alpha) if s.delta - alpha > 0 else DiffOp.identity()
    for i in range(alpha):
        out = compose(Dv - (s.p_max + 1 - s.delta + i), out)
    return out


def _maps_into(op: QuasiDiffOp, s: V1Space, part: str) -> bool:
    """Check op sends every basis vector into the named ladder (or to 0)."""
    for e in s.basis():
        for f, _ in op.act(QuasiPoly.monomial(e)).terms:
            if s.a is None:
                if part == "poly":
                    ok = f.a_part == 0 and f.offset.denominator == 1 and 0 <= f.offset <= s.n
                else:
                    ok = f.a_part == 1 and f.offset.denominator == 1 and 0 <= f.offset <= s.m
            else:
                if f.a_part != 0:
                    return False
                if part == "poly":
                    ok = f.offset.denominator == 1 and 0 <= f.offset <= s.n
                else:
                    j = f.offset - s.a
                    ok = j.denominator == 1 and 0 <= j <= s.m
            if not ok:
                return False
    return True


def make_mixing(n: int, m: int, a: AValue = None, alpha: int = 0) -> MixingOps:
    """Exchange operators Q (into the polynomial ladder) and Qbar (into the
    x^a ladder) for 0 <= alpha <= |m-n|.

    The constructor self-verifies the mapping contract on the basis and
    reports which orientation of the defining formulas holds; rejecting
    both would indicate an implementation bug, not bad input.
    """
    s = V1Space(n, m, a)
    if not 0 <= alpha <= s.delta:
        raise ValueError(f"alpha must lie in 0..{s.delta}")
    a_s = _a_scalar(a)
    ker = make_kernels(n, m, a)
    if a is None:
        down, up = qexp(0, -1), qexp(0, 1)
    else:
        down, up = qexp(-rat(a)), qexp(rat(a))
    shift_dn = QuasiDiffOp.power_shift(down)
    shift_up = QuasiDiffOp.power_shift(up)
    x_alpha = DiffOp.x_power(alpha)
    qbar = _qbar_factor(s, alpha)

    candidates = {
        "n>=m": (
            QuasiDiffOp.coerce(x_alpha) * shift_dn * ker["K"],
            shift_up * qbar * ker["Kprime"],
        ),
        "n<=m": (
            QuasiDiffOp.coerce(qbar) * shift_dn * ker["K"],
            shift_up * x_alpha * ker["Kprime"],
        ),
    }
    passing = []
    for name, (Q, Qbar) in candidates.items():
        if _maps_into(Q, s, "poly") and _maps_into(Qbar, s, "quasi"):
            passing.append((name, Q, Qbar))
    if not passing:
        raise MappingContractError(
            "mapping contract violated in both orientations"
        )
    if len(passing) == 2:
        name, Q, Qbar = passing[0]
        return MixingOps(Q, Qbar, alpha, "either (n=m)")
    name, Q, Qbar = passing[0]
    return MixingOps(Q, Qbar, alpha, name)


def make_jumps(n: int, m: int, k: int) -> dict[str, DiffOp]:
    """Ladder-exchanging operators for integer a = k, order k, degrees +/-k.

    Requires k >= 1, n <= k and m - k >= n.
    """
    if k < 1 or n > k or m - k < n:
        raise ValueError("need k >= 1, n <= k and m - k >= n")
    Dv = DiffOp.euler()
    Wp = DiffOp.identity()
    for j in range(k):
        Wp = compose(Wp, Dv - (k + m - j))
    Wp = compose(DiffOp.x_power(k), Wp)
    Wm = DiffOp.identity()
    for j in range(n + 1):
        Wm = compose(Wm, Dv - j)
    for i in range(1, k - n):
        Wm = compose(Wm, Dv - (k + n + i))
    Wm = compose(DiffOp.x_power(-k), Wm)
    return {"Wp": Wp, "Wm": Wm}


# ---------------------------------------------------------------------------
# Invariance checking and classification search
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class InvarianceWitness:
    basis_exponent: QuasiExponent
    output_exponent: QuasiExponent
    coefficient: ParamScalar

    def to_json(self, name: str = "a") -> dict:
        return {
            "basis_exponent": self.basis_exponent.str(name),
            "output_exponent": self.output_exponent.str(name),
            "coefficient": self.coefficient.str(name),
        }


@dataclass(frozen=True)
class InvarianceReport:
    verdict: bool
    witnesses: tuple[InvarianceWitness, ...]

    def to_json(self, name: str = "a") -> dict:
        return {
            "verdict": self.verdict,
            "witnesses": [w.to_json(name) for w in self.witnesses],
        }


def check_invariance(A, s: V1Space) -> InvarianceReport:
    """Apply A to each basis quasi-monomial; collect out-of-space terms."""
    A = QuasiDiffOp.coerce(A)
    witnesses = []
    for e in s.basis():
        out = A.act(QuasiPoly.monomial(e))
        for f, c in out.terms:
            if not s.contains_exponent(f):
                witnesses.append(InvarianceWitness(e, f, c))
    return InvarianceReport(not witnesses, tuple(witnesses))


def _ansatz_cells(max_order: int, deg_lo: int, deg_hi: int) -> list[tuple[int, int]]:
    """(i, j) pairs with 0 <= j <= max_order and deg_lo <= i - j <= deg_hi."""
    return [
        (d + j, j)
        for j in range(max_order + 1)
        for d in range(deg_lo, deg_hi + 1)
    ]


def search_preserving(
    s: V1Space, max_order: int, deg_lo: int, deg_hi: int
) -> list[DiffOp]:
    """Exact basis of {sum c_ij x^i d^j : the sum preserves s} within the
    given order and degree windows.

    The linear system is solved over the parameter field when a is generic
    and over the rationals otherwise; generic results are re-verified at two
    non-resonant rational specializations as a guard against spurious rank
    drops, and every returned operator is re-checked against
    check_invariance.
    """
    cells = _ansatz_cells(max_order, deg_lo, deg_hi)
    basis_exps = s.basis()
    rows_by_target: dict = {}
    for e in basis_exps:
        e_param = e.to_param()
        for col, (i, j) in enumerate(cells):
            coeff = PS_ONE
            for t in range(j):
                coeff = coeff * (e_param - t)
            if not coeff:
                continue
            f = e + (i - j)
            if s.contains_exponent(f):
                continue
            key = (e, f)
            row = rows_by_target.setdefault(key, [PS_ZERO] * len(cells))
            row[col] = row[col] + coeff
    matrix = [r for r in rows_by_target.values() if any(r)]
    sols = linalg.nullspace(matrix, PS_ZERO, PS_ONE) if matrix else [
        [PS_ONE if i == j else PS_ZERO for j in range(len(cells))]
        for i in range(len(cells))
    ]

    ops = []
    for vec in sols:
        terms: dict[int, RatFunc] = {}
        for c, (i, j) in zip(vec, cells):
            if not c:
                continue
            mono = RatFunc.x_power(i) * c
            terms[j] = terms.get(j, RatFunc()) + mono
        op = DiffOp(terms)
        rep = check_invariance(op, s)
        if not rep.verdict:
            raise AssertionError(f"search produced non-invariant operator {op}")
        ops.append(op)

    if s.is_generic() and s.m is not None:
        span = s.m + s.n + 2
        for a0 in (Fraction(2 * span + 1, 2), Fraction(3 * span + 1, 3)):
            s0 = V1Space(s.n, s.m, a0)
            if len(search_preserving(s0, max_order, deg_lo, deg_hi)) != len(ops):
                raise AssertionError(
                    f"solution dimension changes at specialization a={a0}"
                )
    return ops


def operator_in_span(op: DiffOp, basis_ops: Sequence[DiffOp]):
    """Exact coordinates of op in span(basis_ops) as canonical forms, or
    None.  Coordinates live in the parameter field.

    Per derivative order, all coefficients go over one common denominator
    so matching powers of x gives parameter-field rows.
    """
    from .scalars import poly_divmod, poly_gcd, poly_mul

    everyone = list(basis_ops) + [op]
    orders = sorted({j for B in everyone for j, _ in B.terms})
    vec_rows: list[list[ParamScalar]] = [[] for _ in everyone]
    for j in orders:
        coeffs = [B.coeff(j) for B in everyone]
        common = (PS_ONE,)
        for c in coeffs:
            g = poly_gcd(common, c.den)
            common = poly_mul(poly_divmod(common, g)[0], c.den)
        nums = [poly_mul(c.num, poly_divmod(common, c.den)[0]) for c in coeffs]
        width = max((len(p) for p in nums), default=0)
        for row, p in zip(vec_rows, nums):
            row.extend(tuple(p) + (PS_ZERO,) * (width - len(p)))
    return linalg.in_span(vec_rows[:-1], vec_rows[-1], PS_ZERO, PS_ONE)


# ---------------------------------------------------------------------------
# Exponent-set transforms (relating spaces under x -> x^b)
# ---------------------------------------------------------------------------


def v1_exponents(n: int, m: int, a_expr: ParamScalar) -> list[ParamScalar]:
    """Exponent set {0..n} union {a_expr + j : j in 0..m} in the parameter
    field; a_expr may be any rational expression of the parameter."""
    out = [ParamScalar.const(i) for i in range(n + 1)]
    out += [a_expr + j for j in range(m + 1)]
    return out


def ladder_pattern_exponents(beta: ParamScalar, s: int, m: int) -> list[ParamScalar]:
    """{j*beta : j <= s} union {1 + j*beta : j <= m}: the exponent set of a
    polynomial ladder in x^beta plus x times another such ladder."""
    out = [beta * j for j in range(s + 1)]
    out += [1 + beta * j for j in range(m + 1)]
    return out


def exponent_set_equiv(
    lhs_exponents: Sequence[ParamScalar],
    substitution_power: ParamScalar,
    rhs_exponents: Sequence[ParamScalar],
) -> bool:
    """True iff {e * b : e in lhs} equals rhs as sets, exactly."""
    lhs = {e * substitution_power for e in lhs_exponents}
    return lhs == set(rhs_exponents)
