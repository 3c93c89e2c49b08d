"""Exact real-root counting for rational-coefficient polynomials.

Sturm's theorem with Fraction arithmetic: the number of distinct real
roots of p in (lo, hi] is V(lo) - V(hi), where V counts sign changes
along the Sturm chain.  Signs at +/-infinity come from leading
coefficients, so no root bounds are needed.
"""

from __future__ import annotations

from fractions import Fraction

from .scalars import poly_deg, poly_deriv, poly_divmod, poly_eval, poly_gcd, poly_trim


def sturm_chain(p) -> list[tuple]:
    """Canonical Sturm chain p, p', -rem(...), ... (stops at a constant)."""
    p = poly_trim(p)
    chain = [p]
    q = poly_deriv(p)
    while q:
        chain.append(q)
        r = poly_divmod(chain[-2], chain[-1])[1]
        q = tuple(-c for c in r)
    return chain


def _sign(x: Fraction) -> int:
    return (x > 0) - (x < 0)


def _variations(signs) -> int:
    signs = [s for s in signs if s != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def variations_at(chain, x: Fraction) -> int:
    return _variations([_sign(poly_eval(q, x, Fraction(0))) for q in chain])


def variations_at_inf(chain, positive: bool) -> int:
    signs = []
    for q in chain:
        s = _sign(q[-1])
        if not positive and (len(q) - 1) % 2 == 1:
            s = -s
        signs.append(s)
    return _variations(signs)


def count_real_roots(p, lo=None, hi=None) -> int:
    """Distinct real roots of p in (lo, hi]; None bounds mean +/-infinity."""
    p = poly_trim(p)
    if poly_deg(p) <= 0:
        return 0
    g = poly_gcd(p, poly_deriv(p))
    if poly_deg(g) > 0:
        p = poly_divmod(p, g)[0]  # count distinct roots via squarefree part
    chain = sturm_chain(p)
    vlo = variations_at_inf(chain, False) if lo is None else variations_at(chain, lo)
    vhi = variations_at_inf(chain, True) if hi is None else variations_at(chain, hi)
    return vlo - vhi


def is_squarefree(p) -> bool:
    p = poly_trim(p)
    if poly_deg(p) <= 0:
        return True
    return poly_deg(poly_gcd(p, poly_deriv(p))) <= 0


def all_roots_real_and_distinct(p) -> bool:
    """True iff deg(p) distinct real roots exist (so p is also squarefree)."""
    p = poly_trim(p)
    d = poly_deg(p)
    if d <= 0:
        return True
    return is_squarefree(p) and count_real_roots(p) == d
