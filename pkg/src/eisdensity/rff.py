"""The rational function field GF(q)(x): places, holomorphy rings, L(D).

A holomorphy ring is described by its finite exclusion set E of places,
which must contain the infinite place.  Then S is every other place and
H = GF(q)[x][1/u] with u the product of the finite excluded places.
Elements of H are kept as ``num / prod p_i**e_i`` over excluded p_i.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

from .errors import BudgetError, DomainError, InfiniteValuation
from .gf import FieldCtx
from .polyring import Poly, is_irreducible, monic_irreducibles, parse_poly, valuation

DEFAULT_BUDGET = 1 << 26


@dataclass(frozen=True)
class Place:
    """A finite place (monic irreducible ``poly``) or the infinite place (``poly is None``)."""

    poly: Poly | None = None

    def __post_init__(self):
        f = self.poly
        if f is not None and (f.degree < 1 or not f.is_monic() or not is_irreducible(f)):
            raise DomainError(f"{f} is not a monic irreducible polynomial")

    @classmethod
    def infinity(cls) -> "Place":
        return cls(None)

    @classmethod
    def trusted(cls, poly: Poly) -> "Place":
        """Wrap a polynomial already known to be monic irreducible."""
        obj = object.__new__(cls)
        object.__setattr__(obj, "poly", poly)
        return obj

    @property
    def is_infinite(self) -> bool:
        return self.poly is None

    @property
    def degree(self) -> int:
        return 1 if self.poly is None else self.poly.degree

    def sort_key(self):
        if self.poly is None:
            return (0, ())
        return self.poly.sort_key()

    def __str__(self):
        return "inf" if self.poly is None else f"({self.poly})"


INF = Place.infinity()


@dataclass(frozen=True)
class HolomorphySet:
    """S = all places of GF(q)(x) outside ``excluded``; ``excluded`` holds infinity."""

    ctx: FieldCtx
    excluded: frozenset = field(default_factory=lambda: frozenset({INF}))

    def __post_init__(self):
        ex = frozenset(self.excluded)
        if INF not in ex:
            raise DomainError("the exclusion set must contain the infinite place")
        for P in ex:
            if P.poly is not None and P.poly.ctx != self.ctx:
                raise DomainError(f"place {P} lives over a different field")
        object.__setattr__(self, "excluded", ex)

    @classmethod
    def polynomial_ring(cls, ctx: FieldCtx) -> "HolomorphySet":
        return cls(ctx, frozenset({INF}))

    @property
    def finite_excluded(self) -> list[Place]:
        return sorted((P for P in self.excluded if P.poly is not None), key=Place.sort_key)

    @property
    def u(self) -> Poly:
        out = Poly.const(self.ctx, 1)
        for P in self.finite_excluded:
            out = out * P.poly
        return out

    def __contains__(self, P: Place) -> bool:
        return P not in self.excluded

    def excluded_by_degree(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for P in self.finite_excluded:
            out[P.degree] = out.get(P.degree, 0) + 1
        return out

    def places(self, degree: int) -> list[Place]:
        """Places of S of the given degree, in the canonical enumeration order."""
        return [P for P in map(Place.trusted, monic_irreducibles(self.ctx, degree)) if P in self]

    def places_up_to(self, max_degree: int) -> list[Place]:
        return [P for n in range(1, max_degree + 1) for P in self.places(n)]

    def __str__(self):
        return ",".join(str(P) for P in sorted(self.excluded, key=Place.sort_key))


@dataclass(frozen=True)
class Divisor:
    """A positive divisor supported on the exclusion set of ``holo``."""

    holo: HolomorphySet
    coeffs: tuple  # sorted ((Place, int), ...), zero coefficients dropped

    def __init__(self, holo: HolomorphySet, coeffs: Mapping[Place, int] | Iterable = ()):
        items = dict(coeffs)
        for P, n in items.items():
            if P not in holo.excluded:
                raise DomainError(f"divisor support {P} lies in S; support must be in the exclusion set")
            if n < 0:
                raise DomainError(f"negative coefficient {n} at {P}: only positive divisors are allowed")
        kept = sorted(((P, int(n)) for P, n in items.items() if n), key=lambda t: t[0].sort_key())
        object.__setattr__(self, "holo", holo)
        object.__setattr__(self, "coeffs", tuple(kept))

    @classmethod
    def at_infinity(cls, holo: HolomorphySet, a: int) -> "Divisor":
        return cls(holo, {INF: a})

    def __getitem__(self, P: Place) -> int:
        return dict(self.coeffs).get(P, 0)

    @property
    def degree(self) -> int:
        return sum(n * P.degree for P, n in self.coeffs)

    @property
    def denominator(self) -> Poly:
        out = Poly.const(self.holo.ctx, 1)
        for P, n in self.coeffs:
            if P.poly is not None:
                out = out * P.poly**n
        return out

    def __le__(self, other: "Divisor") -> bool:
        places = {P for P, _ in self.coeffs} | {P for P, _ in other.coeffs}
        return all(self[P] <= other[P] for P in places)

    def __str__(self):
        if not self.coeffs:
            return "0"
        return " + ".join(f"{n}*{P}" for P, n in self.coeffs)


class HElem:
    """An element ``num / prod p**e`` of H, with every cancellation carried out."""

    __slots__ = ("holo", "num", "denpow")

    def __init__(self, holo: HolomorphySet, num: Poly, denpow: Mapping[Place, int] | None = None):
        pows = dict(denpow or {})
        for P, e in pows.items():
            if P.poly is None or P not in holo.excluded:
                raise DomainError(f"denominator place {P} is not a finite excluded place")
            if e < 0:
                raise DomainError("denominator exponents must be nonnegative")
        if not num:
            pows = {}
        else:
            for P in list(pows):
                while pows[P] > 0:
                    quo, rem = divmod(num, P.poly)
                    if rem:
                        break
                    num = quo
                    pows[P] -= 1
        self.holo = holo
        self.num = num
        self.denpow = tuple(sorted(((P, e) for P, e in pows.items() if e), key=lambda t: t[0].sort_key()))

    @property
    def den(self) -> Poly:
        out = Poly.const(self.holo.ctx, 1)
        for P, e in self.denpow:
            out = out * P.poly**e
        return out

    def __bool__(self):
        return bool(self.num)

    def __eq__(self, other):
        return (
            isinstance(other, HElem)
            and self.holo == other.holo
            and self.num == other.num
            and self.denpow == other.denpow
        )

    def __hash__(self):
        return hash((self.num, self.denpow))

    def __mul__(self, other: "HElem") -> "HElem":
        pows = dict(self.denpow)
        for P, e in other.denpow:
            pows[P] = pows.get(P, 0) + e
        return HElem(self.holo, self.num * other.num, pows)

    def __add__(self, other: "HElem") -> "HElem":
        pows = dict(self.denpow)
        for P, e in other.denpow:
            pows[P] = max(pows.get(P, 0), e)
        a, b = self.num, other.num
        for P, e in pows.items():
            a = a * P.poly ** (e - dict(self.denpow).get(P, 0))
            b = b * P.poly ** (e - dict(other.denpow).get(P, 0))
        return HElem(self.holo, a + b, pows)

    def scale(self, c: int) -> "HElem":
        return HElem(self.holo, self.num.scale(c), dict(self.denpow))

    def valuation_at(self, P: Place) -> int:
        """Valuation at any place of GF(q)(x), including excluded ones."""
        if not self.num:
            raise InfiniteValuation("valuation of zero is infinite")
        if P.poly is None:
            return self.den.degree - self.num.degree
        return valuation(self.num, P.poly) - dict(self.denpow).get(P, 0)

    def __repr__(self):
        return f"HElem({self})"

    def __str__(self):
        if not self.denpow:
            return str(self.num)
        den = "*".join(f"({P.poly})" + (f"^{e}" if e > 1 else "") for P, e in self.denpow)
        return f"({self.num})/{den}"


def h_valuation(h: HElem, P: Place) -> int:
    """Valuation of h at a finite place P of S."""
    if P.poly is None or P not in h.holo:
        raise DomainError(f"{P} is not a place of the holomorphy set")
    if not h.num:
        raise InfiniteValuation("valuation of zero is infinite")
    return valuation(h.num, P.poly)


def rr_dimension(D: Divisor) -> int:
    """l(D) = deg D + 1 (genus 0, D positive)."""
    return D.degree + 1


def rr_basis(D: Divisor) -> list[HElem]:
    """The basis ``x**j / den(D)`` for 0 <= j <= deg D."""
    ctx = D.holo.ctx
    pows = {P: n for P, n in D.coeffs if P.poly is not None}
    return [HElem(D.holo, Poly.monomial(ctx, j), pows) for j in range(rr_dimension(D))]


def check_budget(q: int, exponent: int, budget: int, what: str = "elements") -> int:
    size = q**exponent
    if size > budget:
        raise BudgetError(
            f"too large to enumerate: {q}**{exponent} = {size} {what} exceeds budget {budget}",
            size,
            budget,
        )
    return size


def rr_enumerate(D: Divisor, budget: int = DEFAULT_BUDGET) -> Iterator[HElem]:
    """Every element of L(D) once; coefficient vectors with the last basis index fastest."""
    ctx = D.holo.ctx
    ell = rr_dimension(D)
    check_budget(ctx.q, ell, budget)
    pows = {P: n for P, n in D.coeffs if P.poly is not None}
    for vec in itertools.product(range(ctx.q), repeat=ell):
        yield HElem(D.holo, Poly(ctx, vec), pows)


# text syntax


def _split_top(text: str, sep: str) -> list[str]:
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == sep and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return [p.strip() for p in parts if p.strip()]


def parse_place(ctx: FieldCtx, text: str) -> Place:
    s = text.strip()
    if s in ("inf", "oo", "infinity"):
        return INF
    return Place(parse_poly(ctx, s).monic())


def parse_places(ctx: FieldCtx, text: str) -> list[Place]:
    return [parse_place(ctx, t) for t in _split_top(text, ",")]


def parse_exclusion(ctx: FieldCtx, text: str | None) -> HolomorphySet:
    if not text:
        return HolomorphySet.polynomial_ring(ctx)
    return HolomorphySet(ctx, frozenset(parse_places(ctx, text)))


_DIV_TERM = re.compile(r"^(?:(\d+)\s*\*\s*)?(.+)$")


def parse_divisor(holo: HolomorphySet, text: str) -> Divisor:
    """Parse ``"4*inf + 2*(x) + 1*(x^2+x+1)"``."""
    coeffs: dict[Place, int] = {}
    for term in _split_top(text, "+"):
        m = _DIV_TERM.match(term)
        if not m:
            raise DomainError(f"cannot parse divisor term {term!r}")
        n = int(m.group(1)) if m.group(1) else 1
        P = parse_place(holo.ctx, m.group(2))
        coeffs[P] = coeffs.get(P, 0) + n
    return Divisor(holo, coeffs)
