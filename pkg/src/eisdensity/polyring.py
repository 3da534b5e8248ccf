"""Dense univariate polynomials over GF(q) and the monic irreducibles.

Coefficients are stored little-endian as a tuple of field element codes
with no trailing zeros, so the zero polynomial is the empty tuple and has
degree ``-inf``.
"""
from __future__ import annotations

import re
from functools import lru_cache
from typing import Iterable, Sequence

from .errors import BudgetError, DivisionByZero, DomainError, InfiniteValuation
from .gf import FieldCtx

NEG_INF = float("-inf")


class Poly:
    __slots__ = ("ctx", "coeffs")

    def __init__(self, ctx: FieldCtx, coeffs: Iterable[int] = ()):
        c = [int(a) for a in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.ctx = ctx
        self.coeffs = tuple(c)

    @classmethod
    def _raw(cls, ctx, coeffs: tuple):
        # coeffs already canonical
        obj = object.__new__(cls)
        obj.ctx = ctx
        obj.coeffs = coeffs
        return obj

    @classmethod
    def x(cls, ctx: FieldCtx) -> "Poly":
        return cls._raw(ctx, (0, 1))

    @classmethod
    def const(cls, ctx: FieldCtx, c: int) -> "Poly":
        return cls(ctx, (c,))

    @classmethod
    def monomial(cls, ctx: FieldCtx, e: int, c: int = 1) -> "Poly":
        return cls(ctx, [0] * e + [c])

    @property
    def degree(self):
        return len(self.coeffs) - 1 if self.coeffs else NEG_INF

    @property
    def lead(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def is_monic(self) -> bool:
        return self.lead == 1

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        return isinstance(other, Poly) and self.ctx == other.ctx and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.ctx.q, self.coeffs))

    def sort_key(self):
        """Degree first, then lexicographic on the little-endian coefficients."""
        return (len(self.coeffs), self.coeffs)

    def __repr__(self):
        return f"Poly({self})"

    def __str__(self):
        return format_poly(self)

    def _check(self, other):
        if not isinstance(other, Poly):
            return NotImplemented
        if other.ctx != self.ctx:
            raise DomainError("polynomials over different fields")
        return other

    def __add__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        add = self.ctx.add
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        return Poly(self.ctx, [add(x, y) for x, y in zip(a, b)] + list(a[len(b):]))

    def __neg__(self):
        return Poly._raw(self.ctx, tuple(self.ctx.neg(c) for c in self.coeffs))

    def __sub__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return self + (-other)

    def scale(self, c: int) -> "Poly":
        if c == 0:
            return Poly._raw(self.ctx, ())
        mul = self.ctx.mul
        return Poly._raw(self.ctx, tuple(mul(c, a) for a in self.coeffs))

    def __mul__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Poly._raw(self.ctx, ())
        ctx = self.ctx
        out = [0] * (len(a) + len(b) - 1)
        if ctx.m == 1:
            p = ctx.p
            for i, x in enumerate(a):
                if x:
                    for j, y in enumerate(b):
                        out[i + j] += x * y
            return Poly._raw(ctx, tuple(c % p for c in out))
        add, mul = ctx.add, ctx.mul
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        out[i + j] = add(out[i + j], mul(x, y))
        return Poly._raw(ctx, tuple(out))

    def __pow__(self, e: int):
        result = Poly._raw(self.ctx, (1,))
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __divmod__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        if not other:
            raise DivisionByZero("polynomial division by zero")
        ctx = self.ctx
        r = list(self.coeffs)
        b = other.coeffs
        db = len(b) - 1
        if len(r) - 1 < db:
            return Poly._raw(ctx, ()), self
        inv_lead = ctx.inv(b[-1])
        quot = [0] * (len(r) - db)
        if ctx.m == 1:
            p = ctx.p
            for k in range(len(r) - 1, db - 1, -1):
                c = r[k] * inv_lead % p
                if c:
                    quot[k - db] = c
                    s = k - db
                    for i in range(db + 1):
                        r[s + i] = (r[s + i] - c * b[i]) % p
        else:
            mul, sub = ctx.mul, ctx.sub
            for k in range(len(r) - 1, db - 1, -1):
                c = mul(r[k], inv_lead)
                if c:
                    quot[k - db] = c
                    s = k - db
                    for i in range(db + 1):
                        r[s + i] = sub(r[s + i], mul(c, b[i]))
        return Poly(ctx, quot), Poly(ctx, r[:db])

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def monic(self) -> "Poly":
        if not self.coeffs or self.coeffs[-1] == 1:
            return self
        return self.scale(self.ctx.inv(self.coeffs[-1]))

    def derivative(self) -> "Poly":
        ctx = self.ctx
        return Poly(ctx, [ctx.mul(ctx.from_int(i), c) for i, c in enumerate(self.coeffs)][1:])

    def __call__(self, point: int) -> int:
        """Evaluate at a field element (Horner)."""
        ctx = self.ctx
        acc = 0
        for c in reversed(self.coeffs):
            acc = ctx.add(ctx.mul(acc, point), c)
        return acc

    def powmod(self, e: int, modulus: "Poly") -> "Poly":
        result = Poly._raw(self.ctx, (1,)) % modulus
        base = self % modulus
        while e:
            if e & 1:
                result = (result * base) % modulus
            base = (base * base) % modulus
            e >>= 1
        return result


def gcd(a: Poly, b: Poly) -> Poly:
    """Monic gcd; zero when both inputs are zero."""
    while b:
        a, b = b, a % b
    return a.monic()


def poly_arith(a: Poly, b: Poly, op: str):
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "divmod":
        return divmod(a, b)
    if op == "gcd":
        return gcd(a, b)
    raise DomainError(f"unknown polynomial operation {op!r}")


def prime_factors(n: int) -> list[int]:
    out, k = [], 2
    while k * k <= n:
        if n % k == 0:
            out.append(k)
            while n % k == 0:
                n //= k
        k += 1
    if n > 1:
        out.append(n)
    return out


def mobius(n: int) -> int:
    if n < 1:
        raise DomainError("mobius is defined for positive integers")
    sign, k = 1, 2
    while k * k <= n:
        if n % k == 0:
            n //= k
            if n % k == 0:
                return 0
            sign = -sign
        k += 1
    return -sign if n > 1 else sign


def divisors(n: int) -> list[int]:
    return [k for k in range(1, n + 1) if n % k == 0]


def count_irreducibles(q: int, n: int) -> int:
    """Number of monic irreducibles of degree n over GF(q), via the necklace formula."""
    if n < 1:
        raise DomainError("degree must be positive")
    total = sum(mobius(n // k) * q**k for k in divisors(n))
    assert total % n == 0
    return total // n


def is_irreducible(f: Poly) -> bool:
    """Squarefree check, then Rabin's test on x**(q**k) mod f."""
    if not f or f.degree < 1:
        raise DomainError("irreducibility is only defined for non-constant polynomials")
    f = f.monic()
    n = f.degree
    if n == 1:
        return True
    df = f.derivative()
    if not df or gcd(f, df).degree > 0:
        return False
    ctx = f.ctx
    x = Poly.x(ctx)
    q = ctx.q
    frob = {0: x % f}
    h = frob[0]
    for k in range(1, n + 1):
        h = h.powmod(q, f)
        frob[k] = h
    if frob[n] != x % f:
        return False
    for r in prime_factors(n):
        if gcd(frob[n // r] - x, f).degree > 0:
            return False
    return True


def monic_from_index(ctx: FieldCtx, n: int, index: int) -> Poly:
    """Monic degree-n polynomial at position ``index`` in lexicographic order.

    The constant term is the most significant digit of the order, matching
    comparison of little-endian coefficient vectors.
    """
    q = ctx.q
    low = [(index // q ** (n - 1 - i)) % q for i in range(n)]
    return Poly._raw(ctx, tuple(low) + (1,))


def monic_irreducibles(ctx: FieldCtx, n: int) -> list[Poly]:
    """All monic irreducibles of degree n, lexicographic on little-endian coefficients."""
    if n < 1:
        raise DomainError("degree must be positive")
    return list(_monic_irreducibles(ctx, n))


SIEVE_CAP = 1 << 28


@lru_cache(maxsize=None)
def _monic_irreducibles(ctx: FieldCtx, n: int) -> tuple:
    from . import _backend

    if ctx.q**n > SIEVE_CAP:
        raise BudgetError(
            f"too large to enumerate: {ctx.q}**{n} monic polynomials exceeds the sieve cap",
            ctx.q**n,
            SIEVE_CAP,
        )
    mask = _backend.irreducible_sieve(ctx, n)
    return tuple(monic_from_index(ctx, n, int(i)) for i in mask.nonzero()[0])


def valuation(f: Poly, p: Poly) -> int:
    """Largest k with p**k dividing f."""
    if not f:
        raise InfiniteValuation("valuation of the zero polynomial is infinite")
    if p.degree < 1:
        raise DomainError("valuation needs a non-constant irreducible")
    k = 0
    while True:
        quo, rem = divmod(f, p)
        if rem:
            return k
        f = quo
        k += 1


_TERM = re.compile(r"^(?:(\d+)\*?)?([xt])(?:\^(\d+))?$|^(\d+)$")


def parse_poly(ctx: FieldCtx, text: str) -> Poly:
    """Parse ``"x^2+x+1"``, ``"2*x^3+1"`` or the list form ``"1,1,1"``.

    Coefficients are field element codes as documented in :mod:`gf`.  The
    list form is little-endian.  Either ``x`` or ``t`` names the variable.
    """
    s = text.strip().replace(" ", "")
    if s.startswith("(") and s.endswith(")"):
        s = s[1:-1]
    if not s:
        raise DomainError("empty polynomial")
    if "," in s:
        try:
            return Poly(ctx, [ctx.check(int(c)) for c in s.split(",")])
        except ValueError:
            raise DomainError(f"bad coefficient list {text!r}") from None
    terms: dict[int, int] = {}
    for raw in re.split(r"(?=[+-])", s):
        if not raw:
            continue
        sign = 1
        if raw[0] in "+-":
            sign = -1 if raw[0] == "-" else 1
            raw = raw[1:]
        m = _TERM.match(raw)
        if not m:
            raise DomainError(f"cannot parse term {raw!r} in {text!r}")
        if m.group(4) is not None:
            coef, exp = int(m.group(4)), 0
        else:
            coef = int(m.group(1)) if m.group(1) is not None else 1
            exp = int(m.group(3)) if m.group(3) is not None else 1
        ctx.check(coef)
        if sign < 0:
            coef = ctx.neg(coef)
        terms[exp] = ctx.add(terms.get(exp, 0), coef)
    top = max(terms)
    return Poly(ctx, [terms.get(i, 0) for i in range(top + 1)])


def format_poly(f: Poly, var: str = "x") -> str:
    if not f.coeffs:
        return "0"
    parts = []
    for e in range(len(f.coeffs) - 1, -1, -1):
        c = f.coeffs[e]
        if not c:
            continue
        if e == 0:
            parts.append(str(c))
            continue
        mono = var if e == 1 else f"{var}^{e}"
        parts.append(mono if c == 1 else f"{c}*{mono}")
    return "+".join(parts)


def poly_from_coeffs(ctx: FieldCtx, coeffs: Sequence[int]) -> Poly:
    return Poly(ctx, [ctx.check(int(c)) for c in coeffs])
