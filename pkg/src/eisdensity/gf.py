"""Finite fields GF(q), q = p**m.

Elements are plain ints in ``range(q)``: the base-p digits of the int,
least significant first, are the coefficients of the element as a
polynomial in the generator y modulo ``modulus``.  So over GF(9) the int
5 stands for 2 + y.  This encoding is canonical, equality is int equality,
and ``range(q)`` is the enumeration order.
"""
from __future__ import annotations

from functools import cached_property
from typing import Iterator, Sequence

from .errors import DivisionByZero, DomainError

MAX_Q = 1 << 16
# full q*q add/mul tables are only materialised up to this order
TABLE_MAX_Q = 256


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    k = 3
    while k * k <= n:
        if n % k == 0:
            return False
        k += 2
    return True


def prime_power(q: int) -> tuple[int, int]:
    """Split q into (p, m) with q == p**m, or raise DomainError."""
    if q < 2:
        raise DomainError(f"{q} is not a prime power")
    p = 2
    while q % p:
        p += 1
    m, r = 0, q
    while r % p == 0:
        r //= p
        m += 1
    if r != 1:
        raise DomainError(f"{q} is not a prime power")
    return p, m


# --- helpers on dense F_p polynomials (tuples, little-endian) used only to
# --- pick and apply the defining modulus

def _fp_trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _fp_mod(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    a = _fp_trim(list(a))
    inv_lead = pow(b[-1], p - 2, p)
    db = len(b) - 1
    while len(a) - 1 >= db and a:
        c = a[-1] * inv_lead % p
        shift = len(a) - 1 - db
        for i, bc in enumerate(b):
            a[shift + i] = (a[shift + i] - c * bc) % p
        _fp_trim(a)
    return a


def _fp_irreducible(f: Sequence[int], p: int) -> bool:
    # trial division by every monic polynomial of degree 1..deg(f)//2
    n = len(f) - 1
    for k in range(1, n // 2 + 1):
        for code in range(p**k):
            g = [(code // p**i) % p for i in range(k)] + [1]
            if not _fp_mod(f, g, p):
                return False
    return True


def default_modulus(p: int, m: int) -> tuple[int, ...]:
    """Least monic irreducible of degree m over F_p.

    Candidates are scanned in lexicographic order of their little-endian
    coefficient vectors (constant term most significant).
    """
    for code in range(p**m):
        low = [(code // p ** (m - 1 - i)) % p for i in range(m)]
        f = low + [1]
        if f[0] != 0 and _fp_irreducible(f, p):
            return tuple(f)
    raise AssertionError("no irreducible polynomial found")  # unreachable


class FieldCtx:
    """The field GF(p**m); immutable after construction."""

    def __init__(self, p: int, m: int = 1, modulus: Sequence[int] | None = None):
        if not is_prime(p):
            raise DomainError(f"characteristic {p} is not prime")
        if m < 1:
            raise DomainError("extension degree must be positive")
        if p**m > MAX_Q:
            raise DomainError(f"q = {p}**{m} exceeds the supported cap 2**16")
        self.p = p
        self.m = m
        self.q = p**m
        if m == 1:
            if modulus is not None and len(modulus) != 2:
                raise DomainError("a prime field takes no modulus of degree > 1")
            self.modulus = None
        else:
            if modulus is None:
                modulus = default_modulus(p, m)
            modulus = tuple(int(c) % p for c in modulus)
            if len(modulus) != m + 1 or modulus[-1] != 1:
                raise DomainError(f"modulus must be monic of degree {m}")
            if not _fp_irreducible(modulus, p):
                raise DomainError(f"modulus {modulus} is reducible over F_{p}")
            self.modulus = modulus
            self._build_log_tables()

    @classmethod
    def of_order(cls, q: int, modulus: Sequence[int] | None = None) -> "FieldCtx":
        p, m = prime_power(q)
        return cls(p, m, modulus)

    def __repr__(self):
        return f"FieldCtx(q={self.q})"

    def __eq__(self, other):
        return (
            isinstance(other, FieldCtx)
            and (self.p, self.m, self.modulus) == (other.p, other.m, other.modulus)
        )

    def __hash__(self):
        return hash((self.p, self.m, self.modulus))

    # digit encoding

    def digits(self, a: int) -> tuple[int, ...]:
        p = self.p
        return tuple((a // p**i) % p for i in range(self.m))

    def from_digits(self, digits: Sequence[int]) -> int:
        p = self.p
        if len(digits) > self.m:
            raise DomainError("too many digits for this field")
        return sum((d % p) * p**i for i, d in enumerate(digits))

    def check(self, a: int) -> int:
        if not 0 <= a < self.q:
            raise DomainError(f"{a} is not an element code of GF({self.q})")
        return a

    def from_int(self, k: int) -> int:
        """Image of the integer k under Z -> GF(q)."""
        return k % self.p

    def elements(self) -> range:
        return range(self.q)

    # arithmetic

    def _build_log_tables(self):
        q, p, mod = self.q, self.p, self.modulus

        def raw_mul(a, b):
            da, db = self.digits(a), self.digits(b)
            prod = [0] * (2 * self.m - 1)
            for i, x in enumerate(da):
                if x:
                    for j, y in enumerate(db):
                        prod[i + j] = (prod[i + j] + x * y) % p
            return self.from_digits(_fp_mod(prod, mod, p) or [0])

        for g in range(2, q):
            exp = [1]
            x = g
            while x != 1:
                exp.append(x)
                x = raw_mul(x, g)
            if len(exp) == q - 1:
                break
        log = [0] * q
        for i, x in enumerate(exp):
            log[x] = i
        self._exp = exp + exp
        self._log = log

    def add(self, a: int, b: int) -> int:
        if self.m == 1:
            return (a + b) % self.p
        if self.p == 2:
            return a ^ b
        p, r, k = self.p, 0, 1
        while a or b:
            r += ((a % p + b % p) % p) * k
            a //= p
            b //= p
            k *= p
        return r

    def neg(self, a: int) -> int:
        if self.m == 1:
            return -a % self.p
        if self.p == 2:
            return a
        p, r, k = self.p, 0, 1
        while a:
            r += (-(a % p) % p) * k
            a //= p
            k *= p
        return r

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if self.m == 1:
            return a * b % self.p
        if a == 0 or b == 0:
            return 0
        return self._exp[self._log[a] + self._log[b]]

    def inv(self, a: int) -> int:
        if a == 0:
            raise DivisionByZero(f"0 has no inverse in GF({self.q})")
        if self.m == 1:
            return pow(a, self.p - 2, self.p)
        return self._exp[(self.q - 1 - self._log[a]) % (self.q - 1)]

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            return self.pow(self.inv(a), -e)
        if a == 0:
            return 1 if e == 0 else 0
        if self.m == 1:
            return pow(a, e, self.p)
        return self._exp[(self._log[a] * e) % (self.q - 1)]

    @cached_property
    def tables(self):
        """``(add, mul, neg, inv)`` as numpy int32 arrays, for the kernels.

        ``inv[0]`` is 0 by convention.  Only available for q <= 256.
        """
        import numpy as np

        q = self.q
        if q > TABLE_MAX_Q:
            raise DomainError(f"arithmetic tables are capped at q <= {TABLE_MAX_Q}")
        add = np.array([[self.add(a, b) for b in range(q)] for a in range(q)], dtype=np.int32)
        mul = np.array([[self.mul(a, b) for b in range(q)] for a in range(q)], dtype=np.int32)
        neg = np.array([self.neg(a) for a in range(q)], dtype=np.int32)
        inv = np.array([0] + [self.inv(a) for a in range(1, q)], dtype=np.int32)
        return add, mul, neg, inv


_OPS = {"add", "sub", "mul", "div"}


def fq_arith(ctx: FieldCtx, a: int, b: int, op: str) -> int:
    if op not in _OPS:
        raise DomainError(f"unknown field operation {op!r}")
    ctx.check(a)
    ctx.check(b)
    return getattr(ctx, op)(a, b)


def fq_enumerate(ctx: FieldCtx) -> Iterator[int]:
    """All q elements, 0 first, in increasing code order.

    Increasing code order is lexicographic on digit vectors read from the
    most significant digit down.
    """
    return iter(ctx.elements())
