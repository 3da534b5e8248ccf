"""Closed-form densities of Eisenstein polynomials.

Each place of degree n in S contributes a local factor, the density of
polynomials that are *not* Eisenstein there:

    monic:   1 - (q**n - 1) / q**((d+1)*n)
    general: 1 - (q**n - 1)**2 / q**((d+2)*n)

The Eisenstein density is one minus the product of the factors over S.
Everything is exact rational arithmetic; products too large to hold
exactly are enclosed between dyadic rationals with directed rounding.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import BudgetError, DomainError, UnattainableWidth
from .polyring import count_irreducibles, divisors, mobius

KINDS = ("monic", "general")
PROVENANCES = ("rational-field", "L-polynomial", "explicit")
# what is known about counts beyond the cutoff
BEYOND = ("zero", "majorant", "unverified")

# above this many bits an exact truncated product is replaced by an enclosure
EXACT_BITS = 1 << 13
EXACT_BITS_HARD_CAP = 1 << 24


def _check_kind(kind: str):
    if kind not in KINDS:
        raise DomainError(f"kind must be one of {KINDS}, got {kind!r}")


def _check_degree(d: int):
    if d < 2:
        raise DomainError(
            f"degree d = {d} is not allowed: densities are only defined here for d > 1, "
            "where the tail over places converges"
        )


@dataclass(frozen=True)
class PlaceSpectrum:
    """Number of places of S of each degree.

    Rational-field spectra know every count (necklace formula minus the
    excluded finite places).  Other spectra store counts up to ``cutoff``;
    ``beyond`` says whether later counts are zero, bounded by
    ``majorant * q**n``, or unknown.
    """

    q: int
    genus: int = 0
    counts: Mapping[int, int] = field(default_factory=dict)
    cutoff: int | None = None
    provenance: str = "explicit"
    beyond: str = "zero"
    majorant: Fraction | None = None
    excluded: Mapping[int, int] = field(default_factory=dict)

    def __post_init__(self):
        if self.provenance not in PROVENANCES:
            raise DomainError(f"unknown provenance {self.provenance!r}")
        if self.beyond not in BEYOND:
            raise DomainError(f"unknown tail regime {self.beyond!r}")
        if self.beyond == "majorant" and (self.majorant is None or self.majorant < 0):
            raise DomainError("a majorant spectrum needs a nonnegative majorant")
        if self.genus < 0:
            raise DomainError("genus must be nonnegative")
        for n, c in self.counts.items():
            if c < 0:
                raise DomainError(f"invalid spectrum: count {c} at degree {n} is negative")
        if self.provenance == "rational-field":
            if self.genus != 0:
                raise DomainError("the rational function field has genus 0")
            for n, c in self.excluded.items():
                if c > count_irreducibles(self.q, n):
                    raise DomainError(f"cannot exclude {c} places of degree {n}")
        elif self.cutoff is None:
            object.__setattr__(self, "cutoff", max(self.counts, default=0))

    @classmethod
    def rational_field(cls, q: int, excluded: Mapping[int, int] | None = None) -> "PlaceSpectrum":
        """S = every finite place of GF(q)(x) except ``excluded`` (degree -> how many)."""
        return cls(q=q, provenance="rational-field", beyond="majorant", majorant=Fraction(1),
                   excluded=dict(excluded or {}))

    @classmethod
    def from_holomorphy_set(cls, holo) -> "PlaceSpectrum":
        return cls.rational_field(holo.ctx.q, holo.excluded_by_degree())

    @classmethod
    def from_degrees(cls, q: int, degrees: Iterable[int]) -> "PlaceSpectrum":
        """Finite spectrum of the given place degrees; no places beyond them."""
        counts: dict[int, int] = {}
        for n in degrees:
            if n < 1:
                raise DomainError("place degrees are positive")
            counts[n] = counts.get(n, 0) + 1
        return cls(q=q, counts=counts, cutoff=max(counts, default=0), beyond="zero")

    def count(self, n: int) -> int:
        if self.provenance == "rational-field":
            return count_irreducibles(self.q, n) - self.excluded.get(n, 0)
        if n <= self.cutoff:
            return self.counts.get(n, 0)
        if self.beyond == "zero":
            return 0
        raise DomainError(f"place count at degree {n} lies beyond the spectrum cutoff {self.cutoff}")

    @property
    def known_up_to(self) -> float:
        if self.provenance == "rational-field" or self.beyond == "zero":
            return math.inf
        return self.cutoff

    def to_json(self, cutoff: int | None = None) -> dict:
        top = self.cutoff if self.cutoff is not None else (cutoff or 0)
        out = {
            "q": self.q,
            "genus": self.genus,
            "counts": {str(n): self.count(n) for n in range(1, top + 1)},
            "cutoff": self.cutoff,
            "provenance": self.provenance,
            "beyond": self.beyond,
            "majorant": None if self.majorant is None else str(self.majorant),
        }
        if self.excluded:
            out["excluded"] = {str(n): c for n, c in sorted(self.excluded.items())}
        return out

    @classmethod
    def from_json(cls, obj: Mapping) -> "PlaceSpectrum":
        prov = obj.get("provenance", "explicit")
        if prov == "rational-field":
            excl = {int(n): int(c) for n, c in obj.get("excluded", {}).items()}
            return cls.rational_field(int(obj["q"]), excl)
        maj = obj.get("majorant")
        counts = {int(n): int(c) for n, c in obj.get("counts", {}).items()}
        cutoff = obj.get("cutoff")
        return cls(
            q=int(obj["q"]),
            genus=int(obj.get("genus", 0)),
            counts=counts,
            cutoff=int(cutoff) if cutoff is not None else None,
            provenance=prov,
            beyond=obj.get("beyond", "majorant" if maj is not None else "unverified"),
            majorant=Fraction(maj) if maj is not None else None,
        )


def term(q: int, d: int, n: int, kind: str) -> Fraction:
    """Density removed by one place of degree n (one minus the local factor)."""
    if kind == "monic":
        return Fraction(q**n - 1, q ** ((d + 1) * n))
    return Fraction((q**n - 1) ** 2, q ** ((d + 2) * n))


def local_factor(q: int, d: int, n: int, kind: str) -> Fraction:
    _check_degree(d)
    _check_kind(kind)
    if n < 1:
        raise DomainError("place degree must be positive")
    return 1 - term(q, d, n, kind)


def _factor_parts(q: int, d: int, n: int, kind: str) -> tuple[int, int]:
    # local factor as num/den with den a power of q and gcd(num, q) == 1
    if kind == "monic":
        den = q ** ((d + 1) * n)
        return den - q**n + 1, den
    den = q ** ((d + 2) * n)
    return den - (q**n - 1) ** 2, den


def _estimated_bits(spec: PlaceSpectrum, d: int, N: int) -> float:
    lq = math.log2(spec.q)
    return sum(spec.count(n) * (d + 2) * n * lq for n in range(1, N + 1))


def truncated_not_eisenstein(spec: PlaceSpectrum, d: int, kind: str, N: int) -> Fraction:
    """Exact product of local factors over places of degree <= N."""
    _check_degree(d)
    _check_kind(kind)
    if N < 0:
        raise DomainError("truncation degree must be nonnegative")
    if _estimated_bits(spec, d, N) > EXACT_BITS_HARD_CAP:
        raise BudgetError(
            f"exact product up to degree {N} needs about {_estimated_bits(spec, d, N):.3g} bits; "
            "use truncated_enclosure",
            int(_estimated_bits(spec, d, N)),
            EXACT_BITS_HARD_CAP,
        )
    num, den = 1, 1
    for n in range(1, N + 1):
        c = spec.count(n)
        if c:
            a, b = _factor_parts(spec.q, d, n, kind)
            num *= a**c
            den *= b**c
    return Fraction(num, den)


def _mul_floor(a: int, b: int, prec: int) -> int:
    return (a * b) >> prec


def _mul_ceil(a: int, b: int, prec: int) -> int:
    return -((-(a * b)) >> prec)


def _pow_dir(base: int, e: int, prec: int, up: bool) -> int:
    mul = _mul_ceil if up else _mul_floor
    result = 1 << prec
    while e:
        if e & 1:
            result = mul(result, base, prec)
        base = mul(base, base, prec)
        e >>= 1
    return result


def truncated_enclosure(spec: PlaceSpectrum, d: int, kind: str, N: int,
                        prec: int = 256) -> tuple[Fraction, Fraction]:
    """Rigorous ``(lo, hi)`` around :func:`truncated_not_eisenstein` at ``prec`` bits.

    Returns the exact value twice when it is small enough to compute.
    """
    _check_degree(d)
    _check_kind(kind)
    if _estimated_bits(spec, d, N) <= EXACT_BITS:
        v = truncated_not_eisenstein(spec, d, kind, N)
        return v, v
    lo = hi = 1 << prec
    for n in range(1, N + 1):
        c = spec.count(n)
        if not c:
            continue
        a, b = _factor_parts(spec.q, d, n, kind)
        f_lo = (a << prec) // b
        f_hi = -((-(a << prec)) // b)
        lo = _mul_floor(lo, _pow_dir(f_lo, c, prec, up=False), prec)
        hi = _mul_ceil(hi, _pow_dir(f_hi, c, prec, up=True), prec)
    scale = 1 << prec
    return Fraction(lo, scale), Fraction(min(hi, scale), scale)


def _geometric_tail(q: int, d: int, start: int) -> Fraction:
    # sum_{n >= start} q**((1-d)*n)
    r = Fraction(1, q ** (d - 1))
    return r**start / (1 - r)


def tail_bound(spec: PlaceSpectrum, d: int, kind: str, N: int, *,
               allow_unverified: bool = False) -> Fraction:
    """Upper bound on |full product - product truncated at degree N|.

    Sums count(n) * term(n) over the known counts past N, then bounds the
    unknown remainder by ``majorant * q**(d*genus) * sum q**((1-d) n)``,
    using count(n) <= majorant * q**n and term(n) < q**(-d n).
    """
    _check_degree(d)
    _check_kind(kind)
    q = spec.q
    if spec.provenance == "rational-field":
        return _geometric_tail(q, d, N + 1)
    known = sum(
        (spec.count(n) * term(q, d, n, kind) for n in range(N + 1, spec.cutoff + 1)),
        Fraction(0),
    )
    if spec.beyond == "zero":
        return known
    if spec.beyond == "majorant":
        start = max(N, spec.cutoff) + 1
        return known + spec.majorant * q ** (d * spec.genus) * _geometric_tail(q, d, start)
    if not allow_unverified:
        raise DomainError(
            "spectrum has no majorant beyond its cutoff; supply one or pass allow_unverified"
        )
    return known


@dataclass(frozen=True)
class DensityInterval:
    """Enclosure of an Eisenstein density.

    ``truncated`` is one minus the product up to degree ``N`` (exact when
    ``rounding`` is 0; otherwise the true truncation lies in
    ``[truncated, truncated + rounding]``).  ``tail`` bounds the distance
    to the full product, and ``[lo, hi]`` is the resulting interval.
    """

    N: int
    truncated: Fraction
    tail: Fraction
    rounding: Fraction
    lo: Fraction
    hi: Fraction

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2

    @property
    def exact(self) -> bool:
        return self.rounding == 0

    def __contains__(self, x) -> bool:
        return self.lo <= x <= self.hi

    def to_json(self) -> dict:
        return {
            "truncated": frac_str(self.truncated),
            "tail": frac_str(self.tail),
            "rounding": frac_str(self.rounding),
            "lo": frac_str(self.lo),
            "hi": frac_str(self.hi),
            "N": self.N,
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> "DensityInterval":
        return cls(
            N=int(obj["N"]),
            truncated=Fraction(obj["truncated"]),
            tail=Fraction(obj["tail"]),
            rounding=Fraction(obj.get("rounding", "0")),
            lo=Fraction(obj["lo"]),
            hi=Fraction(obj["hi"]),
        )


def frac_str(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def _interval_at(spec, d, kind, N, tail, prec) -> DensityInterval:
    p_lo, p_hi = truncated_enclosure(spec, d, kind, N, prec)
    truncated = 1 - p_hi
    rounding = p_hi - p_lo
    lo = max(Fraction(0), truncated - tail)
    hi = min(Fraction(1), truncated + rounding + tail)
    return DensityInterval(N=N, truncated=truncated, tail=tail, rounding=rounding, lo=lo, hi=hi)


def eisenstein_density(spec: PlaceSpectrum, d: int, kind: str, target_width) -> DensityInterval:
    """Interval of width <= target_width around the Eisenstein density.

    N is the least degree with ``2*tail(N) + rounding(N) <= target_width``;
    rounding is zero whenever the truncated product is computed exactly.
    """
    _check_degree(d)
    _check_kind(kind)
    width = Fraction(target_width)
    if width <= 0:
        raise DomainError("target width must be positive")
    if spec.provenance != "rational-field" and spec.beyond == "unverified":
        raise UnattainableWidth(
            "spectrum has no majorant beyond its cutoff; only the truncated value is available",
            best_width=None,
        )
    limit = spec.known_up_to
    prec = 64 + max(64, math.ceil(-math.log2(width)) if width < 1 else 0)
    N = 1
    while True:
        if N > limit:
            best = _interval_at(spec, d, kind, spec.cutoff, tail_bound(spec, d, kind, spec.cutoff), prec)
            raise UnattainableWidth(
                f"width {width} needs counts beyond degree {spec.cutoff}; best is {best.width}",
                best_width=best.width,
            )
        tail = tail_bound(spec, d, kind, N)
        if 2 * tail <= width:
            p = prec + max((spec.count(n).bit_length() for n in range(1, N + 1)), default=0)
            iv = _interval_at(spec, d, kind, N, tail, p)
            if 2 * tail + iv.rounding <= width:
                return iv
        N += 1


def spectrum_from_L_polynomial(q: int, genus: int, L: Sequence[int],
                               excluded: Iterable[tuple[int, int]] = (), N: int = 10, *,
                               majorant: Fraction | None = None,
                               check_functional_equation: bool = True) -> PlaceSpectrum:
    """Place counts of a genus-g curve from its L-polynomial, up to degree N.

    Power sums of the reciprocal roots come from Newton's identities on the
    integer coefficients, N_m = q**m + 1 - s_m, and the places of degree n
    follow by Mobius inversion.  ``excluded`` lists (degree, count) pairs
    removed from S.
    """
    L = [int(a) for a in L]
    if len(L) != 2 * genus + 1:
        raise DomainError(f"L-polynomial of genus {genus} must have degree {2 * genus}")
    if L[0] != 1:
        raise DomainError("L-polynomial must satisfy L(0) = 1")
    if check_functional_equation:
        for k in range(genus + 1):
            if L[2 * genus - k] != q ** (genus - k) * L[k]:
                raise DomainError("L-polynomial fails the functional equation a_{2g-k} = q^{g-k} a_k")
    if N < 1:
        raise DomainError("cutoff must be positive")
    a = L + [0] * max(0, N + 1 - len(L))
    s = [0] * (N + 1)
    for m in range(1, N + 1):
        s[m] = -m * a[m] - sum(a[k] * s[m - k] for k in range(1, m))
    points = [0] + [q**m + 1 - s[m] for m in range(1, N + 1)]
    excl: dict[int, int] = {}
    for deg, cnt in excluded:
        excl[deg] = excl.get(deg, 0) + cnt
    counts = {}
    for n in range(1, N + 1):
        total = sum(mobius(n // m) * points[m] for m in divisors(n))
        if total % n:
            raise DomainError(f"invalid L-polynomial: place count at degree {n} is not an integer")
        c = total // n - excl.get(n, 0)
        if c < 0:
            raise DomainError(f"invalid spectrum: negative place count {c} at degree {n}")
        counts[n] = c
    return PlaceSpectrum(
        q=q,
        genus=genus,
        counts=counts,
        cutoff=N,
        provenance="L-polynomial",
        beyond="majorant" if majorant is not None else "unverified",
        majorant=None if majorant is None else Fraction(majorant),
    )
