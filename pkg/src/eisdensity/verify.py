"""Empirical checks of the density formulas.

Exhaustive counts run over Riemann-Roch boxes L(D)^k; Monte Carlo draws
uniform coefficient vectors against the basis of L(D).  Both only need
numerators: every element of L(D) is ``num / den(D)`` and den(D) is a
unit at every place of S.
"""
from __future__ import annotations

import math
import time
from functools import lru_cache
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import _backend
from ._fallback import eisenstein_witness
from .density import (
    DensityInterval,
    PlaceSpectrum,
    _check_degree,
    _check_kind,
    eisenstein_density,
    frac_str,
    local_factor,
)
from .errors import BudgetError, DomainError
from .polyring import Poly, monic_from_index, monic_irreducibles
from .rff import (
    DEFAULT_BUDGET,
    INF,
    Divisor,
    HElem,
    HolomorphySet,
    Place,
    check_budget,
    h_valuation,
    rr_dimension,
)

MC_BLOCK = 1 << 14
EXHAUSTIVE_CHUNK = 1 << 15
MAX_TARGETS = 64


@dataclass(frozen=True)
class CoeffTuple:
    """Coefficients h_0..h_{d-1} (monic) or h_0..h_d (general) of a degree-d polynomial."""

    kind: str
    coeffs: tuple

    def __post_init__(self):
        _check_kind(self.kind)
        object.__setattr__(self, "coeffs", tuple(self.coeffs))
        if self.d < 2:
            raise DomainError("polynomial degree must be at least 2")
        holos = {h.holo for h in self.coeffs}
        if len(holos) != 1:
            raise DomainError("coefficients must lie in one holomorphy ring")

    @property
    def d(self) -> int:
        return len(self.coeffs) - (1 if self.kind == "general" else 0)

    @property
    def holo(self) -> HolomorphySet:
        return self.coeffs[0].holo

    @property
    def lower(self) -> tuple:
        return self.coeffs[: self.d]

    @property
    def lead(self) -> HElem | None:
        return self.coeffs[self.d] if self.kind == "general" else None


def is_eisenstein_at(f: CoeffTuple, P: Place) -> bool:
    if P.poly is None or P not in f.holo:
        raise DomainError(f"{P} is not a place of the holomorphy set")
    for i, h in enumerate(f.lower):
        if not h:
            if i == 0:
                return False
            continue
        v = h_valuation(h, P)
        if v < 1 or (i == 0 and v != 1):
            return False
    if f.lead is not None:
        return bool(f.lead) and h_valuation(f.lead, P) == 0
    return True


def squarefree_factors(k: Poly) -> list[Poly]:
    """Monic irreducible factors of a squarefree polynomial, by trial division."""
    out = []
    k = k.monic()
    n = 1
    while k.degree >= 2 * n:
        for P in monic_irreducibles(k.ctx, n):
            quo, rem = divmod(k, P)
            if not rem:
                out.append(P)
                k = quo
        n += 1
    if k.degree >= 1:
        out.append(k)
    return sorted(out, key=Poly.sort_key)


def eisenstein_places(f: CoeffTuple) -> list[Place]:
    """Every place of S at which f is Eisenstein, in canonical order."""
    if not any(f.lower):
        raise DomainError("all lower coefficients are zero: the candidate set is infinite")
    lead = f.lead.num if f.lead is not None else None
    k = eisenstein_witness([h.num for h in f.lower], lead, f.holo.u)
    if k.degree <= 0:
        return []
    places = [Place.trusted(P) for P in squarefree_factors(k)]
    return [P for P in places if is_eisenstein_at(f, P)]


@lru_cache(maxsize=4096)
def root_candidates(h0: Poly) -> tuple:
    """Units times monic divisors of h0: every possible root in GF(q)[t] of a
    monic polynomial with constant term h0 (h0 nonzero)."""
    ctx = h0.ctx
    out = []
    for n in range(h0.degree + 1):
        for idx in range(ctx.q**n):
            m = monic_from_index(ctx, n, idx)
            if not (h0 % m):
                out.extend(m.scale(c) for c in range(1, ctx.q))
    return tuple(out)


def find_polynomial_root(lower: Sequence[Poly]) -> Poly | None:
    """A root in GF(q)[t] of X**d + h_{d-1} X**(d-1) + ... + h_0, if any."""
    h0 = lower[0]
    if not h0:
        return Poly(h0.ctx, ())
    one = Poly.const(h0.ctx, 1)
    for r in root_candidates(h0):
        acc = one
        for h in reversed(lower):
            acc = acc * r + h
        if not acc:
            return r
    return None


# --- Riemann-Roch boxes as numerator arrays

def _numerators(q: int, ell: int) -> np.ndarray:
    """Row k holds the basis coefficients of the k-th element of L(D) (last index fastest)."""
    idx = np.arange(q**ell, dtype=np.int64)
    out = np.empty((q**ell, ell), dtype=np.int32)
    for j in range(ell):
        out[:, j] = (idx // q ** (ell - 1 - j)) % q
    return out


def _arity(d: int, kind: str) -> int:
    return d + 1 if kind == "general" else d


def _place_masks(D: Divisor, T: Sequence[Place]):
    """Per element of L(D): bitmasks over T of v >= 1, v == 1 and v == 0."""
    ctx = D.holo.ctx
    ell = rr_dimension(D)
    nums = _numerators(ctx.q, ell)
    n = nums.shape[0]
    in_p = np.zeros(n, dtype=np.uint64)
    val1 = np.zeros(n, dtype=np.uint64)
    unit = np.zeros(n, dtype=np.uint64)
    for k, row in enumerate(nums.tolist()):
        f = Poly(ctx, row)
        a = b = c = 0
        if f:
            for bit, P in enumerate(T):
                quo, rem = divmod(f, P.poly)
                if rem:
                    c |= 1 << bit
                else:
                    a |= 1 << bit
                    if quo % P.poly:
                        b |= 1 << bit
        else:
            a = (1 << len(T)) - 1
        in_p[k], val1[k], unit[k] = a, b, c
    return in_p, val1, unit


def _check_targets(D: Divisor, T: Sequence[Place]) -> list[Place]:
    T = sorted(set(T), key=Place.sort_key)
    if not T:
        raise DomainError("the target place set T must be nonempty")
    if len(T) > MAX_TARGETS:
        raise DomainError(f"at most {MAX_TARGETS} target places are supported")
    for P in T:
        if P.poly is None or P not in D.holo:
            raise DomainError(f"target {P} is not a place of the holomorphy set")
    return T


def exhaustive_count(D: Divisor, d: int, kind: str, T: Sequence[Place],
                     budget: int = DEFAULT_BUDGET, workers: int = 1) -> tuple[int, int]:
    """``(not_eisenstein_at_T, total)`` over every tuple of L(D)^arity."""
    _check_degree(d)
    _check_kind(kind)
    T = _check_targets(D, T)
    ell = rr_dimension(D)
    total = check_budget(D.holo.ctx.q, _arity(d, kind) * ell, budget, "tuples")
    in_p, val1, unit = _place_masks(D, T)
    rest = [in_p] * (d - 1) + ([unit] if kind == "general" else [])
    if workers <= 1:
        hits = _backend.count_hits([val1] + rest)
    else:
        chunks = np.array_split(val1, workers)
        with ThreadPoolExecutor(workers) as pool:
            hits = sum(pool.map(lambda c: _backend.count_hits([c] + rest) if len(c) else 0, chunks))
    return total - hits, total


def exhaustive_fraction(D: Divisor, d: int, kind: str, T: Sequence[Place],
                        budget: int = DEFAULT_BUDGET, workers: int = 1) -> Fraction:
    """Exact fraction of L(D)^arity that is Eisenstein at no place of T."""
    good, total = exhaustive_count(D, d, kind, T, budget, workers)
    return Fraction(good, total)


def _tuple_batch(nums: np.ndarray, arity: int, start: int, stop: int) -> np.ndarray:
    size = nums.shape[0]
    t = np.arange(start, stop, dtype=np.int64)
    out = np.empty((stop - start, arity, nums.shape[1]), dtype=np.int32)
    for i in range(arity):
        out[:, i, :] = nums[(t // size ** (arity - 1 - i)) % size]
    return out


def exhaustive_anywhere_count(D: Divisor, d: int, kind: str,
                              budget: int = DEFAULT_BUDGET, workers: int = 1) -> tuple[int, int]:
    """``(eisenstein_somewhere, total)`` over every tuple of L(D)^arity."""
    _check_degree(d)
    _check_kind(kind)
    ctx = D.holo.ctx
    ell = rr_dimension(D)
    arity = _arity(d, kind)
    total = check_budget(ctx.q, arity * ell, budget, "tuples")
    nums = _numerators(ctx.q, ell)
    u = D.holo.u.coeffs

    def run(start):
        batch = _tuple_batch(nums, arity, start, min(start + EXHAUSTIVE_CHUNK, total))
        return _backend.classify_batch(ctx, batch, d, kind == "general", u, [])

    starts = range(0, total, EXHAUSTIVE_CHUNK)
    if workers <= 1:
        hits = sum(map(run, starts))
    else:
        with ThreadPoolExecutor(workers) as pool:
            hits = sum(pool.map(run, starts))
    return hits, total


def exactness_threshold(T: Sequence[Place], genus: int = 0) -> int:
    """Least deg D from which exhaustive fractions over T match the product exactly."""
    if genus < 0:
        raise DomainError("genus must be nonnegative")
    if not T:
        return 0
    return max(0, 2 * sum(P.degree for P in T) + 2 * genus - 1)


def product_over(T: Sequence[Place], q: int, d: int, kind: str) -> Fraction:
    out = Fraction(1)
    for P in T:
        out *= local_factor(q, d, P.degree, kind)
    return out


# --- Monte Carlo

def block_generator(seed: int, block: int) -> np.random.Generator:
    """PCG64 substream for one block of samples.

    Block b always draws from ``SeedSequence(seed, spawn_key=(b,))``, so a
    run's output is fixed by (seed, parameters) whatever the worker count.
    """
    if not 0 <= seed < 1 << 64:
        raise DomainError("seed must be a 64-bit unsigned integer")
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(block,))))


@dataclass(frozen=True)
class MCResult:
    hits: int
    samples: int

    @property
    def ratio(self) -> Fraction:
        return Fraction(self.hits, self.samples)

    @property
    def stderr(self) -> float:
        p = self.hits / self.samples
        return math.sqrt(p * (1 - p) / self.samples)


def monte_carlo_fraction(D: Divisor, d: int, kind: str, mode: str, samples: int, seed: int,
                         T: Sequence[Place] = (), workers: int = 1) -> MCResult:
    """Sampled fraction of L(D)^arity that is Eisenstein somewhere (``mode="anywhere"``)
    or not Eisenstein at any place of T (``mode="not-at-T"``)."""
    _check_degree(d)
    _check_kind(kind)
    if samples < 1:
        raise DomainError("need at least one sample")
    if mode not in ("anywhere", "not-at-T"):
        raise DomainError(f"unknown Monte Carlo mode {mode!r}")
    targets = [P.poly.coeffs for P in _check_targets(D, T)] if mode == "not-at-T" else []
    ctx = D.holo.ctx
    ell = rr_dimension(D)
    arity = _arity(d, kind)
    u = D.holo.u.coeffs
    nblocks = -(-samples // MC_BLOCK)

    def run(b):
        n = min(MC_BLOCK, samples - b * MC_BLOCK)
        batch = block_generator(seed, b).integers(0, ctx.q, size=(n, arity, ell), dtype=np.int32)
        return _backend.classify_batch(ctx, batch, d, kind == "general", u, targets)

    if workers <= 1:
        hits = sum(map(run, range(nblocks)))
    else:
        with ThreadPoolExecutor(workers) as pool:
            hits = sum(pool.map(run, range(nblocks)))
    if mode == "not-at-T":
        hits = samples - hits
    return MCResult(hits, samples)


# --- experiment reports

@dataclass
class ExperimentReport:
    parameters: dict
    observed_num: int
    observed_den: int
    expected: Fraction | DensityInterval | None
    verdict: str
    passed: bool | None
    z_score: float | None = None
    note: str = ""
    elapsed_ms: int = 0

    @property
    def observed(self) -> Fraction:
        return Fraction(self.observed_num, self.observed_den)

    def to_json(self, timing: bool = True) -> dict:
        """JSON object; ``timing=False`` drops elapsed_ms so reruns compare byte for byte."""
        if isinstance(self.expected, DensityInterval):
            expected = self.expected.to_json()
        elif self.expected is None:
            expected = None
        else:
            expected = frac_str(self.expected)
        out = {
            "parameters": self.parameters,
            "observed": {"num": str(self.observed_num), "den": str(self.observed_den)},
            "expected": expected,
            "verdict": self.verdict,
            "passed": self.passed,
            "z_score": self.z_score,
            "note": self.note,
        }
        if timing:
            out["elapsed_ms"] = self.elapsed_ms
        return out


def _params(D: Divisor, d: int, kind: str, **extra) -> dict:
    out = {
        "q": D.holo.ctx.q,
        "d": d,
        "kind": kind,
        "exclude": str(D.holo),
        "divisor": str(D),
        "deg_D": D.degree,
    }
    out.update(extra)
    return out


def _z(observed: Fraction, expected: Fraction, se: float) -> float:
    diff = float(observed - expected)
    if se == 0:
        return 0.0 if diff == 0 else math.copysign(math.inf, diff)
    return diff / se


def run_exact(D: Divisor, d: int, kind: str, T: Sequence[Place],
              budget: int = DEFAULT_BUDGET, workers: int = 1) -> ExperimentReport:
    """Exhaustive not-Eisenstein-at-T count against the product of local factors."""
    t0 = time.perf_counter()
    T = _check_targets(D, T)
    good, total = exhaustive_count(D, d, kind, T, budget, workers)
    expected = product_over(T, D.holo.ctx.q, d, kind)
    threshold = exactness_threshold(T)
    params = _params(D, d, kind, mode="exact", T=[str(P) for P in T], threshold=threshold)
    if D.degree < threshold:
        verdict, passed = "below-threshold", None
        note = f"deg D = {D.degree} < exactness threshold {threshold}; fraction reported as observed"
    else:
        ok = Fraction(good, total) == expected
        verdict, passed, note = ("exact-match" if ok else "mismatch"), ok, ""
    return ExperimentReport(params, good, total, expected, verdict, passed, note=note,
                            elapsed_ms=int((time.perf_counter() - t0) * 1000))


def density_target(holo: HolomorphySet, d: int, kind: str, width=Fraction(1, 2**30)) -> DensityInterval:
    return eisenstein_density(PlaceSpectrum.from_holomorphy_set(holo), d, kind, width)


def run_monte_carlo(D: Divisor, d: int, kind: str, samples: int, seed: int,
                    T: Sequence[Place] = (), workers: int = 1,
                    width=Fraction(1, 2**30), z_limit: float = 5.0) -> ExperimentReport:
    """Monte Carlo estimate compared by z-score against the closed form.

    With T the target is the product of local factors over T; without T it
    is the midpoint of the Eisenstein density interval.
    """
    t0 = time.perf_counter()
    mode = "not-at-T" if T else "anywhere"
    res = monte_carlo_fraction(D, d, kind, mode, samples, seed, T, workers)
    if T:
        T = _check_targets(D, T)
        expected = product_over(T, D.holo.ctx.q, d, kind)
        centre = expected
    else:
        expected = density_target(D.holo, d, kind, width)
        centre = expected.midpoint
    z = _z(res.ratio, centre, res.stderr)
    params = _params(D, d, kind, mode=f"mc-{mode}", T=[str(P) for P in T],
                     samples=samples, seed=seed, rng="PCG64/SeedSequence", block=MC_BLOCK)
    return ExperimentReport(params, res.hits, res.samples, expected, "z-score", abs(z) <= z_limit,
                            z_score=z, elapsed_ms=int((time.perf_counter() - t0) * 1000))


def run_anywhere(D: Divisor, d: int, kind: str, budget: int = DEFAULT_BUDGET,
                 workers: int = 1, width=Fraction(1, 2**30)) -> ExperimentReport:
    """Exhaustive Eisenstein-anywhere fraction against the density interval.

    A finite box only approximates the limit, so a miss is informational.
    """
    t0 = time.perf_counter()
    hits, total = exhaustive_anywhere_count(D, d, kind, budget, workers)
    iv = density_target(D.holo, d, kind, width)
    obs = Fraction(hits, total)
    if obs in iv:
        verdict, passed, note = "within-interval", True, ""
    else:
        verdict, passed = "pre-asymptotic", None
        note = f"observed - midpoint = {float(obs - iv.midpoint):.6g}"
    return ExperimentReport(_params(D, d, kind, mode="exhaustive-anywhere"), hits, total, iv,
                            verdict, passed, note=note,
                            elapsed_ms=int((time.perf_counter() - t0) * 1000))


def sweep_divisor(holo: HolomorphySet, degree: int, finite_coeff: int = 1) -> Divisor:
    """D = degree * inf + finite_coeff * (each excluded finite place)."""
    coeffs = {INF: degree}
    for P in holo.finite_excluded:
        coeffs[P] = finite_coeff
    return Divisor(holo, coeffs)


def convergence_sweep(holo: HolomorphySet, d: int, kind: str, degrees: Sequence[int],
                      budget: int = DEFAULT_BUDGET, T: Sequence[Place] = (),
                      samples: int = 100_000, seed: int = 0, workers: int = 1,
                      finite_coeff: int = 1) -> list[ExperimentReport]:
    """One report per degree along the chain D = deg*inf (+ fixed excluded coefficients).

    Boxes over the budget are sampled instead, with a note in the report.
    """
    reports = []
    for deg in degrees:
        D = sweep_divisor(holo, deg, finite_coeff)
        try:
            if T:
                rep = run_exact(D, d, kind, T, budget, workers)
            else:
                rep = run_anywhere(D, d, kind, budget, workers)
        except BudgetError as err:
            rep = run_monte_carlo(D, d, kind, samples, seed, T, workers)
            rep.note = f"{err}; downgraded to Monte Carlo"
        rep.parameters["sweep_degree"] = deg
        reports.append(rep)
    return reports
