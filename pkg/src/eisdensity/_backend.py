"""Pick the compiled kernels when importable, else the Python fallback.

Set ``EISDENSITY_PURE=1`` before import to force the fallback, or call
:func:`use` at runtime (tests and the benchmark do this).
"""
from __future__ import annotations

import contextlib
import os

import numpy as np

from . import _fallback
from .gf import TABLE_MAX_Q, FieldCtx

try:
    if os.environ.get("EISDENSITY_PURE"):
        raise ImportError("forced pure-Python backend")
    from . import _kernels
except ImportError:
    _kernels = None

_active = "compiled" if _kernels is not None else "python"


def available() -> list[str]:
    return ["compiled", "python"] if _kernels is not None else ["python"]


def active() -> str:
    return _active


@contextlib.contextmanager
def use(name: str):
    global _active
    if name not in available():
        raise RuntimeError(f"backend {name!r} is not available")
    prev, _active = _active, name
    try:
        yield
    finally:
        _active = prev


def _compiled(ctx: FieldCtx | None = None) -> bool:
    return _active == "compiled" and (ctx is None or ctx.q <= TABLE_MAX_Q)


def classify_batch(ctx: FieldCtx, samples: np.ndarray, n_lower: int, has_lead: bool,
                   u_coeffs, targets) -> int:
    samples = np.ascontiguousarray(samples, dtype=np.int32)
    u_coeffs = [int(c) for c in u_coeffs]
    targets = [[int(c) for c in t] for t in targets]
    if _compiled(ctx):
        return _kernels.classify_batch(ctx.tables, ctx.p, samples, n_lower, has_lead,
                                       u_coeffs, targets)
    return _fallback.classify_batch(ctx, samples, n_lower, has_lead, u_coeffs, targets)


def count_hits(mask_arrays) -> int:
    if _compiled():
        return _kernels.count_hits(list(mask_arrays))
    return _fallback.count_hits(mask_arrays)


def irreducible_sieve(ctx: FieldCtx, n: int) -> np.ndarray:
    from .polyring import monic_irreducibles

    lower = [[]] + [[f.coeffs for f in monic_irreducibles(ctx, k)] for k in range(1, n // 2 + 1)]
    if _compiled(ctx) and n < 64:
        return _kernels.irreducible_sieve(ctx.tables, n, lower)
    return _fallback.irreducible_sieve(ctx, n, lower)
