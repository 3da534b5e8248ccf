"""Command-line front end.

Exit codes: 0 success, 2 usage or parse error, 3 enumeration budget
exceeded, 4 a verification did not pass.  Errors are written to stderr as
one JSON object.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import asdict, dataclass, fields
from decimal import ROUND_HALF_EVEN, Context, Decimal
from fractions import Fraction
from typing import Sequence

from .density import (
    DensityInterval,
    PlaceSpectrum,
    _interval_at,
    eisenstein_density,
    frac_str,
    spectrum_from_L_polynomial,
    tail_bound,
    truncated_enclosure,
)
from .errors import BudgetError, DomainError, UnattainableWidth
from .gf import MAX_Q, FieldCtx, prime_power
from .polyring import count_irreducibles, format_poly
from .rff import DEFAULT_BUDGET, INF, parse_divisor, parse_exclusion, parse_places
from .verify import (
    ExperimentReport,
    convergence_sweep,
    run_exact,
    run_monte_carlo,
    sweep_divisor,
)

EXIT_OK, EXIT_USAGE, EXIT_BUDGET, EXIT_FAILED = 0, 2, 3, 4
OUTPUT_DIR_ENV = "EISDENSITY_OUTPUT_DIR"
DEFAULT_WIDTH = "1/1073741824"
PLACES_LIST_CAP = 1 << 20

REPORT_CSV_HEADER = [
    "mode", "q", "d", "kind", "exclude", "divisor", "deg_D", "T", "samples", "seed",
    "observed", "expected", "expected_N", "expected_truncated", "expected_tail",
    "expected_rounding", "expected_lo", "expected_hi", "verdict", "passed", "z_score",
    "observed_display", "note",
]
DENSITY_CSV_HEADER = ["N", "truncated", "tail", "rounding", "lo", "hi", "certified",
                      "lo_display", "hi_display", "midpoint_display"]
PLACES_COUNT_CSV_HEADER = ["degree", "count"]
PLACES_LIST_CSV_HEADER = ["degree", "index", "place"]

_DISPLAY = Context(prec=15, rounding=ROUND_HALF_EVEN)


def display(x: Fraction) -> str:
    """Round-to-nearest decimal with 15 significant digits."""
    x = Fraction(x)
    return str(_DISPLAY.divide(Decimal(x.numerator), Decimal(x.denominator)))


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    mode: str | None = None
    q: int = 2
    d: int = 2
    kind: str = "monic"
    exclude: str = "inf"
    width: str | None = None
    N: int | None = None
    places: str | None = None
    spectrum: str | None = None
    L: str | None = None
    genus: int = 0
    cutoff: int | None = None
    majorant: str | None = None
    divisor: str | None = None
    degree: int | None = None
    degrees: str | None = None
    finite_coeff: int = 1
    T: str | None = None
    samples: int = 100_000
    seed: int = 0
    budget: int = DEFAULT_BUDGET
    mc_fallback: bool = False
    max_degree: int | None = None
    format: str = "json"
    output: str | None = None

    def validate(self):
        if self.command not in ("density", "verify", "places"):
            raise UsageError(f"unknown command {self.command!r}")
        if self.d < 2:
            raise UsageError(f"polynomial degree d must satisfy d > 1 (got {self.d})")
        if self.kind not in ("monic", "general"):
            raise UsageError(f"kind must be monic or general (got {self.kind!r})")
        prime_power(self.q)
        if self.q > MAX_Q:
            raise UsageError(f"q = {self.q} exceeds the supported cap 2**16")
        if "inf" not in [s.strip() for s in _split(self.exclude)]:
            raise UsageError("the exclusion set must contain inf")
        if self.budget < 1:
            raise UsageError("budget must be at least 1")
        if self.samples < 1:
            raise UsageError("samples must be at least 1")
        if not 0 <= self.seed < 1 << 64:
            raise UsageError("seed must be a 64-bit unsigned integer")
        if self.format not in ("json", "csv"):
            raise UsageError("format must be json or csv")
        return self

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, obj: dict) -> "RunConfig":
        names = {f.name for f in fields(cls)}
        unknown = set(obj) - names
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        return cls(**obj).validate()


def _split(text: str) -> list[str]:
    from .rff import _split_top

    return _split_top(text, ",")


def normalize_exclusion(text: str | None) -> str:
    """Exclusion text with the infinite place made explicit."""
    parts = [s.strip() for s in _split(text or "") if s.strip()]
    if "inf" not in parts:
        parts.insert(0, "inf")
    return ",".join(parts)


# --- argument parsing

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _common(p: argparse.ArgumentParser, field_defaults=True):
    p.add_argument("--q", type=int, required=True, help="field order, a prime power <= 2**16")
    p.add_argument("--exclude", default="inf",
                   help='excluded places, e.g. "inf,(x)"; inf is added when missing')
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--output", help=f"output file (default: stdout, or ${OUTPUT_DIR_ENV}/<command>.<format>)")
    p.add_argument("--workers", type=int, default=os.cpu_count() or 1,
                   help="threads for enumeration and sampling; results do not depend on it")
    p.add_argument("--dump-config", action="store_true", help="print the RunConfig JSON and exit")
    if field_defaults:
        p.add_argument("--d", type=int, default=2, help="polynomial degree, at least 2")
        p.add_argument("--kind", default="monic", help="monic or general")


def _experiment(p: argparse.ArgumentParser):
    p.add_argument("--T", help='target places, e.g. "(x),(x+1)"')
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="max tuples for exhaustive runs")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="eisdensity",
                     description="Densities of Eisenstein polynomials over holomorphy rings of GF(q)(x).",
                     epilog="Run a saved configuration with: eisdensity --config FILE [--workers N]")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("density", help="certified interval for the Eisenstein density")
    _common(p)
    p.add_argument("--width", help="target interval width (decimal or p/q); default 2**-30")
    p.add_argument("--N", type=int, help="fixed truncation degree instead of a width")
    p.add_argument("--places", help="finite spectrum: exact density for these places only")
    p.add_argument("--spectrum", help="spectrum JSON file")
    p.add_argument("--L", help="L-polynomial coefficients a_0,...,a_2g")
    p.add_argument("--genus", type=int, default=0)
    p.add_argument("--cutoff", type=int, help="degree up to which L-polynomial counts are computed")
    p.add_argument("--majorant", help="bound M with counts(n) <= M*q**n beyond the cutoff")

    p = sub.add_parser("verify", help="exhaustive and Monte Carlo checks")
    vsub = p.add_subparsers(dest="mode", required=True, parser_class=_Parser)
    v = vsub.add_parser("exact", help="exhaustive not-Eisenstein-at-T fraction")
    _common(v)
    _experiment(v)
    v.add_argument("--divisor", required=True, help='e.g. "4*inf + 1*(x)"')
    v.add_argument("--mc-fallback", action="store_true", help="sample instead when over budget")
    v = vsub.add_parser("mc", help="Monte Carlo estimate")
    _common(v)
    _experiment(v)
    g = v.add_mutually_exclusive_group(required=True)
    g.add_argument("--divisor")
    g.add_argument("--degree", type=int, help="shorthand for degree*inf")
    v.add_argument("--width", help="width of the comparison interval; default 2**-30")
    v = vsub.add_parser("sweep", help="one report per divisor degree")
    _common(v)
    _experiment(v)
    v.add_argument("--degrees", required=True, help="inclusive range lo:hi")
    v.add_argument("--finite-coeff", type=int, default=1,
                   help="fixed coefficient of each excluded finite place")

    p = sub.add_parser("places", help="count or list places of S by degree")
    psub = p.add_subparsers(dest="mode", required=True, parser_class=_Parser)
    v = psub.add_parser("count")
    _common(v, field_defaults=False)
    v.add_argument("--max-degree", type=int, required=True)
    v = psub.add_parser("list")
    _common(v, field_defaults=False)
    v.add_argument("--degree", type=int, required=True)
    return parser


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    names = {f.name for f in fields(RunConfig)}
    values = {k: v for k, v in vars(ns).items() if k in names and v is not None}
    values["exclude"] = normalize_exclusion(values.get("exclude"))
    return RunConfig(**values).validate()


# --- commands

def _field(cfg: RunConfig) -> FieldCtx:
    return FieldCtx.of_order(cfg.q)


def _width(text: str | None) -> Fraction:
    try:
        return Fraction(text or DEFAULT_WIDTH)
    except (ValueError, ZeroDivisionError) as err:
        raise UsageError(f"cannot parse width {text!r}") from err


def _spectrum(cfg: RunConfig, ctx: FieldCtx):
    if cfg.places:
        places = parse_places(ctx, cfg.places)
        if INF in places:
            raise UsageError("the infinite place cannot appear in a finite spectrum")
        return PlaceSpectrum.from_degrees(cfg.q, [P.degree for P in set(places)])
    if cfg.spectrum:
        with open(cfg.spectrum) as fh:
            return PlaceSpectrum.from_json(json.load(fh))
    if cfg.L:
        L = [int(a) for a in cfg.L.split(",")]
        cutoff = cfg.cutoff if cfg.cutoff is not None else 10
        maj = Fraction(cfg.majorant) if cfg.majorant else None
        return spectrum_from_L_polynomial(cfg.q, cfg.genus, L, (), cutoff, majorant=maj)
    return PlaceSpectrum.from_holomorphy_set(parse_exclusion(ctx, cfg.exclude))


def cmd_density(cfg: RunConfig, workers: int = 1):
    ctx = _field(cfg)
    spec = _spectrum(cfg, ctx)
    certified = True
    if cfg.places:
        N = spec.cutoff
        lo_p, hi_p = truncated_enclosure(spec, cfg.d, cfg.kind, N)
        iv = DensityInterval(N, 1 - hi_p, Fraction(0), hi_p - lo_p, 1 - hi_p, 1 - lo_p)
    elif cfg.N is not None:
        try:
            tail = tail_bound(spec, cfg.d, cfg.kind, cfg.N)
        except DomainError:
            tail, certified = Fraction(1), False
        iv = _interval_at(spec, cfg.d, cfg.kind, cfg.N, tail, 256)
    else:
        try:
            iv = eisenstein_density(spec, cfg.d, cfg.kind, _width(cfg.width))
        except UnattainableWidth as err:
            if err.best_width is not None:
                raise
            # no majorant: only the truncated value can be reported
            iv = _interval_at(spec, cfg.d, cfg.kind, spec.cutoff, Fraction(1), 256)
            certified = False
    body = {"interval": iv.to_json(), "certified": certified,
            "display": {"truncated": display(iv.truncated), "lo": display(iv.lo),
                        "hi": display(iv.hi), "midpoint": display(iv.midpoint)}}
    if not certified:
        body["note"] = "truncated only: the spectrum gives no bound beyond its cutoff"
    rows = [[iv.N, frac_str(iv.truncated), frac_str(iv.tail), frac_str(iv.rounding),
             frac_str(iv.lo), frac_str(iv.hi), str(certified).lower(),
             display(iv.lo), display(iv.hi), display(iv.midpoint)]]
    return body, DENSITY_CSV_HEADER, rows, EXIT_OK


def _report_row(rep: ExperimentReport) -> list:
    p = rep.parameters
    exp = rep.expected
    if isinstance(exp, DensityInterval):
        e = ["", exp.N, frac_str(exp.truncated), frac_str(exp.tail), frac_str(exp.rounding),
             frac_str(exp.lo), frac_str(exp.hi)]
    elif exp is None:
        e = [""] * 7
    else:
        e = [frac_str(exp), "", "", "", "", frac_str(exp), frac_str(exp)]
    return [p.get("mode"), p.get("q"), p.get("d"), p.get("kind"), p.get("exclude"),
            p.get("divisor"), p.get("deg_D"), " ".join(p.get("T") or []), p.get("samples", ""),
            p.get("seed", ""), f"{rep.observed_num}/{rep.observed_den}", *e, rep.verdict,
            "" if rep.passed is None else str(rep.passed).lower(),
            "" if rep.z_score is None else repr(rep.z_score), display(rep.observed), rep.note]


def cmd_verify(cfg: RunConfig, workers: int = 1):
    ctx = _field(cfg)
    holo = parse_exclusion(ctx, cfg.exclude)
    T = parse_places(ctx, cfg.T) if cfg.T else []
    if cfg.mode == "exact":
        if not T:
            raise UsageError("verify exact needs --T")
        D = parse_divisor(holo, cfg.divisor)
        try:
            reports = [run_exact(D, cfg.d, cfg.kind, T, cfg.budget, workers)]
        except BudgetError as err:
            if not cfg.mc_fallback:
                raise
            rep = run_monte_carlo(D, cfg.d, cfg.kind, cfg.samples, cfg.seed, T, workers)
            rep.note = f"{err}; downgraded to Monte Carlo"
            reports = [rep]
    elif cfg.mode == "mc":
        D = parse_divisor(holo, cfg.divisor) if cfg.divisor else sweep_divisor(holo, cfg.degree, cfg.finite_coeff)
        reports = [run_monte_carlo(D, cfg.d, cfg.kind, cfg.samples, cfg.seed, T, workers,
                                   width=_width(cfg.width))]
    elif cfg.mode == "sweep":
        try:
            lo, hi = (int(s) for s in cfg.degrees.split(":"))
        except ValueError as err:
            raise UsageError(f"degree range must look like lo:hi (got {cfg.degrees!r})") from err
        if lo < 0 or hi < lo:
            raise UsageError("degree range must satisfy 0 <= lo <= hi")
        reports = convergence_sweep(holo, cfg.d, cfg.kind, range(lo, hi + 1), cfg.budget, T,
                                    cfg.samples, cfg.seed, workers, cfg.finite_coeff)
    else:
        raise UsageError(f"unknown verify mode {cfg.mode!r}")
    failed = any(r.passed is False for r in reports)
    body = {"reports": [r.to_json() for r in reports]}
    return body, REPORT_CSV_HEADER, [_report_row(r) for r in reports], EXIT_FAILED if failed else EXIT_OK


def cmd_places(cfg: RunConfig, workers: int = 1):
    ctx = _field(cfg)
    holo = parse_exclusion(ctx, cfg.exclude)
    excl = holo.excluded_by_degree()
    if cfg.mode == "count":
        if cfg.max_degree is None or cfg.max_degree < 1:
            raise UsageError("--max-degree must be positive")
        rows = [[n, count_irreducibles(cfg.q, n) - excl.get(n, 0)] for n in range(1, cfg.max_degree + 1)]
        body = {"counts": [{"degree": n, "count": c} for n, c in rows]}
        return body, PLACES_COUNT_CSV_HEADER, rows, EXIT_OK
    n = cfg.degree
    if n is None or n < 1:
        raise UsageError("--degree must be positive")
    total = count_irreducibles(cfg.q, n)
    if total > PLACES_LIST_CAP:
        raise BudgetError(f"listing degree {n} would print pi_q(n) = {total} places "
                          f"(cap {PLACES_LIST_CAP})", total, PLACES_LIST_CAP)
    places = holo.places(n)
    rows = [[n, i, format_poly(P.poly)] for i, P in enumerate(places)]
    body = {"degree": n, "places": [r[2] for r in rows]}
    return body, PLACES_LIST_CSV_HEADER, rows, EXIT_OK


COMMANDS = {"density": cmd_density, "verify": cmd_verify, "places": cmd_places}


def render(cfg: RunConfig, body: dict, header: Sequence[str], rows: list) -> str:
    if cfg.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
        return buf.getvalue()
    return json.dumps({"config": cfg.to_json(), **body}, indent=2) + "\n"


def _emit(cfg: RunConfig, text: str, out):
    path = cfg.output
    if path is None and os.environ.get(OUTPUT_DIR_ENV):
        name = cfg.command + (f"-{cfg.mode}" if cfg.mode else "")
        path = os.path.join(os.environ[OUTPUT_DIR_ENV], f"{name}.{cfg.format}")
    if path is None:
        out.write(text)
    else:
        os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
        with open(path, "w") as fh:
            fh.write(text)


def _fail(err_stream, code: int, kind: str, message: str, **extra) -> int:
    err_stream.write(json.dumps({"error": kind, "message": message, "exit_code": code, **extra}) + "\n")
    return code


def main(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        argv = list(sys.argv[1:] if argv is None else argv)
        pre = _Parser(add_help=False, allow_abbrev=False)
        pre.add_argument("--config")
        pre.add_argument("--workers", type=int, default=os.cpu_count() or 1)
        known, rest = pre.parse_known_args(argv)
        if known.config:
            if rest:
                raise UsageError(f"--config takes no other arguments (got {' '.join(rest)})")
            with open(known.config) as fh:
                cfg = RunConfig.from_json(json.load(fh))
            workers = known.workers
        else:
            ns = build_parser().parse_args(argv)
            cfg = config_from_args(ns)
            if ns.dump_config:
                out.write(json.dumps(cfg.to_json(), indent=2) + "\n")
                return EXIT_OK
            workers = ns.workers
        if workers < 1:
            raise UsageError("--workers must be at least 1")
        body, header, rows, code = COMMANDS[cfg.command](cfg, workers)
        _emit(cfg, render(cfg, body, header, rows), out)
        return code
    except UsageError as e:
        return _fail(err, EXIT_USAGE, "usage", str(e))
    except BudgetError as e:
        return _fail(err, EXIT_BUDGET, "budget", str(e), size=str(e.size), budget=str(e.budget))
    except UnattainableWidth as e:
        extra = {} if e.best_width is None else {"best_width": frac_str(e.best_width)}
        return _fail(err, EXIT_USAGE, "unattainable-width", str(e), **extra)
    except DomainError as e:
        return _fail(err, EXIT_USAGE, "domain", str(e))
    except (json.JSONDecodeError, TypeError) as e:
        return _fail(err, EXIT_USAGE, "config", str(e))
    except OSError as e:
        return _fail(err, EXIT_USAGE, "io", str(e))


if __name__ == "__main__":
    sys.exit(main())
