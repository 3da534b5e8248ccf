import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

from eisdensity import _backend

ROOT = Path(__file__).resolve().parent.parent

SCRIPT = """
import json
from eisdensity import _backend
from eisdensity.gf import FieldCtx
from eisdensity.rff import HolomorphySet, parse_divisor, parse_places
from eisdensity.verify import exhaustive_count, monte_carlo_fraction
F2 = FieldCtx.of_order(2)
H = HolomorphySet.polynomial_ring(F2)
D = parse_divisor(H, "4*inf")
mc = monte_carlo_fraction(parse_divisor(H, "8*inf"), 2, "monic", "anywhere", 3000, 5)
print(json.dumps({
    "active": _backend.active(),
    "one": exhaustive_count(D, 2, "monic", parse_places(F2, "(x)")),
    "two": exhaustive_count(D, 2, "monic", parse_places(F2, "(x),(x+1)")),
    "general": exhaustive_count(D, 2, "general", parse_places(F2, "(x)")),
    "mc": mc.hits,
}))
"""


def _run(env_extra):
    env = dict(os.environ, **env_extra)
    proc = subprocess.run([sys.executable, "-c", SCRIPT], capture_output=True, text=True, env=env, check=True)
    return json.loads(proc.stdout)


def test_forced_fallback_gives_same_answers():
    pure = _run({"EISDENSITY_PURE": "1"})
    assert pure["active"] == "python"
    assert pure["one"] == [896, 1024] and pure["two"] == [784, 1024] and pure["general"] == [30720, 32768]
    if "compiled" in _backend.available():
        fast = _run({})
        assert fast["active"] == "compiled"
        assert {k: v for k, v in fast.items() if k != "active"} == {k: v for k, v in pure.items() if k != "active"}


def test_use_rejects_unknown_backend():
    with pytest.raises(RuntimeError):
        with _backend.use("gpu"):
            pass


@pytest.mark.skipif("compiled" not in _backend.available(), reason="compiled kernels not built")
def test_benchmark_runs(tmp_path):
    out = tmp_path / "bench.json"
    subprocess.run([sys.executable, str(ROOT / "bench" / "benchmark.py"), "--repeat", "1", "--json", str(out)],
                   check=True, capture_output=True)
    rows = json.loads(out.read_text())
    assert rows and all(r["compiled_s"] > 0 for r in rows)
