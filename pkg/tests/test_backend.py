import os
import subprocess
import sys
from pathlib import Path

import pytest

from conftest import BACKENDS

ROOT = Path(__file__).resolve().parents[1]


def _backend_with(env):
    code = "import histent; print(histent.BACKEND)"
    out = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True,
                         env={**os.environ, **env}, check=True)
    return out.stdout.strip()


def test_pure_python_override():
    assert _backend_with({"HISTENT_PURE_PYTHON": "1"}) == "python"


def test_default_prefers_compiled():
    if len(BACKENDS) < 2:
        pytest.skip("compiled core not built")
    assert _backend_with({"HISTENT_PURE_PYTHON": "0"}) == "cython"


def test_fallback_selfcheck_passes():
    proc = subprocess.run([sys.executable, "-m", "histent", "selfcheck"], capture_output=True, text=True,
                          env={**os.environ, "HISTENT_PURE_PYTHON": "1"})
    assert proc.returncode == 0, proc.stdout


def test_benchmark_runs():
    proc = subprocess.run([sys.executable, str(ROOT / "benchmarks" / "bench_kernels.py"),
                           "--sizes", "8", "40", "--repeat", "1"], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert "overlap_matrix" in proc.stdout
    assert "jacobi_eigh" in proc.stdout
