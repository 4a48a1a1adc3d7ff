"""Embedded numerical fixtures run by ``histent selfcheck``.

Every fixture is seeded, so the report is byte-identical across runs.
"""
from __future__ import annotations

import sys

import numpy as np

from . import gram
from .coherent import P4_WITNESS, kernel_p_matrix
from .entropy import renyi, renyi2_from_purity, renyi_from_tsallis, tsallis
from .majorization import compare, lemma1_extend, Relation

SEED = 20240315


def _random_sets(rng, count, max_n=64, lo=-10.0, hi=10.0):
    for _ in range(count):
        n = int(rng.integers(1, max_n + 1))
        yield rng.uniform(lo, hi, n)


def psd_sample(rng):
    worst = 0.0
    for a in _random_sets(rng, 200):
        w, _ = gram._eigh(gram.build_overlap_matrix(a).entries, False)
        worst = min(worst, float(np.min(w)))
    return worst >= -1e-10, f"min eigenvalue {worst:.3e}"


def block_spectrum(rng):
    worst = 0.0
    for _ in range(50):
        mult = rng.integers(1, 6, size=int(rng.integers(1, 6)))
        alphas = np.repeat(np.arange(mult.size) * 13.0, mult)
        rng.shuffle(alphas)
        lam = gram.spectrum(gram.build_overlap_matrix(alphas)).lambdas
        want = np.zeros(alphas.size)
        want[:mult.size] = np.sort(mult / alphas.size)[::-1]
        worst = max(worst, float(np.max(np.abs(lam - want))))
    return worst <= 1e-9, f"max deviation {worst:.3e}"


def spectral_reconstruction(rng):
    worst = 0.0
    for a in _random_sets(rng, 50):
        O = gram.build_overlap_matrix(a)
        b = gram.schmidt_clock_basis(O)
        v = b.vectors
        lam = b.weights.lambdas[: v.shape[1]]
        worst = max(worst, float(np.max(np.abs(v @ np.diag(lam) @ v.T - O.entries))))
        worst = max(worst, float(np.max(np.abs(v.T @ v - np.eye(v.shape[1])))))
    return worst <= 1e-9, f"max residual {worst:.3e}"


def purity_identity(rng):
    dp = de = 0.0
    for a in _random_sets(rng, 100):
        O = gram.build_overlap_matrix(a)
        spec = gram.spectrum(O)
        dp = max(dp, abs(gram.purity(O) - float(np.sum(spec.lambdas ** 2))))
        de = max(de, abs(renyi2_from_purity(O).value - renyi(spec, 2).value))
    return dp <= 1e-10 and de <= 1e-9, f"purity {dp:.3e}, E2 {de:.3e}"


def lemma1_regression(rng):
    for _ in range(200):
        lam = rng.dirichlet(np.ones(int(rng.integers(1, 20))))
        out = lemma1_extend(lam, lam.size)
        if compare(out.lambdas, lam, 0.0).relation is not Relation.FIRST_MAJORIZED_BY_SECOND:
            return False, "extension not strictly majorized"
    return True, "200 cases"


def tsallis_renyi(rng):
    worst = 0.0
    for _ in range(100):
        lam = rng.dirichlet(np.ones(int(rng.integers(2, 30))))
        for q in (0.5, 2.0, 3.0):
            r = renyi(lam, q, "nats").value
            worst = max(worst, abs(r - renyi_from_tsallis(tsallis(lam, q), q)))
    return worst <= 1e-10, f"max deviation {worst:.3e}"


def incremental_purity(rng):
    a = np.cumsum(rng.normal(0, 0.7, 300))
    inc = gram.prefix_purities(a)
    worst = 0.0
    for n in range(1, a.size + 1, 7):
        worst = max(worst, abs(inc[n - 1] - gram.purity_from_alphas(a[:n])))
    return worst <= 1e-10, f"max deviation {worst:.3e}"


def p4_witness(rng):
    w, _ = gram._eigh(kernel_p_matrix(P4_WITNESS, 4.0), False)
    low = float(np.min(w))
    return low < -1e-6, f"min eigenvalue {low:.4f}"


FIXTURES = (
    ("psd-sample", psd_sample),
    ("block-spectrum", block_spectrum),
    ("spectral-reconstruction", spectral_reconstruction),
    ("purity-identity", purity_identity),
    ("lemma1-regression", lemma1_regression),
    ("tsallis-renyi", tsallis_renyi),
    ("incremental-purity", incremental_purity),
    ("p4-psd-witness", p4_witness),
)


def run(out=None) -> int:
    out = out or sys.stdout
    failed = []
    for name, fn in FIXTURES:
        rng = np.random.default_rng(SEED)
        try:
            ok, detail = fn(rng)
        except Exception as exc:  # a crashing fixture is a failing fixture
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        out.write(f"{name:<26}{'PASS' if ok else 'FAIL'}  {detail}\n")
        if not ok:
            failed.append(name)
    if failed:
        out.write(f"failed: {', '.join(failed)}\n")
        return 1
    out.write("all fixtures passed\n")
    return 0
