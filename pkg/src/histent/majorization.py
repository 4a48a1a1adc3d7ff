"""Majorization of entanglement spectra and regime classification.

``a`` is majorized by ``b`` (``a < b``) when every partial sum of the
descending weights of ``a`` is at most that of ``b``; the shorter vector
is zero padded. Comparisons carry a roundoff floor of ``8 * n * eps`` on
top of the caller's tolerance, so ``tol=0`` means "exact up to floating
point noise".
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import InternalMajorizationViolation
from .gram import EntanglementSpectrum

EPS = np.finfo(np.float64).eps
EXACT_TOL = 1e-10
REGIME_TOL = 1e-3


class Relation(enum.Enum):
    FIRST_MAJORIZED_BY_SECOND = "first<second"
    SECOND_MAJORIZED_BY_FIRST = "second<first"
    EQUAL = "equal"
    INCOMPARABLE = "incomparable"


class Regime(enum.Enum):
    I = "I"  # noqa: E741  universal entropy increase
    II = "II"  # universal decrease
    III = "III"  # non-universal

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class MajorizationVerdict:
    relation: Relation
    slack: float


@dataclass(frozen=True)
class RegimeLabel:
    label: Regime
    strict: bool

    def __str__(self):
        return self.label.value


def _weights(spec) -> np.ndarray:
    lam = spec.lambdas if isinstance(spec, EntanglementSpectrum) else spec
    lam = np.sort(np.asarray(lam, dtype=np.float64).ravel())[::-1]
    total = lam.sum()
    return lam / total if total > 0 else lam


def partial_sums(spec) -> np.ndarray:
    """Cumulative sums of the descending weights."""
    lam = spec.lambdas if isinstance(spec, EntanglementSpectrum) else np.asarray(spec, dtype=np.float64)
    return np.cumsum(np.sort(lam)[::-1])


def _padded_sums(a, b):
    wa = _weights(a)
    wb = _weights(b)
    n = max(wa.size, wb.size)
    sa = np.cumsum(np.pad(wa, (0, n - wa.size)))
    sb = np.cumsum(np.pad(wb, (0, n - wb.size)))
    # the final sum is 1 on both sides by normalization
    return sa[:-1], sb[:-1], n


def compare(a, b, tol: float = EXACT_TOL) -> MajorizationVerdict:
    sa, sb, n = _padded_sums(a, b)
    if sa.size == 0:
        return MajorizationVerdict(Relation.EQUAL, 0.0)
    slack_tol = tol + 8.0 * n * EPS
    d = sb - sa
    a_in_b = bool(np.all(d >= -slack_tol))
    b_in_a = bool(np.all(-d >= -slack_tol))
    if a_in_b and b_in_a:
        return MajorizationVerdict(Relation.EQUAL, -float(np.max(np.abs(d))))
    if a_in_b:
        return MajorizationVerdict(Relation.FIRST_MAJORIZED_BY_SECOND, float(d.min()))
    if b_in_a:
        return MajorizationVerdict(Relation.SECOND_MAJORIZED_BY_FIRST, float((-d).min()))
    return MajorizationVerdict(Relation.INCOMPARABLE, float(max(d.min(), (-d).min())))


def is_majorized(a, b, tol: float = EXACT_TOL) -> bool:
    """True when ``a`` is majorized by ``b`` (including equality)."""
    rel = compare(a, b, tol).relation
    return rel in (Relation.FIRST_MAJORIZED_BY_SECOND, Relation.EQUAL)


def lemma1_extend(spec, n: int) -> EntanglementSpectrum:
    """Spectrum after appending a state orthogonal to all N previous ones.

    Weights become ``N/(N+1) * lambda`` plus one new weight ``1/(N+1)``;
    the result is always majorized by the input.
    """
    lam = spec.lambdas if isinstance(spec, EntanglementSpectrum) else np.asarray(spec, dtype=np.float64)
    lam = lam[lam > 0]
    out = np.sort(np.append(lam * (n / (n + 1.0)), 1.0 / (n + 1.0)))[::-1]
    if not is_majorized(out, lam, tol=0.0):
        raise InternalMajorizationViolation("orthogonal extension is not majorized by its input")
    rank = int(np.count_nonzero(out > out.size * EPS * out[0]))
    return EntanglementSpectrum(out, rank)


def classify_step(spec_n, spec_n1, tol: float = REGIME_TOL) -> RegimeLabel:
    """Label the step N -> N+1.

    I when the new spectrum is majorized by the old one, II for the
    reverse, III otherwise. Exact (tol=0) verdicts are tried first and
    marked strict; ``tol`` then admits approximate I/II. Steps that look
    equal, or satisfy both directions within ``tol``, get III.
    """
    exact = compare(spec_n1, spec_n, 0.0).relation
    if exact is Relation.FIRST_MAJORIZED_BY_SECOND:
        return RegimeLabel(Regime.I, True)
    if exact is Relation.SECOND_MAJORIZED_BY_FIRST:
        return RegimeLabel(Regime.II, True)
    if exact is Relation.EQUAL:
        return RegimeLabel(Regime.III, False)
    approx = compare(spec_n1, spec_n, tol).relation
    if approx is Relation.FIRST_MAJORIZED_BY_SECOND:
        return RegimeLabel(Regime.I, False)
    if approx is Relation.SECOND_MAJORIZED_BY_FIRST:
        return RegimeLabel(Regime.II, False)
    return RegimeLabel(Regime.III, False)
