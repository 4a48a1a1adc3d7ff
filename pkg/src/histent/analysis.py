"""Experiment drivers: cumulative and windowed histories, extremal windows,
reference-index comparison and table emission."""
from __future__ import annotations

import csv
import io
import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import IO, Iterable, Sequence

import numpy as np
from scipy import stats

from . import __version__
from ._backend import BACKEND
from .coherent import Base, EmbeddingConfig, embed
from .entropy import EntropyValue, renyi, renyi2_from_purity_value, von_neumann
from .errors import (
    InsufficientOverlap,
    InsufficientRecords,
    IoFailure,
    NumericalError,
)
from .gram import build_overlap_matrix, prefix_purities, spectrum
from .majorization import Regime, RegimeLabel, Relation, classify_step, compare
from .timeseries import PriceSeries, WindowSpec, partition

logger = logging.getLogger(__name__)

DEFAULT_QS = (1.0, 2.0)
HEAD = 15
SUMS_AT = (1, 2, 5, 10)
CROSSCHECK_TOL = 1e-9
SIG_DIGITS = 12


def qkey(q: float) -> str:
    q = float(q)
    return str(int(q)) if q.is_integer() else repr(q)


@dataclass
class AnalysisRecord:
    label: str
    n: int
    entropies: dict  # float q -> EntropyValue
    n_effective: float
    e_max: float
    sigma_r: float
    spectrum_head: tuple = ()
    partial_sums_at: dict = field(default_factory=dict)
    regime: RegimeLabel | None = None
    saturated: bool = False
    rank: int | None = None
    n_effective_q: float = 1.0
    e2_incremental: float | None = None
    spectrum: np.ndarray | None = field(default=None, repr=False)
    first_date: str | None = None
    last_date: str | None = None

    def entropy(self, q: float) -> float:
        return self.entropies[float(q)].value

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "N": self.n,
            "entropies": {qkey(q): _r(e.value) for q, e in sorted(self.entropies.items())},
            "base": _base_of(self).value,
            "N_E": _r(self.n_effective),
            "N_E_q": self.n_effective_q,
            "e_max": _r(self.e_max),
            "regime": None if self.regime is None else str(self.regime),
            "regime_strict": None if self.regime is None else self.regime.strict,
            "saturation": self.saturated,
            "sigma_r": self.sigma_r,
            "rank": self.rank,
            "spectrum_head": [_r(x) for x in self.spectrum_head],
            "partial_sums": {str(k): _r(v) for k, v in sorted(self.partial_sums_at.items())},
            "e2_incremental": None if self.e2_incremental is None else _r(self.e2_incremental),
            "first_date": self.first_date,
            "last_date": self.last_date,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "AnalysisRecord":
        base = Base.coerce(d.get("base", "bits"))
        ents = {}
        for k, v in d["entropies"].items():
            q = float(k)
            ents[q] = EntropyValue(float(v), base, "vn" if q == 1.0 else q)
        regime = None
        if d.get("regime"):
            regime = RegimeLabel(Regime(d["regime"]), bool(d.get("regime_strict")))
        return cls(
            label=d["label"],
            n=int(d["N"]),
            entropies=ents,
            n_effective=float(d["N_E"]),
            n_effective_q=float(d.get("N_E_q", 1.0)),
            e_max=float(d["e_max"]),
            sigma_r=float(d["sigma_r"]),
            spectrum_head=tuple(float(x) for x in d.get("spectrum_head", ())),
            partial_sums_at={int(k): float(v) for k, v in d.get("partial_sums", {}).items()},
            regime=regime,
            saturated=bool(d.get("saturation", False)),
            rank=d.get("rank"),
            e2_incremental=d.get("e2_incremental"),
            first_date=d.get("first_date"),
            last_date=d.get("last_date"),
        )


def _base_of(rec: AnalysisRecord) -> Base:
    for e in rec.entropies.values():
        return e.base
    return Base.BITS


def _r(x: float) -> float:
    return float(f"{x:.{SIG_DIGITS}g}") + 0.0  # folds -0.0 into 0.0


@dataclass(frozen=True)
class ComparisonReport:
    scale: float
    pearson: float
    spearman: float
    paired_count: int

    def to_dict(self) -> dict:
        return {
            "scale": self.scale,
            "pearson": self.pearson,
            "spearman": self.spearman,
            "paired_count": self.paired_count,
        }


@dataclass(frozen=True)
class ExtremalResult:
    index: int
    label: str
    universal: bool  # spectrum majorized by (or majorizing) every other window
    tied: bool = False  # every other window has an equal spectrum


def _norm_qs(qs) -> tuple:
    qs = tuple(sorted({float(q) for q in qs}))
    if not qs:
        raise ValueError("at least one entropy order is required")
    for q in qs:
        if not q > 0:
            from .errors import NonPositiveQ
            raise NonPositiveQ(f"order q must be positive, got {q!r}")
    return qs


def _entropies(spec, qs, base) -> dict:
    out = {}
    for q in qs:
        if q == 1.0:
            out[q] = von_neumann(spec, base)
        else:
            out[q] = renyi(spec, q, base)
    return out


def _nq(qs) -> float:
    return 1.0 if 1.0 in qs else qs[0]


def _n_effective(ents: dict, q: float) -> float:
    return 2.0 ** ents[q].to(Base.BITS).value


def _head_and_sums(lam: np.ndarray, head: int, sums_at: Sequence[int]):
    sums = np.cumsum(lam)
    ps = {ell: float(sums[min(ell, lam.size) - 1]) for ell in sums_at}
    return tuple(float(x) for x in lam[:head]), ps


def _map(fn, items, workers: int):
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def prefix_lengths(total: int, stride: int) -> list[int]:
    if stride < 1:
        raise ValueError("stride must be >= 1")
    ns = list(range(1, total + 1, stride))
    if ns[-1] != total:
        ns.append(total)
    return ns


def cumulative_analysis(
    series,
    config: EmbeddingConfig | None = None,
    stride: int = 1,
    qs: Iterable[float] = DEFAULT_QS,
    *,
    spectra: bool = True,
    head: int = HEAD,
    sums_at: Sequence[int] = SUMS_AT,
    keep_spectra: bool = False,
    workers: int = 1,
) -> list[AnalysisRecord]:
    """Records for every prefix length 1, 1+stride, ..., total.

    With ``spectra=False`` and ``qs == (2,)`` only the incremental purity
    path runs (no eigensolves, no spectra or regimes). Regime labels
    compare consecutive evaluated prefixes, so they describe single
    steps only when ``stride == 1``.
    """
    config = config or EmbeddingConfig()
    qs = _norm_qs(qs)
    alphas = embed(series, config).alphas
    total = alphas.shape[0]
    ns = prefix_lengths(total, stride)
    dates = getattr(series, "dates", None)
    base = config.base
    tol = config.tolerances
    purities = prefix_purities(alphas)
    need_spectrum = spectra or any(q != 2.0 for q in qs)
    nq = _nq(qs)

    def one(n):
        if not need_spectrum:
            return None
        return spectrum(build_overlap_matrix(alphas[:n]), tol)

    specs = _map(one, ns, workers)
    records = []
    prev = None
    for n, spec in zip(ns, specs):
        e2_inc = renyi2_from_purity_value(purities[n - 1], base).value
        if spec is None:
            ents = {2.0: EntropyValue(e2_inc, base, 2.0)}
            head_vals, sums, regime, rank = (), {}, None, None
        else:
            ents = _entropies(spec, qs, base)
            if 2.0 in ents and abs(ents[2.0].value - e2_inc) > CROSSCHECK_TOL:
                raise NumericalError(
                    f"prefix {n}: spectral E2 {ents[2.0].value!r} disagrees with "
                    f"incremental purity E2 {e2_inc!r}"
                )
            head_vals, sums = _head_and_sums(spec.lambdas, head, sums_at)
            regime = None if prev is None else classify_step(prev, spec, tol.regime)
            rank = spec.rank
            prev = spec
        e_max = float(base.log(n))
        rec = AnalysisRecord(
            label=str(n),
            n=n,
            entropies=ents,
            n_effective=_n_effective(ents, nq),
            n_effective_q=nq,
            e_max=e_max,
            sigma_r=config.sigma,
            spectrum_head=head_vals,
            partial_sums_at=sums,
            regime=regime,
            saturated=ents[nq].value >= e_max - tol.saturation,
            rank=rank,
            e2_incremental=e2_inc,
            spectrum=spec.lambdas if (keep_spectra and spec is not None) else None,
            first_date=dates[0].isoformat() if dates else None,
            last_date=dates[n - 1].isoformat() if dates else None,
        )
        records.append(rec)
    return records


def window_analysis(
    series: PriceSeries,
    spec: WindowSpec,
    config: EmbeddingConfig | None = None,
    qs: Iterable[float] = DEFAULT_QS,
    *,
    head: int = HEAD,
    sums_at: Sequence[int] = SUMS_AT,
    keep_spectra: bool = False,
    workers: int = 1,
) -> list[AnalysisRecord]:
    """One record per window; sigma is shared by all windows."""
    config = config or EmbeddingConfig()
    qs = _norm_qs(qs)
    base = config.base
    tol = config.tolerances
    nq = _nq(qs)
    windows = partition(series, spec)

    def one(w):
        alphas = embed(w.points, config)
        return spectrum(build_overlap_matrix(alphas), tol)

    specs = _map(one, windows, workers)
    records = []
    for w, sp in zip(windows, specs):
        n = len(w)
        ents = _entropies(sp, qs, base)
        head_vals, sums = _head_and_sums(sp.lambdas, head, sums_at)
        e_max = float(base.log(n))
        records.append(AnalysisRecord(
            label=w.label,
            n=n,
            entropies=ents,
            n_effective=_n_effective(ents, nq),
            n_effective_q=nq,
            e_max=e_max,
            sigma_r=config.sigma,
            spectrum_head=head_vals,
            partial_sums_at=sums,
            saturated=ents[nq].value >= e_max - tol.saturation,
            rank=sp.rank,
            spectrum=sp.lambdas if keep_spectra else None,
            first_date=w.points.dates[0].isoformat(),
            last_date=w.points.dates[-1].isoformat(),
        ))
    return records


def _extreme(records, spectra, direction: Relation, fallback) -> ExtremalResult:
    n = len(records)
    for i in range(n):
        ok = True
        all_equal = True
        for j in range(n):
            if i == j:
                continue
            rel = compare(spectra[i], spectra[j]).relation
            if rel is Relation.EQUAL:
                continue
            all_equal = False
            if rel is not direction:
                ok = False
                break
        if ok:
            return ExtremalResult(i, records[i].label, True, all_equal)
    vn = [von_neumann(s).value for s in spectra]
    i = fallback(vn)
    return ExtremalResult(i, records[i].label, False, False)


def find_extremal_windows(records: Sequence[AnalysisRecord]) -> tuple[ExtremalResult, ExtremalResult]:
    """(maximum-entropy, minimum-entropy) windows under majorization.

    The maximum is a window majorized by every other one; the minimum
    majorizes every other one. Without such a witness the von Neumann
    argmax/argmin is returned with ``universal=False``. Ties go to the
    earliest window.
    """
    if len(records) < 2:
        raise InsufficientRecords("need at least two windows")
    spectra = []
    for r in records:
        if r.spectrum is None:
            raise InsufficientRecords(f"record {r.label} has no retained spectrum")
        spectra.append(r.spectrum)
    hi = _extreme(records, spectra, Relation.FIRST_MAJORIZED_BY_SECOND, lambda v: int(np.argmax(v)))
    lo = _extreme(records, spectra, Relation.SECOND_MAJORIZED_BY_FIRST, lambda v: int(np.argmin(v)))
    return hi, lo


def compare_to_reference(indicator, reference) -> ComparisonReport:
    """Least-squares scale and correlations on labels shared by both series."""
    ref = dict(reference)
    pairs = [(float(v), float(ref[k])) for k, v in indicator if k in ref]
    if len(pairs) < 2:
        raise InsufficientOverlap(f"only {len(pairs)} shared labels")
    x = np.array([p[0] for p in pairs])
    y = np.array([p[1] for p in pairs])
    sxx = float(x @ x)
    scale = float(x @ y) / sxx if sxx > 0 else float("nan")
    if np.ptp(x) == 0 or np.ptp(y) == 0:
        pearson = spearman = float("nan")
    else:
        pearson = float(np.clip(stats.pearsonr(x, y)[0], -1.0, 1.0))
        spearman = float(stats.spearmanr(x, y)[0])
    return ComparisonReport(scale, pearson, spearman, len(pairs))


def regime_boundary(records: Sequence[AnalysisRecord], ells: Sequence[int] = SUMS_AT,
                    min_fraction: float = 0.95) -> int | None:
    """First prefix after which the tracked partial sums keep decreasing.

    A step counts as decreasing when every tracked partial sum is
    non-increasing. Returns the N of the earliest record from which at
    least ``min_fraction`` of all later steps are decreasing (and the
    first one is), or None.
    """
    if len(records) < 2:
        return None
    dec = []
    for a, b in zip(records, records[1:]):
        dec.append(all(b.partial_sums_at[l] <= a.partial_sums_at[l] + 1e-12 for l in ells))
    dec = np.array(dec, dtype=float)
    suffix = np.cumsum(dec[::-1])[::-1] / np.arange(len(dec), 0, -1)
    for i in range(len(dec)):
        if dec[i] and suffix[i] >= min_fraction:
            return records[i].n
    return None


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x) + 0.0
    if math.isnan(x):
        return "nan"
    return f"{x:.{SIG_DIGITS}g}"


def csv_header(qs: Sequence[float], head: int, sums_at: Sequence[int] = SUMS_AT) -> list[str]:
    cols = ["label", "N"]
    cols += [f"E_{qkey(q)}" for q in qs]
    cols += ["N_E", "e_max", "regime", "saturation", "sigma_r"]
    cols += [f"spectrum_{k}" for k in range(1, head + 1)]
    cols += [f"sum_{ell}" for ell in sums_at]
    return cols


def emit(records: Sequence[AnalysisRecord], fmt: str, sink: IO[bytes], metadata: dict | None = None) -> None:
    """Write records as CSV or JSON (with a metadata envelope) to a byte stream."""
    if not records:
        raise InsufficientRecords("nothing to emit")
    fmt = fmt.lower()
    qs = sorted({q for r in records for q in r.entropies})
    if fmt == "csv":
        head = max((len(r.spectrum_head) for r in records), default=0)
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(csv_header(qs, head))
        for r in records:
            row = [r.label, r.n]
            row += [r.entropies[q].value if q in r.entropies else None for q in qs]
            row += [r.n_effective, r.e_max, None if r.regime is None else str(r.regime),
                    r.saturated, r.sigma_r]
            row += [r.spectrum_head[k] if k < len(r.spectrum_head) else None for k in range(head)]
            row += [r.partial_sums_at.get(ell) for ell in SUMS_AT]
            w.writerow([x if isinstance(x, str) else _fmt(x) for x in row])
        data = buf.getvalue()
    elif fmt == "json":
        doc = {
            "metadata": dict(metadata or {}),
            "records": [r.to_dict() for r in records],
        }
        doc["metadata"].setdefault("version", __version__)
        doc["metadata"].setdefault("backend", BACKEND)
        data = json.dumps(doc, indent=1, sort_keys=True, allow_nan=True) + "\n"
    else:
        raise ValueError(f"unknown format {fmt!r}")
    try:
        sink.write(data.encode("utf-8"))
        sink.flush()
    except (OSError, ValueError) as exc:
        raise IoFailure(str(exc)) from exc


def records_from_json(data: bytes | str) -> tuple[dict, list[AnalysisRecord]]:
    doc = json.loads(data)
    return doc["metadata"], [AnalysisRecord.from_dict(d) for d in doc["records"]]
