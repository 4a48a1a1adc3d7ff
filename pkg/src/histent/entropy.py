"""Entropies of entanglement spectra and their closed-form approximations.

Reported entropies default to bits. The approximation helpers
(``e2_*``) return nats, matching the natural-log expansions they come
from.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .coherent import Base
from .errors import (
    NonPositivePrice,
    NonPositiveQ,
    NonPositiveSigma,
    WrongBase,
)
from .gram import EntanglementSpectrum, _alphas_of, purity

Q_VN = 1.0
Q_LIMIT_WIDTH = 1e-6

QValue = Union[float, str]


@dataclass(frozen=True)
class EntropyValue:
    value: float
    base: Base = Base.BITS
    q: QValue = "vn"

    def __float__(self):
        return float(self.value)

    def to(self, base) -> "EntropyValue":
        base = Base.coerce(base)
        if base is self.base:
            return self
        factor = math.log(2.0) if base is Base.NATS else 1.0 / math.log(2.0)
        return EntropyValue(self.value * factor, base, self.q)


class Distribution(enum.Enum):
    GAUSSIAN = "gaussian"
    EXPONENTIAL = "exponential"


def _lambdas(spec) -> np.ndarray:
    if isinstance(spec, EntanglementSpectrum):
        return spec.lambdas
    return np.asarray(spec, dtype=np.float64).ravel()


def _check_q(q):
    if not (q > 0 and math.isfinite(q)):
        raise NonPositiveQ(f"order q must be positive, got {q!r}")


def _log_factor(base: Base) -> float:
    return 1.0 / math.log(2.0) if base is Base.BITS else 1.0


def von_neumann(spec, base=Base.BITS) -> EntropyValue:
    base = Base.coerce(base)
    lam = _lambdas(spec)
    lam = lam[lam > 0]
    h = -float(np.sum(lam * np.log(lam))) * _log_factor(base)
    return EntropyValue(max(h, 0.0), base, "vn")


def renyi(spec, q: float, base=Base.BITS) -> EntropyValue:
    """(1/(1-q)) log sum lambda**q; continuous through q = 1."""
    _check_q(q)
    base = Base.coerce(base)
    if abs(q - 1.0) < Q_LIMIT_WIDTH:
        return EntropyValue(von_neumann(spec, base).value, base, q)
    lam = _lambdas(spec)
    lam = lam[lam > 0]
    s = float(np.sum(lam ** q))
    h = math.log(s) / (1.0 - q) * _log_factor(base)
    return EntropyValue(max(h, 0.0), base, q)


def tsallis(spec, q: float) -> float:
    """(1 - sum lambda**q)/(q - 1); von Neumann in nats at q = 1."""
    _check_q(q)
    if abs(q - 1.0) < Q_LIMIT_WIDTH:
        return von_neumann(spec, Base.NATS).value
    lam = _lambdas(spec)
    lam = lam[lam > 0]
    return (1.0 - float(np.sum(lam ** q))) / (q - 1.0)


def renyi_from_tsallis(t: float, q: float) -> float:
    """Renyi entropy in nats recovered from the Tsallis value of the same order."""
    _check_q(q)
    if abs(q - 1.0) < Q_LIMIT_WIDTH:
        return t
    return math.log(1.0 - (q - 1.0) * t) / (1.0 - q)


def entropy(spec, q: QValue, base=Base.BITS) -> EntropyValue:
    """Dispatch: ``q == 'vn'`` or 1 gives von Neumann, otherwise Renyi."""
    if q == "vn":
        return von_neumann(spec, base)
    return renyi(spec, float(q), base)


def renyi2_from_purity(O, base=Base.BITS) -> EntropyValue:
    """Quadratic Renyi entropy -log Tr O**2; no eigendecomposition."""
    base = Base.coerce(base)
    return renyi2_from_purity_value(purity(O), base)


def renyi2_from_purity_value(pur: float, base=Base.BITS) -> EntropyValue:
    base = Base.coerce(base)
    h = -math.log(pur) * _log_factor(base)
    return EntropyValue(max(h, 0.0), base, 2.0)


def effective_states(E: EntropyValue) -> float:
    """2**E: 1 for a stationary history, N when every step is new."""
    if isinstance(E, EntropyValue):
        if E.base is not Base.BITS:
            raise WrongBase("effective state count needs an entropy in bits")
        E = E.value
    return 2.0 ** float(E)


def e2_small_sigma_approx(alphas) -> float:
    """ln N - (2/N) sum_{n<m} exp(-(a_n - a_m)**2), valid for nearly orthogonal states.

    The exponent is the squared overlap, as in the expansion of Tr O**2.
    """
    a = _alphas_of(alphas)
    n = a.shape[0]
    d = a[:, None] - a[None, :]
    iu = np.triu_indices(n, 1)
    s = float(np.sum(np.exp(-(d[iu] ** 2))))
    return math.log(n) - 2.0 * s / n


def _check_sigma(sigma):
    if not (sigma > 0 and math.isfinite(sigma)):
        raise NonPositiveSigma(f"sigma must be positive, got {sigma!r}")


def e2_variance_approx(prices: Sequence[float], sigma: float) -> float:
    """(2/sigma**2) * population variance of prices; wide-gaussian limit."""
    _check_sigma(sigma)
    p = np.asarray(prices, dtype=np.float64)
    # centered two-pass variance; mean(p**2) - mean(p)**2 cancels badly
    return 2.0 * float(np.var(p)) / (sigma * sigma)


def e2_pairwise_approx(prices: Sequence[float], sigma: float) -> float:
    """(2/(N**2 sigma**2)) sum_{n<m} (p_n - p_m)**2; equal to the variance form."""
    _check_sigma(sigma)
    p = np.asarray(prices, dtype=np.float64)
    n = p.shape[0]
    d = p[:, None] - p[None, :]
    return float(np.sum(np.triu(d * d, 1))) * 2.0 / (n * n * sigma * sigma)


def e2_log_fluctuation(prices: Sequence[float], sigma: float) -> float:
    """(2/(N**2 sigma**2)) sum_{n<m} ln**2(p_n/p_m)."""
    _check_sigma(sigma)
    p = np.asarray(prices, dtype=np.float64)
    if np.any(p <= 0):
        raise NonPositivePrice("log fluctuation needs positive prices")
    lp = np.log(p)
    n = lp.shape[0]
    d = lp[:, None] - lp[None, :]
    return float(np.sum(np.triu(d * d, 1))) * 2.0 / (n * n * sigma * sigma)


def renyi_analytic_continuous(dist, sigma: float, q: float) -> float:
    """Renyi entropy (nats) of a gaussian or exponential density of scale sigma."""
    _check_sigma(sigma)
    _check_q(q)
    dist = Distribution(dist) if not isinstance(dist, Distribution) else dist
    if abs(q - 1.0) < Q_LIMIT_WIDTH:
        shape = 1.0
    else:
        shape = math.log(q) / (q - 1.0)
    if dist is Distribution.GAUSSIAN:
        return 0.5 * (math.log(2.0 * math.pi) + shape) + math.log(sigma)
    return shape + math.log(sigma)
