"""History-state entanglement analysis of real-valued time series.

Prices are embedded as coherent-state amplitudes; the spectrum of the
normalized overlap matrix of a history gives its entanglement entropies,
effective number of distinct states and majorization-based regimes.
"""
__version__ = "0.1.0"

from ._backend import BACKEND  # noqa: E402
from .coherent import (  # noqa: E402
    AlphaSeries,
    Base,
    EmbeddingConfig,
    Mode,
    ToleranceConfig,
    embed,
    kernel_p,
    overlap_complex,
    overlap_real,
)
from .entropy import (  # noqa: E402
    EntropyValue,
    e2_log_fluctuation,
    e2_small_sigma_approx,
    e2_variance_approx,
    effective_states,
    renyi,
    renyi2_from_purity,
    renyi_analytic_continuous,
    tsallis,
    von_neumann,
)
from .gram import (  # noqa: E402
    EntanglementSpectrum,
    OverlapMatrix,
    build_overlap_matrix,
    purity,
    schmidt_clock_basis,
    spectrum,
)
from .majorization import (  # noqa: E402
    Regime,
    RegimeLabel,
    Relation,
    classify_step,
    compare,
    lemma1_extend,
    partial_sums,
)
from .timeseries import (  # noqa: E402
    ColumnSchema,
    PriceSeries,
    WindowSpec,
    align,
    parse_price_csv,
    partition,
    read_price_csv,
)

__all__ = [
    "__version__",
    "BACKEND",
    "AlphaSeries",
    "Base",
    "EmbeddingConfig",
    "Mode",
    "ToleranceConfig",
    "embed",
    "kernel_p",
    "overlap_complex",
    "overlap_real",
    "EntropyValue",
    "e2_log_fluctuation",
    "e2_small_sigma_approx",
    "e2_variance_approx",
    "effective_states",
    "renyi",
    "renyi2_from_purity",
    "renyi_analytic_continuous",
    "tsallis",
    "von_neumann",
    "EntanglementSpectrum",
    "OverlapMatrix",
    "build_overlap_matrix",
    "purity",
    "schmidt_clock_basis",
    "spectrum",
    "Regime",
    "RegimeLabel",
    "Relation",
    "classify_step",
    "compare",
    "lemma1_extend",
    "partial_sums",
    "ColumnSchema",
    "PriceSeries",
    "WindowSpec",
    "align",
    "parse_price_csv",
    "partition",
    "read_price_csv",
]
