"""failtail: failure-count tail analysis for intelligence evaluation runs.

The pipeline: ingest per-instance failure counts, build their empirical
distribution, fit the power-law decay rate of the tail, classify the
subject into one of three levels by which moments of the distribution
exist, and extrapolate model size against decay rate into the headline
what-would-it-take figures. A seeded abelian sandpile simulator provides a
physical heavy-tailed system for exercising the same pipeline, and a
scale-invariance checker verifies that fitted exponents survive linear
rescaling of counts.
"""

from .classifier import (
    BOUNDARY_HIGH,
    BOUNDARY_LOW,
    ClassificationRegions,
    IntelligenceLevel,
    Level,
    classify,
    classify_alpha,
    region_plot_data,
)
from .distributions import (
    EmpiricalDistribution,
    LogBinnedDistribution,
    average_distributions,
    ccdf,
    distribution_from_counts,
    empirical_distribution,
    log_bin,
)
from .invariance import InvarianceReport, check_exponent_invariance, scale_records
from .powerlaw import (
    DEFAULT_BINS_PER_DECADE,
    DEFAULT_FIT_RANGE,
    FitRange,
    InsufficientDataError,
    PowerLawFit,
    fit_powerlaw,
    fit_powerlaw_mle,
)
from .records import (
    DuplicateRunError,
    FailureRecord,
    IngestError,
    IngestResult,
    RunManifest,
    RunStore,
    ingest_records,
    load_manifest,
    register_run,
    save_manifest,
    serialize_records,
)
from .scaling import (
    HardwareAssumptions,
    NonExtrapolableError,
    ScalingPoint,
    ScalingProjection,
    build_projection,
    fit_scaling_line,
    hardware_cost,
    moores_law_years,
    neuron_comparison,
    project_required_size,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "FailureRecord",
    "RunManifest",
    "RunStore",
    "IngestError",
    "IngestResult",
    "DuplicateRunError",
    "ingest_records",
    "serialize_records",
    "register_run",
    "load_manifest",
    "save_manifest",
    "EmpiricalDistribution",
    "LogBinnedDistribution",
    "empirical_distribution",
    "distribution_from_counts",
    "average_distributions",
    "log_bin",
    "ccdf",
    "FitRange",
    "PowerLawFit",
    "InsufficientDataError",
    "DEFAULT_FIT_RANGE",
    "DEFAULT_BINS_PER_DECADE",
    "fit_powerlaw",
    "fit_powerlaw_mle",
    "Level",
    "IntelligenceLevel",
    "ClassificationRegions",
    "BOUNDARY_LOW",
    "BOUNDARY_HIGH",
    "classify",
    "classify_alpha",
    "region_plot_data",
    "ScalingPoint",
    "ScalingProjection",
    "HardwareAssumptions",
    "NonExtrapolableError",
    "fit_scaling_line",
    "project_required_size",
    "moores_law_years",
    "hardware_cost",
    "neuron_comparison",
    "build_projection",
    "InvarianceReport",
    "scale_records",
    "check_exponent_invariance",
]
