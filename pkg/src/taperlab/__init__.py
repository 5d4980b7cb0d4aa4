"""DPSS multitaper correction of antenna patterns measured in non-anechoic rooms."""

__version__ = "0.1.0"

from .dpss import TaperBasis, TaperSpec, dpss_basis, dpss_sequences, w_opt
from .engine import (
    AssembledSpectrum,
    SegmentPlan,
    TimeResponse,
    assemble,
    correct_angle,
    correct_pattern,
    plan_segments,
    segment_spectrum,
    to_time_domain,
)
from .errors import (
    CoverageError,
    LoadError,
    NumericError,
    ParameterError,
    TaperlabError,
    TuningError,
)
from .gating import (
    GateSpec,
    gate_hann,
    gate_rectangular,
    gate_threshold_composite,
    gated_pattern,
)
from .metrics import FidelityReport, compare, delta, e_r, emit_plot_data
from .sweep import (
    AngleGrid,
    FrequencyGrid,
    Pattern,
    SweepSet,
    load_pattern,
    load_sweep,
    save_pattern,
    save_sweep,
)
from .synth import ChannelSpec, Echo, synthesize
from .tuner import SearchGrid, TuneReport, alpha_fit, objective, tune
