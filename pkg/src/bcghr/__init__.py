"""Heart-rate estimation from ballistocardiogram recordings.

Pipeline: zero-phase band-pass, per-frame Hilbert envelope power, zero-padded
FFT peak search with a continuity band, and phase-vocoder refinement of the
peak frequency from the phase advance between overlapping frames.
"""

from .config import PipelineConfig, load_config
from .envelope import AnalyticFrame, analytic_signal, envelope_for_spectrum
from .errors import (BcgError, ConfigError, ParseError, RangeError,
                     UndefinedCorrelationError, ValidationError)
from .io import (Recording, ReferenceAnnotation, load_annotation, load_recording,
                 save_annotation, save_recording)
from .metrics import (MetricsReport, PairedSeries, bland_altman, evaluate, mae,
                      pearson_r, reference_hr, std_abs_err)
from .preprocess import FilterSpec, design_bandpass, filtfilt
from .spectral import PeakPick, Spectrum, VocoderResult, frame_spectrum, peak_pick, vocoder_refine
from .synth import SignalModelParams, generate_bcg, make_corpus
from .tracker import HrEstimate, estimate_hr, frames, next_search_band

__version__ = "0.1.0"
