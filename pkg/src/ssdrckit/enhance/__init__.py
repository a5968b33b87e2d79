from .drc import (DrcConfig, IoecCurve, active_envelope_cv, drc, drc_gains,
                  envelope_follow)
from .pipeline import SsdrcConfig, peak_limit, ssdrc
from .shaping import (ShapingConfig, ShapingGains, adaptive_sharpening_gains,
                      hf_boost_gains, hf_boost_ramp_db, pre_emphasis_db, pre_emphasis_gains,
                      shape_spectrogram, shaping_gains, spectral_shaping)
from .voicing import voicing_probability

__all__ = [
    "DrcConfig", "IoecCurve", "ShapingConfig", "ShapingGains", "SsdrcConfig",
    "active_envelope_cv", "adaptive_sharpening_gains", "drc", "drc_gains",
    "envelope_follow", "hf_boost_gains", "hf_boost_ramp_db", "peak_limit",
    "pre_emphasis_db", "pre_emphasis_gains", "shape_spectrogram", "shaping_gains",
    "spectral_shaping", "ssdrc", "voicing_probability",
]
