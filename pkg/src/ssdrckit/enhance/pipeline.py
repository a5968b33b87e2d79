"""Spectral shaping followed by dynamic range compression."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..audio import AudioBuffer
from .drc import DrcConfig, drc
from .shaping import ShapingConfig, spectral_shaping


@dataclass(frozen=True)
class SsdrcConfig:
    shaping: ShapingConfig = field(default_factory=ShapingConfig)
    drc: DrcConfig = field(default_factory=DrcConfig)


def peak_limit(samples: np.ndarray) -> np.ndarray:
    """Normalize to unit peak when the peak exceeds 1, then hard clamp."""
    peak = float(np.max(np.abs(samples))) if len(samples) else 0.0
    if peak > 1.0:
        samples = samples / peak
    return np.clip(samples, -1.0, 1.0)


def ssdrc(buffer: AudioBuffer, beta: float | None = None,
          config: SsdrcConfig | None = None, limit: bool = True) -> AudioBuffer:
    """Intelligibility-enhance `buffer`: shaping, then compression.

    Each stage restores the input RMS. With ``limit=False`` the final
    peak limiter is skipped, which leaves the output RMS equal to the
    input RMS.
    """
    config = config or SsdrcConfig()
    shaped = spectral_shaping(buffer, beta, config.shaping)
    out = drc(shaped, config.drc)
    if limit:
        out = out.with_samples(peak_limit(out.samples))
    return out
