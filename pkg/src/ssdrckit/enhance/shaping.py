"""Spectral shaping: adaptive sharpening, adaptive HF boost, fixed pre-emphasis."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.ndimage import uniform_filter1d

from ..audio import (AudioBuffer, ComplexSpectrogram, StftConfig, istft, match_rms,
                     stft)
from .voicing import voicing_probability


@dataclass(frozen=True)
class ShapingConfig:
    beta: float = 0.3
    n_cepstra: int = 30            # at 16 kHz; scaled with the sample rate
    smoothing_hz: float = 700.0
    sharpen_clip_db: float = 10.0
    boost_db_per_octave: float = 3.0
    boost_cap_db: float = 9.0
    min_gain_db: float = -30.0
    max_gain_db: float = 21.0
    stft: StftConfig = StftConfig()

    def __post_init__(self):
        if self.beta < 0:
            raise ValueError("beta must be non-negative")
        if not self.min_gain_db < self.max_gain_db:
            raise ValueError("min_gain_db must be below max_gain_db")


@dataclass(frozen=True)
class ShapingGains:
    """Linear gains: ``hs``/``hp`` are (frames, bins), ``hr`` is (bins,)."""

    hs: np.ndarray
    hp: np.ndarray
    hr: np.ndarray

    def composed(self, min_gain_db: float = -30.0, max_gain_db: float = 21.0) -> np.ndarray:
        g = self.hs * self.hp * self.hr[None, :]
        return np.clip(g, db_to_gain(min_gain_db), db_to_gain(max_gain_db))


def db_to_gain(db):
    return 10.0 ** (np.asarray(db, dtype=np.float64) / 20.0)


def cepstral_envelope_db(magnitude: np.ndarray, n_cepstra: int) -> np.ndarray:
    """Smoothed log-magnitude envelope (dB) keeping the low quefrencies."""
    nfft = 2 * (magnitude.shape[-1] - 1)
    log_mag = 20.0 * np.log10(np.maximum(magnitude, 1e-10))
    cep = np.fft.irfft(log_mag, nfft, axis=-1)
    lifter = np.zeros(nfft)
    lifter[:n_cepstra] = 1.0
    lifter[nfft - n_cepstra + 1:] = 1.0
    return np.fft.rfft(cep * lifter, nfft, axis=-1).real


def adaptive_sharpening_gains(spec: ComplexSpectrogram, voicing: np.ndarray,
                              beta: float = 0.3,
                              config: ShapingConfig | None = None) -> np.ndarray:
    """Formant-sharpening gains ``hs`` (linear, frames x bins).

    The envelope contrast ``L - smooth(L)`` is taken between the cepstral
    envelope and its moving average across frequency, scaled by
    ``beta * voicing`` and clipped to the sharpening limit.
    """
    config = config or ShapingConfig()
    if beta < 0:
        raise ValueError("beta must be non-negative")
    voicing = _check_voicing(spec, voicing)
    fs = spec.source_sample_rate
    n_cep = max(1, int(round(config.n_cepstra * fs / 16000)))
    envelope = cepstral_envelope_db(spec.magnitude(), n_cep)
    bin_hz = fs / spec.config.fft_size
    width = max(1, int(round(config.smoothing_hz / bin_hz)))
    width += 1 - width % 2
    smoothed = uniform_filter1d(envelope, width, axis=1, mode="nearest")
    gain_db = beta * voicing[:, None] * (envelope - smoothed)
    gain_db = np.clip(gain_db, -config.sharpen_clip_db, config.sharpen_clip_db)
    return db_to_gain(gain_db)


def hf_boost_ramp_db(freqs, db_per_octave: float = 3.0, cap_db: float = 9.0) -> np.ndarray:
    freqs = np.asarray(freqs, dtype=np.float64)
    octaves = np.log2(np.maximum(freqs, 1000.0) / 1000.0)
    return np.minimum(db_per_octave * octaves, cap_db)


def hf_boost_gains(spec: ComplexSpectrogram, voicing: np.ndarray,
                   config: ShapingConfig | None = None) -> np.ndarray:
    """High-frequency booster ``hp``: ``voicing * ramp(f)`` in dB."""
    config = config or ShapingConfig()
    voicing = _check_voicing(spec, voicing)
    ramp = hf_boost_ramp_db(spec.frequencies(), config.boost_db_per_octave, config.boost_cap_db)
    return db_to_gain(voicing[:, None] * ramp[None, :])


def pre_emphasis_db(freqs, min_gain_db: float = -30.0) -> np.ndarray:
    """Fixed pre-emphasis response in dB.

    +12 dB over 1-4 kHz, -6 dB/octave below 500 Hz (0 dB at 500 Hz),
    raised-cosine transitions over 500-1000 Hz and 4-5 kHz, 0 dB above
    5 kHz. The low-frequency slope bottoms out at `min_gain_db`.
    """
    f = np.asarray(freqs, dtype=np.float64)
    g = np.zeros_like(f)
    low = f < 500.0
    with np.errstate(divide="ignore"):
        g[low] = -6.0 * np.log2(500.0 / f[low])
    rise = (f >= 500.0) & (f < 1000.0)
    g[rise] = 6.0 * (1.0 - np.cos(np.pi * (f[rise] - 500.0) / 500.0))
    g[(f >= 1000.0) & (f <= 4000.0)] = 12.0
    fall = (f > 4000.0) & (f < 5000.0)
    g[fall] = 6.0 * (1.0 + np.cos(np.pi * (f[fall] - 4000.0) / 1000.0))
    return np.maximum(g, min_gain_db)


def pre_emphasis_gains(bins: int, sample_rate: int, min_gain_db: float = -30.0) -> np.ndarray:
    """Linear ``hr`` gains for a one-sided spectrum of `bins` bins."""
    if sample_rate < 8000:
        raise ValueError("pre-emphasis needs a sample rate of at least 8 kHz")
    freqs = np.linspace(0.0, sample_rate / 2.0, bins)
    return db_to_gain(pre_emphasis_db(freqs, min_gain_db))


def shaping_gains(spec: ComplexSpectrogram, voicing: np.ndarray,
                  config: ShapingConfig | None = None) -> ShapingGains:
    config = config or ShapingConfig()
    return ShapingGains(
        hs=adaptive_sharpening_gains(spec, voicing, config.beta, config),
        hp=hf_boost_gains(spec, voicing, config),
        hr=pre_emphasis_gains(spec.config.n_bins(), spec.source_sample_rate, config.min_gain_db),
    )


def shape_spectrogram(spec: ComplexSpectrogram, gains: ShapingGains,
                      config: ShapingConfig | None = None) -> ComplexSpectrogram:
    """Apply the composed real gains; phases are left as they are."""
    config = config or ShapingConfig()
    return spec.with_frames(spec.frames * gains.composed(config.min_gain_db, config.max_gain_db))


def spectral_shaping(buffer: AudioBuffer, beta: float | None = None,
                     config: ShapingConfig | None = None, equalize: bool = True) -> AudioBuffer:
    """Run the three shaping filters on `buffer` and resynthesize.

    The signal is zero-padded by one frame on both sides so every input
    sample gets full overlap-add support; the output has the input's
    length. With `equalize` the result is scaled back to the input RMS.

    Parameters
    ----------
    buffer : AudioBuffer
        Input speech, normally at 16 kHz.
    beta : float, optional
        Sharpening strength; overrides ``config.beta``.
    config : ShapingConfig, optional
    equalize : bool
        Restore the input RMS after shaping.
    """
    config = config or ShapingConfig()
    if beta is not None:
        config = replace(config, beta=beta)
    fs = buffer.sample_rate
    n = config.stft.frame_length(fs)
    if len(buffer) < n:
        raise ValueError(f"buffer of {len(buffer)} samples is shorter than one frame ({n})")
    if not np.any(buffer.samples):
        return buffer

    hop = config.stft.hop_length(fs)
    # pad so the padded length is a whole number of hops past the last frame
    tail = n + (-(len(buffer) + n) % hop)
    padded = AudioBuffer(np.concatenate([np.zeros(n), buffer.samples, np.zeros(tail)]), fs)
    spec = stft(padded, config.stft)
    voicing = voicing_probability(spec, padded)
    shaped = shape_spectrogram(spec, shaping_gains(spec, voicing, config), config)
    y = istft(shaped).samples[n:n + len(buffer)]
    if equalize:
        y = match_rms(y, buffer.rms())
    return buffer.with_samples(y)


def _check_voicing(spec: ComplexSpectrogram, voicing) -> np.ndarray:
    voicing = np.asarray(voicing, dtype=np.float64)
    if voicing.shape != (spec.n_frames,):
        raise ValueError(f"voicing track has shape {voicing.shape}, expected ({spec.n_frames},)")
    if np.any(voicing < 0) or np.any(voicing > 1):
        raise ValueError("voicing probabilities must lie in [0, 1]")
    return voicing
