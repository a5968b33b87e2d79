"""Masker generation (speech-shaped noise, competing speaker) and SNR mixing."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
import scipy.linalg
import scipy.signal

from .audio import (CANONICAL_RATE, AudioBuffer, active_frame_mask, active_speech_power,
                    load_wav, resample)

MASKER_LEVEL_DBFS = -26.0
LPC_ORDER = 20


class NoiseType(str, Enum):
    SSN = "SSN"
    CSN = "CSN"


CANONICAL_SNRS = {
    NoiseType.SSN: (-10.0, -5.0, 0.0),
    NoiseType.CSN: (-21.0, -14.0, -7.0),
}


@dataclass(frozen=True, order=True)
class NoiseCondition:
    noise_type: NoiseType
    snr_db: float

    def __post_init__(self):
        object.__setattr__(self, "noise_type", NoiseType(self.noise_type))
        object.__setattr__(self, "snr_db", float(self.snr_db))

    @property
    def label(self) -> str:
        return f"{self.noise_type.value} {self.snr_db:g} dB"


def canonical_conditions(noise_types=(NoiseType.SSN, NoiseType.CSN)) -> list[NoiseCondition]:
    return [NoiseCondition(t, snr) for t in map(NoiseType, noise_types) for snr in CANONICAL_SNRS[t]]


@dataclass(frozen=True)
class MixResult:
    mixture: AudioBuffer
    achieved_snr_db: float
    speech_scale: float
    noise_scale: float
    noise: AudioBuffer  # the scaled noise segment that was added


def _normalize(x: np.ndarray, level_dbfs: float = MASKER_LEVEL_DBFS) -> np.ndarray:
    rms = np.sqrt(np.mean(x**2))
    if rms == 0:
        raise ValueError("cannot level-normalize a silent signal")
    return x * (10.0 ** (level_dbfs / 20.0) / rms)


def lpc(x: np.ndarray, order: int = LPC_ORDER) -> np.ndarray:
    """All-pole coefficients ``[1, a1, ..., ap]`` by the autocorrelation method."""
    n = len(x)
    nfft = 1 << int(np.ceil(np.log2(2 * n)))
    spec = np.fft.rfft(x, nfft)
    r = np.fft.irfft(np.abs(spec) ** 2, nfft)[:order + 1] / n
    if r[0] <= 0:
        raise ValueError("cannot fit an all-pole model to a silent signal")
    a = scipy.linalg.solve_toeplitz(r[:order], -r[1:order + 1])
    return np.concatenate([[1.0], a])


def ssn_generate(reference, duration_s: float, seed: int, order: int = LPC_ORDER,
                 level_dbfs: float = MASKER_LEVEL_DBFS) -> AudioBuffer:
    """Stationary noise with the long-term spectrum of `reference` speech.

    `reference` is a buffer or an iterable of buffers; all must share a
    sample rate. Active frames are concatenated, an all-pole model of
    order `order` is fitted to them, and seeded white Gaussian noise is
    filtered through it. The result is normalized to `level_dbfs`.
    """
    buffers = [reference] if isinstance(reference, AudioBuffer) else list(reference)
    if not buffers:
        raise ValueError("no reference speech given")
    if duration_s <= 0:
        raise ValueError("duration_s must be positive")
    fs = buffers[0].sample_rate
    if any(b.sample_rate != fs for b in buffers):
        raise ValueError("reference buffers have different sample rates")
    total = sum(len(b) for b in buffers) / fs
    if total < 3.0:
        raise ValueError(f"need at least 3 s of reference speech, got {total:.2f} s")

    active = np.concatenate([b.samples[active_frame_mask(b.samples, fs)] for b in buffers])
    a = lpc(active, order)

    rng = np.random.default_rng(seed)
    n = int(round(duration_s * fs))
    warmup = int(0.1 * fs)  # lets the all-pole filter reach its stationary state
    noise = scipy.signal.lfilter([1.0], a, rng.standard_normal(n + warmup))[warmup:]
    return AudioBuffer(_normalize(noise, level_dbfs), fs)


def csn_load(path, duration_s: float | None = None, offset_s: float = 0.0,
             level_dbfs: float = MASKER_LEVEL_DBFS) -> AudioBuffer:
    """Competing-speaker segment from a WAV file at the canonical rate.

    With ``duration_s=None`` everything from `offset_s` to the end is used.
    """
    buf = resample(load_wav(path), CANONICAL_RATE)
    start = int(round(offset_s * CANONICAL_RATE))
    if offset_s < 0 or start > len(buf):
        raise ValueError(f"offset {offset_s} s is outside the {buf.duration_seconds:.2f} s recording")
    if duration_s is None:
        stop = len(buf)
    else:
        if duration_s <= 0:
            raise ValueError("duration_s must be positive")
        stop = start + int(round(duration_s * CANONICAL_RATE))
        if stop > len(buf):
            raise ValueError(
                f"requested {offset_s}+{duration_s} s from a {buf.duration_seconds:.2f} s recording"
            )
    return AudioBuffer(_normalize(buf.samples[start:stop], level_dbfs), CANONICAL_RATE)


def measure_snr(speech, noise, sample_rate: int = CANONICAL_RATE) -> float:
    """SNR in dB: active-speech power over mean noise power."""
    s = np.asarray(speech.samples if isinstance(speech, AudioBuffer) else speech)
    n = np.asarray(noise.samples if isinstance(noise, AudioBuffer) else noise)
    return 10.0 * np.log10(active_speech_power(s, sample_rate) / np.mean(n**2))


def mix_at_snr(speech: AudioBuffer, noise: AudioBuffer, snr_db: float, seed: int) -> MixResult:
    """Add a randomly placed noise segment scaled to `snr_db`.

    The speech is left unscaled. Speech power is measured over active
    frames (within 40 dB of the loudest 20 ms frame), noise power over
    the whole cropped segment.
    """
    if speech.sample_rate != noise.sample_rate:
        raise ValueError(
            f"sample rates differ: speech {speech.sample_rate}, noise {noise.sample_rate}"
        )
    if len(noise) < len(speech):
        raise ValueError("noise is shorter than the speech")
    p_s = active_speech_power(speech.samples, speech.sample_rate)
    if p_s == 0.0:
        raise ValueError("speech is silent")

    rng = np.random.default_rng(seed)
    offset = int(rng.integers(0, len(noise) - len(speech) + 1))
    segment = noise.samples[offset:offset + len(speech)]
    p_n = float(np.mean(segment**2))
    if p_n == 0.0:
        raise ValueError("noise segment is silent")

    scale = float(np.sqrt(p_s / (p_n * 10.0 ** (snr_db / 10.0))))
    scaled = segment * scale
    achieved = 10.0 * np.log10(p_s / np.mean(scaled**2))
    return MixResult(
        mixture=speech.with_samples(speech.samples + scaled),
        achieved_snr_db=float(achieved),
        speech_scale=1.0,
        noise_scale=scale,
        noise=speech.with_samples(scaled),
    )
