"""Time-domain dynamic range compression driven by an envelope characteristic."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.signal

from ..audio import AudioBuffer, match_rms

ENVELOPE_FLOOR = 1e-6


@dataclass(frozen=True)
class IoecCurve:
    """Piecewise-linear input/output envelope characteristic in dBFS.

    Outside the first and last points the terminal segments are
    extended linearly.
    """

    points: tuple = ((-80.0, -80.0), (-30.0, -30.0), (0.0, -20.0))

    def __post_init__(self):
        pts = tuple((float(a), float(b)) for a, b in self.points)
        if len(pts) < 2:
            raise ValueError("an IOEC curve needs at least two points")
        x = np.array([p[0] for p in pts])
        y = np.array([p[1] for p in pts])
        if np.any(np.diff(x) <= 0):
            raise ValueError("IOEC input levels must be strictly increasing")
        if np.any(np.diff(y) < 0):
            raise ValueError("IOEC output levels must be non-decreasing")
        object.__setattr__(self, "points", pts)

    @classmethod
    def identity(cls) -> IoecCurve:
        return cls(((-100.0, -100.0), (0.0, 0.0)))

    def __call__(self, level_db):
        x = np.array([p[0] for p in self.points])
        y = np.array([p[1] for p in self.points])
        level_db = np.asarray(level_db, dtype=np.float64)
        out = np.interp(level_db, x, y)
        lo_slope = (y[1] - y[0]) / (x[1] - x[0])
        hi_slope = (y[-1] - y[-2]) / (x[-1] - x[-2])
        out = np.where(level_db < x[0], y[0] + lo_slope * (level_db - x[0]), out)
        out = np.where(level_db > x[-1], y[-1] + hi_slope * (level_db - x[-1]), out)
        return out


@dataclass(frozen=True)
class DrcConfig:
    attack_ms: float = 2.0
    release_ms: float = 20.0
    gain_smooth_ms: float = 10.0
    curve: IoecCurve = field(default_factory=IoecCurve)

    def __post_init__(self):
        if min(self.attack_ms, self.release_ms, self.gain_smooth_ms) <= 0:
            raise ValueError("DRC time constants must be positive")


def smoothing_coefficient(tau_ms: float, sample_rate: int) -> float:
    """One-pole coefficient ``exp(-1 / (tau * fs))``."""
    return float(np.exp(-1.0 / (tau_ms * sample_rate / 1000.0)))


def envelope_follow(buffer: AudioBuffer, config: DrcConfig | None = None) -> np.ndarray:
    """Attack/release peak envelope of ``|x|``, starting from zero.

    The attack coefficient is used while ``|x[n]|`` exceeds the previous
    envelope value, the release coefficient otherwise.
    """
    config = config or DrcConfig()
    fs = buffer.sample_rate
    a_att = smoothing_coefficient(config.attack_ms, fs)
    a_rel = smoothing_coefficient(config.release_ms, fs)
    b_att, b_rel = 1.0 - a_att, 1.0 - a_rel

    # plain floats: the recursion is sequential and numpy scalars are slow here
    mags = np.abs(buffer.samples).tolist()
    out = [0.0] * len(mags)
    e = 0.0
    for i, m in enumerate(mags):
        if m > e:
            e = a_att * e + b_att * m
        else:
            e = a_rel * e + b_rel * m
        out[i] = e
    return np.array(out)


def one_pole_zero_phase(x: np.ndarray, a: float) -> np.ndarray:
    """One-pole low-pass run forward then backward, each pass started at its edge value."""
    fwd, _ = scipy.signal.lfilter([1.0 - a], [1.0, -a], x, zi=[a * x[0]])
    bwd, _ = scipy.signal.lfilter([1.0 - a], [1.0, -a], fwd[::-1], zi=[a * fwd[-1]])
    return bwd[::-1]


def drc_gains(envelope: np.ndarray, config: DrcConfig | None = None,
              sample_rate: int = 16000) -> np.ndarray:
    """Linear per-sample gains from the envelope and the IOEC curve.

    The static gain ``curve(env_db) - env_db`` is smoothed in dB by a
    one-pole low-pass (`gain_smooth_ms`) applied forward and backward.
    The zero-phase pass keeps the gain from lagging behind onsets, which
    would otherwise let every syllable onset through uncompressed.
    """
    config = config or DrcConfig()
    envelope = np.asarray(envelope, dtype=np.float64)
    if np.any(envelope < 0):
        raise ValueError("envelope must be non-negative")
    if len(envelope) == 0:
        return np.zeros(0)
    env_db = 20.0 * np.log10(np.maximum(envelope, ENVELOPE_FLOOR))
    gain_db = config.curve(env_db) - env_db
    a = smoothing_coefficient(config.gain_smooth_ms, sample_rate)
    return 10.0 ** (one_pole_zero_phase(gain_db, a) / 20.0)


def drc(buffer: AudioBuffer, config: DrcConfig | None = None, equalize: bool = True) -> AudioBuffer:
    """Compress `buffer` sample-wise; optionally restore its RMS."""
    config = config or DrcConfig()
    if not np.any(buffer.samples):
        return buffer
    gains = drc_gains(envelope_follow(buffer, config), config, buffer.sample_rate)
    y = buffer.samples * gains
    if equalize:
        y = match_rms(y, buffer.rms())
    return buffer.with_samples(y)


def active_envelope_cv(envelope: np.ndarray, active: np.ndarray) -> float:
    """Coefficient of variation (std / mean) of the envelope on `active` samples."""
    e = envelope[active]
    return float(np.std(e) / np.mean(e))
