"""Per-frame voicing probability from the normalized autocorrelation peak."""

from __future__ import annotations

import numpy as np

from ..audio import AudioBuffer, ComplexSpectrogram, frame_count, frame_signal

F0_MIN_HZ = 50.0
F0_MAX_HZ = 400.0
GATE_DB = 40.0


def frame_rms(frames: np.ndarray) -> np.ndarray:
    return np.sqrt(np.mean(frames**2, axis=1))


def energy_gate(rms: np.ndarray, gate_db: float = GATE_DB) -> np.ndarray:
    """True for frames within `gate_db` of the loudest frame."""
    peak = rms.max() if len(rms) else 0.0
    if peak <= 0.0:
        return np.zeros(len(rms), dtype=bool)
    return rms >= peak * 10.0 ** (-gate_db / 20.0)


def normalized_autocorrelation(frames: np.ndarray, min_lag: int, max_lag: int) -> np.ndarray:
    """Normalized autocorrelation r[t, k] for lags ``min_lag..max_lag``.

    ``r[k] = sum x[n] x[n+k] / sqrt(sum x[n]^2 * sum x[n+k]^2)``, both
    energy sums taken over the overlapping part only, so a periodic frame
    scores close to 1 at its period regardless of the lag.
    """
    n = frames.shape[1]
    nfft = 1 << int(np.ceil(np.log2(2 * n)))
    spec = np.fft.rfft(frames, nfft, axis=1)
    acf = np.fft.irfft(np.abs(spec) ** 2, nfft, axis=1)[:, min_lag:max_lag + 1]

    energy = np.cumsum(frames**2, axis=1)
    total = energy[:, -1:]
    lags = np.arange(min_lag, max_lag + 1)
    head = energy[:, n - 1 - lags]                   # x[0 : n-k]
    tail = total - np.where(lags > 0, energy[:, lags - 1], 0.0)  # x[k : n]
    denom = np.sqrt(np.maximum(head * tail, 0.0))
    with np.errstate(invalid="ignore", divide="ignore"):
        r = np.where(denom > 0, acf / denom, 0.0)
    return r


def voicing_probability(spec: ComplexSpectrogram, buffer: AudioBuffer,
                        gate_db: float = GATE_DB) -> np.ndarray:
    """Voicing probability in [0, 1] for every frame of `spec`.

    The value is the clamped peak of the normalized autocorrelation over
    lags for 50-400 Hz, zeroed on frames more than `gate_db` below the
    loudest frame.
    """
    fs = buffer.sample_rate
    if spec.source_sample_rate != fs:
        raise ValueError(
            f"spectrogram rate {spec.source_sample_rate} does not match buffer rate {fs}"
        )
    n = spec.config.frame_length(fs)
    hop = spec.config.hop_length(fs)
    if frame_count(len(buffer), n, hop) != spec.n_frames:
        raise ValueError("spectrogram frame count does not match buffer under its config")

    frames = frame_signal(buffer.samples, n, hop)
    frames = frames - frames.mean(axis=1, keepdims=True)
    min_lag = int(np.floor(fs / F0_MAX_HZ))
    max_lag = min(int(np.ceil(fs / F0_MIN_HZ)), n - 2)
    r_max = normalized_autocorrelation(frames, min_lag, max_lag).max(axis=1)
    gate = energy_gate(frame_rms(frame_signal(buffer.samples, n, hop)), gate_db)
    return np.clip(r_max, 0.0, 1.0) * gate
