"""SIIB^Gauss: information rate of a Gaussian channel between clean and degraded speech.

Absolute scores depend on the front end and on every constant below;
what the metric is trusted for is ordering conditions on the same
material.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.fft
import scipy.signal

from .audio import CANONICAL_RATE, AudioBuffer

N_BANDS = 32
F_LO = 150.0
F_HI = 7500.0
FRAME_RATE = 50.0
LOG_FLOOR = 1e-8
GATE_DB = 40.0
CONTEXT = 4
PRODUCTION_RHO = 0.75
MIN_EIGENVALUE = 1e-10
MIN_DURATION_S = 0.5

# per-channel ceiling: -0.5 * log2(1 - 0.75**2)
MAX_BITS_PER_CHANNEL = -0.5 * np.log2(1.0 - PRODUCTION_RHO**2)


@dataclass(frozen=True)
class SiibScore:
    bits_per_second: float
    channel_count: int
    frame_rate_hz: float = FRAME_RATE

    def __float__(self):
        return self.bits_per_second


@dataclass(frozen=True)
class SiibConfig:
    gate_db: float = GATE_DB
    context: int = CONTEXT
    production_rho: float = PRODUCTION_RHO

    def __post_init__(self):
        if not 0 < self.production_rho <= 1:
            raise ValueError("production_rho must lie in (0, 1]")
        if self.context < 0:
            raise ValueError("context must be non-negative")


@dataclass(frozen=True)
class EnvelopeFeatures:
    matrix: np.ndarray          # (bands, frames) natural-log envelope energies
    band_centers_hz: np.ndarray

    @property
    def energies(self) -> np.ndarray:
        return np.exp(self.matrix)


def erb_number(f):
    return 21.4 * np.log10(1.0 + 0.00437 * np.asarray(f, dtype=np.float64))


def erb_number_to_hz(e):
    return (10.0 ** (np.asarray(e, dtype=np.float64) / 21.4) - 1.0) / 0.00437


def band_centers(n_bands: int = N_BANDS, f_lo: float = F_LO, f_hi: float = F_HI) -> np.ndarray:
    """Center frequencies equally spaced on the ERB-number scale."""
    return erb_number_to_hz(np.linspace(erb_number(f_lo), erb_number(f_hi), n_bands))


def gammatone_sos(fc: float, sample_rate: int) -> np.ndarray:
    """scipy's 4th-order IIR gammatone as four second-order sections.

    The direct-form denominator is a pole pair raised to the fourth
    power; run as one 8th-order recursion it loses about four digits in
    the lowest bands. The pair is read back from the coefficients and the
    numerator zeros are split over the first two sections.
    """
    b, a = scipy.signal.gammatone(fc, "iir", fs=sample_rate)
    den = np.array([1.0, a[1] / 4.0, a[8] ** 0.25])
    z = np.roots(b)
    # keep conjugate zeros in the same section
    z = z[np.lexsort((z.real, np.round(np.abs(z.imag), 12)))]
    n1 = b[0] * np.real(np.poly(z[:2]))
    n2 = np.real(np.poly(z[2:]))
    unity = np.array([1.0, 0.0, 0.0])
    return np.array([np.r_[n1, den], np.r_[n2, den], np.r_[unity, den], np.r_[unity, den]])


def gammatone_bank(sample_rate: int, centers: np.ndarray) -> list[np.ndarray]:
    return [gammatone_sos(fc, sample_rate) for fc in centers]


def envelope_features(buffer: AudioBuffer) -> EnvelopeFeatures:
    """Log envelope energies of a 32-band gammatone analysis at 50 frames/s.

    Each band output is turned into its analytic signal; the squared
    magnitude is averaged over non-overlapping 20 ms blocks (the low-pass
    and decimation step) and the natural log is taken with a floor.
    """
    fs = buffer.sample_rate
    if fs != CANONICAL_RATE:
        raise ValueError(f"envelope features expect {CANONICAL_RATE} Hz input, got {fs}")
    if buffer.duration_seconds < MIN_DURATION_S:
        raise ValueError(f"input of {buffer.duration_seconds:.3f} s is shorter than {MIN_DURATION_S} s")
    hop = int(round(fs / FRAME_RATE))
    n_frames = len(buffer) // hop
    centers = band_centers()
    x = buffer.samples
    nfft = scipy.fft.next_fast_len(len(x))

    bands = np.empty((len(centers), len(x)))
    for k, sos in enumerate(gammatone_bank(fs, centers)):
        bands[k] = scipy.signal.sosfilt(sos, x)
    analytic = scipy.signal.hilbert(bands, N=nfft, axis=1)[:, :len(x)]
    power = np.abs(analytic[:, :n_frames * hop]) ** 2
    energy = power.reshape(len(centers), n_frames, hop).mean(axis=2)
    return EnvelopeFeatures(np.log(np.maximum(energy, LOG_FLOOR)), centers)


def stack_context(matrix: np.ndarray, context: int = CONTEXT) -> np.ndarray:
    """Append the `context` preceding frames to each frame.

    Input is (bands, frames); output is (bands * (context + 1),
    frames - context), with the current frame's bands first.
    """
    k, t = matrix.shape
    if t <= context:
        raise ValueError(f"need more than {context} frames, got {t}")
    return np.vstack([matrix[:, context - lag:t - lag] for lag in range(context + 1)])


def _pearson(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Row-wise Pearson correlation; zero where either row is constant."""
    a = a - a.mean(axis=1, keepdims=True)
    b = b - b.mean(axis=1, keepdims=True)
    num = np.sum(a * b, axis=1)
    den = np.sqrt(np.sum(a * a, axis=1) * np.sum(b * b, axis=1))
    rho = np.divide(num, den, out=np.zeros_like(num), where=den > 0)
    return np.clip(rho, -1.0, 1.0)


def _align(clean: AudioBuffer, degraded: AudioBuffer):
    if clean.sample_rate != degraded.sample_rate:
        raise ValueError("clean and degraded sample rates differ")
    hop = int(round(clean.sample_rate / FRAME_RATE))
    if abs(len(clean) - len(degraded)) > hop:
        raise ValueError(
            f"duration mismatch of {abs(len(clean) - len(degraded))} samples exceeds one frame"
        )
    n = min(len(clean), len(degraded))
    return clean.with_samples(clean.samples[:n]), degraded.with_samples(degraded.samples[:n])


def siib_from_features(clean: EnvelopeFeatures, degraded: EnvelopeFeatures,
                       config: SiibConfig | None = None) -> SiibScore:
    """Information rate from precomputed clean/degraded envelope features."""
    config = config or SiibConfig()
    xc, xd = clean.matrix, degraded.matrix
    t = min(xc.shape[1], xd.shape[1])
    xc, xd = xc[:, :t], xd[:, :t]

    if np.all(xc <= np.log(LOG_FLOOR) + 1e-9):
        raise ValueError("every frame of the clean signal was gated out as silence")
    frame_energy = np.exp(xc).sum(axis=0)
    keep = frame_energy >= frame_energy.max() * 10.0 ** (-config.gate_db / 10.0)
    xc, xd = xc[:, keep], xd[:, keep]
    if xc.shape[1] <= config.context + 1:
        raise ValueError("too few active frames to estimate the channel")

    zc = stack_context(xc, config.context)
    zd = stack_context(xd, config.context)
    mean = zc.mean(axis=1, keepdims=True)
    eigval, eigvec = np.linalg.eigh(np.cov(zc))
    retained = eigval > MIN_EIGENVALUE
    # whitening scale is irrelevant to correlation but kept for a proper KLT
    transform = eigvec[:, retained].T / np.sqrt(eigval[retained])[:, None]
    pc = transform @ (zc - mean)
    pd = transform @ (zd - mean)

    rho = _pearson(pc, pd) * config.production_rho
    bits_per_frame = float(np.sum(-0.5 * np.log2(1.0 - rho**2)))
    return SiibScore(FRAME_RATE * bits_per_frame, int(retained.sum()), FRAME_RATE)


def siib_gauss(clean: AudioBuffer, degraded: AudioBuffer,
               config: SiibConfig | None = None) -> SiibScore:
    """SIIB^Gauss of `degraded` with `clean` as the time-aligned reference.

    Raises
    ------
    ValueError
        On a duration mismatch of more than one 20 ms frame, inputs under
        0.5 s, or a clean signal with no active frames.
    """
    clean, degraded = _align(clean, degraded)
    return siib_from_features(envelope_features(clean), envelope_features(degraded), config)


def identity_bound(channel_count: int, frame_rate: float = FRAME_RATE,
                   production_rho: float = PRODUCTION_RHO) -> float:
    """Score of a perfect channel with `channel_count` retained eigenchannels."""
    return frame_rate * channel_count * -0.5 * np.log2(1.0 - production_rho**2)


def relative_gain(a, b) -> float:
    """Relative improvement of `a` over baseline `b`, in percent."""
    a, b = float(a), float(b)
    if b <= 0:
        raise ValueError("baseline score must be positive")
    return 100.0 * (a - b) / b
