"""Audio buffers, WAV I/O, resampling, STFT/ISTFT and mel features.

Everything downstream (shaping, compression, noise, metrics) passes
:class:`AudioBuffer` objects around and works on the STFT defined here.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np
import scipy.io.wavfile
import scipy.signal

CANONICAL_RATE = 16000

N_MELS = 80
LOG_FLOOR = 1e-5


class WavError(Exception):
    """Base class for WAV reading problems."""


class MalformedWavError(WavError):
    """The file is not a readable RIFF/WAVE container."""


class UnsupportedCodecError(WavError):
    """The WAV container holds something other than PCM16 or float32."""


@dataclass(frozen=True)
class AudioBuffer:
    """Mono signal plus its sample rate.

    Samples are stored as float64 and are expected to be nominally
    within [-1, 1].
    """

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim != 1:
            raise ValueError("AudioBuffer holds mono audio only (1-d samples)")
        if not np.all(np.isfinite(samples)):
            raise ValueError("samples contain NaN or Inf")
        if int(self.sample_rate) != self.sample_rate or self.sample_rate <= 0:
            raise ValueError(f"sample_rate must be a positive integer, got {self.sample_rate}")
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "sample_rate", int(self.sample_rate))

    def __len__(self):
        return len(self.samples)

    @property
    def duration_seconds(self) -> float:
        return len(self.samples) / self.sample_rate

    def rms(self) -> float:
        if len(self.samples) == 0:
            return 0.0
        return float(np.sqrt(np.mean(self.samples**2)))

    def with_samples(self, samples) -> AudioBuffer:
        return AudioBuffer(samples, self.sample_rate)


@dataclass(frozen=True)
class StftConfig:
    """Framing parameters for the STFT.

    Defaults are the feature-extraction setting used throughout: 50 ms
    Hann frames, 12.5 ms hop, 2048-point FFT.
    """

    frame_length_ms: float = 50.0
    hop_length_ms: float = 12.5
    fft_size: int = 2048
    window: str = "hann"

    def __post_init__(self):
        if self.hop_length_ms <= 0 or self.frame_length_ms <= 0:
            raise ValueError("frame and hop lengths must be positive")
        if self.hop_length_ms > self.frame_length_ms:
            raise ValueError("hop_length_ms must not exceed frame_length_ms")
        if self.fft_size <= 0 or self.fft_size & (self.fft_size - 1):
            raise ValueError("fft_size must be a power of two")

    def frame_length(self, sample_rate: int) -> int:
        return int(round(self.frame_length_ms * sample_rate / 1000.0))

    def hop_length(self, sample_rate: int) -> int:
        return int(round(self.hop_length_ms * sample_rate / 1000.0))

    def analysis_window(self, sample_rate: int) -> np.ndarray:
        # periodic (DFT-even) window: this is the COLA-satisfying variant
        return scipy.signal.get_window(self.window, self.frame_length(sample_rate), fftbins=True)

    def check(self, sample_rate: int):
        """Raise if the config cannot be used at `sample_rate`."""
        n = self.frame_length(sample_rate)
        hop = self.hop_length(sample_rate)
        if n > self.fft_size:
            raise ValueError(f"frame of {n} samples does not fit fft_size {self.fft_size}")
        if hop < 1:
            raise ValueError("hop is shorter than one sample")
        if not scipy.signal.check_NOLA(self.analysis_window(sample_rate), n, n - hop):
            raise ValueError(f"window {self.window!r} cannot be overlap-added at this hop")

    def n_bins(self) -> int:
        return self.fft_size // 2 + 1

    def bin_frequencies(self, sample_rate: int) -> np.ndarray:
        return np.fft.rfftfreq(self.fft_size, 1.0 / sample_rate)


@dataclass(frozen=True)
class ComplexSpectrogram:
    """One-sided complex STFT, shape (frames, fft_size // 2 + 1)."""

    frames: np.ndarray
    config: StftConfig
    source_sample_rate: int

    @property
    def n_frames(self) -> int:
        return self.frames.shape[0]

    def magnitude(self) -> np.ndarray:
        return np.abs(self.frames)

    def frequencies(self) -> np.ndarray:
        return self.config.bin_frequencies(self.source_sample_rate)

    def with_frames(self, frames) -> ComplexSpectrogram:
        return ComplexSpectrogram(np.asarray(frames), self.config, self.source_sample_rate)


@dataclass(frozen=True)
class MelNormalization:
    """Reference range of natural-log mel magnitudes mapped onto [0, 1].

    The defaults cover the log floor up to a full-scale 50 ms frame; use
    :func:`fit_mel_normalization` to derive a range from a corpus instead.
    """

    log_min: float = float(np.log(LOG_FLOOR))
    log_max: float = float(np.log(400.0))

    def __post_init__(self):
        if not self.log_max > self.log_min:
            raise ValueError("log_max must exceed log_min")

    def apply(self, log_mel: np.ndarray) -> np.ndarray:
        scaled = (log_mel - self.log_min) / (self.log_max - self.log_min)
        return np.clip(scaled, 0.0, 1.0)


@dataclass(frozen=True)
class MelSpectrogram:
    frames: np.ndarray
    config: StftConfig
    mel_lo_hz: float
    mel_hi_hz: float
    normalization: MelNormalization = field(default_factory=MelNormalization)


def load_wav(path) -> AudioBuffer:
    """Read a PCM16 or float32 WAV file as a mono :class:`AudioBuffer`.

    Stereo (or wider) files are downmixed by averaging channels. PCM16 is
    scaled by 1/32768.

    Raises
    ------
    FileNotFoundError
        If `path` does not exist.
    MalformedWavError
        If the file is not a valid RIFF/WAVE container.
    UnsupportedCodecError
        If the samples are not PCM16 or IEEE float32.
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"no such WAV file: {path}")
    try:
        rate, data = scipy.io.wavfile.read(path)
    except ValueError as err:
        msg = str(err)
        if msg.startswith(("Unknown wave file format", "Unsupported bit depth")):
            raise UnsupportedCodecError(f"{path}: {msg}") from err
        raise MalformedWavError(f"{path}: {msg}") from err
    except EOFError as err:
        raise MalformedWavError(f"{path}: truncated file") from err

    if data.dtype == np.int16:
        samples = data.astype(np.float64) / 32768.0
    elif data.dtype == np.float32:
        samples = data.astype(np.float64)
    else:
        raise UnsupportedCodecError(f"{path}: sample type {data.dtype} is not PCM16 or float32")
    if samples.ndim == 2:
        samples = samples.mean(axis=1)
    return AudioBuffer(samples, rate)


def save_wav(buffer: AudioBuffer, path):
    """Write `buffer` as a mono IEEE-float32 WAV file."""
    if len(buffer) == 0:
        raise ValueError("refusing to write an empty buffer")
    if not np.all(np.isfinite(buffer.samples)):
        raise ValueError("buffer contains NaN or Inf")
    path = Path(path)
    scipy.io.wavfile.write(path, buffer.sample_rate, buffer.samples.astype(np.float32))


def resample(buffer: AudioBuffer, target_rate: int) -> AudioBuffer:
    """Polyphase windowed-sinc sample-rate conversion.

    The output holds ``round(len * target_rate / source_rate)`` samples.
    """
    if target_rate <= 0 or int(target_rate) != target_rate:
        raise ValueError(f"target_rate must be a positive integer, got {target_rate}")
    target_rate = int(target_rate)
    if target_rate == buffer.sample_rate:
        return buffer
    ratio = Fraction(target_rate, buffer.sample_rate)
    out_len = int(round(len(buffer) * target_rate / buffer.sample_rate))
    if len(buffer) == 0:
        return AudioBuffer(np.zeros(0), target_rate)
    y = scipy.signal.resample_poly(buffer.samples, ratio.numerator, ratio.denominator)
    if len(y) >= out_len:
        y = y[:out_len]
    else:
        y = np.concatenate([y, np.zeros(out_len - len(y))])
    return AudioBuffer(y, target_rate)


def to_canonical(buffer: AudioBuffer) -> AudioBuffer:
    return resample(buffer, CANONICAL_RATE)


def frame_count(n_samples: int, frame_length: int, hop: int) -> int:
    if n_samples < frame_length:
        return 0
    return (n_samples - frame_length) // hop + 1


def frame_signal(x: np.ndarray, frame_length: int, hop: int) -> np.ndarray:
    """Strided (frames, frame_length) view of `x`; no padding."""
    n = frame_count(len(x), frame_length, hop)
    return np.lib.stride_tricks.sliding_window_view(x, frame_length)[::hop][:n]


def stft(buffer: AudioBuffer, config: StftConfig | None = None) -> ComplexSpectrogram:
    """Hann-windowed, zero-padded, one-sided STFT without edge padding.

    Frame ``t`` covers samples ``[t * hop, t * hop + frame_length)``.
    """
    config = config or StftConfig()
    fs = buffer.sample_rate
    config.check(fs)
    n = config.frame_length(fs)
    hop = config.hop_length(fs)
    if len(buffer) < n:
        raise ValueError(f"buffer of {len(buffer)} samples is shorter than one frame ({n})")
    frames = frame_signal(buffer.samples, n, hop) * config.analysis_window(fs)
    spec = np.fft.rfft(frames, n=config.fft_size, axis=1)
    return ComplexSpectrogram(spec, config, fs)


def istft(spec: ComplexSpectrogram) -> AudioBuffer:
    """Weighted overlap-add inverse of :func:`stft`.

    Each inverse frame is multiplied by the analysis window again and the
    sum is divided by the overlap-added squared window. Samples that no
    frame covers with non-zero weight come out as zero. The output holds
    ``(frames - 1) * hop + frame_length`` samples.
    """
    config = spec.config
    fs = spec.source_sample_rate
    frames = np.asarray(spec.frames)
    if frames.ndim != 2 or frames.shape[1] != config.n_bins():
        raise ValueError(
            f"spectrogram has shape {frames.shape}, expected (T, {config.n_bins()})"
        )
    n = config.frame_length(fs)
    hop = config.hop_length(fs)
    window = config.analysis_window(fs)
    n_frames = frames.shape[0]
    out_len = (n_frames - 1) * hop + n if n_frames else 0

    chunks = np.fft.irfft(frames, n=config.fft_size, axis=1)[:, :n] * window
    y = np.zeros(out_len)
    wsum = np.zeros(out_len)
    w2 = window**2
    for t in range(n_frames):
        start = t * hop
        y[start:start + n] += chunks[t]
        wsum[start:start + n] += w2
    covered = wsum > 1e-10 * w2.max()
    y[covered] /= wsum[covered]
    y[~covered] = 0.0
    return AudioBuffer(y, fs)


def hz_to_mel(f):
    """HTK mel scale."""
    return 2595.0 * np.log10(1.0 + np.asarray(f, dtype=np.float64) / 700.0)


def mel_to_hz(m):
    return 700.0 * (10.0 ** (np.asarray(m, dtype=np.float64) / 2595.0) - 1.0)


def mel_filterbank(sample_rate: int, fft_size: int, n_mels: int = N_MELS,
                   f_lo: float = 0.0, f_hi: float | None = None) -> np.ndarray:
    """Triangular HTK-mel filters, shape (n_mels, fft_size // 2 + 1).

    Each row is normalized to unit sum, so a flat magnitude spectrum
    gives the same output in every band.
    """
    f_hi = sample_rate / 2.0 if f_hi is None else f_hi
    edges = mel_to_hz(np.linspace(hz_to_mel(f_lo), hz_to_mel(f_hi), n_mels + 2))
    freqs = np.fft.rfftfreq(fft_size, 1.0 / sample_rate)
    lower, center, upper = edges[:-2, None], edges[1:-1, None], edges[2:, None]
    rising = (freqs - lower) / (center - lower)
    falling = (upper - freqs) / (upper - center)
    weights = np.maximum(0.0, np.minimum(rising, falling))
    sums = weights.sum(axis=1, keepdims=True)
    if np.any(sums <= 0):
        raise ValueError("mel filterbank has empty bands; increase fft_size")
    return weights / sums


def log_mel(buffer: AudioBuffer, config: StftConfig | None = None,
            mel_lo_hz: float = 0.0, mel_hi_hz: float = 8000.0) -> np.ndarray:
    """Un-normalized natural-log mel magnitudes, shape (frames, 80)."""
    config = config or StftConfig()
    spec = stft(buffer, config)
    fb = mel_filterbank(buffer.sample_rate, config.fft_size, N_MELS, mel_lo_hz, mel_hi_hz)
    return np.log(np.maximum(spec.magnitude() @ fb.T, LOG_FLOOR))


def mel_spectrogram(buffer: AudioBuffer, config: StftConfig | None = None,
                    normalization: MelNormalization | None = None) -> MelSpectrogram:
    """80-band normalized log-mel spectrogram of a 16 kHz buffer."""
    if buffer.sample_rate != CANONICAL_RATE:
        raise ValueError(
            f"mel features expect {CANONICAL_RATE} Hz input, got {buffer.sample_rate}; resample first"
        )
    config = config or StftConfig()
    normalization = normalization or MelNormalization()
    lm = log_mel(buffer, config)
    return MelSpectrogram(normalization.apply(lm), config, 0.0, 8000.0, normalization)


def fit_mel_normalization(buffers, config: StftConfig | None = None) -> MelNormalization:
    """Reference range spanning the log-mel values of a corpus."""
    values = [log_mel(b, config) for b in buffers]
    lo = min(float(v.min()) for v in values)
    hi = max(float(v.max()) for v in values)
    if hi <= lo:
        hi = lo + 1.0
    return MelNormalization(lo, hi)


def rms_db(x) -> float:
    """RMS level in dBFS (-inf for silence)."""
    x = np.asarray(x.samples if isinstance(x, AudioBuffer) else x, dtype=np.float64)
    ms = float(np.mean(x**2)) if len(x) else 0.0
    return 10.0 * np.log10(ms) if ms > 0 else -np.inf


def match_rms(y: np.ndarray, reference_rms: float) -> np.ndarray:
    """Scale `y` to the given RMS; silent signals are returned untouched."""
    current = float(np.sqrt(np.mean(y**2))) if len(y) else 0.0
    if current == 0.0 or reference_rms == 0.0:
        return y
    return y * (reference_rms / current)


def active_frame_mask(x, sample_rate: int, gate_db: float = 40.0,
                      frame_ms: float = 20.0) -> np.ndarray:
    """Per-sample mask of frames within `gate_db` of the loudest frame.

    Frames are non-overlapping; a trailing partial frame counts as its
    own frame. An all-zero signal has no active samples.
    """
    x = np.asarray(x.samples if isinstance(x, AudioBuffer) else x, dtype=np.float64)
    size = max(1, int(round(frame_ms * sample_rate / 1000.0)))
    n_frames = -(-len(x) // size)
    padded = np.zeros(n_frames * size)
    padded[:len(x)] = x
    counts = np.full(n_frames, size)
    if n_frames:
        counts[-1] = len(x) - (n_frames - 1) * size
    ms = np.sum(padded.reshape(n_frames, size) ** 2, axis=1) / counts
    peak = ms.max() if n_frames else 0.0
    if peak <= 0.0:
        return np.zeros(len(x), dtype=bool)
    active = ms >= peak * 10.0 ** (-gate_db / 10.0)
    return np.repeat(active, size)[:len(x)]


def active_speech_power(x, sample_rate: int, gate_db: float = 40.0) -> float:
    """Mean square over the active frames of `x`."""
    x = np.asarray(x.samples if isinstance(x, AudioBuffer) else x, dtype=np.float64)
    mask = active_frame_mask(x, sample_rate, gate_db)
    if not mask.any():
        return 0.0
    return float(np.mean(x[mask] ** 2))
