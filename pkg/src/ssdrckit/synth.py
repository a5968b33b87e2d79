"""Deterministic source-filter synthesis of speech-like utterances.

The generator strings together syllables made of formant-filtered
glottal pulses (vowels, nasals) and shaped noise (fricatives, stop
bursts), with an intonation contour, word pauses and leading and
trailing silence. It is good enough to exercise voicing detection,
formant sharpening, compression and envelope-based metrics without a
speech corpus; it is not meant to be intelligible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.signal

from .audio import AudioBuffer, CANONICAL_RATE

VOWELS = {
    "a": (730, 1090, 2440),
    "i": (270, 2290, 3010),
    "u": (300, 870, 2240),
    "e": (530, 1840, 2480),
    "o": (570, 840, 2410),
    "ae": (660, 1720, 2410),
    "er": (490, 1350, 1690),
    "ih": (390, 1990, 2550),
}
NASAL = (250, 1100, 2300)
BANDWIDTHS = (80.0, 100.0, 140.0, 200.0, 250.0)
BLOCK = 80  # samples per formant update (5 ms at 16 kHz)


@dataclass(frozen=True)
class Speaker:
    f0_low: float = 95.0
    f0_high: float = 150.0
    formant_scale: float = 1.0

    @classmethod
    def female(cls) -> Speaker:
        return cls(170.0, 260.0, 1.15)


def _resonator(freq, bw, fs):
    r = np.exp(-np.pi * bw / fs)
    theta = 2 * np.pi * freq / fs
    a = np.array([1.0, -2 * r * np.cos(theta), r * r])
    return np.array([a.sum()]), a  # unity gain at DC


def _formant_filter(excitation, tracks, fs):
    """Cascade of time-varying resonators; `tracks` is (n_blocks, 5)."""
    y = excitation.copy()
    for k in range(tracks.shape[1]):
        zi = np.zeros(2)
        out = np.empty_like(y)
        for j in range(tracks.shape[0]):
            sl = slice(j * BLOCK, min((j + 1) * BLOCK, len(y)))
            if sl.start >= len(y):
                break
            b, a = _resonator(tracks[j, k], BANDWIDTHS[k], fs)
            out[sl], zi = scipy.signal.lfilter(b, a, y[sl], zi=zi)
        y = out
    return y


def rosenberg_pulse(cycle, opening=0.4, closing=0.16):
    """Rosenberg glottal flow evaluated at cycle position `cycle` in [0, 1)."""
    g = np.zeros_like(cycle)
    rise = cycle < opening
    g[rise] = 0.5 * (1.0 - np.cos(np.pi * cycle[rise] / opening))
    fall = (cycle >= opening) & (cycle < opening + closing)
    g[fall] = np.cos(0.5 * np.pi * (cycle[fall] - opening) / closing)
    return g


def _ramp(n, fs, ramp_ms=15.0):
    env = np.ones(n)
    m = min(n // 2, int(ramp_ms * fs / 1000))
    if m > 0:
        r = 0.5 - 0.5 * np.cos(np.pi * np.arange(m) / m)
        env[:m] = r
        env[n - m:] = r[::-1]
    return env


def _segments(rng, duration_s):
    """Plan of (kind, seconds, params) segments filling `duration_s`."""
    plan = [("silence", rng.uniform(0.15, 0.3), None)]
    used = plan[0][1]
    tail = rng.uniform(0.15, 0.25)
    vowel_names = list(VOWELS)
    while used < duration_s - tail - 0.3:
        for _ in range(rng.integers(1, 4)):  # syllables per word
            onset = rng.choice(["fricative", "stop", "nasal", "none"], p=[0.35, 0.3, 0.15, 0.2])
            if onset == "fricative":
                seg = ("fricative", rng.uniform(0.06, 0.12),
                       {"center": rng.uniform(2500, 6000), "level": rng.uniform(-22, -12)})
            elif onset == "stop":
                seg = ("stop", rng.uniform(0.04, 0.07), {"level": rng.uniform(-16, -8)})
            elif onset == "nasal":
                seg = ("nasal", rng.uniform(0.05, 0.09), None)
            else:
                seg = None
            if seg is not None:
                plan.append(seg)
                used += seg[1]
            start, end = rng.choice(vowel_names, 2)
            v = ("vowel", rng.uniform(0.12, 0.26),
                 {"start": VOWELS[start], "end": VOWELS[end], "level": rng.uniform(-6, 0)})
            plan.append(v)
            used += v[1]
        pause = ("silence", rng.uniform(0.03, 0.18), None)
        plan.append(pause)
        used += pause[1]
    plan.append(("silence", max(tail, duration_s - used), None))
    return plan


def synthesize_utterance(seed: int, duration_s: float = 3.0, speaker: Speaker | None = None,
                         level_dbfs: float = -20.0, sample_rate: int = CANONICAL_RATE) -> AudioBuffer:
    """One speech-like utterance, RMS-normalized to `level_dbfs`.

    Identical arguments always give identical samples.
    """
    speaker = speaker or Speaker()
    rng = np.random.default_rng(seed)
    fs = sample_rate
    plan = _segments(rng, duration_s)
    n_total = int(round(duration_s * fs))

    voiced = np.zeros(n_total)        # amplitude of voiced excitation
    noise_src = np.zeros(n_total)     # unvoiced excitation, already shaped
    n_blocks = n_total // BLOCK + 1
    tracks = np.tile(np.array(VOWELS["a"] + (3500, 4500), dtype=float), (n_blocks, 1))

    pos = 0
    for kind, secs, params in plan:
        n = int(round(secs * fs))
        n = min(n, n_total - pos)
        if n <= 0:
            break
        sl = slice(pos, pos + n)
        b0, b1 = pos // BLOCK, (pos + n) // BLOCK + 1
        if kind == "vowel":
            voiced[sl] = 10 ** (params["level"] / 20) * _ramp(n, fs)
            frac = np.linspace(0, 1, b1 - b0)[:, None]
            f = (1 - frac) * np.array(params["start"]) + frac * np.array(params["end"])
            tracks[b0:b1, :3] = f * speaker.formant_scale
        elif kind == "nasal":
            voiced[sl] = 0.3 * _ramp(n, fs)
            tracks[b0:b1, :3] = np.array(NASAL) * speaker.formant_scale
        elif kind == "fricative":
            c = params["center"]
            sos = scipy.signal.butter(4, [c / 1.5, min(c * 1.4, 0.45 * fs)], "bandpass", fs=fs,
                                      output="sos")
            w = scipy.signal.sosfilt(sos, rng.standard_normal(n))
            w /= np.sqrt(np.mean(w**2)) + 1e-12
            noise_src[sl] = 10 ** (params["level"] / 20) * 0.3 * w * _ramp(n, fs, 10)
        elif kind == "stop":
            burst = min(n, int(0.012 * fs))
            w = rng.standard_normal(burst) * np.exp(-np.arange(burst) / (0.003 * fs))
            noise_src[pos + n - burst:pos + n] = 10 ** (params["level"] / 20) * 0.5 * w
        pos += n

    # glottal flow from a phase accumulator following the f0 contour
    t = np.arange(n_total) / fs
    mid = 0.5 * (speaker.f0_low + speaker.f0_high)
    span = 0.5 * (speaker.f0_high - speaker.f0_low)
    accents = sum(rng.uniform(0.3, 0.8) * np.exp(-((t - c) / 0.15) ** 2)
                  for c in rng.uniform(0, duration_s, max(1, int(duration_s * 1.5))))
    declination = 1.0 - 0.6 * t / max(duration_s, 1e-9)
    f0 = np.clip(mid + span * (declination - 0.5 + accents), speaker.f0_low * 0.8,
                 speaker.f0_high * 1.2)
    f0 *= 1.0 + 0.01 * rng.standard_normal(n_total).cumsum() / np.sqrt(n_total)
    cycle = np.mod(np.cumsum(f0) / fs, 1.0)
    glottal = rosenberg_pulse(cycle)
    glottal = scipy.signal.lfilter([1.0, -1.0], [1.0, -0.99], glottal)  # DC block
    glottal += 0.02 * rng.standard_normal(n_total) * glottal.std()  # aspiration

    y = _formant_filter(glottal, tracks, fs)
    y = np.append(y[0], np.diff(y))  # lip radiation
    # level-normalize the voiced stream so each syllable lands at its planned level
    win = scipy.signal.get_window("hann", int(0.03 * fs))
    local = np.sqrt(np.convolve(y**2, win / win.sum(), mode="same"))
    y = y / np.maximum(local, 1e-12 * local.max()) * voiced
    y += noise_src * 3.0
    y *= 10 ** (level_dbfs / 20) / np.sqrt(np.mean(y**2))
    peak = np.max(np.abs(y))
    if peak > 0.98:
        y *= 0.98 / peak
    return AudioBuffer(y, fs)


def synthesize_corpus(n: int, seed: int = 0, duration_range=(2.5, 4.0),
                      speaker: Speaker | None = None, level_dbfs: float = -20.0) -> list[AudioBuffer]:
    rng = np.random.default_rng(seed)
    seeds = rng.integers(0, 2**31, n)
    durations = rng.uniform(*duration_range, n)
    return [synthesize_utterance(int(s), float(d), speaker, level_dbfs) for s, d in zip(seeds, durations)]


def sawtooth(f0: float, duration_s: float, sample_rate: int = CANONICAL_RATE,
             amplitude: float = 1.0) -> AudioBuffer:
    t = np.arange(int(round(duration_s * sample_rate))) / sample_rate
    return AudioBuffer(amplitude * scipy.signal.sawtooth(2 * np.pi * f0 * t), sample_rate)


def sine(freq: float, duration_s: float, sample_rate: int = CANONICAL_RATE,
         amplitude: float = 0.5, phase: float = 0.0) -> AudioBuffer:
    t = np.arange(int(round(duration_s * sample_rate))) / sample_rate
    return AudioBuffer(amplitude * np.sin(2 * np.pi * freq * t + phase), sample_rate)


def white_noise(duration_s: float, seed: int, sample_rate: int = CANONICAL_RATE,
                level_dbfs: float = -20.0) -> AudioBuffer:
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(int(round(duration_s * sample_rate)))
    return AudioBuffer(x * 10 ** (level_dbfs / 20) / np.sqrt(np.mean(x**2)), sample_rate)
