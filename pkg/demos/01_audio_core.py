"""
Audio core: WAV I/O, resampling, STFT and mel features
=======================================================

Everything downstream works on 16 kHz mono float64 buffers. This walks
through the round trip from a file on disk to log-mel features.
"""

import tempfile
from pathlib import Path

import numpy as np

from ssdrckit.audio import (AudioBuffer, istft, load_wav, log_mel, resample, save_wav, stft,
                            to_canonical)
from ssdrckit.synth import synthesize_utterance

speech = synthesize_utterance(seed=0, duration_s=3.0)
print(f"{speech.duration_seconds:.2f} s at {speech.sample_rate} Hz, rms {speech.rms():.4f}")

# files are written as float32, so a reload differs by float32 rounding only
tmp = Path(tempfile.mkdtemp())
save_wav(speech, tmp / "speech.wav")
back = load_wav(tmp / "speech.wav")
print("max reload error:", np.max(np.abs(back.samples - speech.samples)))

# anything that is not 16 kHz gets resampled on the way in
hi = resample(speech, 44100)
print("44.1 kHz copy:", len(hi), "samples ->", len(to_canonical(hi)), "after to_canonical")

# 50 ms Hann frames every 12.5 ms, 2048-point FFT
spec = stft(speech)
print("spectrogram:", spec.frames.shape, "(frames, bins)")
y = istft(spec)
inner = slice(800, len(y) - 800)
err = np.sqrt(np.mean((y.samples[inner] - speech.samples[inner]) ** 2) / np.mean(speech.samples[inner] ** 2))
print(f"round-trip relative error away from the edges: {err:.1e}")

# 80-band log mel magnitude
mel = log_mel(speech)
print("log mel:", mel.shape, f"range {mel.min():.1f} .. {mel.max():.1f}")

# a 1 kHz tone lands in one band
tone = AudioBuffer(0.1 * np.sin(2 * np.pi * 1000 * np.arange(16000) / 16000), 16000)
print("1 kHz tone peaks in mel band", int(np.argmax(log_mel(tone).mean(axis=0))))
