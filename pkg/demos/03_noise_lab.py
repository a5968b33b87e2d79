"""
Noise lab: speech-shaped noise, a competing talker, and exact SNR mixing
========================================================================

Maskers are normalized to -26 dBFS, and the SNR is measured over active
speech only (20 ms frames within 40 dB of the loudest), so pauses in the
utterance do not inflate the noise level needed.
"""

import tempfile
from pathlib import Path

import numpy as np
import scipy.signal

from ssdrckit.audio import AudioBuffer, rms_db, save_wav
from ssdrckit.noise import canonical_conditions, csn_load, lpc, measure_snr, mix_at_snr, ssn_generate
from ssdrckit.synth import Speaker, synthesize_corpus

FS = 16000
corpus = synthesize_corpus(6, seed=2)

# order-20 LPC envelope of the pooled active speech, excited by white noise
ssn = ssn_generate(corpus, duration_s=10.0, seed=0)
print(f"SSN: {ssn.duration_seconds:.0f} s at {rms_db(ssn):.2f} dBFS")
a = lpc(np.concatenate([b.samples for b in corpus]))
f, h = scipy.signal.freqz(1.0, a, worN=[250, 500, 1000, 2000, 4000], fs=FS)
print("LPC envelope (dB re 1 kHz):", np.round(20 * np.log10(np.abs(h) / np.abs(h[2])), 1))

# a competing talker is just a file; here a synthetic female voice
talker = synthesize_corpus(3, seed=9, speaker=Speaker.female())
path = Path(tempfile.mkdtemp()) / "talker.wav"
save_wav(AudioBuffer(np.concatenate([t.samples for t in talker]), FS), path)
csn = csn_load(path)
print(f"CSN: {csn.duration_seconds:.1f} s at {rms_db(csn):.2f} dBFS")

# the evaluation grid
print("conditions:", ", ".join(c.label for c in canonical_conditions()))

# mixing picks a seeded noise segment and scales it to hit the SNR exactly
speech = corpus[0]
for snr in (-10.0, -5.0, 0.0):
    r = mix_at_snr(speech, ssn, snr, seed=1)
    print(f"target {snr:+5.1f} dB -> measured {measure_snr(speech, r.noise):+8.4f} dB, "
          f"noise gain {r.noise_scale:.3f}")
