"""
SSDRC: spectral shaping then dynamic range compression
======================================================

Shows what each stage does to a synthetic utterance: where the energy
moves in frequency, how much the envelope flattens, and that loudness
(RMS) is left alone.
"""

import numpy as np
import scipy.signal

from ssdrckit.audio import active_frame_mask, rms_db, stft
from ssdrckit.enhance import (active_envelope_cv, drc, envelope_follow, pre_emphasis_db,
                              spectral_shaping, ssdrc, voicing_probability)
from ssdrckit.synth import synthesize_utterance

FS = 16000
x = synthesize_utterance(seed=3, duration_s=4.0)

# voicing drives the adaptive part of the shaping
p = voicing_probability(stft(x), x)
print(f"voicing: mean {p.mean():.2f}, frames above 0.5: {np.mean(p > 0.5):.0%}")

# the fixed pre-emphasis: flat boost over 1-4 kHz, roll-off below 500 Hz
for f in (125, 250, 500, 1000, 2000, 4000, 6000):
    print(f"  hr({f:4d} Hz) = {pre_emphasis_db(np.array([f]))[0]:+6.1f} dB")


def band_share(sig, lo, hi):
    f, pxx = scipy.signal.welch(sig, FS, nperseg=1024)
    return pxx[(f >= lo) & (f < hi)].sum() / pxx.sum()


shaped = spectral_shaping(x)
print(f"1-4 kHz energy share: {band_share(x.samples, 1000, 4000):.1%} -> "
      f"{band_share(shaped.samples, 1000, 4000):.1%} after shaping")

# compression flattens the envelope over the active part of the utterance
active = active_frame_mask(x, FS)
compressed = drc(shaped)
cv_in = active_envelope_cv(envelope_follow(shaped), active)
cv_out = active_envelope_cv(envelope_follow(compressed), active)
print(f"envelope CV: {cv_in:.2f} -> {cv_out:.2f} ({1 - cv_out / cv_in:.0%} lower)")

# the full chain; without the final peak limiter RMS is untouched
y = ssdrc(x, limit=False)
print(f"rms: {rms_db(x):.3f} dBFS in, {rms_db(y):.3f} dBFS out")
print(f"peak after limiter: {np.max(np.abs(ssdrc(x).samples)):.3f}")
