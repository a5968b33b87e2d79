import numpy as np
import pytest
import scipy.signal
from hypothesis import given, settings
from hypothesis import strategies as st

from ssdrckit.audio import AudioBuffer, StftConfig, active_frame_mask, rms_db, stft
from ssdrckit.enhance import (DrcConfig, IoecCurve, ShapingConfig, ShapingGains,
                            active_envelope_cv, adaptive_sharpening_gains, drc, drc_gains,
                            envelope_follow, hf_boost_gains, hf_boost_ramp_db, peak_limit,
                            pre_emphasis_db, pre_emphasis_gains, shape_spectrogram,
                            shaping_gains, spectral_shaping, ssdrc, voicing_probability)
from ssdrckit.synth import sawtooth, sine, white_noise

FS = 16000


def _third_octave_db(x, y, centers, nperseg=4096):
    """Per-band output/input power ratio in dB."""
    f, pxx = scipy.signal.welch(x, FS, nperseg=nperseg)
    _, pyy = scipy.signal.welch(y, FS, nperseg=nperseg)
    out = []
    for c in centers:
        m = (f >= c * 2 ** (-1 / 6)) & (f < c * 2 ** (1 / 6))
        out.append(10 * np.log10(pyy[m].sum() / pxx[m].sum()))
    return np.array(out)


# --- voicing -------------------------------------------------------------------

def test_voicing_silence():
    x = AudioBuffer(np.zeros(8000), FS)
    assert np.all(voicing_probability(stft(x), x) == 0.0)


def test_voicing_sawtooth():
    x = sawtooth(120.0, 1.0)
    p = voicing_probability(stft(x), x)
    assert np.all(p[2:-2] > 0.8)


def test_voicing_white_noise():
    x = white_noise(2.0, seed=5, level_dbfs=-3.0)
    p = voicing_probability(stft(x), x)
    assert np.all(p < 0.35)


def test_voicing_in_unit_interval(utterance):
    p = voicing_probability(stft(utterance), utterance)
    assert p.shape == (stft(utterance).n_frames,)
    assert np.all((p >= 0) & (p <= 1))
    assert p.max() > 0.8 and p.min() < 0.5


def test_voicing_config_mismatch():
    x = white_noise(1.0, seed=1)
    with pytest.raises(ValueError):
        voicing_probability(stft(x), AudioBuffer(x.samples[:-400], FS))
    with pytest.raises(ValueError):
        voicing_probability(stft(x), AudioBuffer(x.samples, 8000))


# --- sharpening ------------------------------------------------------------------

def _bump_spec(center=1500.0, width=150.0, height_db=30.0, frames=4):
    freqs = StftConfig().bin_frequencies(FS)
    level_db = height_db * np.exp(-0.5 * ((freqs - center) / width) ** 2)
    mag = np.tile(10 ** (level_db / 20), (frames, 1))
    x = AudioBuffer(np.zeros(800 + 200 * (frames - 1)), FS)
    return stft(x).with_frames(mag.astype(complex)), freqs, level_db


def test_sharpening_unity_without_voicing_or_beta(utterance):
    spec = stft(utterance)
    p = voicing_probability(spec, utterance)
    assert np.all(adaptive_sharpening_gains(spec, np.zeros(spec.n_frames), 1.0) == 1.0)
    assert np.all(adaptive_sharpening_gains(spec, p, 0.0) == 1.0)


def test_sharpening_bump_oracle():
    spec, freqs, level_db = _bump_spec()
    hs = adaptive_sharpening_gains(spec, np.ones(spec.n_frames), beta=1.0)
    gain_db = 20 * np.log10(hs[0])
    peak = np.argmin(np.abs(freqs - 1500))
    shoulders = [np.argmin(np.abs(freqs - f)) for f in (1500 - 400, 1500 + 400)]
    assert gain_db[peak] > 0
    assert all(gain_db[k] < 0 for k in shoulders)
    assert gain_db[peak] - max(gain_db[k] for k in shoulders) > 0

    # oracle: truncated cosine series of the (even, periodic) log spectrum,
    # then a direct 700 Hz moving average with edge replication
    nfft = 2048
    k = np.arange(nfft // 2 + 1)
    full = np.concatenate([level_db, level_db[-2:0:-1]])
    q = np.arange(30)
    cep = np.cos(2 * np.pi * np.outer(q, np.arange(nfft)) / nfft) @ full / nfft
    weights = np.where(q == 0, 1.0, 2.0)
    envelope = (weights * cep) @ np.cos(2 * np.pi * np.outer(q, k) / nfft)
    width = int(round(700 / (FS / nfft)))
    width += 1 - width % 2
    padded = np.pad(envelope, width // 2, mode="edge")
    smoothed = np.convolve(padded, np.ones(width) / width, mode="valid")
    expected = np.clip(envelope - smoothed, -10, 10)
    np.testing.assert_allclose(gain_db, expected, atol=1e-6)


def test_sharpening_clip():
    spec, _, _ = _bump_spec(height_db=80.0)
    hs = adaptive_sharpening_gains(spec, np.ones(spec.n_frames), beta=5.0)
    g = 20 * np.log10(hs)
    assert g.max() <= 10 + 1e-9 and g.min() >= -10 - 1e-9
    assert np.isclose(g.max(), 10.0)


def test_sharpening_rejects_negative_beta():
    spec, _, _ = _bump_spec()
    with pytest.raises(ValueError):
        adaptive_sharpening_gains(spec, np.ones(spec.n_frames), -0.1)
    with pytest.raises(ValueError):
        ShapingConfig(beta=-1)


# --- HF boost ----------------------------------------------------------------------

def test_hf_ramp_values():
    np.testing.assert_allclose(hf_boost_ramp_db([500, 1000, 2000, 4000, 8000, 16000]),
                               [0, 0, 3, 6, 9, 9], atol=1e-12)


def test_hf_boost_scaling():
    spec, freqs, _ = _bump_spec(frames=3)
    hp = hf_boost_gains(spec, np.array([0.0, 0.5, 1.0]))
    db = 20 * np.log10(hp)
    assert np.all(db[0] == 0.0)
    for f, expect in ((2000, 3.0), (4000, 6.0), (8000, 9.0)):
        k = np.argmin(np.abs(freqs - f))
        assert np.isclose(db[2, k], expect, atol=1e-9)
    np.testing.assert_allclose(db[1], 0.5 * db[2], atol=1e-12)


def test_voicing_track_validated():
    spec, _, _ = _bump_spec(frames=3)
    with pytest.raises(ValueError):
        hf_boost_gains(spec, np.ones(2))
    with pytest.raises(ValueError):
        hf_boost_gains(spec, np.array([0.0, 1.5, 0.0]))


# --- pre-emphasis ----------------------------------------------------------------------

def test_pre_emphasis_anchor_values():
    np.testing.assert_allclose(pre_emphasis_db([2000, 250, 125, 500]), [12, -6, -12, 0],
                               atol=1e-12)


def test_pre_emphasis_band_and_slope():
    f = np.linspace(1000, 4000, 301)
    assert np.all(np.abs(pre_emphasis_db(f) - 12) <= 0.5)
    lo = np.array([31.25, 62.5, 125, 250, 500])
    assert np.allclose(np.diff(pre_emphasis_db(lo)), 6.0)
    assert np.all(pre_emphasis_db([5000, 6000, 8000]) == 0)


def test_pre_emphasis_transitions_continuous():
    eps = 1e-6
    for edge in (500.0, 1000.0, 4000.0, 5000.0):
        lo, hi = pre_emphasis_db([edge - eps, edge + eps])
        assert abs(hi - lo) < 1e-4
    assert np.isclose(pre_emphasis_db([10.0])[0], -30.0)


def test_pre_emphasis_gains_shape():
    hr = pre_emphasis_gains(1025, FS)
    assert hr.shape == (1025,)
    assert np.all(hr > 0)
    with pytest.raises(ValueError):
        pre_emphasis_gains(129, 4000)


# --- spectral shaping --------------------------------------------------------------------

def test_shaping_rms_equalized(corpus):
    for x in corpus[:4]:
        y = spectral_shaping(x)
        assert len(y) == len(x)
        assert abs(rms_db(y) - rms_db(x)) < 0.01


def test_shaping_silence():
    x = AudioBuffer(np.zeros(4000), FS)
    assert np.all(spectral_shaping(x).samples == 0)


def test_shaping_too_short():
    with pytest.raises(ValueError):
        spectral_shaping(AudioBuffer(np.ones(100), FS))


def test_shaping_tilt_follows_pre_emphasis():
    x = white_noise(30.0, seed=1)
    y = spectral_shaping(x, beta=0.0)
    centers = 1000 * 2 ** (np.arange(-10, 9) / 3)
    centers = centers[(centers >= 100) & (centers <= 7000)]
    measured = _third_octave_db(x.samples, y.samples, centers)
    # oracle: band-averaged power response of hr on the analysis grid
    f = np.fft.rfftfreq(4096, 1 / FS)
    hr_pow = 10 ** (pre_emphasis_db(f) / 10)
    expected = np.array([10 * np.log10(hr_pow[(f >= c * 2 ** (-1 / 6)) & (f < c * 2 ** (1 / 6))].mean())
                         for c in centers])
    # tilt is level-free: remove the best common offset (equalization sets it)
    resid = measured - expected
    resid -= resid.mean()
    assert np.all(np.abs(resid) <= 1.0)


def test_shaping_preserves_phase(utterance):
    spec = stft(utterance)
    p = voicing_probability(spec, utterance)
    shaped = shape_spectrogram(spec, shaping_gains(spec, p))
    # real positive gains: the phase difference is rounding only
    nz = np.abs(spec.frames) > 0
    diff = np.angle(shaped.frames[nz] * np.conj(spec.frames[nz]))
    assert np.max(np.abs(diff)) < 1e-12


def test_composed_gain_bounds(utterance):
    spec = stft(utterance)
    p = voicing_probability(spec, utterance)
    g = shaping_gains(spec, p, ShapingConfig(beta=3.0)).composed()
    assert np.all(np.isfinite(g))
    assert g.min() >= 10 ** (-30 / 20) - 1e-12 and g.max() <= 10 ** (21 / 20) + 1e-12


def test_shaped_gains_type():
    hs = np.ones((2, 3))
    gains = ShapingGains(hs, 4 * hs, np.array([100.0, 1.0, 1e-3]))
    g = gains.composed()
    assert np.allclose(g[:, 0], 10 ** (21 / 20))
    assert np.allclose(g[:, 1], 4.0)
    assert np.allclose(g[:, 2], 10 ** (-30 / 20))


# --- envelope follower ----------------------------------------------------------------------

def test_envelope_constant_converges():
    c = 0.3
    e = envelope_follow(AudioBuffer(np.full(4000, c), FS))
    settle = int(5 * 20e-3 * FS)
    assert np.all(np.abs(e[settle:] - c) <= 0.01 * c)


def test_envelope_release_time_constant():
    x = np.zeros(8000)
    x[0] = 1.0
    e = envelope_follow(AudioBuffer(x, FS))
    n = np.arange(1, 2000)
    slope = np.polyfit(n, np.log(e[n]), 1)[0]
    tau_ms = -1 / slope / FS * 1000
    assert abs(tau_ms - 20.0) <= 0.05 * 20.0


def test_envelope_zero():
    assert np.all(envelope_follow(AudioBuffer(np.zeros(500), FS)) == 0)


def test_envelope_matches_reference_loop(rng):
    x = rng.standard_normal(300) * np.linspace(0, 1, 300)
    cfg = DrcConfig()
    a_att, a_rel = np.exp(-1 / (2.0 * 16)), np.exp(-1 / (20.0 * 16))
    ref, e = [], 0.0
    for v in np.abs(x):
        a = a_att if v > e else a_rel
        e = a * e + (1 - a) * v
        ref.append(e)
    np.testing.assert_allclose(envelope_follow(AudioBuffer(x, FS), cfg), ref, rtol=1e-12)


# --- IOEC / gains -----------------------------------------------------------------------------

def test_ioec_default_points_and_extension():
    c = IoecCurve()
    assert np.isclose(c(-10.0), -30 + 20 / 3)
    assert np.isclose(c(-60.0), -60.0)
    assert np.isclose(c(-100.0), -100.0)
    assert np.isclose(c(6.0), -20 + 2.0)


def test_ioec_rejects_non_monotonic():
    with pytest.raises(ValueError):
        IoecCurve(((-80, -80), (-30, -20), (0, -25)))
    with pytest.raises(ValueError):
        IoecCurve(((-30, -30), (-30, -20)))


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-120, 20, allow_nan=False), min_size=2, max_size=20))
def test_ioec_monotone_property(levels):
    levels = np.sort(np.array(levels))
    out = IoecCurve()(levels)
    assert np.all(np.diff(out) >= -1e-9)


def test_drc_gain_identity_curve():
    env = np.abs(np.random.default_rng(0).standard_normal(1000))
    g = drc_gains(env, DrcConfig(curve=IoecCurve.identity()))
    assert np.allclose(g, 1.0, rtol=0, atol=1e-12)


def test_drc_gain_minus_ten_dbfs():
    g = drc_gains(np.full(2000, 10 ** (-10 / 20)))
    expected = (-30 + (-10 + 30) / 3) - (-10)
    assert np.allclose(20 * np.log10(g), expected, atol=1e-9)
    assert np.isclose(expected, -13.333, atol=1e-3)


def test_drc_gain_below_knee():
    g = drc_gains(np.full(2000, 10 ** (-60 / 20)))
    assert np.allclose(20 * np.log10(g), 0.0, atol=1e-9)


def test_drc_gain_rejects_negative_envelope():
    with pytest.raises(ValueError):
        drc_gains(np.array([0.1, -0.1]))


def test_drc_config_positive():
    with pytest.raises(ValueError):
        DrcConfig(attack_ms=0)


# --- drc -------------------------------------------------------------------------------------------

def test_drc_sine_passes():
    x = sine(1000.0, 2.0, amplitude=0.5)
    y = drc(x)
    mid = slice(4000, 28000)
    ratio = np.sqrt(np.mean(y.samples[mid] ** 2) / np.mean(x.samples[mid] ** 2))
    assert abs(20 * np.log10(ratio)) < 0.1


def test_drc_silence():
    x = AudioBuffer(np.zeros(1000), FS)
    assert np.all(drc(x).samples == 0)


def test_drc_reduces_envelope_variation(corpus):
    for x in corpus[:5]:
        y = drc(x)
        active = active_frame_mask(x, FS)
        before = active_envelope_cv(envelope_follow(x), active)
        after = active_envelope_cv(envelope_follow(y), active)
        assert after < before
        assert abs(rms_db(y) - rms_db(x)) < 0.01


# --- pipeline --------------------------------------------------------------------------------------------

def test_ssdrc_silence():
    x = AudioBuffer(np.zeros(8000), FS)
    assert np.all(ssdrc(x).samples == 0)


def test_ssdrc_peak_and_finite(corpus):
    for x in corpus[:3]:
        loud = x.with_samples(x.samples * 10 ** (17 / 20))
        y = ssdrc(loud)
        assert np.all(np.isfinite(y.samples))
        assert np.max(np.abs(y.samples)) <= 1.0
        assert len(y) == len(loud)


def test_ssdrc_rms_neutral_without_limiter(corpus):
    for x in corpus[:3]:
        y = ssdrc(x, limit=False)
        assert abs(rms_db(y) - rms_db(x)) < 0.01


def test_ssdrc_deterministic(utterance):
    assert np.array_equal(ssdrc(utterance).samples, ssdrc(utterance).samples)


def test_ssdrc_moves_energy_to_mid_band(corpus):
    def share(x):
        f, p = scipy.signal.welch(x.samples, FS, nperseg=1024)
        return p[(f >= 1000) & (f <= 4000)].sum() / p.sum()

    for x in corpus[:3]:
        assert share(ssdrc(x)) > share(x)


def test_peak_limit():
    assert np.array_equal(peak_limit(np.array([0.5, -0.2])), np.array([0.5, -0.2]))
    y = peak_limit(np.array([2.0, -1.0]))
    assert np.array_equal(y, np.array([1.0, -0.5]))
