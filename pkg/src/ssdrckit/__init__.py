"""Speech intelligibility enhancement (spectral shaping + dynamic range
compression) and an objective evaluation rig built around SIIB^Gauss."""

from .audio import (AudioBuffer, ComplexSpectrogram, MelSpectrogram, StftConfig, istft,
                    load_wav, mel_spectrogram, resample, save_wav, stft)
from .noise import NoiseCondition, NoiseType, csn_load, mix_at_snr, ssn_generate
from .siib import SiibScore, relative_gain, siib_gauss
from .enhance import DrcConfig, IoecCurve, SsdrcConfig, drc, spectral_shaping, ssdrc

__version__ = "0.1.0"

__all__ = [
    "AudioBuffer", "ComplexSpectrogram", "DrcConfig", "IoecCurve", "MelSpectrogram",
    "NoiseCondition", "NoiseType", "SiibScore", "SsdrcConfig", "StftConfig", "csn_load",
    "drc", "istft", "load_wav", "mel_spectrogram", "mix_at_snr", "relative_gain",
    "resample", "save_wav", "siib_gauss", "spectral_shaping", "ssdrc", "ssn_generate", "stft",
]
