import json

import numpy as np
import pytest

from ssdrckit.audio import load_wav, resample, save_wav
from ssdrckit.cli import main
from ssdrckit.enhance import ssdrc
from ssdrckit.synth import white_noise


@pytest.fixture
def speech_wav(tmp_path, utterance):
    path = tmp_path / "speech.wav"
    save_wav(utterance, path)
    return path


def test_enhance(tmp_path, speech_wav):
    out = tmp_path / "enh.wav"
    assert main(["enhance", str(speech_wav), "--out", str(out), "--beta", "0.2"]) == 0
    y, x = load_wav(out), load_wav(speech_wav)
    assert len(y) == len(x)
    expected = ssdrc(x, beta=0.2)
    np.testing.assert_allclose(y.samples, expected.samples, atol=1e-6)
    assert np.max(np.abs(y.samples)) <= 1.0


def test_enhance_resamples_input(tmp_path, utterance):
    path = tmp_path / "s48.wav"
    save_wav(resample(utterance, 48000), path)
    out = tmp_path / "e.wav"
    assert main(["enhance", str(path), "--out", str(out)]) == 0
    assert load_wav(out).sample_rate == 16000


def test_mix_and_score(tmp_path, speech_wav, capsys):
    noise = tmp_path / "noise.wav"
    save_wav(white_noise(6.0, seed=2), noise)
    mixed = tmp_path / "mix.wav"
    assert main(["mix", str(speech_wav), str(noise), "--snr", "-5", "--out", str(mixed),
                 "--seed", "3"]) == 0
    assert "achieved_snr_db=-5.0000" in capsys.readouterr().out
    assert main(["score", str(speech_wav), str(mixed)]) == 0
    score = float(capsys.readouterr().out.strip())
    assert score > 0


def test_keywords_verbs(tmp_path, capsys):
    assert main(["keywords", "the cat sat on the mat", "cat mat"]) == 0
    assert capsys.readouterr().out.strip() == "2/3\t0.6667"
    tsv = tmp_path / "t.tsv"
    tsv.write_text("to be or not to be\tbe be\nblue whale\twhale blue\n")
    assert main(["keywords", "--file", str(tsv)]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out == ["2/4\t0.5000", "2/2\t1.0000", "median_rate\t0.7500"]


def test_grid_cli_deterministic(tmp_path, corpus_dir, csn_path, capsys):
    conf = tmp_path / "c.toml"
    conf.write_text('seed = 5\n[noise]\nssn_snrs = [-5.0]\ncsn_snrs = [-14.0]\n')
    outs = []
    for k in range(2):
        out = tmp_path / f"r{k}.csv"
        assert main(["grid", "--corpus", str(corpus_dir), "--noise-csn", str(csn_path),
                     "--config", str(conf), "--out", str(out)]) == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]
    lines = outs[0].decode().splitlines()
    assert len(lines) == 1 + 2 * 2
    manifest = json.loads((tmp_path / "r0.csv.manifest.json").read_text())
    assert manifest["seed"] == 5 and len(manifest["corpus"]) == 10

    assert main(["grid", "--corpus", str(corpus_dir), "--noise", "SSN", "--config", str(conf),
                 "--systems", "unprocessed", "--format", "table"]) == 0
    assert "SSN -5 dB" in capsys.readouterr().out


def test_cli_errors(tmp_path, speech_wav, capsys):
    assert main(["score", str(speech_wav), str(tmp_path / "missing.wav")]) == 1
    assert "error:" in capsys.readouterr().err
    assert main(["keywords", "the a", "x"]) == 1
    bad = tmp_path / "bad.toml"
    bad.write_text("[ssdrc]\ngamma = 1\n")
    assert main(["keywords", "cat", "cat", "--config", str(bad)]) == 1
    with pytest.raises(SystemExit):
        main(["bogus"])
    with pytest.raises(SystemExit):
        main(["grid"])
