import numpy as np
import pytest

from ssdrckit.audio import AudioBuffer, save_wav
from ssdrckit.synth import Speaker, synthesize_corpus, synthesize_utterance

# criterion number -> (passed, detail); filled by test_acceptance
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}")


@pytest.fixture(scope="session")
def corpus():
    """Ten synthetic male utterances at -20 dBFS."""
    return synthesize_corpus(10, seed=1)


@pytest.fixture(scope="session")
def mixed_corpus():
    """Ten talkers spanning male and female f0 ranges."""
    speakers = ([Speaker(85 + 8 * i, 145 + 10 * i) for i in range(5)]
                + [Speaker(165 + 10 * i, 250 + 12 * i, 1.15) for i in range(5)])
    return [synthesize_utterance(100 + i, 3.0, s) for i, s in enumerate(speakers)]


@pytest.fixture(scope="session")
def utterance(corpus):
    return corpus[0]


@pytest.fixture(scope="session")
def competitor():
    """Single female talker, about 10 s, used as competing-speaker noise."""
    parts = synthesize_corpus(3, seed=99, duration_range=(3.0, 3.5), speaker=Speaker.female())
    return AudioBuffer(np.concatenate([p.samples for p in parts]), 16000)


@pytest.fixture(scope="session")
def corpus_dir(tmp_path_factory, corpus):
    d = tmp_path_factory.mktemp("corpus")
    for i, b in enumerate(corpus):
        save_wav(b, d / f"utt{i:02d}.wav")
    return d


@pytest.fixture(scope="session")
def csn_path(tmp_path_factory, competitor):
    path = tmp_path_factory.mktemp("csn") / "talker.wav"
    save_wav(competitor, path)
    return path


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
