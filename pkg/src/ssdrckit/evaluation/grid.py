"""Batch evaluation over (system, noise type, SNR) conditions."""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..audio import AudioBuffer, load_wav, to_canonical
from ..config import Config
from ..noise import NoiseCondition, NoiseType, csn_load, mix_at_snr, ssn_generate
from ..siib import envelope_features, siib_from_features
from ..enhance import ssdrc

log = logging.getLogger(__name__)

BUILTIN_SYSTEMS = ("unprocessed", "ssdrc")


@dataclass(frozen=True)
class NoiseSpec:
    """Where the maskers come from.

    SSN is always generated from the clean corpus itself; CSN needs a
    single-talker recording.
    """

    noise_types: tuple = ("SSN", "CSN")
    csn_path: str | None = None
    csn_offset_s: float = 0.0


@dataclass(frozen=True)
class CellStats:
    utterances: tuple
    scores: tuple

    @property
    def n(self) -> int:
        return len(self.scores)

    @property
    def mean(self) -> float:
        return float(np.mean(self.scores))

    @property
    def median(self) -> float:
        return float(np.median(self.scores))


@dataclass
class ConditionReport:
    systems: list = field(default_factory=list)
    conditions: list = field(default_factory=list)
    cells: dict = field(default_factory=dict)  # (system, NoiseCondition) -> CellStats
    metadata: dict = field(default_factory=dict)

    def cell(self, system: str, condition: NoiseCondition) -> CellStats:
        return self.cells[(system, condition)]

    def check_complete(self):
        """Every cell must cover the same utterance list."""
        sets = {cell.utterances for cell in self.cells.values()}
        if len(sets) > 1:
            raise RuntimeError("report cells aggregate different utterance sets")
        for system in self.systems:
            for cond in self.conditions:
                if (system, cond) not in self.cells:
                    raise RuntimeError(f"missing cell {system} / {cond.label}")


def mix_seed(seed: int, utterance_index: int, condition_index: int) -> int:
    return int(np.random.SeedSequence([seed, utterance_index, condition_index]).generate_state(1)[0])


def corpus_files(corpus_dir) -> list[Path]:
    files = sorted(p for p in Path(corpus_dir).iterdir() if p.suffix.lower() == ".wav")
    if not files:
        raise ValueError(f"no WAV files in {corpus_dir}")
    return files


def conditions_for(noise_types, config: Config) -> list[NoiseCondition]:
    snrs = {NoiseType.SSN: config.noise.ssn_snrs, NoiseType.CSN: config.noise.csn_snrs}
    out = []
    for t in map(NoiseType, noise_types):
        out.extend(NoiseCondition(t, s) for s in sorted(snrs[t]))
    return out


def _process(system: str, clean: AudioBuffer, name: str, config: Config) -> AudioBuffer:
    if system == "unprocessed":
        return clean
    if system == "ssdrc":
        return ssdrc(clean, config=config.ssdrc)
    processed = to_canonical(load_wav(Path(config.grid.external[system]) / name))
    n = len(clean)
    if len(processed) < n:
        processed = processed.with_samples(np.concatenate([processed.samples,
                                                           np.zeros(n - len(processed))]))
    return processed.with_samples(processed.samples[:n])


def _score_utterance(args):
    index, name, clean, systems, conditions, maskers, config, seed = args
    clean_features = envelope_features(clean)
    rows = {}
    for system in systems:
        processed = _process(system, clean, name, config)
        for j, cond in enumerate(conditions):
            mix = mix_at_snr(processed, maskers[cond.noise_type], cond.snr_db,
                             mix_seed(seed, index, j))
            score = siib_from_features(clean_features, envelope_features(mix.mixture), config.siib)
            rows[(system, cond)] = score.bits_per_second
    return rows


def run_grid(corpus_dir, noise_spec: NoiseSpec | None = None, systems=None,
             config: Config | None = None, seed: int | None = None) -> ConditionReport:
    """Score every utterance of `corpus_dir` under every system and condition.

    `systems` lists labels: ``unprocessed``, ``ssdrc``, or a key of
    ``config.grid.external`` naming a directory of pre-processed WAVs with
    the same filenames as the corpus. Each utterance is mixed with the
    same noise segment for every system, so systems differ only in their
    processing. Scores are SIIB^Gauss against the clean corpus file.
    """
    config = config or Config()
    seed = config.seed if seed is None else seed
    noise_spec = noise_spec or NoiseSpec(config.grid.noise_types, None, config.noise.csn_offset_s)
    systems = list(systems or config.grid.systems)
    for system in systems:
        if system not in BUILTIN_SYSTEMS and system not in config.grid.external:
            raise ValueError(f"unknown system label {system!r}")
    if len(set(systems)) != len(systems):
        raise ValueError("system labels must be unique")

    files = corpus_files(corpus_dir)
    corpus = [to_canonical(load_wav(f)) for f in files]
    conditions = conditions_for(noise_spec.noise_types, config)
    types = {c.noise_type for c in conditions}

    maskers = {}
    longest = max(b.duration_seconds for b in corpus)
    if NoiseType.SSN in types:
        maskers[NoiseType.SSN] = ssn_generate(corpus, longest + 1.0, seed, config.noise.ssn_order,
                                              config.noise.level_dbfs)
    if NoiseType.CSN in types:
        if noise_spec.csn_path is None:
            raise ValueError("CSN conditions requested but no competing-speaker recording given")
        maskers[NoiseType.CSN] = csn_load(noise_spec.csn_path, None, noise_spec.csn_offset_s,
                                          config.noise.level_dbfs)

    jobs = [(i, f.name, clean, systems, conditions, maskers, config, seed)
            for i, (f, clean) in enumerate(zip(files, corpus))]
    if config.grid.workers > 1:
        with ProcessPoolExecutor(config.grid.workers) as pool:
            results = list(pool.map(_score_utterance, jobs))
    else:
        results = [_score_utterance(job) for job in jobs]
    log.info("scored %d utterances x %d systems x %d conditions",
             len(files), len(systems), len(conditions))

    names = tuple(f.name for f in files)
    cells = {}
    for system in systems:
        for cond in conditions:
            cells[(system, cond)] = CellStats(names, tuple(r[(system, cond)] for r in results))
    report = ConditionReport(
        systems=systems,
        conditions=conditions,
        cells=cells,
        metadata={
            "seed": seed,
            "config": config.snapshot(),
            "corpus": [{"file": f.name, "samples": len(b)} for f, b in zip(files, corpus)],
            "csn_source": None if noise_spec.csn_path is None else Path(noise_spec.csn_path).name,
        },
    )
    report.check_complete()
    return report
