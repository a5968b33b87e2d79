"""
Evaluation: the condition grid, the CSV report, and keyword scoring
===================================================================

Runs unprocessed and SSDRC speech through all six noise conditions,
prints the summary table, and shows the same thing from the command line.
The keyword scorer at the end is what a listening test would use.
"""

import tempfile
from pathlib import Path

import numpy as np

from ssdrckit.audio import AudioBuffer, save_wav
from ssdrckit.cli import main
from ssdrckit.evaluation import NoiseSpec, format_csv, format_table, keyword_score, median_rate, run_grid
from ssdrckit.synth import Speaker, synthesize_corpus

work = Path(tempfile.mkdtemp())
corpus_dir = work / "corpus"
corpus_dir.mkdir()
for i, b in enumerate(synthesize_corpus(5, seed=1)):
    save_wav(b, corpus_dir / f"utt{i:02d}.wav")
talker = synthesize_corpus(3, seed=99, speaker=Speaker.female())
save_wav(AudioBuffer(np.concatenate([t.samples for t in talker]), 16000), work / "talker.wav")

report = run_grid(corpus_dir, NoiseSpec(("SSN", "CSN"), str(work / "talker.wav")), seed=0)
print(format_table(report, baseline="unprocessed"))
print(format_csv(report, baseline="unprocessed").splitlines()[:3])

# same run from the command line, with a manifest next to the CSV
main(["grid", "--corpus", str(corpus_dir), "--noise-csn", str(work / "talker.wav"),
      "--out", str(work / "grid.csv")])
print(sorted(p.name for p in work.iterdir()))

# keyword scoring ignores function words, case and punctuation
pairs = [("The birch canoe slid on the smooth planks", "birch canoe slid on smooth planks"),
         ("Glue the sheet to the dark blue background.", "glue sheet dark background"),
         ("red red red fish", "red fish")]
scores = [keyword_score(ref, heard) for ref, heard in pairs]
for (ref, _), s in zip(pairs, scores):
    print(f"{s.correct}/{s.total}  {ref}")
print(f"median keyword rate: {median_rate(scores):.2f}")
