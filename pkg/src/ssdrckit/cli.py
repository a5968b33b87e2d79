"""Command-line entry point: ``ssdrckit <verb> ...``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .audio import load_wav, save_wav, to_canonical
from .config import load_config
from .evaluation import NoiseSpec, emit_report, keyword_score, median_rate, run_grid
from .evaluation.report import format_csv, format_table, write_manifest
from .noise import mix_at_snr
from .siib import siib_gauss
from .enhance import ssdrc


def _enhance(args, config):
    x = to_canonical(load_wav(args.input))
    save_wav(ssdrc(x, args.beta, config.ssdrc), args.out)


def _mix(args, config):
    speech = to_canonical(load_wav(args.speech))
    noise = to_canonical(load_wav(args.noise))
    seed = config.seed if args.seed is None else args.seed
    result = mix_at_snr(speech, noise, args.snr, seed)
    save_wav(result.mixture, args.out)
    print(f"achieved_snr_db={result.achieved_snr_db:.4f} noise_scale={result.noise_scale:.6f}")


def _score(args, config):
    clean = to_canonical(load_wav(args.clean))
    degraded = to_canonical(load_wav(args.degraded))
    score = siib_gauss(clean, degraded, config.siib)
    print(f"{score.bits_per_second:.4f}")


def _grid(args, config):
    if args.corpus is None:
        raise SystemExit("grid needs --corpus")
    types = tuple(args.noise) if args.noise else config.grid.noise_types
    spec = NoiseSpec(types, args.noise_csn, config.noise.csn_offset_s)
    systems = args.systems.split(",") if args.systems else None
    report = run_grid(args.corpus, spec, systems, config, args.seed)
    baseline = args.baseline or config.grid.baseline
    if baseline not in report.systems:
        baseline = None
    if args.out is None:
        text = format_csv(report, baseline) if args.format == "csv" else format_table(report, baseline)
        sys.stdout.write(text)
        return
    out = emit_report(report, args.out, args.format, baseline)
    write_manifest(report, out.with_name(out.name + ".manifest.json"))


def _keywords(args, config):
    if args.file:
        scores = []
        for line in Path(args.file).read_text().splitlines():
            if not line.strip():
                continue
            reference, _, transcript = line.partition("\t")
            s = keyword_score(reference, transcript)
            scores.append(s)
            print(f"{s.correct}/{s.total}\t{s.rate:.4f}")
        if scores:
            print(f"median_rate\t{median_rate(scores):.4f}")
        return
    if args.reference is None or args.transcript is None:
        raise SystemExit("keywords needs REFERENCE and TRANSCRIPT, or --file")
    s = keyword_score(args.reference, args.transcript)
    print(f"{s.correct}/{s.total}\t{s.rate:.4f}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="TOML config file")
    common.add_argument("--seed", type=int, help="override the config seed")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="ssdrckit", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("enhance", parents=[common], help="SSDRC-process one WAV file")
    p.add_argument("input")
    p.add_argument("--out", required=True)
    p.add_argument("--beta", type=float)
    p.set_defaults(func=_enhance)

    p = sub.add_parser("mix", parents=[common], help="mix speech and noise at an SNR")
    p.add_argument("speech")
    p.add_argument("noise")
    p.add_argument("--snr", type=float, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_mix)

    p = sub.add_parser("score", parents=[common], help="SIIB^Gauss of a degraded file")
    p.add_argument("clean")
    p.add_argument("degraded")
    p.set_defaults(func=_score)

    p = sub.add_parser("grid", parents=[common], help="score a corpus over the condition grid")
    p.add_argument("--corpus")
    p.add_argument("--noise-csn", help="competing-speaker WAV")
    p.add_argument("--noise", action="append", choices=["SSN", "CSN"],
                   help="noise types to run (repeatable; default from config)")
    p.add_argument("--systems", help="comma-separated system labels")
    p.add_argument("--baseline")
    p.add_argument("--format", choices=["csv", "table"], default="csv")
    p.add_argument("--out")
    p.set_defaults(func=_grid)

    p = sub.add_parser("keywords", parents=[common], help="keyword-correct scoring")
    p.add_argument("reference", nargs="?")
    p.add_argument("transcript", nargs="?")
    p.add_argument("--file", help="TSV of reference<TAB>transcript lines")
    p.set_defaults(func=_keywords)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        config = load_config(args.config)
        args.func(args, config)
    except (ValueError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
