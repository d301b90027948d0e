"""``bcghr`` command line: estimate, evaluate, synth, dump.

Exit codes: 0 ok, 2 bad input or config, 3 estimate/reference pairing
mismatch, 4 output could not be written. Failures print one JSON object
``{"error": ..., "message": ...}`` on stderr.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import metrics
from .config import WINDOW_FUNCTIONS, PipelineConfig, load_config
from .errors import BcgError, ConfigError, ValidationError
from .io import load_annotation, load_recording
from .synth import make_corpus, parse_corpus_spec, seven_subject_corpus
from .tracker import estimate_hr, estimates_to_csv, estimates_to_json, read_estimates

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_PAIRING = 3
EXIT_OUTPUT = 4


class CliFailure(Exception):
    def __init__(self, code: int, error: str, message: str):
        super().__init__(message)
        self.code = code
        self.error = error
        self.message = message


class PairingError(ValidationError):
    """Estimates and reference annotation do not describe the same frames."""


def _range_pair(text: str) -> tuple[float, float]:
    try:
        lo, hi = (float(v) for v in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO:HI, got {text!r}") from None
    return lo, hi


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="key = value file with pipeline settings")
    p.add_argument("--window-s", type=float)
    p.add_argument("--hop-s", type=float)
    p.add_argument("--band", type=_range_pair, metavar="LO:HI", help="band-pass edges, Hz")
    p.add_argument("--filter-order", type=int)
    p.add_argument("--search", type=_range_pair, metavar="LO:HI", help="HR search range, Hz")
    p.add_argument("--continuity-bpm", type=float)
    p.add_argument("--pad-factor", type=int)
    p.add_argument("--window-fn", choices=WINDOW_FUNCTIONS)


def config_from_args(args) -> PipelineConfig:
    band = args.band or (None, None)
    search = args.search or (None, None)
    return load_config(
        args.config,
        window_s=args.window_s,
        hop_s=args.hop_s,
        band_low_hz=band[0],
        band_high_hz=band[1],
        filter_order=args.filter_order,
        search_low_hz=search[0],
        search_high_hz=search[1],
        continuity_bpm=args.continuity_bpm,
        pad_factor=args.pad_factor,
        window_fn=args.window_fn,
    )


def _write_text(path: Path | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    try:
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise CliFailure(EXIT_OUTPUT, "output-unwritable", f"{path}: {exc.strerror or exc}") from None


def _write_csv(path: Path, header, rows) -> None:
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            writer.writerows(rows)
    except OSError as exc:
        raise CliFailure(EXIT_OUTPUT, "output-unwritable", f"{path}: {exc.strerror or exc}") from None


class _FrameDumper:
    """Collects per-frame envelope and spectrum rows for the dump options."""

    def __init__(self, sample_rate_hz, want_envelope, want_spectrum, spectrum_max_hz):
        self.fs = sample_rate_hz
        self.want_envelope = want_envelope
        self.want_spectrum = want_spectrum
        self.spectrum_max_hz = spectrum_max_hz
        self.envelope_rows = []
        self.spectrum_rows = []

    def __call__(self, k, frame, spectrum):
        if self.want_envelope:
            t0 = spectrum.frame_time_s
            times = t0 + np.arange(frame.envelope_power.size) / self.fs
            self.envelope_rows.extend(
                (k, repr(float(t)), repr(float(p))) for t, p in zip(times, frame.envelope_power)
            )
        if self.want_spectrum:
            freqs = spectrum.frequencies_hz
            keep = freqs <= self.spectrum_max_hz
            self.spectrum_rows.extend(
                (k, repr(float(f)), repr(float(m)))
                for f, m in zip(freqs[keep], spectrum.magnitude[keep])
            )

    def write(self, envelope_path, spectrum_path):
        if envelope_path is not None:
            _write_csv(envelope_path, ("frame_index", "time_s", "envelope_power"), self.envelope_rows)
        if spectrum_path is not None:
            _write_csv(spectrum_path, ("frame_index", "frequency_hz", "magnitude"), self.spectrum_rows)


def _run_pipeline(args, dump_envelope=None, dump_spectrum=None):
    config = config_from_args(args)
    recording = load_recording(args.recording, args.input_format)
    dumper = None
    if dump_envelope is not None or dump_spectrum is not None:
        dumper = _FrameDumper(recording.sample_rate_hz, dump_envelope is not None,
                              dump_spectrum is not None, args.spectrum_max_hz)
    estimates = estimate_hr(recording, config, on_frame=dumper)
    if dumper is not None:
        dumper.write(dump_envelope, dump_spectrum)
    return recording, config, estimates


def cmd_estimate(args) -> int:
    recording, config, estimates = _run_pipeline(args, args.dump_envelope, args.dump_spectrum)
    extra = {"label": recording.label, "sample_rate_hz": recording.sample_rate_hz}
    render = estimates_to_json if args.format == "json" else estimates_to_csv
    _write_text(args.out, render(estimates, config, extra))
    return EXIT_OK


def cmd_dump(args) -> int:
    if args.envelope is None and args.spectrum is None:
        raise ConfigError("dump needs --envelope and/or --spectrum")
    _run_pipeline(args, args.envelope, args.spectrum)
    return EXIT_OK


def pair_estimates(rows, meta, annotation, window_s=None) -> metrics.PairedSeries:
    """Pair estimate rows with reference HR over the same frame spans."""
    if window_s is None:
        if "window_s" not in meta:
            raise ConfigError("estimates carry no window_s header; pass --window-s")
        window_s = float(meta["window_s"])
    if not rows:
        raise PairingError("estimates file holds no frames")
    spans = [(r["frame_start_s"], r["frame_start_s"] + window_s) for r in rows]
    last_peak = float(annotation.rpeak_times_s[-1])
    if spans[-1][1] > last_peak + 0.5 * window_s:
        raise PairingError(
            f"annotation ends at {last_peak:g} s but estimates run to {spans[-1][1]:g} s"
        )
    try:
        ref = metrics.reference_hr(annotation, spans)
    except ValidationError as exc:
        raise PairingError(str(exc)) from None
    return metrics.PairedSeries(ref, [r["hr_bpm"] for r in rows], [s for s, _ in spans])


def cmd_evaluate(args) -> int:
    rows, meta = read_estimates(args.estimates)
    annotation = load_annotation(args.annotation)
    paired = pair_estimates(rows, meta, annotation, args.window_s)
    report = metrics.evaluate(paired)
    _write_text(args.out, report.to_json() + "\n")
    if args.out is not None:
        stem = args.out.with_suffix("")
        means, diffs, _ = metrics.bland_altman(paired)
        _write_csv(Path(f"{stem}_bland_altman.csv"), ("mean_bpm", "abs_diff_bpm"),
                   [(repr(float(m)), repr(float(d))) for m, d in zip(means, diffs)])
        _write_csv(Path(f"{stem}_scatter.csv"), ("frame_start_s", "bpm_true", "bpm_est"),
                   [(repr(float(t)), repr(float(a)), repr(float(b)))
                    for t, a, b in zip(paired.frame_times_s, paired.bpm_true, paired.bpm_est)])
    return EXIT_OK


def cmd_synth(args) -> int:
    if args.preset == "seven-subject":
        corpus = seven_subject_corpus()
    else:
        if args.spec is None:
            raise ConfigError("synth needs a corpus spec file or --preset")
        if not args.spec.is_file():
            raise FileNotFoundError(args.spec)
        corpus = parse_corpus_spec(args.spec.read_text(encoding="utf-8"), str(args.spec))
    try:
        make_corpus(corpus, args.out_dir)
    except OSError as exc:
        raise CliFailure(EXIT_OUTPUT, "output-unwritable",
                         f"{args.out_dir}: {exc.strerror or exc}") from None
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bcghr", description="Heart rate from chair/bed BCG recordings.")
    sub = parser.add_subparsers(dest="command", required=True)

    def recording_args(p):
        p.add_argument("recording", type=Path)
        p.add_argument("--input-format", choices=("csv", "wav"), help="default: from suffix")
        p.add_argument("--spectrum-max-hz", type=float, default=10.0,
                       help="highest frequency written by spectrum dumps")
        _add_config_flags(p)

    p = sub.add_parser("estimate", help="per-frame heart rate from a recording")
    recording_args(p)
    p.add_argument("-o", "--out", type=Path, help="output file (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--dump-envelope", type=Path, metavar="CSV")
    p.add_argument("--dump-spectrum", type=Path, metavar="CSV")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("evaluate", help="score estimates against R-peak annotations")
    p.add_argument("estimates", type=Path)
    p.add_argument("annotation", type=Path)
    p.add_argument("-o", "--out", type=Path, help="report JSON; scatter CSVs go beside it")
    p.add_argument("--window-s", type=float, help="override the window read from the estimates header")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("synth", help="write a synthetic corpus")
    p.add_argument("spec", type=Path, nargs="?", help="corpus spec ([name] blocks of key = value)")
    p.add_argument("out_dir", type=Path)
    p.add_argument("--preset", choices=("seven-subject",))
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("dump", help="write per-frame envelope / spectrum CSVs")
    recording_args(p)
    p.add_argument("--envelope", type=Path, metavar="CSV")
    p.add_argument("--spectrum", type=Path, metavar="CSV")
    p.set_defaults(func=cmd_dump)
    return parser


def _fail(code: int, error: str, message: str) -> int:
    sys.stderr.write(json.dumps({"error": error, "message": message}) + "\n")
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliFailure as exc:
        return _fail(exc.code, exc.error, exc.message)
    except FileNotFoundError as exc:
        return _fail(EXIT_INPUT, "input-not-found", f"no such file: {exc.args[0] if exc.args else exc}")
    except PairingError as exc:
        return _fail(EXIT_PAIRING, "pairing-mismatch", str(exc))
    except ConfigError as exc:
        return _fail(EXIT_INPUT, "config-invalid", str(exc))
    except BcgError as exc:
        return _fail(EXIT_INPUT, "input-invalid", str(exc))


if __name__ == "__main__":
    sys.exit(main())
