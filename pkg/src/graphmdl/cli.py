"""Command-line front end.

Four subcommands: `generate` samples synthetic streams, `run` executes
the summarize-and-detect loop over a stream file and writes the report
CSV (plus score/code-length figures next to it), `eval` aggregates trial
reports into the benchmark metrics, and `complexity` tabulates the
superedge parametric complexity.  Every flag of a subcommand can also be
supplied through a JSON file via --config; explicit flags win.

Exit codes: 0 success, 1 data/runtime error, 2 usage error.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from graphmdl.codelen import BetaLuckiness, lnml_complexity
from graphmdl.detect import ChangeReport
from graphmdl.graphs import StreamFormatError, load_stream, write_stream
from graphmdl.inference import InferenceOptions
from graphmdl.stream import BscConfig, run as run_stream
from graphmdl.synth import (
    SynthConfig,
    benefit_auc,
    compression_at,
    generate_stream,
    type_errors,
)

CSV_COLUMNS = [
    "t", "k_hat", "k_concat", "phi", "epsilon", "alarm",
    "l_k", "l_z", "l_y", "l_x", "summary_total", "data_total",
]


# ---------------------------------------------------------------------------
# report CSV round-trip
# ---------------------------------------------------------------------------


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, float):
        return f"{value:.6f}"
    return str(value)


def write_report_csv(reports, path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for r in reports:
            writer.writerow([_cell(getattr(r, col)) for col in CSV_COLUMNS])
    return path


def read_report_csv(path) -> list[ChangeReport]:
    path = Path(path)
    reports = []
    with path.open(newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != CSV_COLUMNS:
            raise ValueError(f"{path}: unexpected report header {reader.fieldnames}")
        for row in reader:
            reports.append(
                ChangeReport(
                    t=int(row["t"]),
                    k_hat=int(row["k_hat"]),
                    k_concat=int(row["k_concat"]) if row["k_concat"] else None,
                    phi=float(row["phi"]) if row["phi"] else None,
                    epsilon=float(row["epsilon"]) if row["epsilon"] else None,
                    alarm=row["alarm"] == "1",
                    l_k=float(row["l_k"]),
                    l_z=float(row["l_z"]),
                    l_y=float(row["l_y"]),
                    l_x=float(row["l_x"]),
                    summary_total=float(row["summary_total"]),
                    data_total=float(row["data_total"]),
                )
            )
    if not reports:
        raise ValueError(f"{path}: empty report")
    return reports


# ---------------------------------------------------------------------------
# argument plumbing
# ---------------------------------------------------------------------------


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def _parse_kset(text: str) -> tuple[int, ...]:
    try:
        kset = tuple(int(tok) for tok in str(text).split(",") if tok.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad kset {text!r}") from None
    if not kset:
        raise argparse.ArgumentTypeError("kset must not be empty")
    return kset


def _parse_lambdas(text: str) -> tuple[float, ...]:
    try:
        lams = tuple(float(tok) for tok in str(text).split(",") if tok.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad lambda list {text!r}") from None
    if not lams:
        raise argparse.ArgumentTypeError("lambda list must not be empty")
    return lams


def _trial_path(base: Path, trial: int) -> Path:
    return base.with_name(f"{base.stem}.trial{trial}{base.suffix}")


def build_parser() -> tuple[argparse.ArgumentParser, dict]:
    parser = argparse.ArgumentParser(prog="graphmdl", description=__doc__)
    subs = parser.add_subparsers(dest="command", required=True)
    by_name = {}

    gen = subs.add_parser("generate", help="sample a synthetic snapshot stream")
    gen.add_argument("--out", type=Path, default=None, help="stream JSONL path (required)")
    gen.add_argument("--truth", type=Path, default=None,
                     help="ground-truth JSON path (default: <out>.truth.json)")
    gen.add_argument("--n", type=int, default=200, help="node count")
    gen.add_argument("--k-true", type=int, default=2)
    gen.add_argument("--t-change", type=int, default=15)
    gen.add_argument("--t-max", type=int, default=30)
    gen.add_argument("--regen-prob", type=float, default=0.05)
    gen.add_argument("--jitter", type=float, default=0.1)
    gen.add_argument("--tau-clip", type=float, default=0.001)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--trials", type=int, default=None,
                     help="write this many streams, seeds seed..seed+trials-1")
    by_name["generate"] = gen

    runp = subs.add_parser("run", help="summarize a stream and score changes")
    runp.add_argument("--stream", type=Path, default=None, help="stream JSONL path (required)")
    runp.add_argument("--lambda", dest="lam", type=float, default=None,
                      help="luckiness strength (required)")
    runp.add_argument("--delta", type=float, default=0.05)
    runp.add_argument("--kset", type=_parse_kset, default=(2, 3, 4))
    runp.add_argument("--a", type=float, default=0.5)
    runp.add_argument("--b", type=float, default=0.5)
    runp.add_argument("--seed", type=int, default=0)
    runp.add_argument("--restarts", type=int, default=InferenceOptions().n_restarts)
    runp.add_argument("--sweeps", type=int, default=InferenceOptions().max_sweeps)
    runp.add_argument("--out", type=Path, default=None, help="report CSV path (required)")
    runp.add_argument("--no-plot", action="store_true",
                      help="skip the score/code-length figures")
    runp.add_argument("--trials", type=int, default=None,
                      help="process <stem>.trialI<suffix> stream/report pairs")
    by_name["run"] = runp

    evalp = subs.add_parser("eval", help="aggregate trial reports into metrics")
    evalp.add_argument("--reports", type=Path, nargs="+", default=None)
    evalp.add_argument("--truth", type=Path, default=None)
    evalp.add_argument("--window", type=int, default=1,
                       help="alarm tolerance window around the change point")
    by_name["eval"] = evalp

    comp = subs.add_parser("complexity", help="superedge complexity table")
    comp.add_argument("--kmax", type=_positive_int, default=8)
    comp.add_argument("--lambdas", type=_parse_lambdas, default=(0.5, 1.0, 5.0))
    comp.add_argument("--a", type=float, default=0.5)
    comp.add_argument("--b", type=float, default=0.5)
    comp.add_argument("--plot", type=Path, default=None,
                      help="also render the curves to this file")
    by_name["complexity"] = comp

    for sub in by_name.values():
        sub.add_argument("--config", type=Path, default=None,
                         help="JSON file supplying any of this subcommand's flags")
    return parser, by_name


def _apply_config(parser, by_name, argv, args):
    """Fold --config values in as defaults and reparse so explicit flags win."""
    sub = by_name[args.command]
    try:
        loaded = json.loads(args.config.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        sub.error(f"cannot read config {args.config}: {exc}")
    if not isinstance(loaded, dict):
        sub.error(f"config {args.config} must hold a JSON object")
    known = {a.dest for a in sub._actions}
    defaults = {}
    for key, value in loaded.items():
        dest = {"lambda": "lam"}.get(key, key.replace("-", "_"))
        if dest not in known:
            sub.error(f"config {args.config}: unknown key {key!r}")
        if dest == "kset":
            value = _parse_kset(value) if isinstance(value, str) else tuple(value)
        elif dest == "lambdas":
            value = (
                _parse_lambdas(value) if isinstance(value, str) else tuple(value)
            )
        elif isinstance(value, str) and dest in {"out", "truth", "stream", "plot"}:
            value = Path(value)
        elif dest == "reports":
            value = [Path(v) for v in value]
        defaults[dest] = value
    sub.set_defaults(**defaults)
    return parser.parse_args(argv)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_generate(args) -> int:
    trials = range(args.trials) if args.trials else [None]
    for trial in trials:
        cfg = SynthConfig(
            n_nodes=args.n, k_true=args.k_true, t_change=args.t_change,
            t_max=args.t_max, regen_prob=args.regen_prob, jitter=args.jitter,
            tau_clip=args.tau_clip, seed=args.seed + (trial or 0),
        )
        out = args.out if trial is None else _trial_path(args.out, trial)
        if args.truth is not None:
            truth_path = args.truth if trial is None else _trial_path(args.truth, trial)
        else:
            truth_path = out.with_suffix(".truth.json")
        snaps, truth = generate_stream(cfg)
        write_stream(out, snaps)
        truth_path.write_text(
            json.dumps(
                {
                    "t_star": truth["t_star"],
                    "z": truth["z"].tolist(),
                    "theta_before": truth["theta_before"].tolist(),
                    "theta_after": truth["theta_after"].tolist(),
                },
                separators=(",", ":"),
            )
            + "\n"
        )
        print(json.dumps({"config": asdict(cfg), "stream": str(out),
                          "truth": str(truth_path)}, sort_keys=True))
    return 0


def _run_one(args, stream_path: Path, out_path: Path) -> dict:
    snaps = load_stream(stream_path)
    cfg = BscConfig(
        lam=args.lam, delta=args.delta, kset=args.kset, prior_a=args.a,
        prior_b=args.b, seed=args.seed,
        inference=InferenceOptions(
            seed=args.seed, n_restarts=args.restarts, max_sweeps=args.sweeps
        ),
    )
    reports = run_stream(snaps, cfg)
    write_report_csv(reports, out_path)
    result = {
        "out": str(out_path),
        "alarms": [r.t for r in reports if r.alarm],
        "figures": [],
    }
    if not args.no_plot:
        from graphmdl import plots

        score = out_path.with_name(out_path.stem + "_score.png")
        codelen = out_path.with_name(out_path.stem + "_codelen.png")
        plots.score_trace(reports, score)
        plots.codelen_trace(reports, codelen)
        result["figures"] = [str(score), str(codelen)]
    return result


def cmd_run(args) -> int:
    if args.trials:
        pairs = [
            (_trial_path(args.stream, i), _trial_path(args.out, i))
            for i in range(args.trials)
        ]
    else:
        pairs = [(args.stream, args.out)]
    for stream_path, out_path in pairs:
        print(json.dumps(_run_one(args, stream_path, out_path), sort_keys=True))
    return 0


def cmd_eval(args) -> int:
    trials = [read_report_csv(p) for p in args.reports]
    t_ranges = {tuple(r.t for r in reports) for reports in trials}
    if len(t_ranges) != 1:
        raise ValueError(
            f"reports cover mismatched t ranges: {sorted(len(t) for t in t_ranges)}"
        )
    truth = json.loads(args.truth.read_text())
    t_star = int(truth["t_star"])
    type1, type2 = type_errors(trials, t_star, window=args.window)
    aucs = [benefit_auc(reports, t_star) for reports in trials]
    codelens = [compression_at(reports, t_star) for reports in trials]
    print(
        json.dumps(
            {
                "type1": type1,
                "type2": type2,
                "auc_mean": float(np.mean(aucs)),
                "auc_sd": float(np.std(aucs)),
                "codelen_mean": float(np.mean(codelens)),
                "codelen_sd": float(np.std(codelens)),
            },
            sort_keys=True,
        )
    )
    return 0


def cmd_complexity(args) -> int:
    rows = []
    for k in range(1, args.kmax + 1):
        for lam in args.lambdas:
            prior = BetaLuckiness(a=args.a, b=args.b, lam=lam)
            rows.append((k, lam, lnml_complexity(k * k, prior)))
    writer = csv.writer(sys.stdout)
    writer.writerow(["k", "lambda", "bits"])
    for k, lam, bits in rows:
        writer.writerow([k, f"{lam:g}", f"{bits:.6f}"])
    if args.plot is not None:
        from graphmdl import plots

        plots.complexity_curves(rows, args.plot)
    return 0


COMMANDS = {
    "generate": cmd_generate,
    "run": cmd_run,
    "eval": cmd_eval,
    "complexity": cmd_complexity,
}


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser, by_name = build_parser()
    args = parser.parse_args(argv)
    if args.config is not None:
        args = _apply_config(parser, by_name, argv, args)
    # flags a config file may supply are optional at parse time; enforce now
    required = {
        "generate": ["out"],
        "run": ["stream", "lam", "out"],
        "eval": ["reports", "truth"],
        "complexity": [],
    }
    flag = {"lam": "--lambda"}
    for dest in required[args.command]:
        if getattr(args, dest) is None:
            by_name[args.command].error(f"{flag.get(dest, '--' + dest)} is required")
    if args.command == "run" and not args.lam > 0:
        by_name["run"].error(f"--lambda must be positive, got {args.lam}")
    try:
        return COMMANDS[args.command](args)
    except (StreamFormatError, RuntimeError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
