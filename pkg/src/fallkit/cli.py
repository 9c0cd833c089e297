"""Command-line entry points: synth, prepare, study, train, eval, replay.

A JSON experiment file may supply any flag's default (``--config exp.json``);
explicit command-line flags win.  All randomness flows from one ``--seed``:
pipeline-level seeds are derived as SeedSequence(seed, spawn_key=(i,)) with
``i`` the index of the pipeline in sorted-name order, so any subset of the
matrix reproduces the full run's numbers.  ``FALLKIT_OUT`` sets the default
output directory.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import detector, features, hpo, ingest, metrics, model, segment, synthetic
from .activities import ActivityCode, BodyPosition, LabelingScheme, all_activity_codes

log = logging.getLogger("fallkit")

_POSITIONS = {p.value: p for p in BodyPosition}
_SCENARIOS = {s.value: s for s in features.Scenario}
_DOMAINS = {d.value: d for d in features.FeatureDomain}
_SCHEMES = {s.value: s for s in LabelingScheme}


def _default_out() -> str:
    return os.environ.get("FALLKIT_OUT", "out")


def _csv_list(raw: str) -> list[str]:
    return [item.strip() for item in raw.split(",") if item.strip()]


def _parse_activities(raw: str) -> list[ActivityCode]:
    """'ADL_2x5,FALL_1x4' -> five walking trials and four frontal falls each."""
    codes: list[ActivityCode] = []
    for token in _csv_list(raw):
        reps = 1
        if "x" in token:
            head, _, count = token.rpartition("x")
            if count.isdigit():
                token, reps = head, int(count)
        codes.extend([ActivityCode.parse(token)] * reps)
    return codes


def _pipeline_matrix(args) -> list[features.PipelineId]:
    positions = [_POSITIONS[p] for p in _csv_list(args.positions)]
    scenarios = [_SCENARIOS[s] for s in _csv_list(args.scenarios)]
    domains = [_DOMAINS[d] for d in _csv_list(args.domains)]
    schemes = [_SCHEMES[s] for s in _csv_list(args.schemes)]
    if not (positions and scenarios and domains and schemes):
        raise SystemExit("--positions/--scenarios/--domains/--schemes must be non-empty")
    pipelines = [
        features.PipelineId(sc, dom, scheme, pos)
        for pos in positions
        for sc in scenarios
        for dom in domains
        for scheme in schemes
    ]
    return sorted(pipelines, key=lambda p: p.name)


def _pipeline_seed(root_seed: int, index: int) -> int:
    return int(np.random.SeedSequence(entropy=root_seed, spawn_key=(index,)).generate_state(1)[0])


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_synth(args) -> int:
    spec = synthetic.SyntheticSpec(
        subjects=args.subjects,
        activities=_parse_activities(args.activities)
        if args.activities
        else all_activity_codes(),
        rate_hz=args.rate,
        seed=args.seed,
        positions=tuple(_POSITIONS[p] for p in _csv_list(args.positions)),
    )
    recordings = synthetic.generate_synthetic(spec)
    ingest.write_dataset(recordings, args.out)
    print(f"wrote {len(recordings)} recordings to {args.out}")
    return 0


def cmd_prepare(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    recordings = ingest.load_dataset(args.root)
    pipelines = _pipeline_matrix(args)
    segments_cache: dict[tuple, list] = {}
    for i, pipeline in enumerate(pipelines):
        key = (pipeline.position, pipeline.scheme)
        if key not in segments_cache:
            segments_cache[key] = segment.segment_all(
                recordings, pipeline.scheme, position=pipeline.position
            )
        segments = segments_cache[key]
        if not segments:
            log.warning("pipeline %s: no segments for %s; skipped", pipeline.name, key)
            continue
        dataset = features.build_dataset(
            segments,
            pipeline.scenario,
            pipeline.domain,
            pipeline.scheme,
            pipeline.position,
            seed=_pipeline_seed(args.seed, i),
            by_subject=args.by_subject,
        )
        path = out / f"{pipeline.name}.npz"
        features.save_dataset(dataset, path)
        if args.export_csv:
            features.export_csv(dataset, out / f"{pipeline.name}.csv")
        print(f"{pipeline.name}: train/val/test = "
              f"{len(dataset.train)}/{len(dataset.val)}/{len(dataset._test)} -> {path}")
    return 0


def _study_one(dataset, seed: int, args):
    return hpo.run_study(
        dataset,
        n_trials=args.n_trials,
        seed=seed,
        epochs=args.epochs,
        batch=args.batch,
        retrainings=args.retrainings,
        log_path=Path(args.out) / f"study_{dataset.pipeline.name}.jsonl",
    )


def cmd_study(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    data_dir = Path(args.data)
    pipelines = _pipeline_matrix(args)
    config_rows = []
    best_reports: list[metrics.EvalReport] = []
    all_reports: list[metrics.EvalReport] = []
    failures = []
    for i, pipeline in enumerate(pipelines):
        path = data_dir / f"{pipeline.name}.npz"
        if not path.is_file():
            failures.append((pipeline.name, f"dataset file {path} missing"))
            continue
        dataset = features.load_dataset_file(path)
        try:
            result = _study_one(dataset, _pipeline_seed(args.seed, i), args)
        except Exception as exc:  # isolate pipeline failures
            log.error("pipeline %s failed: %s", pipeline.name, exc)
            failures.append((pipeline.name, str(exc)))
            continue
        cfg = result.best.config.as_dict()
        cfg["pipeline"] = pipeline.name
        cfg["objective"] = round(result.best.objective, 6)
        config_rows.append(cfg)
        best = result.best_retrain
        best_reports.append(best)
        all_reports.extend(result.retrain_reports)
        if result.best_model is not None:
            model.save_checkpoint(result.best_model, out / f"model_{pipeline.name}.npz")
        print(
            f"{pipeline.name}: best val MCC {result.best.objective:.4f}, "
            f"test MCC best {best.mcc:.4f} "
            f"(mean {result.retrain_mcc_mean:.4f} +/- {result.retrain_mcc_std:.4f})"
        )

    if config_rows:
        cols = ["pipeline"] + list(model.Cnn1dConfig.__dataclass_fields__) + ["objective"]
        with open(out / "best_configs.csv", "w", newline="", encoding="utf-8") as fh:
            writer = csv.DictWriter(fh, fieldnames=cols)
            writer.writeheader()
            writer.writerows(config_rows)
    if best_reports:
        metrics.write_report_csv(best_reports, out / "metrics.csv")
        with open(out / "confusion.csv", "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["pipeline", "tp", "tn", "fp", "fn"])
            for r in best_reports:
                writer.writerow([r.pipeline, r.matrix.tp, r.matrix.tn, r.matrix.fp, r.matrix.fn])
        metrics.write_report_csv(all_reports, out / "retrain_reports.csv")
    if failures:
        with open(out / "failures.csv", "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["pipeline", "error"])
            writer.writerows(failures)
        print(f"{len(failures)} pipeline(s) failed; see failures.csv", file=sys.stderr)
        return 1
    return 0


def _config_from_flags(args) -> model.Cnn1dConfig:
    return model.Cnn1dConfig(
        feature_maps=args.feature_maps,
        kernel_size=args.kernel_size,
        conv_layers=args.conv_layers,
        dense_layers=args.dense_layers,
        dense_neurons=args.dense_neurons,
        dropout=args.dropout,
        learning_rate=args.learning_rate,
        decision_threshold=args.threshold,
    )


def cmd_train(args) -> int:
    dataset = features.load_dataset_file(args.data)
    cfg = _config_from_flags(args)
    m = model.build(cfg, dataset.n_channels, dataset.length, seed=args.seed)
    m = model.train(m, dataset, epochs=args.epochs, batch=args.batch, seed=args.seed)
    model.save_checkpoint(m, args.out)
    best = max((h["val_mcc"] for h in m.history), default=float("nan"))
    print(f"trained {dataset.pipeline.name}: best val MCC {best:.4f} -> {args.out}")
    return 0


def cmd_eval(args) -> int:
    dataset = features.load_dataset_file(args.data)
    m = model.load_checkpoint(args.model)
    split = {"train": dataset.train, "val": dataset.val, "test": dataset.test}[args.split]
    matrix = model.evaluate(m, split.x, split.y)
    report = metrics.EvalReport.from_confusion(
        matrix, pipeline=dataset.pipeline.name, seed=args.seed
    )
    print(json.dumps(report.as_row()))
    if args.out:
        metrics.write_report_csv([report], args.out)
    return 0


def _read_stream(source: str) -> np.ndarray:
    fh = sys.stdin if source == "-" else open(source, encoding="utf-8")
    rows = []
    try:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#") or line[0].isalpha():
                continue
            parts = line.replace(";", ",").split(",")
            if len(parts) != 7:
                raise SystemExit(f"stream rows need 7 fields, got {len(parts)}: {line!r}")
            rows.append([float(p) for p in parts])
    finally:
        if fh is not sys.stdin:
            fh.close()
    return np.array(rows, dtype=np.float64)


def cmd_replay(args) -> int:
    m = model.load_checkpoint(args.model)
    if Path(args.input).is_dir():
        recordings = ingest.load_dataset(args.input)
        pairs = segment.pair_recordings(
            [r for r in recordings if r.position is m.pipeline.position]
        )
        if args.sampling_id:
            pairs = [p for p in pairs if p[0].sampling_id == args.sampling_id]
        if not pairs:
            raise SystemExit("no matching recording pair found")
        stream = detector.recordings_to_stream(*pairs[0])
    else:
        stream = _read_stream(args.input)

    cfg = detector.WindowConfig(
        window_seconds=args.window,
        step_seconds=args.step,
        samples_per_window=m.length
        if m.pipeline.domain is features.FeatureDomain.TIME
        else m.pipeline.position.window_length,
    )
    events = detector.stream_detect(stream, m, cfg)
    incidents = detector.merge_events(events, merge_gap_s=args.merge_gap)

    sink = sys.stdout if args.out in (None, "-") else open(args.out, "w", encoding="utf-8")
    try:
        for event in events:
            sink.write(json.dumps(event.as_record()) + "\n")
    finally:
        if sink is not sys.stdout:
            sink.close()
    n_windows = detector.count_windows(stream, cfg)
    print(
        f"windows={n_windows} events={len(events)} incidents={len(incidents)}",
        file=sys.stderr,
    )
    if args.summary:
        with open(args.summary, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["incident", "detected_at_s", "first_window_start_s", "n_windows", "max_probability"])
            for i, inc in enumerate(incidents):
                writer.writerow(
                    [
                        i,
                        inc.detected_at_s,
                        inc.first_event.window_start_s,
                        inc.n_windows,
                        max(inc.first_event.probability, inc.last_event.probability),
                    ]
                )
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def _add_matrix_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--positions", default="chest,left,right", help="comma list of positions")
    p.add_argument("--scenarios", default=",".join(_SCENARIOS), help="comma list of scenarios")
    p.add_argument("--domains", default="T,F", help="comma list of feature domains")
    p.add_argument("--schemes", default="l1,l2", help="comma list of labeling schemes")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fallkit", description="fall-detection experiment toolkit"
    )
    parser.add_argument("--config", help="JSON file of flag defaults (flags win)")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic recording tree")
    p.add_argument("--out", default=_default_out())
    p.add_argument("--subjects", type=int, default=2)
    p.add_argument("--activities", default="", help="e.g. 'ADL_2x5,FALL_1x4' (default: full protocol)")
    p.add_argument("--rate", type=float, default=90.0, help="watch rate in Hz")
    p.add_argument("--positions", default="chest,left,right")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("prepare", help="build per-pipeline datasets from a recording tree")
    p.add_argument("--root", required=True, help="recording tree root")
    p.add_argument("--out", default=_default_out())
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--export-csv", action="store_true")
    p.add_argument("--by-subject", action="store_true", help="subject-level splits")
    _add_matrix_flags(p)
    p.set_defaults(func=cmd_prepare)

    p = sub.add_parser("study", help="hyperparameter study per pipeline")
    p.add_argument("--data", required=True, help="directory of prepared .npz datasets")
    p.add_argument("--out", default=_default_out())
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n-trials", type=int, default=20)
    p.add_argument("--epochs", type=int, default=model.DEFAULT_EPOCHS)
    p.add_argument("--batch", type=int, default=model.DEFAULT_BATCH)
    p.add_argument("--retrainings", type=int, default=20)
    _add_matrix_flags(p)
    p.set_defaults(func=cmd_study)

    p = sub.add_parser("train", help="train one model with explicit hyperparameters")
    p.add_argument("--data", required=True, help="prepared .npz dataset")
    p.add_argument("--out", default="model.npz")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--epochs", type=int, default=model.DEFAULT_EPOCHS)
    p.add_argument("--batch", type=int, default=model.DEFAULT_BATCH)
    p.add_argument("--feature-maps", type=int, default=32)
    p.add_argument("--kernel-size", type=int, default=3)
    p.add_argument("--conv-layers", type=int, default=2)
    p.add_argument("--dense-layers", type=int, default=1)
    p.add_argument("--dense-neurons", type=int, default=64)
    p.add_argument("--dropout", type=float, default=0.2)
    p.add_argument("--learning-rate", type=float, default=0.001)
    p.add_argument("--threshold", type=float, default=0.5)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="evaluate a checkpoint on a dataset split")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--split", choices=["train", "val", "test"], default="test")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default=None, help="optional report CSV path")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("replay", help="stream a recording through the detector")
    p.add_argument("--model", required=True)
    p.add_argument("--input", required=True, help="recording tree, CSV feed, or '-' for stdin")
    p.add_argument("--sampling-id", default=None)
    p.add_argument("--window", type=float, default=5.0)
    p.add_argument("--step", type=float, default=1.0)
    p.add_argument("--merge-gap", type=float, default=5.0)
    p.add_argument("--out", default=None, help="events JSONL ('-' or path; default stdout)")
    p.add_argument("--summary", default=None, help="optional incident summary CSV")
    p.set_defaults(func=cmd_replay)
    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    # Pre-scan for --config so its values become defaults that flags override.
    if "--config" in argv:
        cfg_path = argv[argv.index("--config") + 1]
        defaults = json.loads(Path(cfg_path).read_text(encoding="utf-8"))
        for action in parser._subparsers._group_actions[0].choices.values():  # type: ignore[union-attr]
            action.set_defaults(**{k: v for k, v in defaults.items()})
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
