"""Single executable exposing the pipeline as deterministic subcommands.

Exit codes: 0 success, 1 data error (machine-parsable ``ERROR <code>: ...``
on stderr), 2 usage error. With a fixed --seed and --threads 1 every data
artifact is byte-reproducible; the run manifest written next to each output
records command line, config hash, input digests, and wall time.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import logging
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .audio_io import frame_instances, load_wav, write_wav
from .augment import augment_corpus
from .clustering import ClusterAssignment, ClusteringConfig, cluster
from .errors import (EmptyCorpus, EmptyInput, FgsenseError, LengthMismatch,
                     ManifestMismatch)
from .evaluation import pool_groups, run_logo, score, validate_corpus_counts
from .features import FFT_KIND, MEL_KIND, extract_features
from .labeling import LabelingResult, assign_fg_bg
from .store import (BinaryLabel, FineLabel, InstanceRecord, Session, Store,
                    pairwise_similarity, read_labels_csv, read_store,
                    store_paths, write_labels_csv, write_store)
from .synth import SynthConfig, generate_embeddings, generate_tone_corpus

log = logging.getLogger("fgsense")

PREDICTIONS_HEADER = ["index", "predicted_binary_label", "cluster", "sbar_fg", "sbar_bg"]


def _setup_logging() -> None:
    level = {"quiet": logging.ERROR, "info": logging.INFO,
             "debug": logging.DEBUG}.get(os.environ.get("FGSENSE_LOG", ""), logging.WARNING)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


def _sha256_file(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _write_run_manifest(args: argparse.Namespace, inputs: list[Path],
                        out_base: Path, t0: float) -> None:
    config = {k: v for k, v in sorted(vars(args).items()) if k != "func"}
    config_hash = hashlib.sha256(
        json.dumps(config, sort_keys=True, default=str).encode()).hexdigest()
    manifest = {
        "command": sys.argv,
        "config_hash": config_hash,
        "seed": getattr(args, "seed", None),
        "inputs": {str(p): _sha256_file(p) for p in inputs if p.is_file()},
        "tool_version": __version__,
        "wall_time_s": round(time.perf_counter() - t0, 6),
    }
    # validate produces no data artifact; suffix its manifest so it never
    # clobbers the run manifest of the command that created the store
    suffix = ".run.json" if args.subcommand != "validate" else ".validate.run.json"
    path = out_base.with_name(out_base.name + suffix)
    with open(path, "w") as f:
        json.dump(manifest, f, indent=1)


def _write_predictions_csv(result: LabelingResult, labels: np.ndarray,
                           path: Path) -> None:
    sbar_fg = result.summaries[result.foreground_cluster].mean_similarity
    sbar_bg = result.summaries[result.background_cluster].mean_similarity
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(PREDICTIONS_HEADER)
        for i, (pred, c) in enumerate(zip(result.predictions, labels)):
            writer.writerow([i, pred.value, int(c), f"{sbar_fg:.12g}", f"{sbar_bg:.12g}"])


def _read_predictions_csv(path: Path) -> list[BinaryLabel]:
    with open(path, newline="") as f:
        return [BinaryLabel(row["predicted_binary_label"])
                for row in csv.DictReader(f)]


def _read_gold(path: Path) -> list[InstanceRecord]:
    if path.suffix == ".csv":
        return read_labels_csv(path)
    return read_store(path).records


def _print_report_table(report_dict: dict) -> None:
    per_class = report_dict["per_class"]
    print(f"{'class':<12} {'recall':>8} {'f1':>8}")
    for name in ("Foreground", "Background"):
        print(f"{name:<12} {per_class[name]['recall']:>8.4f} {per_class[name]['f1']:>8.4f}")
    print(f"{'balanced_accuracy':<21} {report_dict['balanced_accuracy']:.4f}")
    print(f"{'macro_f1':<21} {report_dict['macro_f1']:.4f}")
    if "group_macro" in report_dict:
        gm = report_dict["group_macro"]
        print(f"{'group_macro_ba':<21} {gm['balanced_accuracy']:.4f}")
        print(f"{'group_macro_f1':<21} {gm['macro_f1']:.4f}")


# ---------------------------------------------------------------------------
# subcommand handlers
# ---------------------------------------------------------------------------


def cmd_extract(args) -> list[Path]:
    wavs = sorted(Path(args.in_dir).glob("*.wav"))
    if not wavs:
        raise EmptyCorpus(f"no WAV files in {args.in_dir}")
    kind = FFT_KIND if args.features == "fft" else MEL_KIND

    def rows_for(path: Path) -> list[np.ndarray]:
        clip = load_wav(path)
        return [extract_features(w, kind).values.ravel()
                for w in frame_instances(clip)]

    if args.threads > 1:
        with ThreadPoolExecutor(max_workers=args.threads) as pool:
            per_file = list(pool.map(rows_for, wavs))
    else:
        per_file = [rows_for(p) for p in wavs]

    rows = [r for file_rows in per_file for r in file_rows]
    if not rows:
        raise EmptyCorpus("no whole seconds found in input WAVs")

    overrides = {}
    if args.labels:
        overrides = {r.index: r for r in read_labels_csv(Path(args.labels))}
    records = []
    for i in range(len(rows)):
        if i in overrides:
            o = overrides[i]
            records.append(InstanceRecord(index=i, group_id=o.group_id,
                                          session=o.session, fine_label=o.fine_label))
        else:
            records.append(InstanceRecord(
                index=i, group_id=args.group, session=Session(args.session),
                fine_label=FineLabel.AmbiguousSounds))

    store = Store(matrix=np.stack(rows).astype(np.float32), records=records, kind=kind)
    binary_path = write_store(store, args.out)
    return [binary_path]


def cmd_augment(args) -> list[Path]:
    snr_levels = [float(s) for s in args.snr.split(",") if s]
    augment_corpus(args.clean_dir, args.noise_dir, snr_levels, args.seed,
                   args.out, copies=args.copies, threads=args.threads)
    return [Path(args.out) / "manifest.csv"]


def _load_assignment_csv(path: Path) -> np.ndarray:
    with open(path, newline="") as f:
        pairs = [(int(row["index"]), int(row["cluster"]))
                 for row in csv.DictReader(f)]
    pairs.sort()
    return np.array([c for _, c in pairs], dtype=np.int64)


def _cluster_store(store: Store, args) -> ClusterAssignment:
    sim = pairwise_similarity(store.matrix)
    config = ClusteringConfig(method=args.method, seed=args.seed)
    return cluster(sim, config)


def cmd_cluster(args) -> list[Path]:
    store = read_store(args.store)
    assignment = _cluster_store(store, args)
    out = Path(args.out)
    with open(out, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["index", "cluster"])
        for i, c in enumerate(assignment.labels):
            writer.writerow([i, int(c)])
    return [out]


def cmd_label(args) -> list[Path]:
    store = read_store(args.store)
    if store.n_instances == 0:
        raise EmptyInput("store has no instances")
    labels = _load_assignment_csv(Path(args.assignments))
    if len(labels) != store.n_instances:
        raise LengthMismatch(
            f"{len(labels)} assignments vs {store.n_instances} instances")
    assignment = ClusterAssignment(labels=labels, k=int(labels.max()) + 1,
                                   objective=math.nan, method="csv")
    result = assign_fg_bg(assignment, store.matrix)
    out = Path(args.out)
    _write_predictions_csv(result, labels, out)
    return [out]


def cmd_detect(args) -> list[Path]:
    store = read_store(args.store)
    assignment = _cluster_store(store, args)
    result = assign_fg_bg(assignment, store.matrix)

    pred_path = Path(args.out_prefix + ".predictions.csv")
    _write_predictions_csv(result, assignment.labels, pred_path)

    report = score(store.binary_labels(), result.predictions,
                   groups=store.group_ids()).to_dict()
    report["method"] = args.method
    report["seed"] = args.seed
    report["clusters"] = {
        str(s.cluster_index): {"size": s.size, "mean_similarity": s.mean_similarity}
        for s in result.summaries
    }
    report["foreground_cluster"] = result.foreground_cluster
    report["gold_source"] = "store_manifest"
    report_path = Path(args.out_prefix + ".report.json")
    with open(report_path, "w") as f:
        json.dump(report, f, indent=1)
    return [pred_path, report_path]


def cmd_eval(args) -> list[Path]:
    pred = _read_predictions_csv(Path(args.pred))
    gold_records = _read_gold(Path(args.gold))
    if len(pred) != len(gold_records):
        raise LengthMismatch(f"{len(pred)} predictions vs {len(gold_records)} gold labels")
    keep = [i for i, r in enumerate(gold_records)
            if not (args.exclude_ambiguous and r.fine_label == FineLabel.AmbiguousSounds)]
    report = score([gold_records[i].binary_label for i in keep],
                   [pred[i] for i in keep],
                   groups=[gold_records[i].group_id for i in keep])
    report_dict = report.to_dict()
    report_dict["excluded_ambiguous"] = len(gold_records) - len(keep)
    _print_report_table(report_dict)
    out = Path(args.out)
    with open(out, "w") as f:
        json.dump(report_dict, f, indent=1)
    if args.group_csv:
        with open(args.group_csv, "w", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(["group_id", "balanced_accuracy", "macro_f1"])
            for g, (ba, f1) in sorted(report.group_breakdown.items()):
                writer.writerow([g, f"{ba:.6f}", f"{f1:.6f}"])
    return [out]


def cmd_pool(args) -> list[Path]:
    stores = [read_store(p) for p in args.stores.split(",")]
    group_ids = args.groups.split(",") if args.groups else None
    merged = pool_groups(stores, group_ids)
    return [write_store(merged, args.out)]


def cmd_logo(args) -> list[Path]:
    store = read_store(args.store)
    result = run_logo(store)
    payload = {
        "folds": {g: r.to_dict() for g, r in sorted(result.fold_reports.items())},
        "mean_balanced_accuracy": result.mean_balanced_accuracy,
        "mean_macro_f1": result.mean_macro_f1,
    }
    out = Path(args.out)
    with open(out, "w") as f:
        json.dump(payload, f, indent=1)
    print(f"LOGO over {len(result.fold_reports)} groups: "
          f"balanced_accuracy={result.mean_balanced_accuracy:.4f} "
          f"macro_f1={result.mean_macro_f1:.4f}")
    return [out]


def cmd_synth(args) -> list[Path]:
    if args.kind == "tones":
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        clips, labels = generate_tone_corpus(args.n, args.seed)
        label_rows = []
        for i, (clip, label) in enumerate(zip(clips, labels)):
            write_wav(clip, out_dir / f"{clip.source_id}.wav")
            label_rows.append((f"{clip.source_id}.wav", label.value))
        with open(out_dir / "labels.csv", "w", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(["file", "binary_label"])
            writer.writerows(label_rows)
        return [out_dir / "labels.csv"]

    config = SynthConfig(n_instances=args.n, dim=args.dim,
                         fg_fraction=args.fg_fraction,
                         n_prototypes=args.prototypes,
                         fg_noise_sigma=args.sigma, seed=args.seed,
                         mode=args.mode, group_id=args.group)
    store = generate_embeddings(config)
    binary_path = write_store(store, args.out)
    labels_path = binary_path.parent / (binary_path.stem + ".labels.csv")
    write_labels_csv(store.records, labels_path)
    return [binary_path, labels_path]


def cmd_validate(args) -> list[Path]:
    store = read_store(args.store)
    counts = {}
    for r in store.records:
        counts[r.fine_label.value] = counts.get(r.fine_label.value, 0) + 1
    print(f"store: {store.n_instances} instances x {store.dim} dims, kind={store.kind}")
    for name in sorted(counts):
        print(f"  {name:<18} {counts[name]}")
    if args.corpus:
        problems = validate_corpus_counts(store.records)
        if problems:
            raise ManifestMismatch("; ".join(problems))
        print("corpus counts: OK")
    binary_path, _ = store_paths(args.store)
    return [binary_path]


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fgsense",
        description="Speaker-agnostic foreground speech detection pipeline")
    parser.add_argument("--version", action="version", version=f"fgsense {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("extract", help="WAV directory -> feature store")
    p.add_argument("--in", dest="in_dir", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--features", choices=["fft", "mel"], default="fft")
    p.add_argument("--group", default="g00")
    p.add_argument("--session", choices=[s.value for s in Session],
                   default=Session.ChatIndoors.value)
    p.add_argument("--labels", default=None, help="optional labels CSV override")
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("augment", help="mix clean speech with noise at fixed SNRs")
    p.add_argument("--clean-dir", required=True)
    p.add_argument("--noise-dir", required=True)
    p.add_argument("--snr", default="3,10,20", help="comma-separated dB levels")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--copies", type=int, default=1)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_augment)

    p = sub.add_parser("cluster", help="cluster a store, write assignments CSV")
    p.add_argument("--store", required=True)
    p.add_argument("--method", choices=["kmedoids", "spectral"], default="spectral")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("label", help="apply the fg/bg rule to an assignment")
    p.add_argument("--store", required=True)
    p.add_argument("--assignments", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_label)

    p = sub.add_parser("detect", help="cluster + label in one pass")
    p.add_argument("--store", required=True)
    p.add_argument("--method", choices=["kmedoids", "spectral"], default="spectral")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-prefix", required=True)
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("eval", help="score predictions against gold labels")
    p.add_argument("--pred", required=True)
    p.add_argument("--gold", required=True, help="labels CSV or store path")
    p.add_argument("--exclude-ambiguous", action="store_true")
    p.add_argument("--out", default="eval_report.json")
    p.add_argument("--group-csv", default=None,
                   help="also write per-group metrics CSV for plotting")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("pool", help="merge stores / select groups")
    p.add_argument("--stores", required=True, help="comma-separated store paths")
    p.add_argument("--groups", default=None, help="comma-separated group ids")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_pool)

    p = sub.add_parser("logo", help="leave-one-group-out harness (baseline classifier)")
    p.add_argument("--store", required=True)
    p.add_argument("--out", default="logo_report.json")
    p.set_defaults(func=cmd_logo)

    p = sub.add_parser("synth", help="generate synthetic stores or tone WAVs")
    p.add_argument("--kind", choices=["embeddings", "tones"], default="embeddings")
    p.add_argument("--out", required=True)
    p.add_argument("--n", type=int, default=2000)
    p.add_argument("--dim", type=int, default=64)
    p.add_argument("--fg-fraction", type=float, default=0.235)
    p.add_argument("--prototypes", type=int, default=3)
    p.add_argument("--sigma", type=float, default=0.05)
    p.add_argument("--mode", choices=["null_bg", "isotropic_bg"], default="null_bg")
    p.add_argument("--group", default="g00")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("validate", help="check store integrity (and corpus counts)")
    p.add_argument("--store", required=True)
    p.add_argument("--corpus", action="store_true",
                   help="also require released-corpus instance counts")
    p.set_defaults(func=cmd_validate)

    return parser


def main(argv: list[str] | None = None) -> int:
    _setup_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    t0 = time.perf_counter()
    input_keys = ("store", "stores", "pred", "gold", "assignments", "labels")
    try:
        outputs = args.func(args)
        inputs = []
        for key in input_keys:
            value = getattr(args, key, None)
            if value:
                for part in str(value).split(","):
                    binary, manifest = store_paths(part) if not part.endswith(".csv") \
                        else (Path(part), Path(part))
                    inputs.append(binary)
                    if manifest != binary and manifest.is_file():
                        inputs.append(manifest)
        if outputs:
            _write_run_manifest(args, inputs, outputs[0], t0)
    except FgsenseError as exc:
        print(f"ERROR {exc.code}: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"ERROR ValueError: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"ERROR IOError: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
