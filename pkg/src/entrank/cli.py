"""Batch command line.

Subcommands: build-dist, ratio, crop, profile, scatter, ingest-check.
A config file of key=value lines can mirror any flag; explicit CLI flags
win. Exit codes: 0 success, 2 validation error, 3 resource-guard refusal,
4 I/O error.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import dataclasses
import json
import os
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .augment import CROP_METHODS, CompressorCache, CropConfig, compress_subchunk, crop_sequence
from .entropy import mean_block_entropy, monte_carlo_profiles, write_profile_csv
from .errors import ResourceGuardError, ValidationError
from .partition import (
    DEFAULT_MAX_PARTITIONS,
    cache_path,
    calculate_ratio,
    get_distribution,
)
from .seqcore import BlockSpec, encode, gc_content

RESERVED_COLS = ("id", "sequence", "label")


@dataclass
class DatasetRecord:
    id: str
    sequence: str
    label: int
    meta: dict = field(default_factory=dict)


def _read_labels_sidecar(path: str) -> dict[str, int]:
    labels: dict[str, int] = {}
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"id", "label"} <= set(reader.fieldnames):
            raise ValidationError(f"{path}: label sidecar needs columns id,label")
        for i, row in enumerate(reader, start=2):
            rid = (row["id"] or "").strip()
            if not rid:
                raise ValidationError(f"{path} line {i}: empty id")
            if rid in labels:
                raise ValidationError(f"{path} line {i}: duplicate id {rid!r}")
            labels[rid] = _parse_label(row["label"], f"{path} line {i}")
    return labels


def _parse_label(raw, where: str) -> int:
    try:
        label = int(str(raw).strip())
    except (TypeError, ValueError):
        raise ValidationError(f"{where}: label {raw!r} is not an integer") from None
    if label < 0:
        raise ValidationError(f"{where}: label must be >= 0")
    return label


def _validate_sequence(text: str, where: str, allow_padding: bool) -> None:
    if not text:
        raise ValidationError(f"{where}: empty sequence")
    try:
        encode(text, allow_padding=allow_padding)
    except ValidationError as exc:
        raise ValidationError(f"{where}: {exc}") from None


def _read_csv_records(path: str, sequence_col: str, label_col: str, allow_padding: bool) -> list[DatasetRecord]:
    records: list[DatasetRecord] = []
    seen: set[str] = set()
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        cols = reader.fieldnames or []
        missing = [c for c in (sequence_col, label_col) if c not in cols]
        if missing:
            raise ValidationError(f"{path}: missing column(s) {', '.join(missing)}; header has {cols}")
        for i, row in enumerate(reader, start=2):
            where = f"{path} line {i}"
            if any(v is None for v in row.values()):
                raise ValidationError(f"{where}: wrong number of fields")
            rid = (row.get("id") or f"row{i - 1}").strip()
            if rid in seen:
                raise ValidationError(f"{where}: duplicate id {rid!r}")
            seen.add(rid)
            seq = (row[sequence_col] or "").strip().upper()
            _validate_sequence(seq, where, allow_padding)
            label = _parse_label(row[label_col], where)
            meta = {
                k: v
                for k, v in row.items()
                if k not in (sequence_col, label_col, "id") and k is not None
            }
            records.append(DatasetRecord(rid, seq, label, meta))
    return records


def _read_fasta_records(
    path: str, labels_path: str | None, allow_padding: bool, require_labels: bool
) -> list[DatasetRecord]:
    labels = _read_labels_sidecar(labels_path) if labels_path else None
    if labels is None and require_labels:
        raise ValidationError("FASTA ingestion needs a label sidecar (--labels id,label CSV)")
    records: list[DatasetRecord] = []
    seen: set[str] = set()
    rid, chunks, line_no = None, [], 0

    def flush():
        if rid is None:
            return
        seq = "".join(chunks).upper()
        _validate_sequence(seq, f"{path} record {rid!r}", allow_padding)
        if labels is not None:
            if rid not in labels:
                raise ValidationError(f"{path}: record {rid!r} missing from label sidecar")
            label = labels[rid]
        else:
            label = 0
        records.append(DatasetRecord(rid, seq, label))

    with open(path) as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            if line.startswith(">"):
                flush()
                rid = line[1:].split()[0] if line[1:].split() else ""
                if not rid:
                    raise ValidationError(f"{path} line {line_no}: empty FASTA header")
                if rid in seen:
                    raise ValidationError(f"{path} line {line_no}: duplicate id {rid!r}")
                seen.add(rid)
                chunks = []
            else:
                if rid is None:
                    raise ValidationError(f"{path} line {line_no}: sequence data before any header")
                chunks.append(line)
    flush()
    return records


def ingest(
    path: str,
    fmt: str = "csv",
    *,
    sequence_col: str = "sequence",
    label_col: str = "label",
    labels_path: str | None = None,
    allow_padding: bool = False,
    require_labels: bool = True,
) -> list[DatasetRecord]:
    """Load a dataset as validated records (ACGT-only unless allow_padding)."""
    if fmt == "csv":
        return _read_csv_records(path, sequence_col, label_col, allow_padding)
    if fmt == "fasta":
        return _read_fasta_records(path, labels_path, allow_padding, require_labels)
    raise ValidationError(f"unknown format {fmt!r}; choose csv or fasta")


@contextlib.contextmanager
def _open_out(path: str | None):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _fmt(x: float, full_precision: bool) -> str:
    return format(x, ".17g") if full_precision else format(x, ".6f")


# ---------------------------------------------------------------------------
# subcommands


def cmd_ingest_check(opts) -> int:
    records = ingest(
        opts.dataset,
        opts.format,
        sequence_col=opts.sequence_col,
        label_col=opts.label_col,
        labels_path=opts.labels,
        allow_padding=opts.allow_padding,
        require_labels=False,
    )
    lengths = sorted(len(r.sequence) for r in records)
    hist: dict[int, int] = {}
    for r in records:
        hist[r.label] = hist.get(r.label, 0) + 1
    print(f"records: {len(records)}")
    if lengths:
        print(f"length_min: {lengths[0]}")
        print(f"length_max: {lengths[-1]}")
        print(f"length_median: {lengths[len(lengths) // 2]}")
    print("labels: " + ", ".join(f"{k}:{v}" for k, v in sorted(hist.items())))
    return 0


def cmd_build_dist(opts) -> int:
    path = cache_path(opts.cache_dir, opts.T, opts.n, opts.N)
    hit = os.path.exists(path)
    t0 = time.monotonic()
    dist = get_distribution(
        opts.T, opts.n, opts.N, cache_dir=opts.cache_dir, max_partitions=opts.max_partitions
    )
    elapsed = time.monotonic() - t0
    print(f"path: {path}")
    print(f"cache: {'hit' if hit else f'built in {elapsed:.3f}s'}")
    print(f"distinct_entropy_values: {dist.num_entropy_values}")
    print(f"total: {dist.total}")
    print(f"min_entropy: {dist.min_entropy:.6f}")
    print(f"max_entropy: {dist.max_entropy:.6f}")
    return 0


def _load_for_scoring(opts, require_labels=True):
    return ingest(
        opts.dataset,
        opts.format,
        sequence_col=opts.sequence_col,
        label_col=opts.label_col,
        labels_path=opts.labels,
        allow_padding=opts.allow_padding,
        require_labels=require_labels,
    )


def cmd_ratio(opts) -> int:
    records = _load_for_scoring(opts)
    dist = get_distribution(
        opts.T, opts.n, opts.N, cache_dir=opts.cache_dir, max_partitions=opts.max_partitions
    )
    skipped = 0
    with _open_out(opts.out) as out:
        out.write("id,label,S,R,GC\n")
        for rec in records:
            seq = encode(rec.sequence, allow_padding=opts.allow_padding)
            if len(seq) < opts.T:
                skipped += 1
                continue
            s = mean_block_entropy(seq, BlockSpec(opts.T, opts.n)).value
            r = calculate_ratio(seq, opts.T, opts.n, n_blocks=opts.N, dist=dist)
            gc = gc_content(seq)
            out.write(
                f"{rec.id},{rec.label},{_fmt(s, opts.full_precision)},"
                f"{_fmt(r.value, opts.full_precision)},{_fmt(gc, opts.full_precision)}\n"
            )
    if skipped:
        print(f"warning: skipped {skipped} record(s) shorter than T={opts.T}", file=sys.stderr)
    return 0


def _crop_config(opts) -> CropConfig:
    return CropConfig(
        target_len=opts.target_len,
        num_candidates=opts.num_candidates,
        offset_ratio=opts.offset_ratio,
        alpha=opts.alpha,
        beta=opts.beta,
        pick=opts.pick,
        T=opts.T,
        n=opts.n,
        seed=opts.seed,
    )


def cmd_crop(opts) -> int:
    records = _load_for_scoring(opts)
    cfg = _crop_config(opts)
    dist = None
    if opts.method == "ratio":
        if cfg.T is None:
            raise ValidationError("ratio crop needs --T")
        dist = get_distribution(
            cfg.T, cfg.n, 1, cache_dir=opts.cache_dir, max_partitions=opts.max_partitions
        )
    comp_cache = CompressorCache() if opts.method == "kolmogorov" else None
    streams = np.random.SeedSequence(opts.seed).spawn(len(records)) if records else []

    failures: list[str] = []
    rows: list[tuple[DatasetRecord, str]] = []
    for rec, stream in zip(records, streams):
        try:
            seq = encode(rec.sequence, allow_padding=opts.allow_padding)
            out_seq = crop_sequence(
                seq,
                opts.method,
                cfg,
                dist=dist,
                cache=comp_cache,
                rng=np.random.default_rng(stream),
            )
            rows.append((rec, out_seq.decode()))
        except ValidationError as exc:
            failures.append(f"{rec.id}: {exc}")
    if failures:
        for msg in failures[:20]:
            print(f"error: {msg}", file=sys.stderr)
        raise ValidationError(f"crop failed for {len(failures)} record(s)")

    meta_cols: list[str] = []
    for rec in records:
        for k in rec.meta:
            if k not in meta_cols:
                meta_cols.append(k)
    with _open_out(opts.out) as out:
        writer = csv.writer(out)
        writer.writerow(["id", "sequence", "label", *meta_cols])
        for rec, cropped in rows:
            writer.writerow([rec.id, cropped, rec.label, *(rec.meta.get(k, "") for k in meta_cols)])

    if opts.out not in (None, "-"):
        sidecar = opts.out + ".provenance.json"
        payload = {
            "method": opts.method,
            "config": dataclasses.asdict(cfg),
            "seed": opts.seed,
            "source": opts.dataset,
            "records": len(rows),
        }
        with open(sidecar, "w") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return 0


def cmd_profile(opts) -> int:
    rows = monte_carlo_profiles(
        opts.L,
        opts.num_sequences,
        opts.sweep,
        n=opts.n,
        n_max=opts.n_max,
        seed=opts.seed,
    )
    with _open_out(opts.out) as out:
        write_profile_csv(rows, out, full_precision=opts.full_precision)
    return 0


def cmd_scatter(opts) -> int:
    records = _load_for_scoring(opts)
    dist = None
    if opts.x_axis == "ratio":
        dist = get_distribution(
            opts.T, opts.n, 1, cache_dir=opts.cache_dir, max_partitions=opts.max_partitions
        )
    skipped = 0
    with _open_out(opts.out) as out:
        out.write("id,label,x,gc\n")
        for rec in records:
            seq = encode(rec.sequence, allow_padding=opts.allow_padding)
            if opts.x_axis == "kolmogorov":
                x = compress_subchunk(seq)[0] / len(seq)
            elif opts.x_axis == "entropy":
                x = _kernels.ngram_entropy(seq.tokens, opts.n)
            else:
                if len(seq) < opts.T:
                    skipped += 1
                    continue
                x = calculate_ratio(seq, opts.T, opts.n, dist=dist).value
            gc = gc_content(seq)
            out.write(
                f"{rec.id},{rec.label},{_fmt(x, opts.full_precision)},"
                f"{_fmt(gc, opts.full_precision)}\n"
            )
    if skipped:
        print(f"warning: skipped {skipped} record(s) shorter than T={opts.T}", file=sys.stderr)
    return 0


# ---------------------------------------------------------------------------
# argument plumbing

_CONVERTERS = {
    "T": int,
    "n": int,
    "N": int,
    "L": int,
    "target_len": int,
    "num_candidates": int,
    "offset_ratio": float,
    "alpha": float,
    "beta": float,
    "pick": str,
    "seed": int,
    "cache_dir": str,
    "format": str,
    "out": str,
    "method": str,
    "x_axis": str,
    "sweep": str,
    "num_sequences": int,
    "n_max": int,
    "max_partitions": int,
    "sequence_col": str,
    "label_col": str,
    "labels": str,
    "allow_padding": lambda v: str(v).lower() in ("1", "true", "yes"),
    "full_precision": lambda v: str(v).lower() in ("1", "true", "yes"),
}


def _read_config(path: str) -> dict:
    values: dict = {}
    with open(path) as fh:
        for ln_no, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValidationError(f"{path} line {ln_no}: expected key=value")
            key, _, val = line.partition("=")
            dest = key.strip().replace("-", "_")
            if dest not in _CONVERTERS:
                raise ValidationError(f"{path} line {ln_no}: unknown key {key.strip()!r}")
            try:
                values[dest] = _CONVERTERS[dest](val.strip())
            except ValueError:
                raise ValidationError(f"{path} line {ln_no}: bad value for {key.strip()!r}") from None
    return values


_DATASET_DEFAULTS = {
    "format": "csv",
    "labels": None,
    "sequence_col": "sequence",
    "label_col": "label",
    "allow_padding": False,
}

_DEFAULTS = {
    "ingest-check": dict(_DATASET_DEFAULTS),
    "build-dist": {
        "T": None,
        "n": 1,
        "N": 1,
        "cache_dir": ".entrank-cache",
        "max_partitions": DEFAULT_MAX_PARTITIONS,
    },
    "ratio": {
        **_DATASET_DEFAULTS,
        "T": None,
        "n": 1,
        "N": 1,
        "cache_dir": None,
        "max_partitions": DEFAULT_MAX_PARTITIONS,
        "out": "-",
        "full_precision": False,
    },
    "crop": {
        **_DATASET_DEFAULTS,
        "method": "basic",
        "target_len": None,
        "n": 1,
        "T": None,
        "num_candidates": 8,
        "offset_ratio": 1.0,
        "alpha": 1.0,
        "beta": 0.0,
        "pick": "max",
        "seed": 0,
        "cache_dir": None,
        "max_partitions": DEFAULT_MAX_PARTITIONS,
        "out": "-",
    },
    "profile": {
        "sweep": "n",
        "L": 1000,
        "num_sequences": 50,
        "n": 1,
        "n_max": 50,
        "seed": 0,
        "out": "-",
        "full_precision": False,
    },
    "scatter": {
        **_DATASET_DEFAULTS,
        "x_axis": "ratio",
        "n": 1,
        "T": None,
        "cache_dir": None,
        "max_partitions": DEFAULT_MAX_PARTITIONS,
        "out": "-",
        "full_precision": False,
    },
}


def _add_dataset_args(p):
    p.add_argument("dataset", help="CSV (sequence,label columns) or FASTA file")
    p.add_argument("--format", choices=("csv", "fasta"))
    p.add_argument("--labels", help="id,label sidecar CSV (FASTA input)")
    p.add_argument("--sequence-col", dest="sequence_col")
    p.add_argument("--label-col", dest="label_col")
    p.add_argument("--allow-padding", dest="allow_padding", action="store_true",
                   help="accept '.' padding characters (augmented files)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="entrank",
        description="Entropy rank ratio toolkit: exact block-entropy distributions, "
                    "rank-ratio scoring and complexity-guided cropping.",
    )
    parser.add_argument("--config", help="key=value file mirroring flags; CLI wins")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest-check", help="validate a dataset and print a summary",
                       argument_default=argparse.SUPPRESS)
    _add_dataset_args(p)
    p.set_defaults(func=cmd_ingest_check)

    p = sub.add_parser("build-dist", help="build (or load) an exact entropy distribution",
                       argument_default=argparse.SUPPRESS)
    p.add_argument("--T", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--N", type=int)
    p.add_argument("--cache-dir", dest="cache_dir")
    p.add_argument("--max-partitions", dest="max_partitions", type=int)
    p.set_defaults(func=cmd_build_dist)

    p = sub.add_parser("ratio", help="per-record entropy, rank ratio and GC content",
                       argument_default=argparse.SUPPRESS)
    _add_dataset_args(p)
    p.add_argument("--T", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--N", type=int)
    p.add_argument("--cache-dir", dest="cache_dir")
    p.add_argument("--max-partitions", dest="max_partitions", type=int)
    p.add_argument("--out")
    p.add_argument("--full-precision", dest="full_precision", action="store_true")
    p.set_defaults(func=cmd_ratio)

    p = sub.add_parser("crop", help="emit an augmented dataset", argument_default=argparse.SUPPRESS)
    _add_dataset_args(p)
    p.add_argument("--method", choices=CROP_METHODS)
    p.add_argument("--target-len", dest="target_len", type=int)
    p.add_argument("--num-candidates", dest="num_candidates", type=int)
    p.add_argument("--offset-ratio", dest="offset_ratio", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--pick", choices=("max", "min"))
    p.add_argument("--T", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--cache-dir", dest="cache_dir")
    p.add_argument("--max-partitions", dest="max_partitions", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_crop)

    p = sub.add_parser("profile", help="Monte-Carlo mean-entropy sweep CSV",
                       argument_default=argparse.SUPPRESS)
    p.add_argument("--sweep", choices=("N", "n"))
    p.add_argument("--L", type=int)
    p.add_argument("--num-sequences", dest="num_sequences", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--n-max", dest="n_max", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.add_argument("--full-precision", dest="full_precision", action="store_true")
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser("scatter", help="per-record complexity-vs-GC export",
                       argument_default=argparse.SUPPRESS)
    _add_dataset_args(p)
    p.add_argument("--x-axis", dest="x_axis", choices=("kolmogorov", "entropy", "ratio"))
    p.add_argument("--T", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--cache-dir", dest="cache_dir")
    p.add_argument("--max-partitions", dest="max_partitions", type=int)
    p.add_argument("--out")
    p.add_argument("--full-precision", dest="full_precision", action="store_true")
    p.set_defaults(func=cmd_scatter)

    return parser


def _resolve(args: argparse.Namespace) -> argparse.Namespace:
    merged = dict(_DEFAULTS[args.command])
    if getattr(args, "config", None):
        config = _read_config(args.config)
        merged.update({k: v for k, v in config.items() if k in merged or k in _CONVERTERS})
    explicit = {k: v for k, v in vars(args).items() if k not in ("config",)}
    merged.update(explicit)
    if args.command in ("build-dist", "ratio") and merged.get("T") is None:
        raise ValidationError(f"{args.command} needs --T (flag or config file)")
    if args.command == "crop" and merged.get("target_len") is None:
        raise ValidationError("crop needs --target-len (flag or config file)")
    if args.command == "scatter" and merged.get("x_axis") == "ratio" and merged.get("T") is None:
        raise ValidationError("scatter --x-axis ratio needs --T")
    return argparse.Namespace(**merged)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        opts = _resolve(args)
        return args.func(opts) or 0
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ResourceGuardError as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
