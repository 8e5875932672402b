"""Command-line orchestration: reduce, train, score, eval, bench-sampling,
info. Everything is deterministic; identical inputs and flags produce
byte-identical outputs. Exit codes: 0 ok, 2 config error, 3 data/format
error, 4 numerical error.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from pathlib import Path

import numpy as np

from ._kernels import backend
from .bank import MemoryBank, aggregate_image, load, make_meta, save, score
from .coreset import CoresetConfig, as_rate, greedy_sample
from .costmodel import CostQuery, predict_policy
from .errors import ConfigError, DataError, StreambankError
from .incremental import BufferPolicy, IncrementalSampler, IncrementalSamplerConfig
from .linalg import DTYPES
from .npyio import BatchStream
from .reducer import IncrementalReducer, ReducerConfig, reduce_batch

log = logging.getLogger("streambank")

SCORE_CHUNK = 1024


def _fmt(x: float) -> str:
    return repr(float(x))


def _emit(text: str, output) -> None:
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _rechunk(batches, size: int):
    """Regroup (k, *) column blocks into (k, size) chunks, last one short."""
    pending, have = [], 0
    for block in batches:
        while block.shape[1]:
            take = min(size - have, block.shape[1])
            pending.append(block[:, :take])
            have += take
            block = block[:, take:]
            if have == size:
                yield np.concatenate(pending, axis=1)
                pending, have = [], 0
    if have:
        yield np.concatenate(pending, axis=1)


def _run_reducer(args, precision: str):
    stream = BatchStream(args.input, args.batch_size)
    reducer = IncrementalReducer(
        ReducerConfig(k=args.k, batch_capacity=args.batch_size, precision=precision)
    )
    for batch in stream:
        reducer.ingest_batch(batch)
    if reducer.total_vectors == 0:
        raise DataError("input contains no vectors")
    basis, rotations = reducer.finalize()
    return stream, reducer, basis, rotations


def _pick_precision(args) -> str:
    if args.precision:
        return args.precision
    first = BatchStream(args.input, 1).dtype
    return "single" if first == np.float32 else "double"


def cmd_train(args) -> int:
    problems = []
    try:
        rate = as_rate(args.sample_rate)
    except ConfigError as exc:
        problems.append(str(exc))
        rate = None
    if args.buffer is not None and not args.incremental_sampling:
        problems.append("--buffer requires --incremental-sampling")
    try:
        policy = BufferPolicy.parse(args.buffer or "no")
    except ConfigError as exc:
        problems.append(str(exc))
        policy = None
    if args.k < 1:
        problems.append(f"k must be >= 1, got {args.k}")
    if args.batch_size < 1:
        problems.append(f"batch size must be >= 1, got {args.batch_size}")
    sample_batch = args.sample_batch or args.batch_size
    if sample_batch < 1:
        problems.append(f"sample batch must be >= 1, got {sample_batch}")
    if not problems and rate is not None:
        total = sum(h.n_vectors for h in BatchStream(args.input, max(1, args.batch_size)).headers)
        if total == 0:
            problems.append("input contains no vectors")
        elif math.floor(rate * total) == 0:
            problems.append(
                f"sample rate {rate} yields an empty bank for {total} vectors"
            )
    if problems:
        raise ConfigError("; ".join(problems))

    precision = _pick_precision(args)
    stream, reducer, basis, rotations = _run_reducer(args, precision)
    n_seen = reducer.total_vectors
    reduced = (reduce_batch(rot, dec) for rot, dec in zip(rotations, reducer.archive))

    if args.incremental_sampling:
        sampler = IncrementalSampler(
            IncrementalSamplerConfig(rate=rate, batch_size=sample_batch, policy=policy)
        )
        for chunk in _rechunk(reduced, sample_batch):
            sampler.observe_batch(chunk)
        drained = sampler.flush()
        coords, counter, peak = drained.coords, drained.counter, drained.peak_stored
        label = policy.label()
    else:
        everything = np.concatenate(list(reduced), axis=1)
        result = greedy_sample(everything, CoresetConfig(rate=rate))
        coords = everything[:, result.indices]
        counter, peak = result.counter, n_seen
        label = "all"

    meta = make_meta(
        k=args.k,
        k_effective=basis.k_effective,
        m=basis.m,
        precision=precision,
        n_b=args.batch_size,
        rate=float(rate),
        buffer_policy=label,
        vectors_seen=n_seen,
    )
    bank = MemoryBank(
        basis=basis, coords=np.ascontiguousarray(coords, dtype=DTYPES[precision]), meta=meta
    )
    _save_bank(bank, args.output)
    summary = {
        "vectors_seen": n_seen,
        "k_effective": basis.k_effective,
        "bank_size": bank.size,
        "anchor_comparisons": counter.anchor_comparisons,
        "greedy_comparisons": counter.greedy_comparisons,
        "peak_stored": peak,
    }
    print(json.dumps(summary, sort_keys=True))
    return 0


def _save_bank(bank: MemoryBank, output) -> None:
    outdir = Path(output)
    created = not outdir.exists()
    try:
        save(bank, outdir)
    except BaseException:
        for name in ("basis.npy", "svals.npy", "bank.npy", "meta.json"):
            (outdir / name).unlink(missing_ok=True)
        if created and outdir.exists():
            try:
                outdir.rmdir()
            except OSError:
                pass
        raise


def cmd_reduce(args) -> int:
    precision = _pick_precision(args)
    stream, reducer, basis, rotations = _run_reducer(args, precision)
    coords = np.concatenate(
        [reduce_batch(rot, dec) for rot, dec in zip(rotations, reducer.archive)], axis=1
    )
    outdir = Path(args.output)
    outdir.mkdir(parents=True, exist_ok=True)
    from .npyio import write_array, write_matrix

    dtype = DTYPES[precision]
    write_array(outdir / "basis.npy", basis.u, dtype=dtype)
    write_array(outdir / "svals.npy", basis.s, dtype=dtype)
    write_matrix(outdir / "reduced.npy", coords, dtype=dtype)
    print(
        json.dumps(
            {
                "vectors_seen": reducer.total_vectors,
                "k_effective": basis.k_effective,
                "m": basis.m,
            },
            sort_keys=True,
        )
    )
    return 0


def _load_groups(path, total: int):
    try:
        manifest = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: corrupt JSON") from exc
    images = manifest.get("images") if isinstance(manifest, dict) else None
    if not isinstance(images, list):
        raise DataError(f"{path}: expected an object with an 'images' list")
    groups = []
    for entry in images:
        try:
            ident, start, count = str(entry["id"]), int(entry["start"]), int(entry["count"])
        except (KeyError, TypeError, ValueError) as exc:
            raise DataError(f"{path}: malformed image entry {entry!r}") from exc
        if start < 0 or count < 1 or start + count > total:
            raise DataError(
                f"{path}: image {ident!r} range [{start}, {start + count}) "
                f"outside the {total} scored vectors"
            )
        groups.append((ident, start, count))
    return groups


def cmd_score(args) -> int:
    if not args.bank:
        raise ConfigError("score requires --bank")
    bank = load(args.bank)
    stream = BatchStream(args.input, SCORE_CHUNK)
    if stream.m != bank.basis.m:
        raise DataError(
            f"queries have m={stream.m} but the bank was built with m={bank.basis.m}"
        )
    scores: list[np.ndarray] = []
    nearest: list[np.ndarray] = []
    for batch in stream:
        report = score(bank, batch)
        scores.append(report.per_vector_scores)
        nearest.append(report.nearest_index)
    all_scores = np.concatenate(scores) if scores else np.empty(0)
    all_nearest = np.concatenate(nearest) if nearest else np.empty(0, dtype=np.int64)

    lines = ["vector_index\tscore\tnearest_index"]
    for i in range(all_scores.shape[0]):
        lines.append(f"{i}\t{_fmt(all_scores[i])}\t{int(all_nearest[i])}")
    if args.groups:
        groups = _load_groups(args.groups, all_scores.shape[0])
        lines.append("image_id\timage_score")
        for ident, start, count in groups:
            lines.append(f"{ident}\t{_fmt(aggregate_image(all_scores[start : start + count]))}")
    _emit("\n".join(lines) + "\n", args.output)
    return 0


def _parse_score_file(path):
    rows = {}
    section = None
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        cells = line.split("\t")
        if cells[0] == "vector_index":
            section = "vector"
            continue
        if cells[0] == "image_id":
            section = "image"
            continue
        if section == "vector":
            if len(cells) != 3:
                raise DataError(f"{path}:{lineno}: expected 3 columns")
            rows[cells[0]] = float(cells[1])
        elif section == "image":
            if len(cells) != 2:
                raise DataError(f"{path}:{lineno}: expected 2 columns")
            rows[cells[0]] = float(cells[1])
        else:
            raise DataError(f"{path}:{lineno}: missing header")
    return rows


def _parse_labels(path):
    pairs = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        cells = line.split("\t")
        if cells[0] in ("id", "vector_index", "image_id"):
            continue
        if len(cells) != 2:
            raise DataError(f"{path}:{lineno}: expected 'id<TAB>label'")
        if cells[1] not in ("0", "1"):
            raise DataError(f"{path}:{lineno}: label must be 0 or 1, got {cells[1]!r}")
        pairs.append((cells[0], int(cells[1])))
    return pairs


def cmd_eval(args) -> int:
    if not args.labels:
        raise ConfigError("eval requires --labels")
    scored = _parse_score_file(args.input[0])
    pairs = _parse_labels(args.labels)
    if not pairs:
        raise DataError(f"{args.labels}: no labeled rows")
    missing = [ident for ident, _ in pairs if ident not in scored]
    if missing:
        raise DataError(
            f"labels misaligned with scores: no score for id(s) {', '.join(missing[:5])}"
        )
    values = np.array([scored[ident] for ident, _ in pairs])
    labels = np.array([lab for _, lab in pairs])
    from .metrics import auroc

    result = {
        "auroc": auroc(values, labels),
        "n_pos": int(np.count_nonzero(labels == 1)),
        "n_neg": int(np.count_nonzero(labels == 0)),
    }
    text = json.dumps(result, sort_keys=True) + "\n"
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def _synthetic_vectors(n: int, dims: int) -> np.ndarray:
    rng = np.random.default_rng(715517)  # fixed: the CLI has no random behavior
    return rng.standard_normal((dims, n))


def cmd_bench(args) -> int:
    rate = as_rate(args.sample_rate)
    if args.input:
        stream = BatchStream(args.input, SCORE_CHUNK)
        data = np.concatenate(list(stream), axis=1).astype(np.float64)
    else:
        if not args.n:
            raise ConfigError("bench-sampling needs --input or --n")
        data = _synthetic_vectors(args.n, args.dims)
    n = data.shape[1]
    target = CoresetConfig(rate=rate).resolve(n)
    batchless = n * target
    batches = [int(b) for b in str(args.sample_batch or n).split(",")]
    policies = [BufferPolicy.parse(p) for p in str(args.buffer).split(",")]

    lines = [
        "N\tB\tr\tpolicy\tmeasured_comparisons\tpredicted_comparisons"
        "\tratio_vs_batchless\tpeak_stored"
    ]
    for b in batches:
        for policy in policies:
            if n % b:
                log.warning("N=%d not divisible by B=%d; closed forms do not apply", n, b)
            sampler = IncrementalSampler(
                IncrementalSamplerConfig(rate=rate, batch_size=b, policy=policy)
            )
            for chunk in _rechunk(iter([data]), b):
                sampler.observe_batch(chunk)
            drained = sampler.flush()
            measured = drained.counter.greedy_comparisons
            predicted = predict_policy(
                CostQuery(n_total=n, batch=b, rate=rate),
                policy=policy.kind,
                factor=policy.factor,
            )
            lines.append(
                f"{n}\t{b}\t{args.sample_rate}\t{policy.label()}\t{measured}\t{predicted}"
                f"\t{_fmt(measured / batchless)}\t{drained.peak_stored}"
            )
    _emit("\n".join(lines) + "\n", args.output)
    return 0


def cmd_info(args) -> int:
    if not args.bank:
        raise ConfigError("info requires --bank")
    loaded = load(args.bank)
    print(
        json.dumps(
            {"meta": loaded.meta, "bank_size": loaded.size, "kernel_backend": backend()},
            sort_keys=True,
        )
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="streambank",
        description="Streaming SVD reduction and coreset memory banks for anomaly scoring.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, inputs=True):
        if inputs:
            p.add_argument("--input", nargs="+", required=True, help="input .npy file(s)")
        p.add_argument("--output", help="output path")
        p.add_argument("--precision", choices=sorted(DTYPES), help="defaults to the input dtype")

    p = sub.add_parser("reduce", help="stream batches through the incremental reducer")
    common(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--batch-size", type=int, required=True)
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("train", help="reduce then sample a memory bank")
    common(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--batch-size", type=int, required=True)
    p.add_argument("--sample-rate", required=True)
    p.add_argument("--sample-batch", type=int, help="sampling batch B (default: --batch-size)")
    p.add_argument("--incremental-sampling", action="store_true")
    p.add_argument("--buffer", help="all | no | <factor> (with --incremental-sampling; default no)")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("score", help="score query vectors against a bank")
    common(p)
    p.add_argument("--bank", required=True, help="bank directory from train")
    p.add_argument("--groups", help="manifest JSON mapping image ids to row ranges")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("eval", help="AUROC of a score file against labels")
    common(p)
    p.add_argument("--labels", required=True, help="TSV of id<TAB>label rows")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("bench-sampling", help="comparison-count benchmark TSV")
    common(p, inputs=False)
    p.add_argument("--input", nargs="+", help="optional real input .npy file(s)")
    p.add_argument("--n", type=int, help="synthetic vector count when no --input")
    p.add_argument("--dims", type=int, default=8, help="synthetic dimensionality")
    p.add_argument("--sample-rate", required=True)
    p.add_argument("--sample-batch", help="comma-separated B values (default: N)")
    p.add_argument("--buffer", default="no", help="comma-separated policies: all | no | <factor>")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("info", help="describe a bank directory")
    p.add_argument("--bank", required=True)
    p.set_defaults(func=cmd_info)

    return parser


def main(argv=None) -> int:
    level = os.environ.get("STREAMBANK_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING))
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except StreambankError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return DataError.exit_code


if __name__ == "__main__":
    sys.exit(main())
