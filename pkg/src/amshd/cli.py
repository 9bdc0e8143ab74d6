"""``amshd`` command line: mi, train, eval, bench, orthohist.

Settings resolve as flag > ``--config`` file (flat ``key=value``) > default,
and every run writes the resolved values to ``<out>/manifest.txt``.  Passing
that manifest back through ``--config`` regenerates the directory.  Wall-clock
timings go to separate ``*timing.csv`` files, which are the only outputs that
change between reruns.

Exit codes: 0 success, 2 usage, 3 data or schema problem, 4 computation error.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields

import numpy as np

from . import classifier, report
from .classifier import ModelFormatError
from .data import DataError, LabelScheme, SchemaError, SplitMode, SplitSpec, _natural_key, mutual_information
from .encoder import EncoderConfig, Variant, thermometer_encode
from .pipeline import Prepared, fit, load_dataset, prepare
from .randomness import SourceKind, generate_position_hvs, orthogonality_histogram

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_COMPUTE = 0, 2, 3, 4

TABLE_DIMS = "128,256,512,1000,2000,10000"
ALL_SOURCES = "pseudo,sobol,hadamard"


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    dataset: str = ""
    scheme: str = "binary"
    variant: str = "projection"
    source: str = "sobol"
    dim: int = 1000
    seed: int = 42
    alpha: float = 0.5
    split: str = "stratified"
    fraction: float = 0.8
    k: int = 3
    epochs: int = 0
    features: str = "positive"
    out: str = "amshd_out"
    model: str = ""
    mi_target: str = "binary"
    dims: str = TABLE_DIMS
    sources: str = ALL_SOURCES
    schemes: str = "binary,multiclass"
    workers: int = 1
    count: int = 100
    bins: int = 50

    def encoder_config(self, source: str | None = None, dim: int | None = None) -> EncoderConfig:
        return EncoderConfig(
            dim=self.dim if dim is None else dim,
            source=SourceKind.parse(source or self.source),
            variant=Variant.parse(self.variant),
            seed=self.seed,
            alpha=self.alpha,
        )

    def split_spec(self) -> SplitSpec:
        try:
            mode = SplitMode(self.split)
        except ValueError:
            raise UsageError(f"--split must be stratified or subject, got {self.split!r}") from None
        return SplitSpec(mode, self.fraction, self.seed)

    def policy(self) -> str | int:
        return self.features if self.features == "positive" else int(self.features)

    def manifest(self, command: str) -> str:
        lines = [f"# amshd {command}"]
        lines += [f"{f.name}={getattr(self, f.name)}" for f in fields(self)]
        return "\n".join(lines) + "\n"


def read_config_file(path: str) -> dict[str, str]:
    known = {f.name for f in fields(RunConfig)}
    out = {}
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as e:
        raise UsageError(f"cannot read config file: {e}") from None
    for n, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{n}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in known:
            raise UsageError(f"{path}:{n}: unknown key {key!r}")
        out[key] = value
    return out


def resolve(args: argparse.Namespace) -> RunConfig:
    values: dict[str, object] = {}
    if args.config:
        values.update(read_config_file(args.config))
    for f in fields(RunConfig):
        flag = getattr(args, f.name, None)
        if flag is not None:
            values[f.name] = flag
    cfg = RunConfig()
    for f in fields(RunConfig):
        if f.name in values:
            try:
                setattr(cfg, f.name, type(getattr(cfg, f.name))(values[f.name]))
            except ValueError:
                raise UsageError(f"bad value for {f.name}: {values[f.name]!r}") from None
    return cfg


def _write_manifest(cfg: RunConfig, command: str) -> None:
    os.makedirs(cfg.out, exist_ok=True)
    with open(os.path.join(cfg.out, "manifest.txt"), "w") as fh:
        fh.write(cfg.manifest(command))


def _require_dataset(cfg: RunConfig) -> None:
    if not cfg.dataset:
        raise UsageError("no dataset given (use --dataset or dataset= in --config)")


def _csv_list(text: str, what: str) -> list[str]:
    items = [s.strip() for s in text.split(",") if s.strip()]
    if not items:
        raise UsageError(f"empty {what} list")
    seen, out = set(), []
    for it in items:
        if it in seen:
            print(f"warning: duplicate {what} entry {it!r} ignored", file=sys.stderr)
            continue
        seen.add(it)
        out.append(it)
    return out


# -- commands ---------------------------------------------------------------------


def cmd_mi(cfg: RunConfig) -> int:
    _require_dataset(cfg)
    ds = load_dataset(cfg.dataset)
    if cfg.mi_target == "raw":
        y, adapt = ds.ams_scores, True
    else:
        y, adapt = ds.labels(LabelScheme.parse(cfg.mi_target)), False
    scores = mutual_information(ds.features, y, k=cfg.k, adapt_small_classes=adapt)
    _write_manifest(cfg, "mi")
    report.write_mi(scores, ds.feature_names, os.path.join(cfg.out, "mi_scores.csv"), os.path.join(cfg.out, "mi_scores.md"))
    for j in scores.ranking():
        print(f"{ds.feature_names[j]:>8s}  {scores.scores[j]:.3f}")
    return EXIT_OK


def _prepared(cfg: RunConfig, scheme: str | None = None) -> Prepared:
    _require_dataset(cfg)
    return prepare(load_dataset(cfg.dataset), LabelScheme.parse(scheme or cfg.scheme), cfg.split_spec())


def cmd_train(cfg: RunConfig) -> int:
    prep = _prepared(cfg)
    model = fit(prep, cfg.encoder_config(), k=cfg.k, policy=cfg.policy(), epochs=cfg.epochs)
    _write_manifest(cfg, "train")
    path = cfg.model or os.path.join(cfg.out, "model.amshd")
    classifier.save(model, path)
    names = [prep.dataset.feature_names[i] for i in model.config.selected_features]
    print(f"trained {len(model.labels)} classes, D={model.config.dim}, features: {', '.join(names)} -> {path}")
    return EXIT_OK


def _prediction_rows(prep: Prepared, pred: np.ndarray) -> list[dict]:
    names = prep.scheme.class_names
    enc = prep.dataset.encoder
    rows = []
    for i, p in zip(prep.test_idx, pred):
        r = prep.dataset.records[i]
        t = int(prep.labels[i])
        rows.append(
            dict(subject=r.subject, event=r.event, time=r.time, ams_score=r.ams_score,
                 true=names[t], predicted=names[int(p)], correct=int(t == int(p)),
                 _key=(_natural_key(r.subject), enc.event[r.event], enc.time[r.time], int(i)))
        )
    rows.sort(key=lambda d: d["_key"])
    return rows


def cmd_eval(cfg: RunConfig) -> int:
    path = cfg.model or os.path.join(cfg.out, "model.amshd")
    if not os.path.exists(path):
        raise DataError(f"model file not found: {path}")
    model = classifier.load(path)
    scheme = LabelScheme.parse(cfg.scheme)
    if model.scheme is not scheme:
        raise UsageError(f"model was trained for the {model.scheme.name.lower()} scheme, not {cfg.scheme}")
    prep = _prepared(cfg)
    rep = classifier.evaluate(model, prep.X_test, prep.y_test)
    _write_manifest(cfg, "eval")
    report.write_eval(rep, scheme.class_names, cfg.out)
    report.write_predictions(_prediction_rows(prep, rep.predictions), os.path.join(cfg.out, "predictions.csv"))
    report.write_table(
        [dict(samples=len(prep.y_test), seconds=f"{rep.inference_seconds:.6f}")],
        ["samples", "seconds"],
        os.path.join(cfg.out, "timing.csv"),
    )
    print(f"accuracy {rep.accuracy:.4f}  macro-F1 {rep.macro_f1:.4f}  ({len(prep.y_test)} test samples)")
    return EXIT_OK


def _bench_cell(cfg: RunConfig, scheme: str, source: str, dim: int) -> dict:
    row = dict(scheme=scheme, source=source, dim=dim, accuracy="", macro_f1="", status="ok")
    t0 = time.perf_counter()
    try:
        prep = _prepared(cfg, scheme)
        model = fit(prep, cfg.encoder_config(source, dim), k=cfg.k, policy=cfg.policy(), epochs=cfg.epochs)
        rep = classifier.evaluate(model, prep.X_test, prep.y_test)
        row.update(accuracy=report.fmt(rep.accuracy, 4), macro_f1=report.fmt(rep.macro_f1, 4))
    except Exception as e:  # a failing cell is reported, the sweep goes on
        row["status"] = f"error: {type(e).__name__}: {e}"
    row["seconds"] = f"{time.perf_counter() - t0:.3f}"
    return row


def cmd_bench(cfg: RunConfig) -> int:
    _require_dataset(cfg)
    schemes = _csv_list(cfg.schemes, "scheme")
    sources = _csv_list(cfg.sources, "source")
    try:
        dims = [int(d) for d in _csv_list(cfg.dims, "dim")]
        for s in schemes:
            LabelScheme.parse(s)
        for s in sources:
            SourceKind.parse(s)
    except ValueError as e:
        raise UsageError(str(e)) from None
    cells = [(sc, so, d) for sc in schemes for so in sources for d in dims]
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            rows = list(pool.map(_bench_cell, [cfg] * len(cells), *zip(*cells)))
    else:
        rows = [_bench_cell(cfg, *c) for c in cells]
    _write_manifest(cfg, "bench")
    cols = ["scheme", "source", "dim", "accuracy", "macro_f1", "status"]
    report.write_table(rows, cols, os.path.join(cfg.out, "bench.csv"), os.path.join(cfg.out, "bench.md"))
    report.write_table(rows, ["scheme", "source", "dim", "seconds"], os.path.join(cfg.out, "bench_timing.csv"))
    errors = sum(r["status"] != "ok" for r in rows)
    for r in rows:
        print(f"{r['scheme']:>10s} {r['source']:>8s} D={r['dim']:<6d} {r['accuracy'] or '-':>6s}  {r['status']}")
    if errors:
        print(f"{errors} of {len(rows)} cells failed", file=sys.stderr)
    return EXIT_OK


def cmd_orthohist(cfg: RunConfig) -> int:
    if cfg.count < 2:
        raise UsageError("--count must be at least 2")
    dims = [int(d) for d in _csv_list(cfg.dims, "dim")]
    source = SourceKind.parse(cfg.source)
    _write_manifest(cfg, "orthohist")
    summary = []
    for D in dims:
        pos = generate_position_hvs(source, D, cfg.count, cfg.seed)
        feats = [thermometer_encode(f, D) for f in np.linspace(0.0, 1.0, cfg.count)]
        for kind, hvs in (("position", pos), ("feature", feats)):
            h = orthogonality_histogram(hvs, cfg.bins)
            report.write_histogram(h, os.path.join(cfg.out, f"ortho_{kind}_D{D}.csv"))
            summary.append(dict(kind=kind, source=source.name.lower(), dim=D,
                                mean=report.fmt(h.mean), std=report.fmt(h.std), pairs=h.n_pairs))
            print(f"{kind:>8s} D={D:<6d} mean={h.mean:.4f} std={h.std:.4f}")
    report.write_table(summary, ["kind", "source", "dim", "mean", "std", "pairs"], os.path.join(cfg.out, "ortho_summary.csv"))
    return EXIT_OK


COMMANDS = {"mi": cmd_mi, "train": cmd_train, "eval": cmd_eval, "bench": cmd_bench, "orthohist": cmd_orthohist}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key=value file (a previous manifest works)")
    common.add_argument("--dataset")
    common.add_argument("--scheme", choices=["binary", "multiclass"])
    common.add_argument("--variant", choices=["projection", "symbolic"])
    common.add_argument("--source", choices=["pseudo", "sobol", "hadamard"])
    common.add_argument("--dim", type=int)
    common.add_argument("--seed", type=int)
    common.add_argument("--alpha", type=float)
    common.add_argument("--split", choices=["stratified", "subject"])
    common.add_argument("--fraction", type=float)
    common.add_argument("--epochs", type=int)
    common.add_argument("--out")
    common.add_argument("--model", help="model file (default <out>/model.amshd)")
    common.add_argument("--k", type=int, help="MI neighbour count")
    common.add_argument("--features", help="'positive' or a top-k count")
    common.add_argument("--mi-target", dest="mi_target", choices=["binary", "multiclass", "raw"])
    common.add_argument("--dims", help="comma-separated D list (bench, orthohist)")
    common.add_argument("--sources", help="comma-separated source list (bench)")
    common.add_argument("--schemes", help="comma-separated scheme list (bench)")
    common.add_argument("--workers", type=int)
    common.add_argument("--count", type=int, help="number of HVs (orthohist)")
    common.add_argument("--bins", type=int)
    parser = argparse.ArgumentParser(prog="amshd", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    try:
        cfg = resolve(args)
        return COMMANDS[args.command](cfg)
    except UsageError as e:
        print(f"amshd: usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (SchemaError, DataError, ModelFormatError, OSError) as e:
        print(f"amshd: data error: {e}", file=sys.stderr)
        return EXIT_DATA
    except (ValueError, ArithmeticError, RuntimeError) as e:
        print(f"amshd: computation error: {e}", file=sys.stderr)
        return EXIT_COMPUTE


if __name__ == "__main__":
    sys.exit(main())
