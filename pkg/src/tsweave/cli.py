"""Command line front-end.

Exit codes: 0 success, 1 I/O failure, 2 invalid input or config,
3 numerical failure inside a stage. Failures print one JSON object on a
single line to standard error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import warnings
from pathlib import Path

from . import svg
from .config import ConfigError, OutputOptions, format_series, load_document, parse_document, read_csv, write_csv
from .core import average
from .datasets import BUILTIN
from .errors import NumericalError, PartialGroupWarning, StageError, ValidationError
from .pipeline import Weaver
from .transform import RNG_ALGORITHM

DATASETS_ENV = "TSWEAVE_DATASETS"

STAGE_TITLES = {
    "oversample": "Oversampled",
    "integral_match": "Matched",
    "smooth": "Smoothed",
    "repeat": "Repeated",
    "trend": "Trended",
    "noise": "Noised",
}


class CliError(Exception):
    def __init__(self, code, kind, message):
        super().__init__(message)
        self.code = code
        self.kind = kind


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(2, "usage", f"{self.prog}: {message}")


def _registry(args):
    reg = BUILTIN
    for path in (os.environ.get(DATASETS_ENV), getattr(args, "datasets_file", None)):
        if path:
            reg = reg.extended(path)
    return reg


# --------------------------------------------------------------------------
# building a config from flags


def _flags_to_raw(args) -> dict:
    if args.input_csv:
        source = {"csv": str(Path(args.input_csv).resolve())}
    else:
        source = {"dataset": args.dataset or "tiktok"}
    stages = []
    if args.oversample is not None:
        params = {"n": args.oversample, "strategy": args.strategy}
        for key in ("alpha", "lam", "gamma"):
            if getattr(args, key) is not None:
                params[key] = getattr(args, key)
        stages.append({"kind": "oversample", "params": params})
    if args.integral_match or args.kappa is not None:
        stages.append({"kind": "integral_match", "params": {} if args.kappa is None else {"kappa": args.kappa}})
    if args.smooth is not None:
        s = None if args.smooth == "auto" else _float(args.smooth, "--smooth")
        stages.append({"kind": "smooth", "params": {"s": s}})
    if args.repeat_k is not None:
        stages.append({"kind": "repeat", "params": {"k": args.repeat_k}})
    if args.trend is not None:
        stages.append({"kind": "trend", "params": {"expr": args.trend}})
    if args.snr_db is not None or args.std is not None:
        params = {}
        if args.snr_db is not None:
            params["snr_db"] = args.snr_db
        if args.std is not None:
            params["std"] = args.std
        if args.noise_seed is not None:
            params["seed"] = args.noise_seed
        stages.append({"kind": "noise", "params": params})
    raw = {"input": source, "stages": stages}
    if args.seed is not None:
        raw["seed"] = args.seed
    return raw


def _float(text, flag):
    try:
        return float(text)
    except ValueError:
        raise CliError(2, "usage", f"{flag} expects a number or 'auto', got {text!r}") from None


def _document(args):
    registry = _registry(args)
    if args.config:
        doc = load_document(args.config, registry)
    else:
        doc = parse_document(_flags_to_raw(args), Path.cwd(), registry)
    out = doc.output
    return doc, OutputOptions(
        csv=Path(args.output) if args.output else out.csv,
        json=Path(args.json) if args.json else out.json,
        svg=Path(args.svg) if getattr(args, "svg", None) else out.svg,
        average_n=args.average_n if args.average_n is not None else out.average_n,
    )


def _default_average_n(doc, requested):
    if requested is not None:
        return requested
    for stage in doc.pipeline.stages:
        if stage.kind == "oversample":
            return stage.params["n"]
    return None


def _averaged(ts, n):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", PartialGroupWarning)
        return average(ts, n)


def _replayable(doc, wv) -> dict:
    raw = {"input": doc.raw["input"], "stages": [d.to_dict() for d in wv.log]}
    if wv.seed is not None:
        raw["seed"] = wv.seed
    return raw


# --------------------------------------------------------------------------
# commands


def cmd_datasets(args):
    reg = _registry(args)
    if args.action == "list":
        for name in reg.names():
            print(name)
    else:
        if args.name is None:
            raise CliError(2, "usage", "datasets show needs a dataset name")
        print(",".join(repr(v) for v in reg[args.name].values))
    return 0


def cmd_generate(args):
    doc, out = _document(args)
    wv = Weaver(doc.pipeline.load_input(), seed=doc.pipeline.seed)
    for stage in doc.pipeline.stages:
        wv.apply_stage(stage)
    text = format_series(wv.get())
    if out.csv:
        out.csv.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    if out.json:
        meta = {"config": _replayable(doc, wv), "rng": RNG_ALGORITHM, "points": len(wv.get())}
        out.json.write_text(json.dumps(meta, indent=2) + "\n", encoding="utf-8")
    if out.svg:
        panels = [svg.Panel("Original", wv.get_original(), steps=True), svg.Panel("Processed", wv.get())]
        n = _default_average_n(doc, out.average_n)
        if n is not None:
            panels.append(svg.Panel("Averaged", _averaged(wv.get(), n), steps=True))
        titled = [svg.Panel(t, p.series, p.steps) for t, p in zip(svg.lettered([p.title for p in panels]), panels)]
        out.svg.write_text(svg.render(titled), encoding="utf-8")
    return 0


def cmd_plot(args):
    doc, out = _document(args)
    target = out.svg or (Path(args.output) if args.output else None)
    if target is None:
        raise CliError(2, "usage", "plot needs an SVG path (--svg, --output or output.svg in the config)")
    wv = Weaver(doc.pipeline.load_input(), seed=doc.pipeline.seed)
    panels = [("Original", wv.get(), True)]
    for stage in doc.pipeline.stages:
        wv.apply_stage(stage)
        panels.append((STAGE_TITLES[stage.kind], wv.get(), False))
    n = _default_average_n(doc, out.average_n)
    if n is not None:
        panels.append(("Averaged", _averaged(wv.get(), n), True))
    titles = svg.lettered([t for t, _, _ in panels])
    rendered = svg.render([svg.Panel(title, ts, steps) for title, (_, ts, steps) in zip(titles, panels)])
    target.write_text(rendered, encoding="utf-8")
    return 0


def cmd_average(args):
    ts = read_csv(args.input)
    result = average(ts, args.n)
    if args.output:
        write_csv(result, args.output)
    else:
        sys.stdout.write(format_series(result))
    return 0


# --------------------------------------------------------------------------


def _pipeline_flags(p):
    p.add_argument("--config", help="YAML or JSON config document")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--dataset", help="bundled dataset name (default tiktok)")
    src.add_argument("--input-csv", help="input series as x,y CSV")
    p.add_argument("--oversample", type=int, metavar="N", help="samples per original interval")
    p.add_argument("--strategy", default="exp_adaptive")
    p.add_argument("--alpha", type=float)
    p.add_argument("--lam", type=float)
    p.add_argument("--gamma", type=float)
    p.add_argument("--integral-match", action="store_true")
    p.add_argument("--kappa", type=float)
    p.add_argument("--smooth", metavar="S", help="residual bound, or 'auto'")
    p.add_argument("--repeat-k", type=int, metavar="K")
    p.add_argument("--trend", metavar="EXPR", help="expression in t, e.g. 'sin(6.2831853*t)+t'")
    p.add_argument("--snr-db", type=float)
    p.add_argument("--std", type=float)
    p.add_argument("--noise-seed", type=int)
    p.add_argument("--seed", type=int, help="global seed for derived stage seeds")
    p.add_argument("--datasets-file", help="extra datasets file (name,v0,...,v23 per line)")
    p.add_argument("-o", "--output", help="output CSV path (plot: SVG path)")
    p.add_argument("--json", help="write stage log and seeds as JSON")
    p.add_argument("--svg", help="write an SVG figure")
    p.add_argument("--average-n", type=int, metavar="N", help="group size of the averaged panel")


def build_parser():
    parser = _Parser(prog="tsweave", description="Semi-synthetic time series from averaged measurements.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("datasets", help="list or show bundled datasets")
    p.add_argument("action", choices=["list", "show"])
    p.add_argument("name", nargs="?")
    p.add_argument("--datasets-file")
    p.set_defaults(func=cmd_datasets)

    p = sub.add_parser("generate", help="run a pipeline and write the series")
    _pipeline_flags(p)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("plot", help="run a pipeline and draw one panel per stage")
    _pipeline_flags(p)
    p.set_defaults(func=cmd_plot)

    p = sub.add_parser("average", help="average a uniformly sampled CSV series")
    p.add_argument("--input", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_average)
    return parser


def _classify(exc):
    cause = exc.cause if isinstance(exc, StageError) else exc
    if isinstance(cause, NumericalError):
        return 3, "numerical"
    if isinstance(cause, ConfigError):
        return 2, "config"
    if isinstance(cause, ValidationError):
        return 2, "validation"
    return 1, "io"


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except CliError as exc:
        code, kind, message = exc.code, exc.kind, str(exc)
    except (ValidationError, NumericalError, StageError) as exc:
        (code, kind), message = _classify(exc), str(exc)
    except OSError as exc:
        code, kind, message = 1, "io", f"{exc.strerror or exc}: {exc.filename}" if exc.filename else str(exc)
    print(json.dumps({"error": kind, "code": code, "message": message}), file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
