"""Command-line entry point ``sva-equiv``.

Exit codes: 0 success, 1 I/O or schema failure, 2 configuration or input
syntax error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path

from .errors import CheckSyntaxError, ClassifyError, ConfigError, SvaError
from .pec import CheckConfig, check_equivalence
from .pec.verdict import BACKENDS

EXIT_OK, EXIT_IO, EXIT_CONFIG = 0, 1, 2
SVA_KEYS = ("reference_sva", "sva", "assertion", "reference")

log = logging.getLogger("sva_equiv")


class UsageError(Exception):
    """Bad configuration or flags; maps to exit code 2."""


# -- input helpers ----------------------------------------------------------


def _read_svas(path: str) -> list:
    """(id, text) pairs from a JSONL file of rows or a file with one SVA per line."""
    p = Path(path)
    out = []
    lines = p.read_text(encoding="utf-8").splitlines()
    if p.suffix == ".jsonl":
        for n, raw in enumerate(lines, start=1):
            if not raw.strip():
                continue
            obj = json.loads(raw)
            text = next((obj[k] for k in SVA_KEYS if isinstance(obj.get(k), str)), None)
            if text is None:
                raise SvaError(f"{path}:{n}: no assertion field among {SVA_KEYS}")
            out.append((str(obj.get("id", n)), text))
    else:
        out = [(str(n), raw) for n, raw in enumerate(lines, start=1) if raw.strip()]
    return out


def _sources(args) -> list:
    if args.sva is not None:
        return [("1", args.sva)]
    if args.input is None:
        raise UsageError("give --sva or --input")
    return _read_svas(args.input)


def load_config(path) -> dict:
    """Parse a ``key = value`` file; blank lines and ``#`` comments are ignored."""
    out = {}
    for n, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{n}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


# -- subcommands ------------------------------------------------------------


def cmd_classify(args) -> int:
    from .tcl import class_histogram, classify

    rows = _sources(args)
    for rid, text in rows:
        try:
            print(f"{rid}\t{classify(text)}")
        except ClassifyError as exc:
            print(f"{rid}\tERROR\t{exc}")
    if args.histogram:
        hist = class_histogram([t for _, t in rows])
        print(json.dumps({"counts": hist.as_dict(), "errors": len(hist.errors)}, sort_keys=True))
    return EXIT_OK


def cmd_normalize(args) -> int:
    from .normalize import normalize

    rows = _sources(args)
    texts, reports = [], []
    for rid, text in rows:
        after, rep = normalize(text, args.profile, args.collapse)
        texts.append(after)
        reports.append({"id": rid, **rep.to_dict()})
    body = "\n".join(texts) + "\n"
    if args.out:
        Path(args.out).write_text(body, encoding="utf-8")
    else:
        sys.stdout.write(body)
    if args.report:
        Path(args.report).write_text(json.dumps(reports, indent=2) + "\n", encoding="utf-8")
    return EXIT_OK


def cmd_wrap(args) -> int:
    from .wrapper import synthesize_wrapper

    rows = _sources(args)
    failed = 0
    if args.out_dir:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
    for rid, text in rows:
        try:
            module = synthesize_wrapper(text, args.profile).text()
        except SvaError as exc:
            failed += 1
            print(f"{rid}: {exc}", file=sys.stderr)
            continue
        if args.out_dir:
            (out / f"{rid}.sv").write_text(module, encoding="utf-8")
        else:
            sys.stdout.write(module)
    return EXIT_OK if not failed or len(rows) > 1 else EXIT_CONFIG


def _check_config(depth, timeout, backend, max_enum_bits) -> CheckConfig:
    try:
        return CheckConfig(depth_K=depth, timeout=timeout, backend=backend, max_enum_bits=max_enum_bits)
    except ConfigError as exc:
        raise UsageError(str(exc)) from exc


def cmd_check(args) -> int:
    cfg = _check_config(args.depth, args.timeout, args.backend, args.max_enum_bits)
    try:
        verdict = check_equivalence(args.cand, args.ref, cfg, normalize=not args.no_normalize)
    except CheckSyntaxError as exc:
        print(json.dumps({"error": "syntax", "side": exc.side, "message": str(exc)}))
        return EXIT_CONFIG
    print(json.dumps(verdict.to_dict(), indent=2, sort_keys=True))
    return EXIT_OK


def cmd_metrics(args) -> int:
    from .metrics import TaskOutcome, pass_at_k_table

    tasks = []
    for n, raw in enumerate(Path(args.input).read_text(encoding="utf-8").splitlines(), start=1):
        if not raw.strip():
            continue
        try:
            obj = json.loads(raw)
            tasks.append(TaskOutcome(str(obj["task_id"]), int(obj["n"]), int(obj["c"])))
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            print(f"{args.input}:{n}: {exc}", file=sys.stderr)
            return EXIT_IO
    if not tasks:
        print(f"{args.input}: no tasks", file=sys.stderr)
        return EXIT_IO
    table = pass_at_k_table(tasks, args.k, args.replicates, args.seed, args.level)
    print(json.dumps({"tasks": len(tasks), "level": args.level, "pass_at_k": table}, indent=2, sort_keys=True))
    return EXIT_OK


EVAL_DEFAULTS = {
    "input": None,
    "depth": 20,
    "timeout": 60.0,
    "workers": 1,
    "backend": "enumerate",
    "max_enum_bits": 20,
    "report": None,
    "dump": None,
    "denominator": "all",
    "replicates": 10_000,
    "seed": 0,
    "self_check": False,
    "no_normalize": False,
    "no_figures": False,
}
_BOOL_KEYS = {"self_check", "no_normalize", "no_figures"}


def _coerce(key: str, value):
    if value is None or not isinstance(value, str):
        return value
    default = EVAL_DEFAULTS[key]
    try:
        if key in _BOOL_KEYS:
            low = value.lower()
            if low not in ("1", "0", "true", "false", "yes", "no"):
                raise ValueError(value)
            return low in ("1", "true", "yes")
        if isinstance(default, int):
            return int(value)
        if isinstance(default, float):
            return float(value)
    except ValueError as exc:
        raise UsageError(f"bad value for {key}: {value!r}") from exc
    return value


def resolve_eval_options(args) -> dict:
    """Defaults, then the config file, then explicit flags."""
    opts = dict(EVAL_DEFAULTS)
    if args.config:
        try:
            cfg = load_config(args.config)
        except OSError as exc:
            raise UsageError(f"cannot read config: {exc}") from exc
        unknown = sorted(set(cfg) - set(EVAL_DEFAULTS))
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(unknown)}")
        for k, v in cfg.items():
            opts[k] = _coerce(k, v)
    for k in EVAL_DEFAULTS:
        v = getattr(args, k, None)
        if v is not None and v is not False:
            opts[k] = v
    if opts["input"] is None:
        raise UsageError("eval needs --input")
    if opts["denominator"] not in ("all", "supported"):
        raise UsageError(f"denominator must be all or supported, got {opts['denominator']!r}")
    if opts["workers"] < 1:
        raise UsageError("workers must be at least 1")
    if opts["replicates"] < 1:
        raise UsageError("replicates must be positive")
    return opts


def cmd_eval(args) -> int:
    from .harness import ingest, report, run_batch, summary_text, write_csv

    opts = resolve_eval_options(args)
    cfg = _check_config(opts["depth"], opts["timeout"], opts["backend"], opts["max_enum_bits"])
    errors: list = []
    try:
        rows = ingest(opts["input"], errors)
    except OSError as exc:
        print(f"cannot read {opts['input']}: {exc}", file=sys.stderr)
        return EXIT_IO
    for e in errors:
        print(f"{opts['input']}: {e}", file=sys.stderr)
    if not rows:
        print(f"{opts['input']}: no valid rows", file=sys.stderr)
        return EXIT_IO

    start = time.monotonic()
    results = run_batch(rows, cfg, opts["workers"], not opts["no_normalize"], opts["self_check"])
    rep = report(results, opts["denominator"], replicates=opts["replicates"], seed=opts["seed"])
    elapsed = time.monotonic() - start

    sys.stdout.write(summary_text(rep))
    print(f"checked {sum(len(r.candidates) for r in results)} candidates in {elapsed:.2f}s", file=sys.stderr)
    try:
        for key in ("report", "dump"):
            if opts[key]:
                Path(opts[key]).parent.mkdir(parents=True, exist_ok=True)
        if opts["report"]:
            Path(opts["report"]).write_text(rep.to_json() + "\n", encoding="utf-8")
        if opts["dump"]:
            write_csv(results, opts["dump"])
        if not opts["no_figures"] and (opts["dump"] or opts["report"]):
            from .plots import render_figures

            for path in render_figures(rep, opts["dump"] or opts["report"]):
                print(f"wrote {path}", file=sys.stderr)
    except OSError as exc:
        print(f"cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


# -- parser -----------------------------------------------------------------


def _add_source(p) -> None:
    src = p.add_mutually_exclusive_group()
    src.add_argument("--sva", help="a single assertion")
    src.add_argument("--input", help="JSONL rows or one assertion per line")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sva-equiv", description="Bounded SVA equivalence checking and evaluation")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="temporal complexity class of each assertion")
    _add_source(p)
    p.add_argument("--histogram", action="store_true", help="also print class counts as JSON")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("normalize", help="apply the normalization rules")
    _add_source(p)
    p.add_argument("--profile", choices=("lint", "pec"), default="lint")
    p.add_argument("--collapse", choices=("lower", "upper"), default="lower")
    p.add_argument("--out", help="write normalized text here instead of stdout")
    p.add_argument("--report", help="write per-row rule reports as JSON")
    p.set_defaults(func=cmd_normalize)

    p = sub.add_parser("wrap", help="synthesize a wrapper module")
    _add_source(p)
    p.add_argument("--out-dir", help="write <row_id>.sv files here")
    p.add_argument("--profile", choices=("lint", "pec"), default=None, help="normalize before wrapping")
    p.set_defaults(func=cmd_wrap)

    p = sub.add_parser("check", help="compare one candidate with one reference")
    p.add_argument("--ref", required=True)
    p.add_argument("--cand", required=True)
    p.add_argument("--depth", type=int, default=20)
    p.add_argument("--timeout", type=float, default=60.0)
    p.add_argument("--backend", choices=BACKENDS, default="enumerate")
    p.add_argument("--max-enum-bits", type=int, default=20)
    p.add_argument("--no-normalize", action="store_true")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("metrics", help="pass@k with bootstrap intervals")
    p.add_argument("--input", required=True, help="JSONL with task_id, n, c")
    p.add_argument("--k", type=int, nargs="+", default=[1, 5, 10])
    p.add_argument("--replicates", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--level", type=float, default=0.95)
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("eval", help="evaluate a JSONL file of rows")
    p.add_argument("--input")
    p.add_argument("--config", help="key=value file; flags override it")
    p.add_argument("--depth", type=int)
    p.add_argument("--timeout", type=float)
    p.add_argument("--workers", type=int)
    p.add_argument("--backend", choices=BACKENDS)
    p.add_argument("--max-enum-bits", type=int)
    p.add_argument("--report", help="report JSON path")
    p.add_argument("--dump", help="per-candidate CSV path")
    p.add_argument("--denominator", choices=("all", "supported"))
    p.add_argument("--replicates", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--self-check", action="store_true", help="use each reference as its own candidate")
    p.add_argument("--no-normalize", action="store_true")
    p.add_argument("--no-figures", action="store_true")
    p.set_defaults(func=cmd_eval)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except SvaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
