"""Command-line interface: summarize, fit, select, diagnose, simulate, cross-apply.

Every command writes its primary outputs plus a run manifest recording the
command, input digests, parameters and produced files. Outputs are fully
determined by inputs and flags, so reruns are byte-identical.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
from pathlib import Path

from . import __version__
from .diagnostics import DEFAULT_R2_MARGIN, diagnose, emit_plot_data
from .estimation import FitResult, fit
from .histogram import ParseError, RankHistogram, parse_dataset, summarize
from .models import DEFAULT_DOMAIN_CEILING, ModelKind, ModelParams
from .selection import (
    DEFAULT_ENSEMBLE,
    best_params_dict,
    best_params_tsv,
    cross_apply,
    select,
    selection_table_dict,
    selection_table_tsv,
)
from .simulation import SimulationConfig, recovery_experiment, undersampling_probability

DEFAULT_SEED = 12345
KIND_NAMES = tuple(k.value for k in ModelKind)


def _die(message: str, code: int = 1):
    print(f"error: {message}", file=sys.stderr)
    sys.exit(code)


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        _die(str(exc))


def _sha256(path: str) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _dump_json(obj, path: Path):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(obj, fh, indent=2)
        fh.write("\n")


def _write_text(text: str, path: Path):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _loglik_json(value: float) -> dict:
    # JSON numbers cannot express -inf; ship the string form plus a flag
    if value == -math.inf:
        return {"loglik": "-inf", "finite": False}
    return {"loglik": value, "finite": True}


def _write_manifest(path: Path, command: str, inputs: list[str],
                    parameters: dict, outputs: list[Path]):
    manifest = {
        "command": command,
        "inputs": [{"path": p, "sha256": _sha256(p)} for p in inputs],
        "parameters": parameters,
        "version": __version__,
        "outputs": [str(p) for p in outputs],
    }
    _dump_json(manifest, path)


def _parse_input(args) -> RankHistogram:
    text = _read_text(args.input)
    try:
        hist = parse_dataset(text, delimiter=args.delimiter, label=args.input)
    except ParseError as exc:
        _die(str(exc))
    for note in hist.warnings:
        print(f"note: {note}", file=sys.stderr)
    return hist


def _ensemble(names_csv: str | None):
    if not names_csv:
        return DEFAULT_ENSEMBLE
    kinds = []
    for name in names_csv.split(","):
        name = name.strip()
        if name not in KIND_NAMES:
            _die(f"unknown model kind {name!r}; valid kinds: {', '.join(KIND_NAMES)}")
        kinds.append(ModelKind(name))
    return tuple(kinds)


def cmd_summarize(args) -> int:
    hist = _parse_input(args)
    stats = summarize(hist).as_dict()
    out = Path(args.out)
    _dump_json(stats, out)
    if args.format == "tsv":
        keys = list(stats)
        print("\t".join(keys))
        print("\t".join(repr(stats[k]) if isinstance(stats[k], float) else str(stats[k])
                        for k in keys))
    else:
        print(json.dumps(stats, indent=2))
    _write_manifest(Path(str(out) + ".manifest.json"), "summarize", [args.input],
                    {"input": args.input, "delimiter": args.delimiter,
                     "format": args.format, "out": str(out)}, [out])
    return 0


def cmd_fit(args) -> int:
    hist = _parse_input(args)
    try:
        result = fit(ModelKind(args.model), hist, N=args.N)
    except ValueError as exc:
        _die(str(exc))
    out = Path(args.out)
    _dump_json(result.as_dict(), out)
    p = result.params
    scalar = f"alpha={p.alpha!r}" if p.alpha is not None else f"q={p.q!r}"
    print(f"{p.kind.value}: {scalar} R={p.R} N={p.N} loglik={result.loglik!r} "
          f"converged={result.converged}")
    for note in result.warnings:
        print(f"note: {note}", file=sys.stderr)
    _write_manifest(Path(str(out) + ".manifest.json"), "fit", [args.input],
                    {"input": args.input, "model": args.model, "N": args.N,
                     "delimiter": args.delimiter, "out": str(out)}, [out])
    return 0


def cmd_select(args) -> int:
    hist = _parse_input(args)
    try:
        table = select(hist, N=args.N, ensemble=_ensemble(args.ensemble))
    except ValueError as exc:
        _die(str(exc))
    out_dir = Path(args.out_dir)
    outputs = [
        (out_dir / "selection.tsv", selection_table_tsv(table)),
        (out_dir / "best_params.tsv", best_params_tsv(table)),
    ]
    for path, text in outputs:
        _write_text(text, path)
    json_outputs = [
        (out_dir / "selection.json", selection_table_dict(table)),
        (out_dir / "best_params.json", best_params_dict(table)),
    ]
    for path, obj in json_outputs:
        _dump_json(obj, path)
    if args.format == "json":
        print(json.dumps(selection_table_dict(table), indent=2))
    else:
        print(selection_table_tsv(table), end="")
    print(f"best by AICc: {table.best_by_aicc.value}", file=sys.stderr)
    print(f"best by BIC:  {table.best_by_bic.value}", file=sys.stderr)
    produced = [p for p, _ in outputs] + [p for p, _ in json_outputs]
    _write_manifest(out_dir / "run_manifest.json", "select", [args.input],
                    {"input": args.input, "N": args.N, "ensemble": args.ensemble,
                     "delimiter": args.delimiter, "format": args.format,
                     "out_dir": str(out_dir)}, produced)
    return 0


def cmd_diagnose(args) -> int:
    hist = _parse_input(args)
    kinds = _ensemble(args.ensemble)
    try:
        fits = [fit(k, hist, N=args.N) for k in kinds]
        report = diagnose(hist, fits, margin=args.margin)
    except ValueError as exc:
        _die(str(exc))
    out_dir = Path(args.out_dir)
    files = emit_plot_data(hist, fits, out_dir)
    report_path = out_dir / "diagnostic_report.json"
    _dump_json(report.as_dict(), report_path)
    print(json.dumps(report.as_dict(), indent=2))
    _write_manifest(out_dir / "run_manifest.json", "diagnose", [args.input],
                    {"input": args.input, "N": args.N, "margin": args.margin,
                     "ensemble": args.ensemble, "delimiter": args.delimiter,
                     "out_dir": str(out_dir)}, files + [report_path])
    return 0


def _model_from_flags(args) -> ModelParams:
    if args.model is None:
        _die("simulate needs --model (or a --config file)")
    kind = ModelKind(args.model)
    N = args.N
    R = args.R if args.R is not None else N
    if kind.is_zeta:
        if args.alpha is None:
            _die(f"{kind.value} needs --alpha")
        return ModelParams(kind=kind, R=R, N=N, alpha=args.alpha)
    if args.q is None:
        _die(f"{kind.value} needs --q")
    return ModelParams(kind=kind, R=R, N=N, q=args.q)


def cmd_simulate(args) -> int:
    inputs = []
    try:
        if args.config:
            inputs.append(args.config)
            cfg_data = json.loads(_read_text(args.config))
            mode = cfg_data.get("mode", args.mode)
            model = ModelParams.from_dict(cfg_data["model"])
            seed = int(cfg_data.get("seed", DEFAULT_SEED))
            trials = int(cfg_data.get("trials", args.trials))
            sizes = cfg_data.get("sample_sizes", None)
            n = cfg_data.get("n", args.n)
            ensemble = tuple(ModelKind(k) for k in cfg_data["ensemble"]) \
                if "ensemble" in cfg_data else _ensemble(args.ensemble)
        else:
            mode = args.mode
            model = _model_from_flags(args)
            seed = args.seed if args.seed is not None else DEFAULT_SEED
            trials = args.trials
            sizes = [float(s) for s in args.sizes.split(",")] if args.sizes else None
            n = args.n
            ensemble = _ensemble(args.ensemble)
    except (ValueError, KeyError) as exc:
        _die(f"bad simulation configuration: {exc}")

    out = Path(args.out)
    try:
        if mode == "undersampling":
            if n is None:
                _die("undersampling mode needs --n (draws per trial)")
            est = undersampling_probability(model, int(n), trials, seed)
            payload = {
                "mode": "undersampling",
                "model": model.as_dict(),
                "n": int(n),
                "trials": trials,
                "seed": seed,
                "estimate": est.estimate,
                "half_width": est.half_width,
            }
        elif mode == "recovery":
            if not sizes:
                _die("recovery mode needs --sizes (comma-separated draw counts)")
            cfg = SimulationConfig(seed=seed, trials=trials,
                                   sample_sizes=tuple(sizes), model=model)
            stats = recovery_experiment(cfg, ensemble=ensemble)
            payload = {"mode": "recovery", **stats.as_dict()}
        else:
            _die(f"unknown simulate mode {mode!r}")
    except ValueError as exc:
        _die(str(exc))
    _dump_json(payload, out)
    print(json.dumps(payload, indent=2))
    _write_manifest(Path(str(out) + ".manifest.json"), "simulate", inputs,
                    {"mode": mode, "model": model.as_dict(), "seed": seed,
                     "trials": trials, "sizes": sizes, "n": n,
                     "out": str(out)}, [out])
    return 0


def cmd_cross_apply(args) -> int:
    fit_path = Path(args.fit)
    if not fit_path.exists():
        _die(f"fit file not found: {fit_path}")
    try:
        fitted = FitResult.from_dict(json.loads(fit_path.read_text(encoding="utf-8")))
    except (ValueError, KeyError) as exc:
        _die(f"unreadable fit file {fit_path}: {exc}")
    hist = _parse_input(args)
    value = cross_apply(fitted, hist)
    payload = {
        "fit": fitted.params.as_dict(),
        "input": args.input,
        **_loglik_json(value),
    }
    out = Path(args.out)
    _dump_json(payload, out)
    print(json.dumps(payload, indent=2))
    _write_manifest(Path(str(out) + ".manifest.json"), "cross-apply",
                    [str(fit_path), args.input],
                    {"fit": str(fit_path), "input": args.input,
                     "delimiter": args.delimiter, "out": str(out)}, [out])
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rankfit",
        description="Fit right-truncated zeta/geometric models to rank-frequency "
                    "data, select among them with AICc/BIC, and probe them with "
                    "diagnostics and simulation.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_input(p):
        p.add_argument("--input", required=True, help="rank-frequency dataset (label<SEP>frequency per line)")
        p.add_argument("--delimiter", default="\t", help="field separator (default: tab)")

    p = sub.add_parser("summarize", help="frequency moments of a dataset")
    add_input(p)
    p.add_argument("--out", default="summary.json", help="summary JSON path")
    p.add_argument("--format", choices=("json", "tsv"), default="json")
    p.set_defaults(func=cmd_summarize)

    p = sub.add_parser("fit", help="maximum-likelihood fit of one model kind")
    add_input(p)
    p.add_argument("--model", required=True, choices=KIND_NAMES)
    p.add_argument("--N", type=int, default=DEFAULT_DOMAIN_CEILING,
                   help="domain ceiling (default: 24)")
    p.add_argument("--out", default="fit.json", help="fit JSON path")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("select", help="fit the ensemble and rank it by AICc/BIC")
    add_input(p)
    p.add_argument("--N", type=int, default=DEFAULT_DOMAIN_CEILING)
    p.add_argument("--ensemble", default=None,
                   help="comma-separated model kinds (default: all four)")
    p.add_argument("--out-dir", default="selection_out", help="output directory")
    p.add_argument("--format", choices=("tsv", "json"), default="tsv",
                   help="stdout rendering of the selection table")
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("diagnose", help="scale diagnostics and plot data")
    add_input(p)
    p.add_argument("--N", type=int, default=DEFAULT_DOMAIN_CEILING)
    p.add_argument("--ensemble", default=None)
    p.add_argument("--margin", type=float, default=DEFAULT_R2_MARGIN,
                   help="r2 margin for the verdict rule (default: 0.02)")
    p.add_argument("--out-dir", default="diagnose_out")
    p.set_defaults(func=cmd_diagnose)

    p = sub.add_parser("simulate", help="Monte Carlo recovery or undersampling runs")
    p.add_argument("--mode", choices=("recovery", "undersampling"), default="recovery")
    p.add_argument("--config", default=None, help="JSON config file (overrides model flags)")
    p.add_argument("--model", choices=KIND_NAMES, default=None)
    p.add_argument("--q", type=float, default=None)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--R", type=int, default=None)
    p.add_argument("--N", type=int, default=DEFAULT_DOMAIN_CEILING)
    p.add_argument("--sizes", default=None, help="comma-separated sample sizes (recovery mode)")
    p.add_argument("--n", type=int, default=None, help="draws per trial (undersampling mode)")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=None,
                   help=f"RNG seed (default: {DEFAULT_SEED})")
    p.add_argument("--ensemble", default=None)
    p.add_argument("--out", default="simulation.json")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("cross-apply", help="score a stored fit against another dataset")
    p.add_argument("--fit", required=True, help="fit JSON produced by the fit command")
    add_input(p)
    p.add_argument("--out", default="cross_apply.json")
    p.set_defaults(func=cmd_cross_apply)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except OSError as exc:
        _die(str(exc))


if __name__ == "__main__":
    sys.exit(main())
