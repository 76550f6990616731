"""Command-line front end.

Subcommands
    figure3   closed-form cascade table (CSV) plus a JSON summary
    detect    one symmetry detection on a family state
    cascade   chained detectors with postselection (analytic or sampled)
    classify  sample emissions and read their pair number back
    spdc      emission-number distribution of the source

Every run prints a JSON report to stdout; --out writes the command's CSV
artifact (JSON for detect). A JSON config file can mirror any flag; flags
override the file. Exit codes: 0 success, 2 invalid configuration or I/O,
3 numeric precondition failure.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from .circuits import (
    DEFAULT_ALPHA,
    DEFAULT_SEED,
    DEFAULT_THETA,
    cascade_closed_form,
    cascade_simulated,
    classify_pairs,
    classify_shots,
    four_photon_family,
    iteration_records_csv,
    symmetry_detector,
)
from .errors import CascadeAborted, TwinbeamError
from .homodyne import derive_seed
from .spdc import (
    SpdcParams,
    adequate_n_max,
    mean_pairs,
    pair_distribution,
    pair_state,
    sample_emissions,
    truncated_state,
    truncation_loss,
)

DEFAULTS = {
    "alpha": DEFAULT_ALPHA,
    "theta": DEFAULT_THETA,
    "seed": DEFAULT_SEED,
    "mode": "analytic",
}


class ConfigError(Exception):
    pass


_FIELDS = {
    "figure3": {"c0": float, "k": int, "out": str},
    "detect": {"c": float, "alpha": float, "theta": float, "seed": int, "mode": str, "out": str},
    "cascade": {"c0": float, "k": int, "alpha": float, "theta": float, "seed": int, "mode": str, "out": str},
    "classify": {
        "tau": float, "n_max": int, "shots": int, "alpha": float, "theta": float,
        "seed": int, "mode": str, "out": str,
    },
    "spdc": {"tau": float, "n_max": int, "out": str},
}

_REQUIRED = {
    "figure3": ("c0",),
    "detect": ("c",),
    "cascade": ("c0",),
    "classify": ("tau",),
    "spdc": ("tau",),
}

_COMMAND_DEFAULTS = {
    "figure3": {"k": 10, "out": "figure3.csv"},
    "cascade": {"k": 10},
    "classify": {"n_max": 4, "shots": 10000},
    "spdc": {"n_max": 20},
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="twinbeam", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="JSON file mirroring the flags; flags override")
        fields = _FIELDS[name]
        for key, typ in fields.items():
            flag = "--" + key.replace("_", "-")
            if key == "mode":
                p.add_argument(flag, choices=("analytic", "sampled"), default=None)
            else:
                p.add_argument(flag, type=typ, default=None)
        return p

    add("figure3", "closed-form cascade table and summary")
    add("detect", "single symmetry detection on a family state")
    add("cascade", "chained detectors with postselection")
    add("classify", "sampled pair-number readout of source emissions")
    add("spdc", "emission-number distribution")
    return parser


def _resolve(command: str, args: argparse.Namespace) -> dict:
    fields = _FIELDS[command]
    config: dict = {}
    if args.config is not None:
        path = Path(args.config)
        try:
            config = json.loads(path.read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
        unknown = set(config) - set(fields)
        if unknown:
            raise ConfigError(f"unknown config keys for {command}: {sorted(unknown)}")
    resolved = {}
    for key, typ in fields.items():
        value = getattr(args, key)
        if value is None and key in config:
            value = config[key]
        if value is None:
            value = _COMMAND_DEFAULTS.get(command, {}).get(key, DEFAULTS.get(key))
        if value is not None and key != "out":
            try:
                value = typ(value)
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"invalid value for {key}: {value!r}") from exc
        if key == "mode" and value not in ("analytic", "sampled"):
            raise ConfigError(f"mode must be 'analytic' or 'sampled', got {value!r}")
        resolved[key] = value
    missing = [key for key in _REQUIRED[command] if resolved.get(key) is None]
    if missing:
        raise ConfigError(f"{command} requires {', '.join(missing)} (flag or config)")
    return resolved


def _emit(report: dict) -> None:
    sys.stdout.write(json.dumps(report, sort_keys=True, indent=2) + "\n")


def _write(path: str, text: str) -> None:
    Path(path).write_text(text)


def _fmt_distribution(pairs) -> dict:
    return {str(n): p for n, p in pairs}


def cmd_figure3(p: dict) -> int:
    records = cascade_closed_form(p["c0"], p["k"])
    out = Path(p["out"])
    _write(str(out), iteration_records_csv(records))
    summary = {"final_c": records[-1].c_i, "final_cumP": records[-1].cumulative_P}
    _write(str(out.with_suffix(".json")), json.dumps(summary, sort_keys=True, indent=2) + "\n")
    _emit({"command": "figure3", "csv": str(out), "summary": summary})
    return 0


def cmd_detect(p: dict) -> int:
    det = symmetry_detector(
        four_photon_family(p["c"]), p["alpha"], p["theta"], mode=p["mode"], seed=p["seed"]
    )
    report = {
        "command": "detect",
        "mode": p["mode"],
        "symmetric": {"probability": det.symmetric.probability, "c_out": det.symmetric.c_out},
        "asymmetric": {"probability": det.asymmetric.probability},
        "x": det.x,
        "declared": det.declared,
    }
    if p["out"]:
        _write(p["out"], json.dumps(report, sort_keys=True, indent=2) + "\n")
    _emit(report)
    return 0


def cmd_cascade(p: dict) -> int:
    try:
        result = cascade_simulated(
            p["c0"], p["k"], p["alpha"], p["theta"], mode=p["mode"], seed=p["seed"]
        )
    except CascadeAborted as exc:
        _emit({"command": "cascade", "mode": p["mode"], "aborted_at_stage": exc.stage})
        return 0
    if p["out"]:
        _write(p["out"], iteration_records_csv(result.records))
    _emit(
        {
            "command": "cascade",
            "mode": p["mode"],
            "aborted_at_stage": None,
            "final_c": result.records[-1].c_i,
            "final_cumP": result.records[-1].cumulative_P,
            "final_state": result.final_state.to_json_dict(),
        }
    )
    return 0


def cmd_classify(p: dict) -> int:
    alpha, theta, n_max = p["alpha"], p["theta"], p["n_max"]
    if p["mode"] == "analytic":
        params = SpdcParams(p["tau"], n_max)
        result = classify_pairs(truncated_state(params), alpha, theta, n_max=n_max)
        _emit(
            {
                "command": "classify",
                "mode": "analytic",
                "distribution": {str(m): w for m, w in sorted(result.distribution.items())},
                "leakage": {str(m): v for m, v in sorted(result.leakage.items())},
                "truncation_loss": truncation_loss(params),
                "windows": result.windows.to_json_dict() if result.windows else None,
            }
        )
        return 0

    sampler_params = SpdcParams(p["tau"], adequate_n_max(p["tau"]))
    emissions = sample_emissions(sampler_params, p["shots"], p["seed"])
    confusion: dict[str, dict[str, int]] = {}
    rows: list[tuple[float, int]] = []
    correct = 0
    for n in sorted(set(int(v) for v in emissions)):
        count = int(np.sum(emissions == n))
        xs, declared = classify_shots(
            pair_state(n), alpha, theta, n_max, count, derive_seed(p["seed"], n + 1)
        )
        row = confusion.setdefault(str(n), {})
        for cls in sorted(set(int(d) for d in declared)):
            row[str(cls)] = int(np.sum(declared == cls))
        correct += int(np.sum(declared == n))
        rows.extend((float(x), int(d)) for x, d in zip(xs, declared))
    if p["out"]:
        lines = ["x,declared_class"] + [f"{x:.14e},{d}" for x, d in rows]
        _write(p["out"], "\n".join(lines) + "\n")
    _emit(
        {
            "command": "classify",
            "mode": "sampled",
            "shots": p["shots"],
            "accuracy": correct / p["shots"],
            "confusion": confusion,
            "sampler_n_max": sampler_params.n_max,
            "sampler_truncation_loss": truncation_loss(sampler_params),
        }
    )
    return 0


def cmd_spdc(p: dict) -> int:
    params = SpdcParams(p["tau"], p["n_max"])
    dist = pair_distribution(params)
    if p["out"]:
        lines = ["n,p_n"] + [f"{n},{w:.14e}" for n, w in dist]
        _write(p["out"], "\n".join(lines) + "\n")
    _emit(
        {
            "command": "spdc",
            "distribution": _fmt_distribution(dist),
            "truncation_loss": truncation_loss(params),
            "mean_pairs": mean_pairs(p["tau"]),
        }
    )
    return 0


_HANDLERS = {
    "figure3": cmd_figure3,
    "detect": cmd_detect,
    "cascade": cmd_cascade,
    "classify": cmd_classify,
    "spdc": cmd_spdc,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        params = _resolve(args.command, args)
    except ConfigError as exc:
        print(f"twinbeam: {exc}", file=sys.stderr)
        return 2
    try:
        return _HANDLERS[args.command](params)
    except TwinbeamError as exc:
        print(f"twinbeam: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"twinbeam: {getattr(exc, 'filename', None) or ''} {exc}".strip(), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
