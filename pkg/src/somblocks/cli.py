"""Command-line front end: train / partition / baseline / evaluate / sweep.

Every subcommand reads its settings from built-in defaults, overridden by an
optional flat `key = value` config file (--config), overridden in turn by
explicit flags.  Artifacts are written atomically (temp file then rename)
and carry a provenance record (config echo, seed, tool version), so a fixed
(data, config, seed) triple reproduces byte-identical outputs.
"""

import argparse
import dataclasses
import hashlib
import json
import os
import sys

import numpy as np

from . import __version__
from .bayes_cost import N_SCALE_RULES, params_from_summary
from .baselines import threshold_partition, umatrix_boundaries
from .data_model import encode_labels, iris_path, load_csv, summarize
from .evaluate import render_report, report_to_dict, score
from .partition import Partition, load_partition, partition_som, save_partition
from .sensitivity import StabilityMap, SweepSpec, default_grid, stable_region, sweep
from .som import SomConfig, SomMap, load_map, save_map, train

DEFAULTS = {
    "data": iris_path(),
    "label_col": "class",   # matches the bundled data; pass "" for unlabeled files
    "rows": 5,
    "cols": 5,
    "epochs": 300,
    "lr_start": 0.5,
    "lr_end": 0.01,
    "neighborhood": "0:2,0.25:1,0.6:0",
    "conscience_beta": 1e-4,
    "conscience_gamma": 1.0,
    "seed": 1,
    "range_rule": "two_max",
    "range_exponent": "per_block",
    "sigma_const": 1.0,
    "sigma_floor_frac": 0.15,
    "n_scale": "unit",
    "f_R": 1.0,
    "f_sigma": 1.0,
    "threshold": 0.55,
    "sweep_points": 13,
    "sweep_decades": 1.5,
}


class CliError(ValueError):
    pass


@dataclasses.dataclass(frozen=True)
class RunConfig:
    """Resolved run settings: every key of DEFAULTS, with overrides applied."""

    values: dict

    def __post_init__(self):
        missing = set(DEFAULTS) - set(self.values)
        if missing:
            raise CliError(f"run config missing keys: {sorted(missing)}")

    def __getitem__(self, key: str):
        return self.values[key]


def parse_config_file(path) -> dict:
    """Flat `key = value` lines; '#' starts a comment, blanks ignored."""
    values = {}
    with open(path) as f:
        for lineno, line in enumerate(f, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise CliError(f"{path}:{lineno}: expected key = value")
            key, _, value = line.partition("=")
            key, value = key.strip(), value.strip()
            if key not in DEFAULTS:
                raise CliError(f"{path}:{lineno}: unknown key {key!r}")
            values[key] = value
    return values


def _coerce(key: str, value):
    if not isinstance(value, str):
        return value
    default = DEFAULTS[key]
    if isinstance(default, bool):
        return value.lower() in ("1", "true", "yes")
    if isinstance(default, int):
        return int(value)
    if isinstance(default, float):
        return float(value)
    return value


def resolve_settings(args: argparse.Namespace) -> RunConfig:
    """defaults < config file < explicit flags."""
    settings = dict(DEFAULTS)
    config_path = getattr(args, "config", None)
    if config_path:
        for key, value in parse_config_file(config_path).items():
            settings[key] = _coerce(key, value)
    for key in DEFAULTS:
        flag = getattr(args, key, None)
        if flag is not None:
            settings[key] = _coerce(key, flag)
    return RunConfig(values=settings)


def parse_neighborhood(text: str) -> tuple:
    """Schedule syntax: "frac:halfwidth,frac:halfwidth,..." """
    pairs = []
    for item in text.split(","):
        frac, _, hw = item.partition(":")
        pairs.append((float(frac), int(hw)))
    return tuple(pairs)


def som_config_from(settings: RunConfig) -> SomConfig:
    return SomConfig(
        rows=settings["rows"], cols=settings["cols"], epochs=settings["epochs"],
        lr_start=settings["lr_start"], lr_end=settings["lr_end"],
        neighborhood_schedule=parse_neighborhood(settings["neighborhood"]),
        conscience_beta=settings["conscience_beta"],
        conscience_gamma=settings["conscience_gamma"],
        seed=settings["seed"],
    )


def cost_params_from(settings: RunConfig, dataset):
    if settings["n_scale"] not in N_SCALE_RULES:
        raise CliError(f"unknown n_scale rule {settings['n_scale']!r}")
    return params_from_summary(
        summarize(dataset),
        range_rule=settings["range_rule"],
        range_exponent=settings["range_exponent"],
        sigma_const=settings["sigma_const"],
        sigma_floor_frac=settings["sigma_floor_frac"],
        n_scale_rule=N_SCALE_RULES[settings["n_scale"]],
        f_R=settings["f_R"],
        f_sigma=settings["f_sigma"],
    )


def provenance(settings: RunConfig, seed) -> dict:
    echo = {k: v for k, v in sorted(settings.values.items())}
    return {"version": __version__, "seed": seed, "config": echo}


def write_text_atomic(path, text: str) -> None:
    tmp = f"{path}.tmp.{os.getpid()}"
    with open(tmp, "w") as f:
        f.write(text)
    os.replace(tmp, path)


def render_map(som_map: SomMap, partition: Partition | None = None, labels=None) -> str:
    """ASCII grid: block ids, per-class cell populations, block boundaries."""
    if labels is not None:
        _, label_ids = encode_labels(labels)
        n_classes = int(label_ids.max()) + 1

    def cell_text(pe) -> str:
        parts = []
        if partition is not None:
            parts.append(str(int(partition.block_of[pe.r, pe.c])))
        if labels is not None:
            counts = np.bincount(label_ids[list(pe.member_ids)], minlength=n_classes)
            parts.append("(" + ",".join(str(int(v)) for v in counts) + ")")
        else:
            parts.append(f"({pe.n})")
        return " ".join(parts)

    texts = [[cell_text(som_map.pe(r, c)) for c in range(som_map.cols)]
             for r in range(som_map.rows)]
    width = max(len(t) for row in texts for t in row)

    def differs(r1, c1, r2, c2) -> bool:
        return partition is not None and (
            partition.block_of[r1, c1] != partition.block_of[r2, c2])

    lines = []
    for r in range(som_map.rows):
        row = ""
        for c in range(som_map.cols):
            row += f"{texts[r][c]:<{width}}"
            if c + 1 < som_map.cols:
                row += " │ " if differs(r, c, r, c + 1) else "   "
        lines.append(row.rstrip())
        if r + 1 < som_map.rows:
            gap = ""
            for c in range(som_map.cols):
                gap += ("─" * width) if differs(r, c, r + 1, c) else (" " * width)
                if c + 1 < som_map.cols:
                    joint = differs(r, c, r + 1, c) or differs(r, c + 1, r + 1, c + 1)
                    gap += "───" if joint else "   "
            if gap.strip():
                lines.append(gap.rstrip())
    return "\n".join(lines) + "\n"


def _load_labeled(settings: RunConfig, need_labels: bool):
    label_col = settings["label_col"] or None
    dataset = load_csv(settings["data"], label_col)
    if need_labels and dataset.labels is None:
        raise CliError("this command needs --label-col on a labeled dataset")
    return dataset


def cmd_train(args) -> int:
    settings = resolve_settings(args)
    dataset = _load_labeled(settings, need_labels=False)
    som_map = train(dataset, som_config_from(settings))
    save_map(som_map, args.out)
    print(f"wrote {args.out} ({som_map.rows}x{som_map.cols}, seed {settings['seed']})")
    return 0


def cmd_partition(args) -> int:
    settings = resolve_settings(args)
    som_map = load_map(args.map)
    dataset = _load_labeled(settings, need_labels=False)
    params = cost_params_from(settings, dataset)
    part = partition_som(som_map, params)
    save_partition(part, args.out, params_echo=params.echo(),
                   provenance=provenance(settings, som_map.config.seed))
    if args.render:
        write_text_atomic(args.render, render_map(som_map, part, dataset.labels))
    print(f"wrote {args.out} ({part.n_blocks} blocks, cost {part.cost:.6f})")
    return 0


def cmd_baseline(args) -> int:
    settings = resolve_settings(args)
    som_map = load_map(args.map)
    T = settings["threshold"]
    part = threshold_partition(som_map, T)
    save_partition(part, args.out, params_echo={"threshold": T},
                   provenance=provenance(settings, som_map.config.seed))
    bounds = umatrix_boundaries(som_map)
    lines = [f"# somblocks {__version__} boundary strengths",
             f"# threshold = {T!r}", "r,c,orientation,strength"]
    for r in range(som_map.rows):
        for c in range(som_map.cols - 1):
            s = bounds.h[r, c]
            lines.append(f"{r},{c},h,{'' if np.isnan(s) else repr(float(s))}")
    for r in range(som_map.rows - 1):
        for c in range(som_map.cols):
            s = bounds.v[r, c]
            lines.append(f"{r},{c},v,{'' if np.isnan(s) else repr(float(s))}")
    write_text_atomic(args.boundaries_out, "\n".join(lines) + "\n")
    print(f"wrote {args.out} ({part.n_blocks} blocks at T={T}) and {args.boundaries_out}")
    return 0


def cmd_evaluate(args) -> int:
    settings = resolve_settings(args)
    som_map = load_map(args.map)
    part = load_partition(args.partition)
    dataset = _load_labeled(settings, need_labels=True)
    report = score(part, som_map, dataset.labels)
    if args.format == "json":
        text = json.dumps(report_to_dict(report), sort_keys=True, indent=2) + "\n"
    else:
        text = render_report(report)
    if args.out:
        write_text_atomic(args.out, text)
        print(f"wrote {args.out} (accuracy {report.p_o:.4f}, kappa {report.kappa:.4f})")
    else:
        sys.stdout.write(text)
    return 0


def _stability_csv(stability: StabilityMap, spans) -> str:
    lines = [f"# somblocks {__version__} stability sweep",
             f"# stable spans: f_R {spans[0]!r}, f_sigma {spans[1]!r}",
             "f_R,f_sigma,equal_to_reference,signature_hash,n_blocks"]
    for i, f_R in enumerate(stability.f_R_grid):
        for j, f_sigma in enumerate(stability.f_sigma_grid):
            sig = stability.signatures[i][j]
            digest = hashlib.sha256(",".join(map(str, sig)).encode()).hexdigest()[:16]
            lines.append(f"{float(f_R)!r},{float(f_sigma)!r},"
                         f"{str(bool(stability.equal[i, j])).lower()},"
                         f"{digest},{int(stability.n_blocks[i, j])}")
    return "\n".join(lines) + "\n"


def cmd_sweep(args) -> int:
    settings = resolve_settings(args)
    som_map = load_map(args.map)
    dataset = _load_labeled(settings, need_labels=False)
    params = cost_params_from(settings, dataset).scaled()   # factors reset to 1
    grid = default_grid(settings["sweep_points"], settings["sweep_decades"])
    stability = sweep(som_map, SweepSpec(base=params, f_R_grid=grid, f_sigma_grid=grid))
    spans = stable_region(stability)
    write_text_atomic(args.out, _stability_csv(stability, spans))
    print(f"wrote {args.out} (stable spans: f_R {spans[0]:.3g}x, f_sigma {spans[1]:.3g}x)")
    return 0


def _add_common(p: argparse.ArgumentParser, *keys: str) -> None:
    p.add_argument("--config", help="flat key = value settings file")
    for key in keys:
        flag = "--" + key.replace("_", "-")
        p.add_argument(flag, dest=key, default=None, metavar="V")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="somblocks")
    parser.add_argument("--version", action="version", version=f"somblocks {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train a map and save it")
    _add_common(p, "data", "label_col", "rows", "cols", "epochs", "lr_start", "lr_end",
                "neighborhood", "conscience_beta", "conscience_gamma", "seed")
    p.add_argument("--out", default="map.json")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("partition", help="partition a trained map by block cost")
    p.add_argument("--map", required=True)
    _add_common(p, "data", "label_col", "range_rule", "range_exponent", "sigma_const",
                "sigma_floor_frac", "n_scale", "f_R", "f_sigma")
    p.add_argument("--out", default="partition.json")
    p.add_argument("--render", default=None, help="also write an ASCII grid view")
    p.set_defaults(func=cmd_partition)

    p = sub.add_parser("baseline", help="threshold partition plus boundary strengths")
    p.add_argument("--map", required=True)
    _add_common(p, "threshold")
    p.add_argument("--out", default="baseline_partition.json")
    p.add_argument("--boundaries-out", default="boundaries.csv")
    p.set_defaults(func=cmd_baseline)

    p = sub.add_parser("evaluate", help="score a partition against labels")
    p.add_argument("--map", required=True)
    p.add_argument("--partition", required=True)
    _add_common(p, "data", "label_col")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("sweep", help="stability of the partition under f_R/f_sigma scaling")
    p.add_argument("--map", required=True)
    _add_common(p, "data", "label_col", "range_rule", "range_exponent", "sigma_const",
                "sigma_floor_frac", "n_scale", "sweep_points", "sweep_decades")
    p.add_argument("--out", default="stability.csv")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as e:
        print(f"somblocks: error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
