"""Experiment runner: config parsing, presets, measurement and oracle reports.

Config files are line-based ``key = value`` text with ``#`` comments.
Unknown keys are rejected.  Exit codes of ``run``: 0 on completion
(stationary or step budget), 1 on config errors, 2 on divergence.
"""

from __future__ import annotations

import argparse
import hashlib
import sys
import time
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import oracle
from .energetics import MMParams, mm_energy_matched
from .flow import (
    DivergenceError,
    ExperimentConfig,
    InitMode,
    PenaltyMode,
    run,
    write_trace_csv,
)
from .grid import BinaryMask, BoundaryMode, Grid2D
from .pgm import load_pgm, save_pgm
from .presets import PRESET_NAMES, make_preset
from .topology import (
    ProfileParams,
    complement_connectedness_energy,
    connectedness_energy,
    label_components,
)


class ConfigError(ValueError):
    pass


_ENUM_KEYS = {
    "bc": ("bc", BoundaryMode),
    "penalty": ("penalty", PenaltyMode),
    "init": ("init", InitMode),
}
_INT_KEYS = {
    "nx": "nx",
    "ny": "ny",
    "max_steps": "max_steps",
    "refresh_period": "refresh_period",
    "snapshot_every": "snapshot_every",
}
_FLOAT_KEYS = {
    "epsilon": "epsilon",
    "alpha": "alpha",
    "eta": "eta",
    "kappa": "kappa",
    "delta": "delta",
    "tau": "tau",
    "stat_tol": "stat_tol_rel",
}
_PATH_KEYS = {"g": "g_path", "phi": "phi_path", "u0": "u0_path", "out": "out_dir"}
REQUIRED_KEYS = ("epsilon",)


def parse_config_text(text: str, base_dir: Path | None = None) -> ExperimentConfig:
    """Parse ``key = value`` lines into a configuration.

    Relative paths are resolved against ``base_dir`` when given.
    """
    fields: dict = {}
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key in seen:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        seen.add(key)
        try:
            if key in _INT_KEYS:
                fields[_INT_KEYS[key]] = int(value)
            elif key in _FLOAT_KEYS:
                fields[_FLOAT_KEYS[key]] = float(value)
            elif key in _ENUM_KEYS:
                attr, enum_cls = _ENUM_KEYS[key]
                fields[attr] = enum_cls(value)
            elif key in _PATH_KEYS:
                path = Path(value)
                if base_dir is not None and not path.is_absolute():
                    path = base_dir / path
                fields[_PATH_KEYS[key]] = str(path)
            else:
                raise ConfigError(f"line {lineno}: unknown key {key!r}")
        except (ValueError, KeyError) as err:
            if isinstance(err, ConfigError):
                raise
            raise ConfigError(f"line {lineno}: bad value for {key!r}: {err}") from None
    for key in REQUIRED_KEYS:
        target = _FLOAT_KEYS.get(key, key)
        if target not in fields:
            raise ConfigError(f"missing required key {key!r}")
    try:
        return ExperimentConfig(**fields)
    except ValueError as err:
        raise ConfigError(str(err)) from None


def config_echo_lines(cfg: ExperimentConfig) -> list[str]:
    """Canonical ``key = value`` lines that re-parse to the same config."""
    lines = []
    for key, attr in {**_INT_KEYS, **_FLOAT_KEYS}.items():
        lines.append(f"{key} = {getattr(cfg, attr)!r}")
    for key, (attr, _) in _ENUM_KEYS.items():
        lines.append(f"{key} = {getattr(cfg, attr).value}")
    for key, attr in _PATH_KEYS.items():
        value = getattr(cfg, attr)
        if value is not None:
            lines.append(f"{key} = {value}")
    return lines


def _sha256(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def cmd_run(config_path: str) -> int:
    config_path = Path(config_path)
    try:
        cfg = parse_config_text(config_path.read_text(), base_dir=config_path.parent)
    except (OSError, ConfigError) as err:
        print(f"config error: {err}", file=sys.stderr)
        return 1

    out_dir = Path(cfg.out_dir) if cfg.out_dir else config_path.parent / "out"
    out_dir.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    try:
        result = run(cfg, snapshot_dir=out_dir)
    except DivergenceError as err:
        print(f"divergence: {err}", file=sys.stderr)
        return 2
    flow_seconds = time.perf_counter() - t0

    final_pgm = out_dir / "final.pgm"
    trace_csv = out_dir / "trace.csv"
    manifest = out_dir / "manifest.txt"
    t1 = time.perf_counter()
    save_pgm(result.u, final_pgm)
    write_trace_csv(result, trace_csv)
    outputs = [final_pgm, trace_csv]

    lines = [f"config.{line}" for line in config_echo_lines(cfg)]
    for key, attr in (("g", "g_path"), ("phi", "phi_path"), ("u0", "u0_path")):
        value = getattr(cfg, attr)
        if value is not None:
            lines.append(f"input.{key}.sha256 = {_sha256(value)}")
    for i, path in enumerate(outputs):
        lines.append(f"output.{i} = {path}")
    lines.append(f"steps = {result.steps}")
    lines.append(f"termination = {result.termination}")
    lines.append(f"time.flow = {flow_seconds:.3f}")
    lines.append(f"time.io = {time.perf_counter() - t1:.3f}")
    manifest.write_text("\n".join(lines) + "\n")
    print(f"{result.termination} after {result.steps} steps; outputs in {out_dir}")
    return 0


def cmd_measure(pgm_path: str, alpha: float, epsilon: float, eta: float) -> int:
    try:
        u = load_pgm(pgm_path)
    except OSError as err:
        print(f"i/o error: {err}", file=sys.stderr)
        return 1
    p = ProfileParams(alpha=alpha)
    labeling = label_components(u, p)
    print(f"components = {labeling.count}")
    for i, mass in enumerate(labeling.masses):
        print(f"mass.{i} = {mass:.6g}")
    conn, table, _ = connectedness_energy(u, p)
    for (i, j), _path in sorted(table.paths.items()):
        print(f"distance.{i}.{j} = {table.dist[i, j]:.6g}")
    conn_c, _, _ = complement_connectedness_energy(u, p)
    mm = mm_energy_matched(u, MMParams(epsilon=epsilon))
    print(f"energy.mm = {mm:.6g}")
    print(f"energy.conn = {conn:.6g}")
    print(f"energy.conn_complement = {conn_c:.6g}")
    print(f"energy.total = {mm + eta * (conn + conn_c):.6g}")
    return 0


def cmd_oracle(pgm_path: str) -> int:
    try:
        u = load_pgm(pgm_path)
    except OSError as err:
        print(f"i/o error: {err}", file=sys.stderr)
        return 1
    mask = BinaryMask(u.grid, u.values > 0.5)
    try:
        ref = oracle.sharp_reference(mask)
    except oracle.UnsupportedCardinalityError as err:
        print(f"note: {err}; reporting the spanning-tree upper bound instead")
        from scipy import ndimage

        labels, count = ndimage.label(mask.bits, structure=oracle.FOUR_CONNECTED)
        sets = oracle._component_point_sets(labels, count, mask.grid)
        dm = np.zeros((count, count))
        for i in range(count):
            for j in range(i + 1, count):
                dm[i, j] = dm[j, i] = oracle._set_distance(sets[i], sets[j])[0]
        from scipy.sparse.csgraph import minimum_spanning_tree

        st_ub = float(minimum_spanning_tree(dm).sum())
        perim = oracle.perimeter_of_mask(mask)
        print(f"perimeter = {perim:.6g}")
        print(f"steiner_upper_bound = {st_ub:.6g}")
        print(f"connected_perimeter_upper_bound = {perim + 2 * st_ub:.6g}")
        return 0
    print(f"perimeter = {ref.perimeter:.6g}")
    suffix = "  # upper bound" if ref.upper_bound else ""
    print(f"steiner = {ref.steiner:.6g}{suffix}")
    print(f"connected_perimeter = {ref.value:.6g}{suffix}")
    try:
        sc = oracle.sharp_reference(mask, simply_connected=True)
        print(f"steiner_complement = {sc.steiner_complement:.6g}")
        print(f"simply_connected_perimeter = {sc.value_simply_connected:.6g}")
    except oracle.UnsupportedCardinalityError:
        pass
    print(f"csv: {ref.perimeter:.6g},{ref.steiner:.6g},{ref.value:.6g}")
    return 0


def cmd_preset(name: str, out_dir: str) -> int:
    try:
        preset = make_preset(name)
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    g_path = out / "g.pgm"
    phi_path = out / "phi.pgm"
    save_pgm(preset.g, g_path)
    save_pgm(preset.phi, phi_path)
    cfg = replace(
        preset.config,
        g_path=str(g_path),
        phi_path=str(phi_path),
        out_dir=str(out / "run"),
    )
    config_path = out / "config.txt"
    config_path.write_text("\n".join(config_echo_lines(cfg)) + "\n")
    print(f"wrote {g_path}, {phi_path}, {config_path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="topofield",
        description="phase-field segmentation with connectedness penalties",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an experiment from a config file")
    p_run.add_argument("config")

    p_measure = sub.add_parser("measure", help="report components and energies of a field")
    p_measure.add_argument("pgm")
    p_measure.add_argument("--alpha", type=float, default=0.35)
    p_measure.add_argument("--epsilon", type=float, default=5e-3)
    p_measure.add_argument("--eta", type=float, default=300.0)

    p_oracle = sub.add_parser("oracle", help="sharp-interface reference values of a mask")
    p_oracle.add_argument("pgm")

    p_preset = sub.add_parser("preset", help="write a built-in experiment to a directory")
    p_preset.add_argument("name", choices=PRESET_NAMES)
    p_preset.add_argument("--out", required=True)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "run":
        return cmd_run(args.config)
    if args.command == "measure":
        return cmd_measure(args.pgm, args.alpha, args.epsilon, args.eta)
    if args.command == "oracle":
        return cmd_oracle(args.pgm)
    return cmd_preset(args.name, args.out)


if __name__ == "__main__":
    raise SystemExit(main())
