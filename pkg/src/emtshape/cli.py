"""Command-line pipeline: forward EMT tables, analytic reconstruction,
round-trip experiments, and the disk oracle suite.

A run is configured by a single JSON document

    {
      "materials": {"background": {"lambda": 1.5, "mu": 1.2},
                    "inclusion":  {"lambda": 0.6, "mu": 0.4}},
      "shape":     {"kind": "starfish", "center": [0.0, 0.0],
                    "modeAmplitude": 0.125, "modeIndex": 5},
      "order": 6,
      "nodes": 256,
      "noise": {"sigma2": 0.05, "seed": 7},
      "outputDir": "out",
      "thetaSamples": 512
    }

with ``nodes``, ``noise`` and ``thetaSamples`` optional.  The flags
``--order``, ``--nodes``, ``--noise-var``, ``--seed`` and ``--out`` override
the corresponding fields.  Exit codes: 0 success, 1 numerical failure,
2 configuration error.  Outputs carry no timestamps, so identical
configurations produce byte-identical files.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .disk import disk_emt_general
from .emt import EmtTable, NoiseModel, apply_noise, emt_table, table_from_json, table_to_json
from .geometry import (
    BoundaryCurve,
    CurveDescriptor,
    Disk,
    descriptor_from_json,
    descriptor_to_json,
    sample,
)
from .materials import LameConstants, MaterialPair
from .reconstruct import (
    InversionError,
    ShapeEstimate,
    reconstruct,
    reconstruct_curve,
    shape_error,
    shape_estimate_to_json,
)
from .transmission import SolverError

__all__ = [
    "ConfigError",
    "RunConfig",
    "load_config",
    "cmd_forward",
    "cmd_reconstruct",
    "cmd_roundtrip",
    "cmd_oracle",
    "main",
]


class ConfigError(ValueError):
    """Configuration document or command line is invalid."""


@dataclass(frozen=True)
class RunConfig:
    materials: MaterialPair
    shape: CurveDescriptor
    order: int
    output_dir: Path
    nodes: int = 256
    noise: NoiseModel | None = None
    theta_samples: int = 512

    def __post_init__(self) -> None:
        if self.order < 1:
            raise ConfigError("order must be a positive integer")
        if self.nodes < 4 or self.nodes % 2:
            raise ConfigError("nodes must be an even integer >= 4")
        if self.theta_samples < 1:
            raise ConfigError("thetaSamples must be a positive integer")


def _lame_from_json(data: dict, label: str) -> LameConstants:
    try:
        return LameConstants(float(data["lambda"]), float(data["mu"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad {label} material: {exc}") from exc


def load_config(path: str | Path, *, order: int | None = None,
                nodes: int | None = None, noise_var: float | None = None,
                seed: int | None = None, out: str | None = None) -> RunConfig:
    """Parse a config file and apply the command-line overrides."""
    try:
        raw = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON in {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config document must be a JSON object")
    try:
        materials = MaterialPair(
            _lame_from_json(raw["materials"]["background"], "background"),
            _lame_from_json(raw["materials"]["inclusion"], "inclusion"),
        )
        shape = descriptor_from_json(raw["shape"])
        cfg_order = int(raw["order"])
        cfg_out = raw["outputDir"]
    except ConfigError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid config: {exc}") from exc

    noise = None
    if raw.get("noise") is not None:
        try:
            noise = NoiseModel(float(raw["noise"]["sigma2"]), int(raw["noise"]["seed"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"invalid noise block: {exc}") from exc
    if noise_var is not None:
        noise = NoiseModel(noise_var, seed if seed is not None
                           else (noise.seed if noise is not None else 0))
    elif seed is not None:
        if noise is None:
            raise ConfigError("--seed given but no noise variance is configured")
        noise = NoiseModel(noise.sigma2, seed)

    try:
        return RunConfig(
            materials=materials,
            shape=shape,
            order=order if order is not None else cfg_order,
            output_dir=Path(out if out is not None else cfg_out),
            nodes=nodes if nodes is not None else int(raw.get("nodes", 256)),
            noise=noise,
            theta_samples=int(raw.get("thetaSamples", 512)),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid config: {exc}") from exc


def _sample_shape(config: RunConfig) -> BoundaryCurve:
    try:
        return sample(config.shape, config.nodes)
    except ValueError as exc:
        raise ConfigError(f"shape cannot be sampled: {exc}") from exc


def _write_json(path: Path, document: dict) -> None:
    path.write_text(json.dumps(document, indent=2) + "\n")


def _write_boundary_csv(path: Path, samples: np.ndarray) -> None:
    count = samples.size
    lines = ["theta,x,y"]
    for j, z in enumerate(samples):
        theta = 2.0 * np.pi * j / count
        lines.append(f"{theta!r},{float(z.real)!r},{float(z.imag)!r}")
    path.write_text("\n".join(lines) + "\n")


def _svg_path(points: np.ndarray) -> str:
    # SVG y axis points down; negate the imaginary part
    coords = " ".join(f"{z.real:.6f},{-z.imag:.6f}" for z in points)
    return coords


def _write_overlay_svg(path: Path, truth: np.ndarray, recon: np.ndarray) -> None:
    both = np.concatenate([truth, recon])
    x0, x1 = both.real.min(), both.real.max()
    y0, y1 = (-both.imag).min(), (-both.imag).max()
    span = max(x1 - x0, y1 - y0)
    margin = 0.05 * span
    view = (x0 - margin, y0 - margin, (x1 - x0) + 2 * margin, (y1 - y0) + 2 * margin)
    stroke = 0.008 * span
    body = (
        f'<svg xmlns="http://www.w3.org/2000/svg" '
        f'viewBox="{view[0]:.6f} {view[1]:.6f} {view[2]:.6f} {view[3]:.6f}">\n'
        f'  <polygon points="{_svg_path(truth)}" fill="none" '
        f'stroke="#999999" stroke-width="{stroke:.6f}"/>\n'
        f'  <polygon points="{_svg_path(recon)}" fill="none" '
        f'stroke="#000000" stroke-width="{stroke:.6f}"/>\n'
        f"</svg>\n"
    )
    path.write_text(body)


def cmd_forward(config: RunConfig) -> EmtTable:
    """Solve the transmission problem and write ``emt_table.json``."""
    curve = _sample_shape(config)
    table = emt_table(curve, config.materials, config.order)
    if config.noise is not None:
        table = apply_noise(table, config.noise)
    config.output_dir.mkdir(parents=True, exist_ok=True)
    _write_json(config.output_dir / "emt_table.json", table_to_json(table))
    return table


def cmd_reconstruct(config: RunConfig, table: EmtTable) -> ShapeEstimate:
    """Invert a table; write estimate JSON, boundary CSV, and SVG overlay."""
    order = min(config.order, table.order)
    estimate = reconstruct(table, config.materials, order)
    samples = reconstruct_curve(estimate, config.theta_samples)
    truth = sample(config.shape, config.theta_samples)
    config.output_dir.mkdir(parents=True, exist_ok=True)
    _write_json(config.output_dir / "shape_estimate.json", shape_estimate_to_json(estimate))
    _write_boundary_csv(config.output_dir / "boundary.csv", samples)
    _write_overlay_svg(config.output_dir / "overlay.svg", truth.z, samples)
    return estimate


def cmd_roundtrip(config: RunConfig) -> dict:
    """forward -> optional noise -> reconstruct -> error report."""
    table = cmd_forward(config)
    estimate = cmd_reconstruct(config, table)
    samples = reconstruct_curve(estimate, config.theta_samples)
    truth = sample(config.shape, config.theta_samples)
    err = shape_error(samples, truth, center=estimate.disk.a0)
    report = {
        "shape": descriptor_to_json(config.shape),
        "order": min(config.order, table.order),
        "nodes": config.nodes,
        "noise": table_to_json(table)["provenance"],
        "estimate": shape_estimate_to_json(estimate),
        "error": {"hausdorff": err.hausdorff, "radialL2": err.radial_l2},
    }
    _write_json(config.output_dir / "report.json", report)
    return report


_ORACLE_CASES = [
    (0.0, 0.7), (0.0, 1.0), (0.0, 1.3),
    (-0.9 + 1.2j, 0.7), (-0.9 + 1.2j, 1.0), (-0.9 + 1.2j, 1.3),
]


def cmd_oracle(stream=None) -> bool:
    """Compare Nystrom EMT tables against the disk closed forms; print a
    pass/fail matrix and return overall success."""
    stream = stream if stream is not None else sys.stdout
    background = LameConstants(1.5, 1.2)
    ok = True
    for label, inclusion in (("soft", LameConstants(0.6, 0.4)),
                             ("stiff", LameConstants(1.8, 1.5))):
        mat = MaterialPair(background, inclusion)
        for a0, gamma in _ORACLE_CASES:
            curve = sample(Disk(a0, gamma), 128)
            table = emt_table(curve, mat, 3)
            exact = np.array([
                [[[disk_emt_general(mat, gamma, a0, n, m, t, s)
                   for s in (1, 2)] for t in (1, 2)]
                 for m in (1, 2, 3)] for n in (1, 2, 3)
            ])
            scale = np.abs(exact).max()
            gap = np.abs(table.values - exact).max() / scale
            passed = gap < 1e-8
            ok &= passed
            print(f"{'PASS' if passed else 'FAIL'}  {label:5s} disk a0={a0!s:12s} "
                  f"gamma={gamma:.1f}  max rel err {gap:.3e}", file=stream)
    return ok


def _add_common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--order", type=int, help="override EMT order")
    parser.add_argument("--nodes", type=int, help="override quadrature node count")
    parser.add_argument("--noise-var", type=float, dest="noise_var",
                        help="override noise variance sigma^2")
    parser.add_argument("--seed", type=int, help="override noise seed")
    parser.add_argument("--out", help="override output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="emtshape",
        description="Contracted elastic moment tensors and analytic shape recovery",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    p_forward = sub.add_parser("forward", help="compute an EMT table from a shape")
    p_forward.add_argument("config")
    _add_common_flags(p_forward)
    p_rec = sub.add_parser("reconstruct", help="invert a stored EMT table")
    p_rec.add_argument("config")
    p_rec.add_argument("table")
    _add_common_flags(p_rec)
    p_round = sub.add_parser("roundtrip", help="forward, invert, and report errors")
    p_round.add_argument("config")
    _add_common_flags(p_round)
    sub.add_parser("oracle", help="run the disk closed-form oracle suite")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "oracle":
            return 0 if cmd_oracle() else 1
        config = load_config(args.config, order=args.order, nodes=args.nodes,
                             noise_var=args.noise_var, seed=args.seed, out=args.out)
        if args.command == "forward":
            cmd_forward(config)
        elif args.command == "reconstruct":
            try:
                table = table_from_json(json.loads(Path(args.table).read_text()))
            except OSError as exc:
                raise ConfigError(f"cannot read table {args.table}: {exc}") from exc
            except json.JSONDecodeError as exc:
                raise ConfigError(f"malformed JSON in {args.table}: {exc}") from exc
            except ValueError as exc:
                raise ConfigError(f"invalid table {args.table}: {exc}") from exc
            cmd_reconstruct(config, table)
        else:
            cmd_roundtrip(config)
        return 0
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except (SolverError, InversionError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 1
