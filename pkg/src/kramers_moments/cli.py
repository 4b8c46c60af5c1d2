"""Command-line front end and study drivers.

Subcommands reproduce the headline studies as plot-ready CSV (or JSON):
defect/velocity profiles, slip-coefficient sweeps, decay-rate spectra,
effective-viscosity comparisons, determinant scans, order-convergence tables,
and the kinetic-oracle cross-check.  A JSON config file mirrors the flag set;
explicit flags override file values.

Numbers are written as shortest round-trip decimals (up to 17 significant
digits), so identical configurations produce byte-identical files.  Exit
codes: 0 success, 2 validation error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, fields, replace

import numpy as np

from .bgk import build_ordinates_system, equivalence_report, solve_bvp_finite_difference
from .exceptions import NumericalError, ValidationError
from .hermite import modified_hermite_roots
from .moment_system import build_shear_system, layer_widths, spectral_split
from .solver import (
    assemble_boundary_system,
    gu_r26_viscosity,
    lockerby_viscosity,
    solve_kramers,
)

__all__ = ["RunConfig", "main", "run_command"]

COMMANDS = ("solve", "profile", "slip-sweep", "spectrum", "viscosity", "oracle", "convergence", "det-scan")


@dataclass(frozen=True)
class RunConfig:
    command: str
    order: int = 8
    orders: tuple = ()
    chi: float = 1.0
    chis: tuple = ()
    knudsen: float = 1.0 / math.sqrt(2.0)
    sigma12: float = 1.0
    y_min: float = 0.0
    y_max: float = 10.0
    n_points: int = 101
    y_grid: tuple = ()
    output: str = ""
    format: str = "csv"
    oracle_y_max: float = 0.0  # 0 means 25*Kn*lambda_max
    n_cells: int = 2000
    reference_order: int = 40
    order_max: int = 40
    chi_grid_points: int = 96

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise ValidationError(f"unknown command {self.command!r}")
        if self.order < 3:
            raise ValidationError(f"order must be >= 3, got {self.order}")
        for m in self.orders:
            if m < 3:
                raise ValidationError(f"orders must all be >= 3, got {m}")
        for c in (self.chi, *self.chis):
            if not 0.0 < c <= 1.0:
                raise ValidationError(f"accommodation coefficient must be in (0, 1], got {c}")
        if self.knudsen <= 0:
            raise ValidationError(f"Knudsen number must be positive, got {self.knudsen}")
        if self.format not in ("csv", "json"):
            raise ValidationError(f"format must be csv or json, got {self.format!r}")
        if self.y_grid:
            grid = list(self.y_grid)
            if any(b <= a for a, b in zip(grid, grid[1:])):
                raise ValidationError("explicit y grid must be strictly increasing")
            if grid[0] < 0:
                raise ValidationError("y grid must start at >= 0")
        else:
            if self.y_max <= self.y_min or self.y_min < 0 or self.n_points < 2:
                raise ValidationError(
                    f"invalid grid: y_min={self.y_min}, y_max={self.y_max}, n_points={self.n_points}"
                )
        if self.n_cells < 200:
            raise ValidationError(f"n_cells must be >= 200, got {self.n_cells}")
        if not self.output:
            raise ValidationError("output path is required")


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, str):
        return value
    return repr(float(value))


def _write_csv(path: str, header: list[str], rows: list[list]) -> None:
    lines = [",".join(header)]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def _write_json(path: str, payload) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def _emit_table(cfg: RunConfig, header: list[str], rows: list[list], meta: dict) -> None:
    if cfg.format == "json":
        _write_json(cfg.output, {"meta": meta, "columns": header, "rows": rows})
    else:
        _write_csv(cfg.output, header, rows)
        _write_json(cfg.output + ".meta.json", meta)


def coefficient_block(sol) -> dict:
    return {
        "order": sol.order,
        "chi": sol.chi,
        "kn": sol.kn,
        "sigma12": sol.sigma12,
        "c0": sol.c0,
        "modes": [
            {"lambda_hat": float(l), "c_hat": float(c)}
            for l, c in zip(sol.lambda_hat, sol.c_hat)
        ],
    }


def _config_dict(cfg: RunConfig) -> dict:
    out = {}
    for f in fields(cfg):
        v = getattr(cfg, f.name)
        out[f.name] = list(v) if isinstance(v, tuple) else v
    return out


def _grid(cfg: RunConfig) -> np.ndarray:
    if cfg.y_grid:
        return np.asarray(cfg.y_grid, dtype=float)
    return np.linspace(cfg.y_min, cfg.y_max, cfg.n_points)


def cmd_solve(cfg: RunConfig) -> None:
    sol = solve_kramers(cfg.order, cfg.chi, cfg.knudsen, cfg.sigma12)
    _write_json(cfg.output, coefficient_block(sol))


def cmd_profile(cfg: RunConfig) -> None:
    sol = solve_kramers(cfg.order, cfg.chi, cfg.knudsen, cfg.sigma12)
    rows = []
    for y in _grid(cfg):
        rows.append(
            [y, sol.normalized_velocity(y), sol.velocity_defect(y), sol.effective_viscosity(y)]
        )
    meta = {"config": _config_dict(cfg), "coefficients": coefficient_block(sol)}
    _emit_table(cfg, ["y", "u_tilde", "u_defect", "mu_eff_ratio"], rows, meta)


def cmd_slip_sweep(cfg: RunConfig) -> None:
    orders = cfg.orders or (cfg.order,)
    chis = cfg.chis or (cfg.chi,)
    rows = []
    blocks = []
    for m in orders:
        for chi in chis:
            try:
                sol = solve_kramers(m, chi, cfg.knudsen, cfg.sigma12)
            except NumericalError as exc:
                rows.append([m, chi, cfg.knudsen, float("nan"), f"error: {exc}"])
                continue
            rows.append([m, chi, cfg.knudsen, sol.slip_coefficient(), "ok"])
            blocks.append(coefficient_block(sol))
    meta = {"config": _config_dict(cfg), "coefficients": blocks}
    _emit_table(cfg, ["M", "chi", "kn", "zeta", "status"], rows, meta)


def cmd_spectrum(cfg: RunConfig) -> None:
    orders = cfg.orders or tuple(range(4, cfg.order_max + 1))
    widths = {}
    for m in orders:
        widths[m] = layer_widths(spectral_split(build_shear_system(m))).min_width
    rows = []
    for m in orders:
        lam = modified_hermite_roots(m)[: m // 2 - 1]
        w_m = widths[m]
        if m % 2 == 0:
            neighbors = [widths.get(m - 1), widths.get(m + 1)]
            narrower = all(n is None or (w_m is not None and w_m < n) for n in neighbors)
        else:
            narrower = ""
        for idx, val in enumerate(lam, start=1):
            rows.append([m, idx, val, w_m, narrower])
    meta = {"config": _config_dict(cfg)}
    _emit_table(cfg, ["M", "index", "lambda_hat", "w_M", "narrower_than_odd_neighbors"], rows, meta)


def cmd_viscosity(cfg: RunConfig) -> None:
    sol = solve_kramers(cfg.order, cfg.chi, cfg.knudsen, cfg.sigma12)
    ref = solve_kramers(cfg.reference_order, cfg.chi, cfg.knudsen, cfg.sigma12)
    rows = []
    for y in _grid(cfg):
        hme = sol.effective_viscosity(y)
        gu = gu_r26_viscosity(cfg.chi, cfg.knudsen, y)
        # the empirical wall function is singular at y = 0; emit a nan sentinel
        lock = lockerby_viscosity(y) if y > 0 else float("nan")
        reference = ref.effective_viscosity(y)
        rows.append(
            [y, hme, gu, lock, reference, reference - hme, reference - gu, reference - lock]
        )
    meta = {
        "config": _config_dict(cfg),
        "coefficients": coefficient_block(sol),
        "reference_coefficients": coefficient_block(ref),
        "reference_note": f"reference curve is the order-{cfg.reference_order} solution",
    }
    _emit_table(
        cfg,
        ["y", "hme_M", "gu", "lockerby", "reference", "err_hme", "err_gu", "err_lockerby"],
        rows,
        meta,
    )


def cmd_det_scan(cfg: RunConfig) -> None:
    chis = cfg.chis or tuple(np.linspace(0.05, 1.0, cfg.chi_grid_points))
    rows = []
    flagged_any = False
    for m in range(3, cfg.order_max + 1):
        for chi in chis:
            try:
                asm = assemble_boundary_system(m, chi)
                flagged = not np.isfinite(asm.cond_a)
                rows.append([m, chi, asm.det_a, asm.log_abs_det_a, asm.cond_a, flagged])
            except NumericalError:
                rows.append([m, chi, float("nan"), float("nan"), float("nan"), True])
                flagged = True
            flagged_any = flagged_any or flagged
    meta = {"config": _config_dict(cfg), "any_flagged": flagged_any}
    _emit_table(cfg, ["M", "chi", "det_A", "log_abs_det_A", "cond_A", "flagged"], rows, meta)


def cmd_convergence(cfg: RunConfig) -> None:
    orders = cfg.orders or tuple(range(4, cfg.order_max + 1, 2))
    ys = _grid(cfg)
    rows = []
    blocks = []
    prev_zeta = None
    prev_defect = None
    for m in orders:
        sol = solve_kramers(m, cfg.chi, cfg.knudsen, cfg.sigma12)
        blocks.append(coefficient_block(sol))
        zeta = sol.slip_coefficient()
        defect = np.array([sol.velocity_defect(y) for y in ys])
        d_zeta = abs(zeta - prev_zeta) if prev_zeta is not None else float("nan")
        d_def = (
            float(np.max(np.abs(defect - prev_defect))) if prev_defect is not None else float("nan")
        )
        rows.append([m, zeta, d_zeta, d_def])
        prev_zeta, prev_defect = zeta, defect
    meta = {"config": _config_dict(cfg), "coefficients": blocks}
    _emit_table(cfg, ["M", "zeta", "slip_increment", "defect_increment_maxnorm"], rows, meta)


def cmd_oracle(cfg: RunConfig) -> int:
    sol = solve_kramers(cfg.order, cfg.chi, cfg.knudsen, cfg.sigma12)
    osys = build_ordinates_system(cfg.order, cfg.chi, cfg.knudsen, cfg.sigma12)
    lam_max = float(np.max(sol.lambda_hat)) if sol.lambda_hat.size else 1.0
    y_max = cfg.oracle_y_max if cfg.oracle_y_max > 0 else 25.0 * cfg.knudsen * lam_max
    oracle = solve_bvp_finite_difference(osys, y_max, cfg.n_cells)
    report = equivalence_report(sol, oracle)
    payload = report.to_dict()
    payload["config"] = _config_dict(cfg)
    payload["fd_iterations"] = oracle.iterations
    payload["fd_far_field_constant"] = oracle.far_field_constant
    _write_json(cfg.output, payload)
    return 0 if report.passed else 3


def run_command(cfg: RunConfig) -> int:
    cfg.validate()
    handlers = {
        "solve": cmd_solve,
        "profile": cmd_profile,
        "slip-sweep": cmd_slip_sweep,
        "spectrum": cmd_spectrum,
        "viscosity": cmd_viscosity,
        "det-scan": cmd_det_scan,
        "convergence": cmd_convergence,
    }
    if cfg.command == "oracle":
        return cmd_oracle(cfg)
    handlers[cfg.command](cfg)
    return 0


def _float_list(text: str) -> tuple:
    return tuple(float(t) for t in text.split(",") if t.strip())


def _int_list(text: str) -> tuple:
    return tuple(int(t) for t in text.split(",") if t.strip())


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kramers-moments",
        description="Semi-analytical Knudsen-layer solutions from moment closures",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON file mirroring the run configuration")
        p.add_argument("--order", type=int)
        p.add_argument("--orders", type=_int_list, help="comma-separated order list")
        p.add_argument("--chi", type=float)
        p.add_argument("--chis", type=_float_list, help="comma-separated chi list")
        p.add_argument("--knudsen", type=float)
        p.add_argument("--sigma12", type=float)
        p.add_argument("--y-min", dest="y_min", type=float)
        p.add_argument("--y-max", dest="y_max", type=float)
        p.add_argument("--n-points", dest="n_points", type=int)
        p.add_argument("--y-grid", dest="y_grid", type=_float_list, help="explicit comma-separated grid")
        p.add_argument("--oracle-y-max", dest="oracle_y_max", type=float)
        p.add_argument("--n-cells", dest="n_cells", type=int)
        p.add_argument("--reference-order", dest="reference_order", type=int)
        p.add_argument("--order-max", dest="order_max", type=int)
        p.add_argument("--chi-grid-points", dest="chi_grid_points", type=int)
        p.add_argument("--output")
        p.add_argument("--format", choices=("csv", "json"))
    return parser


def build_config(argv: list[str]) -> RunConfig:
    args = _build_parser().parse_args(argv)
    cfg = RunConfig(command=args.command)
    if args.config:
        with open(args.config) as fh:
            raw = json.load(fh)
        known = {f.name for f in fields(RunConfig)}
        unknown = set(raw) - known
        if unknown:
            raise ValidationError(f"unknown config keys: {sorted(unknown)}")
        raw = {k: tuple(v) if isinstance(v, list) else v for k, v in raw.items()}
        raw.pop("command", None)
        cfg = replace(cfg, **raw)
    overrides = {
        name: getattr(args, name)
        for name in (
            "order",
            "orders",
            "chi",
            "chis",
            "knudsen",
            "sigma12",
            "y_min",
            "y_max",
            "n_points",
            "y_grid",
            "oracle_y_max",
            "n_cells",
            "reference_order",
            "order_max",
            "chi_grid_points",
            "output",
            "format",
        )
        if getattr(args, name) is not None
    }
    return replace(cfg, **overrides)


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = build_config(argv)
        code = run_command(cfg)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (NumericalError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"i/o failure: {exc}", file=sys.stderr)
        return 2
    return code


if __name__ == "__main__":
    sys.exit(main())
