#!/usr/bin/env python3
"""brokenarrow

Command-line front end for the brokenarrow library.

Subcommands:
- state     amplitudes of a Hardy / Hardy-Unruh / singlet state in a basis pair
- array     correlation array (Born rule) plus the non-signaling check
- chains    conditionals, entailed conditionals and broken arrows
- lhv       raffle feasibility (LP), Monte Carlo raffle runs, ticket lists
- geometry  L / Q / P membership of a point or of a family's array
- curve     Hardy-Unruh curve with the CHSH violation identity
- regions   plot-ready samples of L, Q, P (grid, boundary, section, projection)
- sweep     any of array / chains / lhv / curve over an alpha grid

Design notes:
- Payload goes to stdout (or --out); [tag] status lines go to stderr.
- Defaults come from config/defaults.yaml, overridden by flags.
- Exit codes: 0 ok, 2 usage or validation error, 1 internal error.

Examples:
  python -m brokenarrow chains --family hu --alpha pi/4
  python -m brokenarrow lhv feasibility --family hardy --alpha-cos "sqrt(2/5)"
  python -m brokenarrow curve --points 101 --format csv
  python -m brokenarrow regions --region Q --setup mermin --mode boundary --format csv
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import pandas as pd

from brokenarrow.config import (
    DEFAULT_CONFIG_YAML,
    FAMILIES,
    RunConfig,
    load_defaults,
    parse_angle,
    parse_complex_triple,
    parse_real,
    parse_settings,
)
from brokenarrow.errors import BrokenArrowError, ConfigError
from brokenarrow.export import dumps_csv, dumps_json, emit, meta_block

SINGLET_SETTINGS = "a=0,b=2*pi/3,c=4*pi/3"


# -----------------------------------------------------------------------------
# CLI structure
# -----------------------------------------------------------------------------

def _common_parser() -> argparse.ArgumentParser:
    """Flags shared by every subcommand (family, parameters, output)."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--family", choices=FAMILIES, default=None, help="State family")
    common.add_argument("--alpha", default=None, help="Half-angle alpha, e.g. 0.7854 or pi/4")
    common.add_argument("--alpha-cos", default=None, help="cos(alpha) instead of alpha, e.g. 'sqrt(2/5)'")
    common.add_argument("--degrees", action="store_true", help="Read --alpha and --settings in degrees")
    common.add_argument("--uvw", nargs=3, default=None, metavar="RE,IM", help="Complex u v w for hu-generic")
    common.add_argument("--settings", default=None, help="Peeling angles, e.g. 'a=0,b=2*pi/3,c=4*pi/3' (singlet)")
    common.add_argument("--tol", type=float, default=None, help="Zero tolerance (default from config)")
    common.add_argument("--seed", type=int, default=None, help="RNG seed (default from config)")
    common.add_argument("--points", type=int, default=None, help="Alpha grid points (default from config)")
    common.add_argument("--format", dest="fmt", choices=["json", "csv"], default=None, help="Output format")
    common.add_argument("--out", type=Path, default=None, help="Write to this file instead of stdout")
    return common


def build_parser() -> argparse.ArgumentParser:
    """Build the argument parser for brokenarrow."""
    ap = argparse.ArgumentParser(
        prog="brokenarrow",
        description="Hardy and Hardy-Unruh correlations, broken arrows, raffles and correlation geometry",
    )

    # --- Global args ---
    ap.add_argument(
        "--config",
        type=Path,
        default=None,
        help=f"Path to defaults YAML (default: {DEFAULT_CONFIG_YAML} if present)",
    )
    ap.add_argument("--quiet", action="store_true", help="Suppress [tag] status lines on stderr")

    common = _common_parser()
    sub = ap.add_subparsers(dest="command", required=True)

    # --- state ---
    state = sub.add_parser("state", parents=[common], help="State amplitudes in a basis pair")
    state.add_argument("--basis", default=None, help="Alice,Bob setting labels, e.g. 'a,b' (default: family's own)")

    # --- array ---
    sub.add_parser("array", parents=[common], help="Correlation array and non-signaling check")

    # --- chains ---
    sub.add_parser("chains", parents=[common], help="Conditionals and broken arrows")

    # --- lhv ---
    lhv = sub.add_parser("lhv", parents=[common], help="Raffle models: feasibility, sampling, tickets")
    lhv.add_argument("mode", choices=["feasibility", "sample", "tickets"])
    lhv.add_argument("--draws", type=int, default=None, help="Monte Carlo draws (default from config)")
    lhv.add_argument(
        "--raffle",
        default="uniform",
        help="Raffle to sample: 'uniform', 'fit' (LP witness of the array) or 'ticket:K'",
    )
    lhv.add_argument("--shared", action="store_true", help="Shared anticorrelated settings (Mermin raffles)")

    # --- geometry ---
    geo = sub.add_parser("geometry", parents=[common], help="L / Q / P membership report")
    geo.add_argument("--point", default=None, help="Point 'x,y,z' (or 'ac,ad,bc,bd' with --setup chsh)")
    geo.add_argument("--setup", choices=["mermin", "chsh"], default=None)

    # --- curve ---
    sub.add_parser("curve", parents=[common], help="Hardy-Unruh curve and violation identity")

    # --- regions ---
    reg = sub.add_parser("regions", parents=[common], help="Plot-ready region samples")
    reg.add_argument("--region", choices=["L", "Q", "P"], default="L")
    reg.add_argument("--setup", choices=["mermin", "chsh"], default="mermin")
    reg.add_argument("--mode", choices=["grid", "boundary", "section", "projection", "curve"], default="grid")
    reg.add_argument("--resolution", type=int, default=None, help="Samples per axis (default from config)")
    reg.add_argument("--axis", choices=["x", "y", "z"], default="z", help="Fixed / dropped coordinate")
    reg.add_argument("--fix", default="0", help="Value of the fixed coordinate for --mode section")

    # --- sweep ---
    sw = sub.add_parser("sweep", parents=[common], help="Alpha grid over one analysis")
    sw.add_argument("--target", choices=["array", "chains", "lhv", "curve"], required=True)

    return ap


# -----------------------------------------------------------------------------
# Shared helpers
# -----------------------------------------------------------------------------

def _status(args: argparse.Namespace, tag: str, msg: str) -> None:
    if not args.quiet:
        print(f"[{tag}] {msg}", file=sys.stderr)


def _flag_or(args: argparse.Namespace, name: str, default: Any) -> Any:
    """Subcommand-only flag if given (0 included), else the config default."""
    value = getattr(args, name, None)
    return default if value is None else value


def _resolve(args: argparse.Namespace) -> RunConfig:
    """Merge built-in fallbacks, the YAML file and the flags."""
    defaults = load_defaults(args.config)
    tols = defaults["tolerances"]
    sampling = defaults["sampling"]
    grid = defaults["grid"]

    alpha: Optional[float] = None
    if args.alpha is not None and args.alpha_cos is not None:
        raise ConfigError("Give either --alpha or --alpha-cos, not both")
    if args.alpha is not None:
        alpha = parse_angle(args.alpha, degrees=args.degrees)
    elif args.alpha_cos is not None:
        from brokenarrow.states.qstate import alpha_from_cos

        alpha = alpha_from_cos(parse_real(args.alpha_cos))

    settings = None
    if args.settings is not None:
        settings = tuple(parse_settings(args.settings, degrees=args.degrees))

    extra: Dict[str, Any] = {}
    for key in ("mode", "raffle", "shared", "target", "region", "setup", "axis", "basis", "point"):
        if getattr(args, key, None) is not None:
            extra[key] = getattr(args, key)

    return RunConfig(
        command=args.command,
        family=args.family,
        alpha=alpha,
        uvw=parse_complex_triple(args.uvw) if args.uvw else None,
        settings=settings,
        tol=args.tol if args.tol is not None else float(tols["zero"]),
        feasibility_tol=float(tols["feasibility"]),
        boundary_tol=float(tols["boundary"]),
        fmt=args.fmt or str(defaults["output"]["format"]),
        out=args.out,
        seed=args.seed if args.seed is not None else int(sampling["seed"]),
        draws=_flag_or(args, "draws", int(sampling["draws"])),
        block_size=int(sampling["block_size"]),
        points=args.points if args.points is not None else int(grid["points"]),
        resolution=_flag_or(args, "resolution", int(grid["resolution"])),
        rng=str(sampling["rng"]),
        extra=extra,
    )


def _write(cfg: RunConfig, payload: Dict[str, Any], frame: pd.DataFrame) -> None:
    if cfg.fmt == "csv":
        emit(dumps_csv(frame), cfg.out)
    else:
        emit(dumps_json(payload, meta_block(cfg.command, cfg.echo(), cfg.seed, cfg.rng)), cfg.out)


def _require_family(cfg: RunConfig, allowed: Tuple[str, ...] = FAMILIES) -> str:
    if cfg.family is None:
        raise ConfigError(f"{cfg.command} needs --family ({', '.join(allowed)})")
    if cfg.family not in allowed:
        raise ConfigError(f"{cfg.command} supports --family {', '.join(allowed)}, got {cfg.family}")
    return cfg.family


def _singlet_settings(cfg: RunConfig):
    from brokenarrow.states.qstate import setting

    spec = cfg.settings or parse_settings(SINGLET_SETTINGS)
    return tuple(setting(label, phi) for label, phi in spec)


def _build_array(cfg: RunConfig, alpha: Optional[float] = None):
    """Correlation array of the configured family."""
    from brokenarrow.states import qstate

    family = _require_family(cfg)
    alpha = cfg.alpha if alpha is None else alpha
    if family == "hardy":
        return qstate.hardy_array(alpha)
    if family == "hu":
        return qstate.hu_array(alpha)
    if family == "hu-generic":
        hu = qstate.hu_state_generic(*cfg.uvw)
        return qstate.born_array(hu.state, hu.settings_a, hu.settings_b)
    return qstate.singlet_array(_singlet_settings(cfg))


# -----------------------------------------------------------------------------
# Command handlers
# -----------------------------------------------------------------------------

def _handle_state(args: argparse.Namespace) -> int:
    from brokenarrow.states import qstate

    cfg = _resolve(args)
    family = _require_family(cfg)
    basis = [b.strip() for b in args.basis.split(",")] if args.basis else None
    if basis is not None and len(basis) != 2:
        raise ConfigError(f"--basis takes two labels 'A,B', got {args.basis!r}")

    if family == "hardy":
        state = qstate.hardy_state(cfg.alpha, tuple(basis or ("a", "a")))
    elif family == "hu":
        state = qstate.hu_state(cfg.alpha, tuple(basis or ("b", "b")))
    elif family == "hu-generic":
        hu = qstate.hu_state_generic(*cfg.uvw)
        la, lb = basis or ("b", "b'")
        sa = {s.label: s for s in hu.settings_a}
        sb = {s.label: s for s in hu.settings_b}
        if la not in sa or lb not in sb:
            raise ConfigError(f"hu-generic bases are Alice {sorted(sa)} and Bob {sorted(sb)}")
        state = hu.state.in_basis(sa[la], sb[lb])
    else:
        named = {s.label: s for s in _singlet_settings(cfg)}
        la, lb = basis or (next(iter(named)),) * 2
        if la not in named or lb not in named:
            raise ConfigError(f"singlet bases are {sorted(named)}")
        state = qstate.singlet().in_basis(named[la], named[lb])

    _status(args, "state", f"{family} in basis ({state.basis_a.label}, {state.basis_b.label})")
    payload = {"state": state.to_dict()}
    frame = pd.DataFrame({
        "outcome": ["++", "+-", "-+", "--"],
        "re": state.amplitudes.real,
        "im": state.amplitudes.imag,
        "probability": abs(state.amplitudes) ** 2,
    })
    _write(cfg, payload, frame)
    return 0


def _handle_array(args: argparse.Namespace) -> int:
    from brokenarrow.arrays.correlations import check_nonsignaling

    cfg = _resolve(args)
    array = _build_array(cfg)
    report = check_nonsignaling(array, tol=cfg.tol)
    _status(args, "array", f"{array.shape[0]}x{array.shape[1]} cells, non-signaling: {report.passed}")
    _write(cfg, {"array": array.to_dict(), "nonsignaling": report.to_dict()}, array.to_frame())
    return 0


def _chains_frame(report) -> pd.DataFrame:
    rows = [b.to_dict() for b in report.broken]
    cols = ["antecedent", "consequent", "witness_cell", "witness_outcome", "witness_probability"]
    frame = pd.DataFrame(rows, columns=cols)
    frame["witness_cell"] = frame["witness_cell"].map(lambda c: ",".join(c))
    return frame


def _handle_chains(args: argparse.Namespace) -> int:
    from brokenarrow.arrays.chains import find_broken_arrows

    cfg = _resolve(args)
    report = find_broken_arrows(_build_array(cfg), tol=cfg.tol)
    _status(args, "chains", f"{len(report.conditionals)} conditionals, {len(report.broken)} broken arrow(s)")
    for b in report.broken:
        _status(args, "chains", f"{b.to_dict()['arrow']}  witness {b.witness_probability:.6g}")
    _write(cfg, {"chains": report.to_dict()}, _chains_frame(report))
    return 0


def _pick_raffle(cfg: RunConfig, args: argparse.Namespace, array):
    from brokenarrow.lhv.feasibility import lhv_feasibility
    from brokenarrow.lhv.raffles import Raffle, Scenario, chsh_scenario, enumerate_tickets, mermin_scenario

    if array is not None:
        scenario = Scenario.for_array(array, shared=args.shared)
    else:
        scenario = mermin_scenario() if args.shared else chsh_scenario()

    choice = args.raffle
    if choice == "uniform":
        return Raffle.uniform(scenario)
    if choice == "fit":
        if array is None:
            raise ConfigError("--raffle fit needs --family")
        result = lhv_feasibility(array, tol=cfg.feasibility_tol, shared=args.shared)
        if not result.feasible:
            raise BrokenArrowError("Array is not LHV-feasible; there is no raffle to sample")
        return result.raffle()
    if choice.startswith("ticket:"):
        tickets = enumerate_tickets(scenario)
        k = int(choice.split(":", 1)[1])
        if not 0 <= k < len(tickets):
            raise ConfigError(f"ticket index must lie in [0, {len(tickets)})")
        return Raffle.single(scenario, tickets[k])
    raise ConfigError(f"Unknown --raffle {choice!r}")


def _handle_lhv(args: argparse.Namespace) -> int:
    from brokenarrow.arrays.correlations import balance_array, chsh_chis
    from brokenarrow.geometry.facets import chsh_local_test
    from brokenarrow.lhv.feasibility import lhv_feasibility
    from brokenarrow.lhv.raffles import enumerate_tickets, tickets_frame
    from brokenarrow.lhv.sampling import sample_raffle

    cfg = _resolve(args)
    array = _build_array(cfg) if cfg.family else None

    if args.mode == "feasibility":
        if array is None:
            raise ConfigError("lhv feasibility needs --family")
        result = lhv_feasibility(array, tol=cfg.feasibility_tol, shared=args.shared)
        payload: Dict[str, Any] = {"feasibility": result.to_dict()}
        if array.shape == (2, 2):
            payload["chsh"] = chsh_local_test(chsh_chis(array), tol=cfg.boundary_tol).to_dict()
        _status(args, "lhv", f"feasible: {result.feasible} (objective {result.objective:.3g})")
        frame = pd.DataFrame(result.support(), columns=["ticket", "weight"])
        _write(cfg, payload, frame)
        return 0

    if args.mode == "sample":
        raffle = _pick_raffle(cfg, args, array)
        _status(args, "lhv", f"sampling {cfg.draws} draws from {len(raffle.tickets)} ticket(s), seed {cfg.seed}")
        sample = sample_raffle(raffle, cfg.draws, cfg.seed, block_size=cfg.block_size)
        if sample.undrawn():
            _status(args, "lhv", f"{len(sample.undrawn())} setting pair(s) never drawn; their frequencies are empty")
        frame = sample.to_frame()
        _write(cfg, {"raffle": raffle.to_dict(), "sample": sample.to_dict()}, frame)
        return 0

    raffle = _pick_raffle(cfg, args, array)
    tickets = enumerate_tickets(raffle.scenario)
    _status(args, "lhv", f"{len(tickets)} tickets")
    frame = tickets_frame(tickets, raffle.scenario)
    _write(cfg, {"tickets": frame.to_dict(orient="records")}, frame)
    return 0


def _handle_geometry(args: argparse.Namespace) -> int:
    from brokenarrow.arrays.correlations import chsh_chis, mermin_point
    from brokenarrow.geometry.facets import region_report

    cfg = _resolve(args)
    if args.point is not None:
        coords = [parse_real(x) for x in args.point.split(",")]
        setup = args.setup or ("chsh" if len(coords) == 4 else "mermin")
        report = region_report(coords, setup=setup, tol=cfg.boundary_tol)
    else:
        array = _build_array(cfg)
        if array.shape == (2, 2):
            report = region_report(chsh_chis(array), setup="chsh", tol=cfg.boundary_tol)
        elif array.shape == (3, 3):
            report = region_report(mermin_point(array), setup="mermin", tol=cfg.boundary_tol)
        else:
            raise ConfigError(f"geometry needs a 2x2 or 3x3 array, got {array.shape}")
    _status(args, "geometry", f"{report.setup} point {report.point}: {report.label}")
    frame = pd.DataFrame([{
        "setup": report.setup,
        "point": " ".join(repr(c) for c in report.point),
        "in_L": report.in_L,
        "in_Q": report.in_Q,
        "in_P": report.in_P,
        "quantum_residual": report.quantum.residual,
    }])
    _write(cfg, {"report": report.to_dict()}, frame)
    return 0


def _handle_curve(args: argparse.Namespace) -> int:
    from brokenarrow.geometry.curve import alpha_grid, curve_frame, max_witness

    cfg = _resolve(args)
    frame = curve_frame(alpha_grid(cfg.points))
    peak = max_witness("hu")
    _status(args, "curve", f"{len(frame)} points, max witness {peak.value:.10f} at alpha {peak.alpha:.6f}")
    _write(cfg, {"curve": frame.to_dict(orient="records"), "max_witness": peak.to_dict()}, frame)
    return 0


def _handle_regions(args: argparse.Namespace) -> int:
    from brokenarrow.geometry.regions import RegionSpec, emit_regions, region_summary

    cfg = _resolve(args)
    spec = RegionSpec(
        region=args.region,
        setup=args.setup,
        mode=args.mode,
        resolution=cfg.resolution,
        axis="xyz".index(args.axis),
        fix=parse_real(args.fix),
        tol=cfg.boundary_tol,
    )
    frame = emit_regions(spec)
    summary = region_summary(frame)
    _status(args, "regions", f"{spec.setup} {spec.region} {spec.mode}: {summary['rows']} rows")
    _write(cfg, {"summary": summary, "rows": frame.to_dict(orient="records")}, frame)
    return 0


def _sweep_frame(cfg: RunConfig, target: str) -> pd.DataFrame:
    from brokenarrow.arrays.chains import find_broken_arrows
    from brokenarrow.geometry.curve import alpha_grid, curve_frame
    from brokenarrow.lhv.feasibility import lhv_feasibility

    alphas = alpha_grid(cfg.points)
    if target == "curve":
        return curve_frame(alphas)

    _require_family(cfg, ("hardy", "hu"))
    frames: List[pd.DataFrame] = []
    rows: List[Dict[str, Any]] = []
    for a in alphas:
        array = _build_array(cfg, alpha=float(a))
        if target == "array":
            f = array.to_frame()
            f.insert(0, "alpha", float(a))
            frames.append(f)
        elif target == "chains":
            report = find_broken_arrows(array, tol=cfg.tol)
            rows.append({
                "alpha": float(a),
                "n_broken": len(report.broken),
                "arrow": "; ".join(b.to_dict()["arrow"] for b in report.broken),
                "witness": max((b.witness_probability for b in report.broken), default=0.0),
            })
        else:
            result = lhv_feasibility(array, tol=cfg.feasibility_tol)
            rows.append({"alpha": float(a), "feasible": result.feasible, "objective": result.to_dict()["objective"]})
    if target == "array":
        return pd.concat(frames, ignore_index=True)
    return pd.DataFrame(rows)


def _handle_sweep(args: argparse.Namespace) -> int:
    cfg = _resolve(args)
    frame = _sweep_frame(cfg, args.target)
    _status(args, "sweep", f"{args.target} over {cfg.points} alpha values: {len(frame)} rows")
    _write(cfg, {"target": args.target, "rows": frame.to_dict(orient="records")}, frame)
    return 0


# -----------------------------------------------------------------------------
# Main entrypoint
# -----------------------------------------------------------------------------

def main(argv: Optional[List[str]] = None) -> int:
    """Main entrypoint for the brokenarrow CLI."""
    ap = build_parser()
    args = ap.parse_args(argv)

    handlers = {
        "state": _handle_state,
        "array": _handle_array,
        "chains": _handle_chains,
        "lhv": _handle_lhv,
        "geometry": _handle_geometry,
        "curve": _handle_curve,
        "regions": _handle_regions,
        "sweep": _handle_sweep,
    }

    handler = handlers.get(args.command)
    if handler is None:
        raise SystemExit(f"Unknown command: {args.command}")

    try:
        return handler(args)
    except BrokenArrowError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except Exception as e:  # noqa: BLE001
        print(f"error: internal: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
