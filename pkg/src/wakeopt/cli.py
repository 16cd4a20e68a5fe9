"""Command-line front end.

Subcommands
-----------
eval         analytical power/delay/gradients at a given operating point
optimize     closed-form delay-constrained optimum (+ turnoff rate, regime)
simulate     discrete-event simulation of a configuration
compare-drx  optimized wake-up scheme vs exhaustively optimized DRX
reproduce    regenerate a validation artifact and check it (exit 1 on fail)
sweep        optimize over lists of arrival rates / delay bounds / TTIs

All commands are deterministic given their full flag set and seed; files
written with ``--out`` are byte-identical across re-runs.  Exit codes:
0 success, 1 model/infeasibility error or failed reproduction check,
2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict
from pathlib import Path

from .core import (ChannelErrorModel, PowerProfile, TimingParams,
                   TrafficModel, WakeupModelError, WuConfig)
from .drx import (DEFAULT_DRX_GRID, REDUCED_DRX_GRID,
                  optimize_drx_exhaustive, relative_power_saving)
from .metrics import (average_delay_full, average_delay_simplified,
                      average_power_full, average_power_simplified,
                      delay_gradient, power_gradient)
from .optimizer import Constraint, Regime, optimize
from .reference import REFERENCE_PROFILE, REFERENCE_T_ON
from .report import REPRO_TARGETS, report_to_dict, write_csv, write_json
from .wusim import SimConfig, simulate

_SEEDED_TARGETS = {"fig5", "fig6", "fig7"}


def _add_overrides(parser: argparse.ArgumentParser) -> None:
    g = parser.add_argument_group("model overrides")
    g.add_argument("--tti", type=float, default=1.0, help="TTI length, ms")
    g.add_argument("--pfa", type=float, default=0.0, help="false-alarm probability")
    g.add_argument("--pmd", type=float, default=0.0, help="misdetection probability")
    g.add_argument("--ton", type=float, default=None,
                   help="WRx on-duration, ms (default: reference 1/14)")
    g.add_argument("--tsu", type=float, default=15.0, help="start-up time, ms")
    g.add_argument("--tpd", type=float, default=10.0, help="power-down time, ms")
    g.add_argument("--phi", type=float, default=None,
                   help="decode/idle-active power ratio (sets pw2 = phi * pw3)")
    parser.add_argument("--config", type=Path, default=None,
                        help="JSON run configuration; flags override its values")
    parser.add_argument("--out", type=Path, default=None, help="output directory")
    parser.add_argument("--format", choices=("json", "csv", "text"),
                        default="json", help="stdout format")
    parser.add_argument("--seed", type=int, default=0, help="RNG seed")


def _load_config(path: Path | None) -> dict:
    if path is None:
        return {}
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def _build_model(args, file_cfg: dict):
    prof = dict(pw1=REFERENCE_PROFILE.pw1, pw2=REFERENCE_PROFILE.pw2,
                pw3=REFERENCE_PROFILE.pw3, pw4=REFERENCE_PROFILE.pw4)
    prof.update(file_cfg.get("profile", {}))
    if args.phi is not None:
        prof["pw2"] = args.phi * prof["pw3"]
    profile = PowerProfile(**prof)

    tim = dict(t_su=15.0, t_pd=10.0, t_on=None, tti=1.0)
    tim.update(file_cfg.get("timing", {}))
    for key, flag in (("t_su", "tsu"), ("t_pd", "tpd"), ("tti", "tti")):
        value = getattr(args, flag)
        if flag == "tti" and value == 1.0 and "tti" in file_cfg.get("timing", {}):
            continue  # keep the file value unless the flag was changed
        tim[key] = value
    if args.ton is not None:
        tim["t_on"] = args.ton
    if tim["t_on"] is None:
        tim["t_on"] = REFERENCE_T_ON if REFERENCE_T_ON < tim["tti"] else 0.0
    timing = TimingParams(**tim)

    chan = dict(p_fa=args.pfa, p_md=args.pmd)
    file_chan = file_cfg.get("channel", {})
    if args.pfa == 0.0 and "p_fa" in file_chan:
        chan["p_fa"] = file_chan["p_fa"]
    if args.pmd == 0.0 and "p_md" in file_chan:
        chan["p_md"] = file_chan["p_md"]
    channel = ChannelErrorModel(**chan)
    return profile, timing, channel


def _emit(payload: dict, args, filename: str) -> None:
    if args.format == "json":
        print(json.dumps(payload, indent=2, sort_keys=True))
    elif args.format == "text":
        for key, value in payload.items():
            print(f"{key}: {value}")
    else:  # csv: one record, scalar fields only
        flat = {k: v for k, v in payload.items()
                if isinstance(v, (int, float, str, bool))}
        import csv as _csv
        writer = _csv.DictWriter(sys.stdout, fieldnames=list(flat.keys()))
        writer.writeheader()
        writer.writerow(flat)
    if args.out is not None:
        args.out.mkdir(parents=True, exist_ok=True)
        write_json(args.out / filename, payload)


def _parse_list(text: str) -> list[float]:
    return [float(tok) for tok in text.split(",") if tok.strip()]


def _cmd_eval(args) -> int:
    file_cfg = _load_config(args.config)
    profile, timing, channel = _build_model(args, file_cfg)
    traffic = TrafficModel(args.lam)
    cfg = WuConfig(t_w=args.tw, t_i=args.ti)
    cfg.check_against(timing)
    d_full = average_delay_full(timing, traffic, channel, cfg)
    pg = power_gradient(profile, timing, traffic, cfg)
    dg = delay_gradient(timing, traffic, cfg)
    payload = {
        "lambda_per_ms": traffic.lam,
        "t_w_ms": cfg.t_w, "t_i_ms": cfg.t_i, "tti_ms": timing.tti,
        "d_max_ms": args.dmax,
        "power_full_mw": average_power_full(profile, timing, traffic, channel, cfg),
        "power_simplified_mw": average_power_simplified(profile, timing, traffic, cfg),
        "delay_full_ms": d_full.delay,
        "delay_full_series_terms": d_full.series_terms,
        "delay_full_tail_mass": d_full.tail_mass,
        "delay_full_truncated": d_full.truncated,
        "delay_simplified_ms": average_delay_simplified(timing, traffic, cfg),
        "power_gradient_d_tw": pg.d_tw, "power_gradient_d_ti": pg.d_ti,
        "delay_gradient_d_tw": dg.d_tw, "delay_gradient_d_ti": dg.d_ti,
    }
    _emit(payload, args, "eval.json")
    return 0


def _optimize_payload(profile, timing, traffic, constraint) -> dict:
    res = optimize(profile, timing, traffic, constraint)
    payload = {
        "lambda_per_ms": traffic.lam,
        "d_max_ms": constraint.d_max,
        "tti_ms": timing.tti,
        "regime": res.regime.value,
        "lambda_t_per_ms": res.lambda_t,
        "t_wb_ms": res.t_wb,
        "t_w_star_ms": res.t_w_star,
        "t_i_star_ms": res.t_i_star,
        "predicted_power_mw": res.predicted_power,
        "predicted_delay_ms": res.predicted_delay,
    }
    if res.advisory_config is not None:
        payload["advisory_t_w_ms"] = res.advisory_config.t_w
        payload["advisory_t_i_ms"] = res.advisory_config.t_i
    if res.stationary_point is not None:
        payload["stationary_point_ms"] = res.stationary_point
        payload["stationary_below_t_wb"] = res.stationary_below_twb
    return payload


def _cmd_optimize(args) -> int:
    file_cfg = _load_config(args.config)
    profile, timing, _ = _build_model(args, file_cfg)
    payload = _optimize_payload(profile, timing, TrafficModel(args.lam),
                                Constraint(args.dmax))
    _emit(payload, args, "optimize.json")
    return 0


def _cmd_simulate(args) -> int:
    file_cfg = _load_config(args.config)
    profile, timing, channel = _build_model(args, file_cfg)
    traffic = TrafficModel(args.lam)
    cfg = WuConfig(t_w=args.tw, t_i=args.ti)
    sim = SimConfig(seed=args.seed,
                    n_cycles=args.cycles if args.horizon is None else None,
                    horizon_ms=args.horizon,
                    warmup_fraction=args.warmup)
    report = simulate(profile, timing, traffic, channel, cfg, sim)
    payload = {"lambda_per_ms": traffic.lam, "t_w_ms": cfg.t_w,
               "t_i_ms": cfg.t_i, **report_to_dict(report)}
    _emit(payload, args, "simulate.json")
    return 0


def _cmd_compare_drx(args) -> int:
    file_cfg = _load_config(args.config)
    profile, timing, _ = _build_model(args, file_cfg)
    grid = REDUCED_DRX_GRID if args.grid == "reduced" else DEFAULT_DRX_GRID
    from .reference import REFERENCE_DRX_TABLE
    sim = (SimConfig(seed=args.seed, n_cycles=args.cycles)
           if args.drx_mode == "simulate" else None)
    rows = []
    for lam in _parse_list(args.lam):
        for dmax in _parse_list(args.dmax):
            traffic = TrafficModel(lam)
            constraint = Constraint(dmax)
            wus = optimize(profile, timing, traffic, constraint)
            drx = optimize_drx_exhaustive(REFERENCE_DRX_TABLE, traffic,
                                          constraint, grid, tti=timing.tti,
                                          mode=args.drx_mode, sim=sim)
            rows.append({
                "lambda_per_ms": lam, "d_max_ms": dmax,
                "wus_regime": wus.regime.value,
                "wus_power_mw": wus.predicted_power,
                "drx_power_mw": drx.power_mw,
                "drx_delay_ms": drx.delay_ms,
                "drx_t_on_ms": drx.config.t_on_drx,
                "drx_t_inactivity_ms": drx.config.t_inactivity,
                "drx_t_short_ms": drx.config.t_short,
                "drx_n_short": drx.config.n_short,
                "drx_t_long_ms": drx.config.t_long,
                "eta_percent": relative_power_saving(drx.power_mw,
                                                     wus.predicted_power),
            })
    if args.format == "json":
        print(json.dumps(rows, indent=2, sort_keys=True))
    else:
        import csv as _csv
        writer = _csv.DictWriter(sys.stdout, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        writer.writerows(rows)
    if args.out is not None:
        args.out.mkdir(parents=True, exist_ok=True)
        write_csv(args.out / "compare_drx.csv", list(rows[0].keys()), rows)
        write_json(args.out / "compare_drx.json", rows)
    return 0


def _cmd_reproduce(args) -> int:
    builder = REPRO_TARGETS[args.target]
    target = builder(seed=args.seed) if args.target in _SEEDED_TARGETS else builder()
    out_dir = args.out if args.out is not None else Path(".")
    out_dir.mkdir(parents=True, exist_ok=True)
    write_csv(out_dir / f"{args.target}.csv", target.fieldnames, target.rows)
    failed = [c for c in target.checks if not c.passed]
    for check in target.checks:
        status = "PASS" if check.passed else "FAIL"
        print(f"[{status}] {check.name}: {check.detail}")
    print(f"{args.target}: {len(target.checks) - len(failed)}/{len(target.checks)} "
          f"checks passed -> {out_dir / (args.target + '.csv')}")
    return 1 if failed else 0


def _cmd_sweep(args) -> int:
    file_cfg = _load_config(args.config)
    profile, timing, _ = _build_model(args, file_cfg)
    lambdas = _parse_list(args.lam) if args.lam else file_cfg.get("lambdas", [])
    dmaxes = _parse_list(args.dmax) if args.dmax else file_cfg.get("d_maxes", [])
    ttis = (_parse_list(args.ttis) if args.ttis
            else file_cfg.get("ttis", [timing.tti]))
    if not lambdas or not dmaxes:
        print("sweep: need --lambda and --dmax lists (flags or config file)",
              file=sys.stderr)
        return 2
    rows = []
    for tti in ttis:
        sweep_timing = TimingParams(t_su=timing.t_su, t_pd=timing.t_pd,
                                    t_on=timing.t_on if timing.t_on < tti else 0.0,
                                    tti=tti)
        for lam in lambdas:
            for dmax in dmaxes:
                rows.append(_optimize_payload(profile, sweep_timing,
                                              TrafficModel(lam), Constraint(dmax)))
    out_dir = args.out if args.out is not None else Path(".")
    out_dir.mkdir(parents=True, exist_ok=True)
    fieldnames = sorted({k for row in rows for k in row})
    for row in rows:
        for key in fieldnames:
            row.setdefault(key, "")
    write_csv(out_dir / "sweep.csv", fieldnames, rows)
    print(f"sweep: {len(rows)} points -> {out_dir / 'sweep.csv'}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wakeopt",
        description="Wake-up scheme modeling, optimization, and simulation")
    sub = parser.add_subparsers(dest="command", required=True)

    p_eval = sub.add_parser("eval", help="analytical metrics at a point")
    p_eval.add_argument("--lambda", dest="lam", type=float, required=True,
                        help="arrival rate, packets/ms")
    p_eval.add_argument("--tw", type=float, required=True, help="wake-up cycle, ms")
    p_eval.add_argument("--ti", type=float, required=True, help="inactivity timer, ms")
    p_eval.add_argument("--dmax", type=float, default=None, help="delay bound, ms")
    _add_overrides(p_eval)
    p_eval.set_defaults(func=_cmd_eval)

    p_opt = sub.add_parser("optimize", help="closed-form optimum")
    p_opt.add_argument("--lambda", dest="lam", type=float, required=True)
    p_opt.add_argument("--dmax", type=float, required=True)
    _add_overrides(p_opt)
    p_opt.set_defaults(func=_cmd_optimize)

    p_sim = sub.add_parser("simulate", help="discrete-event simulation")
    p_sim.add_argument("--lambda", dest="lam", type=float, required=True)
    p_sim.add_argument("--tw", type=float, required=True)
    p_sim.add_argument("--ti", type=float, required=True)
    p_sim.add_argument("--cycles", type=int, default=100_000,
                       help="measured sleep cycles")
    p_sim.add_argument("--horizon", type=float, default=None,
                       help="measured time horizon, ms (overrides --cycles)")
    p_sim.add_argument("--warmup", type=float, default=0.05,
                       help="warm-up fraction")
    _add_overrides(p_sim)
    p_sim.set_defaults(func=_cmd_simulate)

    p_cmp = sub.add_parser("compare-drx", help="wake-up scheme vs DRX")
    p_cmp.add_argument("--lambda", dest="lam", type=str, required=True,
                       help="comma-separated arrival rates, packets/ms")
    p_cmp.add_argument("--dmax", type=str, required=True,
                       help="comma-separated delay bounds, ms")
    p_cmp.add_argument("--drx-mode", choices=("approx", "simulate"),
                       default="approx")
    p_cmp.add_argument("--grid", choices=("default", "reduced"),
                       default="reduced")
    p_cmp.add_argument("--cycles", type=int, default=20_000,
                       help="cycles per DRX simulation (simulate mode)")
    _add_overrides(p_cmp)
    p_cmp.set_defaults(func=_cmd_compare_drx)

    p_rep = sub.add_parser("reproduce", help="regenerate validation artifacts")
    p_rep.add_argument("target", choices=sorted(REPRO_TARGETS.keys()))
    _add_overrides(p_rep)
    p_rep.set_defaults(func=_cmd_reproduce)

    p_swp = sub.add_parser("sweep", help="optimize over parameter lists")
    p_swp.add_argument("--lambda", dest="lam", type=str, default=None,
                       help="comma-separated arrival rates")
    p_swp.add_argument("--dmax", type=str, default=None,
                       help="comma-separated delay bounds")
    p_swp.add_argument("--ttis", type=str, default=None,
                       help="comma-separated TTI lengths")
    _add_overrides(p_swp)
    p_swp.set_defaults(func=_cmd_sweep)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except WakeupModelError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
