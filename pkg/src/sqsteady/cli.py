"""
Command-line front end: single points, parameter sweeps, critical
temperatures and Monte Carlo verification, in both reservoir phase
references, with deterministic CSV/JSON output.

Exit codes: 0 success, 2 config error, 3 instability, 4 unphysical bath,
5 no convergence (lab frame).
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import os
import sys as _sys
import tempfile

import numpy as np

from . import __version__
from .analytic import (
    SymmetricCase,
    critical_temperature,
    nbar_from_temperature,
    nu_minus_analytic,
)
from .config import ConfigError, RunConfig, parse_config
from .gaussian import (
    BathSpec,
    DerivedBath,
    NotStable,
    SystemParams,
    build_drift_rotating,
    build_diffusion_rotating,
    derive_bath_params,
    log_negativity,
    solve_lyapunov,
    steady_state,
)
from .labframe import (
    Frame,
    LabFrameProblem,
    NoConvergence,
    find_periodic_steady_state,
    tc_labframe,
)
from .langevin import RNG_NAME, NoiseModel, UnphysicalBath, default_dt, default_t_end, run_ensemble

EXIT_CONFIG = 2
EXIT_UNSTABLE = 3
EXIT_UNPHYSICAL = 4
EXIT_NO_CONVERGENCE = 5

UNITS_COMMENT = "# units: omega=1, kB=1\n"

SWEEP_HEADER = (
    "frame,omega1,omega2,J,gamma1,gamma2,nbar1,r1,phi1,nbar2,r2,phi2,T,"
    "nu_minus,E_N,entangled,E_N_mean,E_N_min,E_N_max,version,seed,tolerances"
)
TC_HEADER = "frame,omega,gamma,r,J,T_c,entangled,criterion,version,seed,tolerances"


def _fmt(x: float) -> str:
    """17 significant digits: round-trip exact for doubles."""
    return f"{x:.17g}"


def _write_output(path: str | None, text: str) -> None:
    """Atomic write; partial output is never left behind on failure."""
    if path is None:
        _sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _json_text(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _symmetric_resonant(cfg: RunConfig) -> bool:
    s, b1, b2 = cfg.sys, cfg.bath1, cfg.bath2
    return (
        s.omega1 == s.omega2
        and s.gamma1 == s.gamma2
        and b1 == b2
    )


def cmd_steady(cfg: RunConfig) -> str:
    a = build_drift_rotating(cfg.sys)
    d = build_diffusion_rotating(
        cfg.sys, derive_bath_params(cfg.bath1), derive_bath_params(cfg.bath2)
    )
    v = solve_lyapunov(a, d)
    res = log_negativity(v)
    doc = {
        "frame": "rotating@omega1",
        "V": [float(x) for x in v.entries.ravel()],
        "nu_minus": res.nu_minus,
        "E_N": res.E_N,
        "entangled": res.entangled,
        "stability_margin": float(np.max(np.linalg.eigvals(a).real)),
        "version": __version__,
    }
    if _symmetric_resonant(cfg):
        case = SymmetricCase(
            omega=cfg.sys.omega1,
            gamma=cfg.sys.gamma1,
            J=cfg.sys.J,
            r=cfg.bath1.r,
            T=cfg.temperature,
        )
        # closed form assumes nbar consistent with T; flag if overridden
        consistent = math.isclose(
            cfg.bath1.nbar,
            nbar_from_temperature(cfg.sys.omega1, cfg.temperature),
            rel_tol=1e-12,
            abs_tol=1e-12,
        )
        doc["analytic"] = {
            "applicable": consistent,
            "nu_minus": nu_minus_analytic(case) if consistent else None,
        }
    else:
        doc["analytic"] = {"applicable": False, "nu_minus": None}
    return _json_text(doc)


def _point_params(cfg: RunConfig, overrides: dict[str, float]):
    s = cfg.sys
    j = overrides.get("J", s.J)
    sys_p = SystemParams(s.omega1, s.omega2, j, s.gamma1, s.gamma2)
    temp = overrides.get("T", cfg.temperature)
    if "T" in overrides:
        nbar1 = nbar2 = nbar_from_temperature(s.omega1, temp)
    else:
        nbar1, nbar2 = cfg.bath1.nbar, cfg.bath2.nbar
    bath1 = BathSpec(nbar1, overrides.get("r1", cfg.bath1.r), overrides.get("phi1", cfg.bath1.phi))
    bath2 = BathSpec(nbar2, overrides.get("r2", cfg.bath2.r), overrides.get("phi2", cfg.bath2.phi))
    return sys_p, bath1, bath2, temp


def cmd_sweep(cfg: RunConfig) -> str:
    grid = cfg.grid
    assert grid is not None
    lab = grid.frame == "lab"
    tolerances = "lyap=1e-10" + (";eps_ps=" + _fmt(cfg.lab_eps_ps) if lab else "")

    axes_values = [axis.values() for axis in grid.axes]
    if len(axes_values) == 1:
        points = [{grid.axes[0].name: v} for v in axes_values[0]]
    else:
        points = [
            {grid.axes[0].name: v1, grid.axes[1].name: v2}
            for v1 in axes_values[0]
            for v2 in axes_values[1]
        ]

    lines = [UNITS_COMMENT + SWEEP_HEADER]
    for overrides in points:
        sys_p, bath1, bath2, temp = _point_params(cfg, overrides)
        if lab:
            prob = LabFrameProblem(sys_p, bath1, bath2, Frame.ROTATING_M)
            pss = find_periodic_steady_state(
                prob,
                dt=prob.period / cfg.lab_dt_per_period,
                eps_ps=cfg.lab_eps_ps,
                max_periods=cfg.lab_max_periods,
            )
            nu_minus = min(log_negativity(cm).nu_minus for _, cm in pss.samples)
            e_n = max(0.0, -math.log2(2.0 * nu_minus))
            stats = (pss.E_N_mean, pss.E_N_min, pss.E_N_max)
        else:
            res = log_negativity(steady_state(sys_p, bath1, bath2))
            nu_minus, e_n = res.nu_minus, res.E_N
            stats = None
        row = [
            grid.frame,
            _fmt(sys_p.omega1), _fmt(sys_p.omega2), _fmt(sys_p.J),
            _fmt(sys_p.gamma1), _fmt(sys_p.gamma2),
            _fmt(bath1.nbar), _fmt(bath1.r), _fmt(bath1.phi),
            _fmt(bath2.nbar), _fmt(bath2.r), _fmt(bath2.phi),
            _fmt(temp),
            _fmt(nu_minus), _fmt(e_n), "true" if nu_minus < 0.5 else "false",
            *(map(_fmt, stats) if stats else ("", "", "")),
            __version__, str(cfg.seed), tolerances,
        ]
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def cmd_tc(cfg: RunConfig) -> str:
    lab = cfg.tc_frame == "lab"
    tolerances = "tc_tol=" + _fmt(cfg.tc_tol)
    step = (cfg.tc_r_max - cfg.tc_r_min) / (cfg.tc_r_count - 1)
    r_values = [cfg.tc_r_min + i * step for i in range(cfg.tc_r_count)]
    omega, gamma = cfg.sys.omega1, cfg.sys.gamma1

    lines = [UNITS_COMMENT + TC_HEADER]
    for j in cfg.tc_J_list:
        for r in r_values:
            if lab:
                t_c = tc_labframe(
                    omega, gamma, j, r,
                    phi1=cfg.bath1.phi, phi2=cfg.bath2.phi,
                    criterion=cfg.tc_criterion, tol=cfg.tc_tol,
                )
            else:
                t_c = critical_temperature(gamma, j, r, omega) if j > 0 else None
                if t_c is not None:
                    _confirm_tc_numeric(omega, gamma, j, r, t_c)
            row = [
                cfg.tc_frame, _fmt(omega), _fmt(gamma), _fmt(r), _fmt(j),
                "" if t_c is None else _fmt(t_c),
                "false" if t_c is None else "true",
                cfg.tc_criterion, __version__, str(cfg.seed), tolerances,
            ]
            lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def _confirm_tc_numeric(omega: float, gamma: float, j: float, r: float, t_c: float) -> None:
    """Numeric sanity check: entangled just below T_c, separable just above."""
    sys_p = SystemParams(omega, omega, j, gamma, gamma)
    for factor, expect in ((0.99, True), (1.01, False)):
        nbar = nbar_from_temperature(omega, factor * t_c)
        bath = BathSpec(nbar, r, 0.0)
        res = log_negativity(steady_state(sys_p, bath, bath))
        if res.entangled is not expect:
            raise RuntimeError(
                f"analytic T_c = {t_c:g} not confirmed numerically at "
                f"T = {factor * t_c:g} (r={r:g}, J={j:g})"
            )


def cmd_labframe(cfg: RunConfig) -> str:
    prob = LabFrameProblem(cfg.sys, cfg.bath1, cfg.bath2, Frame.ROTATING_M)
    pss = find_periodic_steady_state(
        prob,
        dt=prob.period / cfg.lab_dt_per_period,
        eps_ps=cfg.lab_eps_ps,
        max_periods=cfg.lab_max_periods,
    )
    nu_minus = min(log_negativity(cm).nu_minus for _, cm in pss.samples)
    doc = {
        "frame": "lab",
        "period": prob.period,
        "E_N_mean": pss.E_N_mean,
        "E_N_min": pss.E_N_min,
        "E_N_max": pss.E_N_max,
        "nu_minus": nu_minus,
        "entangled": nu_minus < 0.5,
        "stroboscopic_residual": pss.residual,
        "periods_used": pss.periods_used,
        "n_samples": len(pss.samples),
        "V_phase0": [float(x) for x in pss.samples[0][1].entries.ravel()],
        "version": __version__,
    }
    return _json_text(doc)


def cmd_oracle(cfg: RunConfig) -> str:
    if cfg.oracle_raw_N is not None:
        baths = tuple(
            DerivedBath(n, m) for n, m in zip(cfg.oracle_raw_N, cfg.oracle_raw_M)
        )
    else:
        baths = (derive_bath_params(cfg.bath1), derive_bath_params(cfg.bath2))
    dt = cfg.oracle_dt if cfg.oracle_dt is not None else default_dt(cfg.sys)
    t_end = cfg.oracle_t_end if cfg.oracle_t_end is not None else default_t_end(cfg.sys)
    model = NoiseModel(baths[0], baths[1], cfg.sys.gamma1, cfg.sys.gamma2, dt=dt, seed=cfg.seed)
    est = run_ensemble(cfg.sys, model, cfg.oracle_n_traj, t_end=t_end)

    a = build_drift_rotating(cfg.sys)
    d = build_diffusion_rotating(cfg.sys, baths[0], baths[1])
    v = solve_lyapunov(a, d).entries
    z = (est.V_hat - v) / est.stderr
    within = np.abs(z) <= 3.0
    fraction = float(np.mean(within))
    doc = {
        "V_hat": [float(x) for x in est.V_hat.ravel()],
        "stderr": [float(x) for x in est.stderr.ravel()],
        "V_lyapunov": [float(x) for x in v.ravel()],
        "z_scores": [float(x) for x in z.ravel()],
        "within_3_sigma": [bool(b) for b in within.ravel()],
        "fraction_within_3_sigma": fraction,
        "verdict": "pass" if fraction >= 0.95 else "fail",
        "n_traj": est.n_traj,
        "dt": dt,
        "t_end": t_end,
        "rng": RNG_NAME,
        "seed": cfg.seed,
        "version": __version__,
    }
    return _json_text(doc)


def cmd_plot(args: argparse.Namespace) -> int:
    from .plotting import plot_csv

    plot_csv(args.csv, args.out)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sqsteady",
        description=(
            "Steady-state entanglement of two coupled oscillators with "
            "independent squeezed thermal reservoirs."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("steady", "sweep", "tc", "labframe", "oracle"):
        p = sub.add_parser(name, help=f"run mode '{name}'")
        p.add_argument("--config", required=True, help="key-value config file")
        p.add_argument("--out", default=None, help="output path (default: config 'out' or stdout)")
        p.add_argument("--seed", type=int, default=None, help="override config seed")
    p = sub.add_parser("plot", help="render a figure from an emitted CSV")
    p.add_argument("--csv", required=True, help="CSV produced by 'sweep' or 'tc'")
    p.add_argument("--out", required=True, help="figure file (e.g. .png, .pdf)")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "plot":
        return cmd_plot(args)
    try:
        with open(args.config, encoding="utf-8") as handle:
            cfg = parse_config(handle.read())
        if cfg.mode != args.command:
            raise ConfigError(
                f"config mode {cfg.mode!r} does not match subcommand {args.command!r}"
            )
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=_sys.stderr)
        return EXIT_CONFIG
    except ConfigError as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return EXIT_CONFIG
    if args.seed is not None:
        cfg = dataclasses.replace(cfg, seed=args.seed)
    if args.out is not None:
        cfg = dataclasses.replace(cfg, out=args.out)

    runners = {
        "steady": cmd_steady,
        "sweep": cmd_sweep,
        "tc": cmd_tc,
        "labframe": cmd_labframe,
        "oracle": cmd_oracle,
    }
    try:
        text = runners[cfg.mode](cfg)
    except NotStable as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return EXIT_UNSTABLE
    except UnphysicalBath as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return EXIT_UNPHYSICAL
    except NoConvergence as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return EXIT_NO_CONVERGENCE
    except ValueError as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return EXIT_CONFIG
    _write_output(cfg.out, text)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
