"""Command line entry point: ``plasmavac <command> [options]``.

Exit codes: 0 success, 1 an identity or numerical check failed, 2 a
hypothesis gate or the configuration was rejected.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ConfigError, GateError, InadmissibleStateError, NonFiniteError, PlasmaVacError

EXIT_OK, EXIT_FAIL, EXIT_GATE = 0, 1, 2


def _status(ok: bool) -> str:
    return "PASS" if ok else "FAIL"


def _gammas(text: str) -> list[float]:
    try:
        vals = [float(x) for x in text.replace(" ", "").split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("empty gamma list")
    return vals


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", help="output directory (default: $PLASMAVAC_OUT or ./plasmavac-out)")
    p.add_argument("--seed", type=int, default=None, help="random seed")
    p.add_argument("--threads", type=int, default=1,
                   help="worker threads; results do not depend on it (recorded in the manifest)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="plasmavac", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"plasmavac {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run identity verification suites")
    v.add_argument("--suite", action="append", default=None, help="suite name or 'all' (repeatable)")
    v.add_argument("--samples", type=int, default=1000, help="random samples per suite")
    v.add_argument("--json", action="store_true", help="print the JSON report instead of the table")
    v.add_argument("--list", action="store_true", help="list suites and exit")
    v.add_argument("--inject", default=None, help=argparse.SUPPRESS)
    _common(v)

    e = sub.add_parser("eigen", help="boundary-matrix spectrum and characteristic counts")
    e.add_argument("phi_t", type=float)
    e.add_argument("phi_2", type=float)
    e.add_argument("phi_3", type=float)
    e.add_argument("eps", type=float)
    _common(e)

    lf = sub.add_parser("lift", help="lift a sample front and check the lifting bounds")
    lf.add_argument("--amplitude", type=float, default=0.8, help="H^2 norm of the front")
    lf.add_argument("--n", type=int, default=32, help="front grid points per direction (power of two)")
    _common(lf)

    for name, helptext in (("simulate", "run the solver on a configuration"),
                           ("gamma-sweep", "gamma sweep of the weighted energy ratio")):
        s = sub.add_parser(name, help=helptext)
        s.add_argument("--config", help="YAML run configuration")
        s.add_argument("--gamma", type=_gammas, default=None, help="comma-separated gamma list")
        _common(s)
    return ap


# ---------------------------------------------------------------------------
# commands


def cmd_verify(args) -> int:
    from .suites import SUITES, UnknownSuiteError, run_suites
    from .output import finish_manifest, make_manifest, output_dir, write_json

    if args.list:
        print("\n".join(SUITES))
        return EXIT_OK
    names = args.suite or ["all"]
    if "all" in names:
        names = ["all"]
    seed = 0 if args.seed is None else args.seed
    try:
        report = run_suites(names, samples=args.samples, seed=seed, inject=args.inject)
    except UnknownSuiteError as exc:
        print(f"error: {exc.args[0]}", file=sys.stderr)
        return EXIT_GATE
    out = output_dir(args.out)
    man = make_manifest("verify", None, seed, suites=[r["suite"] for r in report["suites"]],
                        samples=args.samples, threads=args.threads)
    summary = {
        "ok": report["ok"],
        "failing": report["failing"],
        "suite_count": len(report["suites"]),
        "suites": [{k: r[k] for k in ("suite", "passed", "total", "ok")} | {"checks": r["checks"]}
                   for r in report["suites"]],
    }
    write_json(out / "verify.json", summary, man)
    finish_manifest(out, man)
    if args.json:
        print(json.dumps(summary, indent=2))
    else:
        for r in report["suites"]:
            print(f"[{_status(r['ok'])}] {r['suite']}: {r['passed']}/{r['total']} checks")
            for c in r["checks"]:
                print(f"    {_status(c['passed'])} {c['name']}: value={c['value']} tol={c['tol']}"
                      + (f" ({c['detail']})" if c["detail"] else ""))
        print(f"{len(report['suites'])} suites, failing: {', '.join(report['failing']) or 'none'}")
    return EXIT_OK if report["ok"] else EXIT_FAIL


def cmd_eigen(args) -> int:
    from .boundary import btilde1_spectrum, ws_system_characteristics
    from .output import finish_manifest, make_manifest, output_dir, write_json

    rep = btilde1_spectrum(args.phi_t, args.phi_2, args.phi_3, args.eps)
    ws = ws_system_characteristics()
    tol = 1e-10
    kernel = int(np.sum(np.abs(rep.closed_form) <= tol))
    if rep.degenerate:
        story = "phi_t = 0: two eigenvalues vanish, the boundary is characteristic of higher multiplicity"
    elif args.phi_t < 0:
        story = "phi_t < 0 (plasma expands into vacuum): 2 incoming characteristics"
    else:
        story = "phi_t > 0 (vacuum expands into plasma): 4 incoming characteristics"
    data = {
        "input": {"phi_t": args.phi_t, "phi_2": args.phi_2, "phi_3": args.phi_3, "eps": args.eps},
        "eigenvalues_closed_form": rep.closed_form,
        "eigenvalues_numeric": rep.numeric,
        "max_abs_diff": rep.max_abs_diff,
        "tol": tol,
        "pass": rep.max_abs_diff <= tol,
        "incoming_btilde1": rep.incoming,
        "kernel_dim_btilde1": kernel,
        "degenerate": rep.degenerate,
        "incoming_W_formulation": rep.incoming_ws,
        "kernel_dim_W_formulation": ws["B1_signature"][1],
        "narrative": story + f"; the W formulation keeps {rep.incoming_ws} incoming and a kernel "
                     f"of constant dimension {ws['B1_signature'][1]}",
    }
    out = output_dir(args.out)
    man = make_manifest("eigen", None, 0 if args.seed is None else args.seed, threads=args.threads)
    write_json(out / "eigen.json", data, man)
    finish_manifest(out, man)
    print("eigenvalues (closed form):", " ".join(f"{x:.12g}" for x in rep.closed_form))
    print("eigenvalues (numeric):    ", " ".join(f"{x:.12g}" for x in rep.numeric))
    print(f"{_status(data['pass'])} closed form vs numeric: max diff {rep.max_abs_diff:.3e} <= {tol:g}")
    print(f"incoming: B~1 {rep.incoming} / W-formulation (constant multiplicity) {rep.incoming_ws}")
    print(f"degenerate: {rep.degenerate}")
    print(data["narrative"])
    return EXIT_OK if data["pass"] else EXIT_FAIL


def cmd_lift(args) -> int:
    from .geometry import lift_front, torus_sobolev_norm, verify_lift_estimates
    from .output import finish_manifest, make_manifest, output_dir, write_json
    from .plotting import plot_lift

    n = args.n
    x2 = np.arange(n) * 2 * math.pi / n
    X2, X3 = np.meshgrid(x2, x2, indexing="ij")
    times = np.linspace(0.0, 1.0, 5)
    pa = np.cos(X2 + X3) + 0.5 * np.sin(2 * X2)
    pb = 0.7 * np.sin(X2 - X3)
    phi = np.stack([math.cos(t) * pa + math.sin(t) * pb for t in times])
    phi_t = np.stack([-math.sin(t) * pa + math.cos(t) * pb for t in times])
    scale = args.amplitude / float(np.max(torus_sobolev_norm(phi, 2.0)))
    x1 = np.linspace(0.0, 3.0, 61)
    rep = verify_lift_estimates(phi * scale, x1, phi_t=phi_t * scale)
    out = output_dir(args.out)
    man = make_manifest("lift", None, 0 if args.seed is None else args.seed,
                        amplitude=args.amplitude, n=n, threads=args.threads)
    write_json(out / "lift.json", rep, man)
    plot_lift(lift_front(phi[:1] * scale, x1), x2, out / "lift.png", man)
    finish_manifest(out, man)
    print(f"{_status(rep['trace_pass'])} trace: max|Psi(0) - phi| = {rep['trace_error']:.3e} <= 1e-12 x max|phi|")
    print(f"{_status(rep['slope_pass'])} slope: sup|Psi_1| = {rep['sup_abs_psi_1']:.4f} <= 0.5 "
          f"(||phi||_H2 = {rep['sup_H2_norm_phi']:.4f}, bound applies: {rep['slope_bound_applies']})")
    for j in ("j0", "j1"):
        print(f"{_status(rep[j + '_pass'])} sup|d_t^{j[1]} Psi| = {rep[j + '_sup_psi']:.4f} "
              f"<= {rep[j + '_bound']:.4f} (H^3/2 norm / sqrt(2 pi))")
    return EXIT_OK if rep["pass"] else EXIT_FAIL


def _load_cfg(args):
    from .solver.config import SolverConfig, config_from_dict, load_config

    cfg = load_config(args.config) if args.config else SolverConfig()
    data = cfg.to_dict()
    if args.gamma is not None:
        data["gamma_list"] = args.gamma
    if args.seed is not None:
        data["seed"] = args.seed
    return config_from_dict(data)


def _run_manifest(command: str, cfg, basic, threads: int) -> dict:
    from .output import make_manifest

    return make_manifest(
        command, cfg.digest(), cfg.seed, threads=threads, config=cfg.to_dict(),
        gates=basic.gates, mu_hat=basic.mu, margin=basic.margin, basic_state=basic.summary(),
    )


def _write_run(out: Path, res, man: dict, prefix: str = "") -> None:
    from .output import write_csv, write_fields, write_norm_table
    from .plotting import plot_constraints, plot_energy, plot_fields

    t, E = res.energy_series
    write_norm_table(out / f"{prefix}norms.csv", res.table, man)
    write_csv(out / f"{prefix}energy.csv", ("t", "energy"), zip(t.tolist(), E.tolist()), man)
    keys = sorted(k for k in res.constraints[0] if k != "t")
    write_csv(out / f"{prefix}constraints.csv", ["t", *keys],
              ([r["t"], *(r[k] for k in keys)] for r in res.constraints), man)
    plot_energy(t, E, out / f"{prefix}energy.png", man)
    plot_constraints(res.constraints, out / f"{prefix}constraints.png", man)
    plot_fields(res, out / f"{prefix}fields.png", man)
    if res.config.dump_fields and res.snapshots:
        write_fields(out / f"{prefix}fields.npz", res, man)


def cmd_simulate(args) -> int:
    from .output import finish_manifest, output_dir, write_json
    from .solver.basic_state import from_config
    from .solver.experiments import simulate

    cfg = _load_cfg(args)
    basic = from_config(cfg)
    res = simulate(cfg, basic)
    out = output_dir(args.out)
    man = _run_manifest("simulate", cfg, basic, args.threads)
    _write_run(out, res, man)
    summary = {
        "nsteps": res.nsteps, "dt": res.dt, "t_final": res.final.t,
        "energy": res.energy, "boundary_form": res.boundary_form,
        "constraints_final": res.constraints[-1], "norm_table": res.table, "norm_meta": res.norm_meta,
        "flagged": not basic.gates_ok(),
    }
    write_json(out / "run.json", summary, man)
    finish_manifest(out, man)
    print(f"simulate: {res.nsteps} steps of dt = {res.dt:.4g} to t = {res.final.t:.4g}; outputs in {out}")
    print(f"mu_hat = {basic.mu:.4g}, stability margin |H x calH| = {basic.margin:.4g}")
    e = res.energy
    if e.get("applicable"):
        print(f"{_status(e['pass'])} energy non-increase: max relative step change "
              f"{e['max_rel_increase']:.3e} <= {e['tol']:g}")
    else:
        print("energy non-increase check: not applicable (forced run)")
    for r in res.table:
        print(f"  gamma={r['gamma']:g}: LHS={r['lhs']:.6g} ||F||^2={r['F_H1tan']:.6g} R={r['ratio']:.6g}")
    return EXIT_FAIL if e.get("applicable") and not e["pass"] else EXIT_OK


def cmd_gamma_sweep(args) -> int:
    from .output import finish_manifest, output_dir, write_json, write_norm_table, write_sweep_table
    from .plotting import plot_sweep
    from .solver.experiments import gamma_sweep

    cfg = _load_cfg(args)
    res = gamma_sweep(cfg)
    basic = res["runs"][0].basic
    out = output_dir(args.out)
    man = _run_manifest("gamma-sweep", cfg, basic, args.threads)
    write_sweep_table(out / "sweep.csv", res["rows"], man)
    write_norm_table(out / "norms.csv", res["rows"], man)
    plot_sweep(res["rows"], out / "ratio.png", man, res["trend"])
    write_json(out / "sweep.json", {
        "rows": res["rows"], "trend": res["trend"], "gates": res["gates"], "flagged": res["flagged"],
        "weighting": cfg.weighting, "norm_meta": res["runs"][0].norm_meta,
    }, man)
    finish_manifest(out, man)
    tr = res["trend"]
    print(f"gamma-sweep ({cfg.weighting} weighting); outputs in {out}")
    for r in res["rows"]:
        print(f"  gamma={r['gamma']:g}: R={r['ratio']:.6g}")
    print(f"{_status(tr['max_over_min'] <= 10)} max/min R = {tr['max_over_min']:.4g} <= 10")
    print(f"{_status(not tr['monotone_growth_tail'])} no monotone growth over the last three gammas")
    print(f"empirical gamma0 (R non-increasing from there on): {tr['empirical_gamma0']}")
    if res["flagged"]:
        bad = [k for k, v in res["gates"].items() if not v]
        print(f"FLAGGED: gates overridden ({', '.join(bad)}); boundedness is not expected", file=sys.stderr)
        return EXIT_OK
    return EXIT_OK if tr["bounded"] else EXIT_FAIL


COMMANDS = {
    "verify": cmd_verify,
    "eigen": cmd_eigen,
    "lift": cmd_lift,
    "simulate": cmd_simulate,
    "gamma-sweep": cmd_gamma_sweep,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except GateError as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_GATE
    except (ConfigError, InadmissibleStateError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GATE
    except NonFiniteError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except PlasmaVacError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GATE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
