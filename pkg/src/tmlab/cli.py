"""Command-line driver: trajectories, rate tables, verification suites and
metastability experiments, from a flat dotted-key config file.

Exit codes: 0 success/pass, 1 verification failure, 2 config/flag error,
3 runtime solver failure.
"""

from __future__ import annotations

import csv
import json
import logging
import sys
from typing import Optional

import click

from . import rates as R
from . import verify as V
from .engine import check_boundedness, check_hilbert_special_case, run
from .geometry import Euclidean, Point, SampleSpec, make_model, run_all_geometry_checks
from .rates import RateError, parse_counterfunction
from .scenario import ConfigError, Scenario, build_scenario, load_config
from .schedules import audit_schedule, preset

log = logging.getLogger("tmlab")

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_CONFIG = 2
EXIT_SOLVER = 3


@click.group()
@click.option(
    "--log-level",
    type=click.Choice(["error", "warn", "info", "debug"]),
    default="warn",
    help="Diagnostics verbosity (standard error only).",
)
def main(log_level: str):
    level = {"error": logging.ERROR, "warn": logging.WARNING,
             "info": logging.INFO, "debug": logging.DEBUG}[log_level]
    logging.basicConfig(level=level, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")


def _load_scenario(config_path: str) -> Scenario:
    try:
        return build_scenario(load_config(config_path))
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)


def _open_out(out: Optional[str]):
    if out is None or out == "-":
        return sys.stdout, False
    return open(out, "w", encoding="utf-8", newline=""), True


@main.command("run")
@click.argument("config_path", type=click.Path())
@click.option("--steps", type=int, default=None, help="Override run.steps.")
@click.option("--out", type=click.Path(), default=None, help="Trajectory CSV file.")
def cmd_run(config_path, steps, out):
    """Generate a trajectory and write it as CSV."""
    sc = _load_scenario(config_path)
    n_steps = steps if steps is not None else sc.steps
    if n_steps < 1:
        click.echo("config error: steps must be >= 1", err=True)
        sys.exit(EXIT_CONFIG)
    traj = run(sc.space, sc.family, sc.bundle, sc.u, sc.x0, n_steps,
               scenario_hash=sc.scenario_hash)
    stream, close = _open_out(out)
    try:
        traj.write_csv(stream)
    finally:
        if close:
            stream.close()
    if traj.error:
        click.echo(f"solver failure: {traj.error}", err=True)
        sys.exit(EXIT_SOLVER)
    sys.exit(EXIT_OK)


RATE_NAMES = (
    "chi", "Sigma", "Sigma_tilde", "Sigma_star", "Sigma_tilde_star",
    "Psi", "Psi_star", "mu", "mu_star",
)


def _rate_value(name, k, sc: Scenario, f, phi):
    b, K, ct, cap = sc.bundle, sc.K, sc.chi_T_fn, sc.bit_cap
    if name == "chi":
        return R.chi(k, b, K, ct, cap)
    if name == "Sigma":
        return R.Sigma(k, b, K, ct, cap)
    if name == "Sigma_tilde":
        return R.Sigma_tilde(k, b, K, ct, cap)
    if name == "Sigma_star":
        return R.Sigma_star(k, b, K, ct, cap)
    if name == "Sigma_tilde_star":
        return R.Sigma_tilde_star(k, b, K, ct, cap)
    if name == "Psi":
        return R.Psi(k, b, K, ct, cap)
    if name == "Psi_star":
        return R.Psi_star(k, b, K, ct, cap)
    if name == "mu":
        return R.mu(k, f, b, K, ct, Phi_override=phi, bit_cap=cap)
    if name == "mu_star":
        return R.mu_star(k, f, b, K, ct, Phi_override=phi, bit_cap=cap)
    raise AssertionError(name)


@main.command("rates")
@click.argument("config_path", type=click.Path())
@click.option("--k-max", type=int, default=5, help="Tabulate k = 0..k_max.")
@click.option("--which", default="Sigma_star",
              help="Comma-separated rate names: " + ",".join(RATE_NAMES))
@click.option("--cf", default="const:0",
              help="Counterfunction for the metastability rates (mini-grammar).")
@click.option("--phi", default=None,
              help="Optional override for the single-map regularity rate "
                   "used inside mu / mu_star (mini-grammar).")
@click.option("--out", type=click.Path(), default=None)
def cmd_rates(config_path, k_max, which, cf, phi, out):
    """Tabulate rate values as CSV (big naturals as decimal strings)."""
    sc = _load_scenario(config_path)
    names = [w.strip() for w in which.split(",") if w.strip()]
    for name in names:
        if name not in RATE_NAMES:
            click.echo(f"config error: unknown rate {name!r}", err=True)
            sys.exit(EXIT_CONFIG)
    try:
        f = parse_counterfunction(cf)
        phi_cf = parse_counterfunction(phi) if phi else None
    except RateError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    stream, close = _open_out(out)
    try:
        writer = csv.writer(stream)
        writer.writerow(["k"] + names)
        for k in range(k_max + 1):
            row = [str(k)]
            for name in names:
                row.append(_rate_value(name, k, sc, f, phi_cf).render())
            writer.writerow(row)
    finally:
        if close:
            stream.close()
    sys.exit(EXIT_OK)


# ---------------------------------------------------------------------------
# Verification suites
# ---------------------------------------------------------------------------


class _BrokenModel(Euclidean):
    """Test fixture: a non-geodesic combination that violates the
    convexity axioms."""

    def comb(self, x, y, lam):
        return x if lam < 1.0 else y


def _suite_geometry(seed, samples, tol, broken=False):
    checks = []
    models = [Euclidean(3), make_model("disk"), make_model("tripod")]
    if broken:
        models.append(_BrokenModel(2))
    for model in models:
        spec = SampleSpec(seed=seed, count=samples)
        for rep in run_all_geometry_checks(model, spec, tol):
            checks.append({
                "check_id": f"geometry/{model.describe()}/{rep.axiom}",
                "pass": rep.passed,
                "detail": rep.to_json(),
            })
    return checks


def _suite_schedules(seed, samples, tol):
    checks = []
    horizon = max(10, samples)
    for name in ("harmonic", "constant-gamma-harmonic-beta"):
        report = audit_schedule(preset(name), horizon, tol)
        for res in report.results:
            checks.append({
                "check_id": f"schedules/{name}/{res.condition_id}",
                "pass": res.passed,
                "detail": res.to_json(),
            })
    return checks


def _builtin_scenarios():
    """Small scenarios used by the engine and lemma suites."""
    from .scenario import scenario_from_text

    texts = {
        "identity-line": """
            space.kind = euclidean
            space.dim = 1
            family.kind = identity
            schedule.preset = harmonic
            run.u = 0
            run.x0 = 1
        """,
        "rotation-plane": """
            space.kind = euclidean
            space.dim = 2
            family.kind = rotation
            family.angle = 1.5707963267948966
            schedule.preset = harmonic
            run.u = 0,0
            run.x0 = 1,0
        """,
        "proximal-plane": """
            space.kind = euclidean
            space.dim = 2
            family.kind = proximal
            family.center = 0,0
            schedule.preset = harmonic
            run.u = 0,0
            run.x0 = 1,0
        """,
    }
    return {name: scenario_from_text(text) for name, text in texts.items()}


def _suite_engine(seed, samples, tol):
    checks = []
    scenarios = _builtin_scenarios()

    sc = scenarios["identity-line"]
    traj = run(sc.space, sc.family, sc.bundle, sc.u, sc.x0, 200)
    worst = max(
        abs(rec.x.data[0] - 1.0 / (rec.n + 1)) for rec in traj.records
    )
    checks.append({
        "check_id": "engine/identity-closed-form",
        "pass": worst <= 1e-12,
        "detail": {"max_deviation": worst},
    })

    for name in ("identity-line", "rotation-plane", "proximal-plane"):
        sc = scenarios[name]
        rep = check_hilbert_special_case(
            sc.space, sc.family, sc.bundle, sc.x0, steps=100, tol=1e-10
        )
        checks.append({
            "check_id": f"engine/hilbert-cross-check/{name}",
            "pass": rep.passed,
            "detail": rep.to_json(),
        })

    sc = scenarios["proximal-plane"]
    traj = run(sc.space, sc.family, sc.bundle, sc.u, sc.x0, 2000,
               scenario_hash=sc.scenario_hash)
    rep = check_boundedness(traj, sc.M, tol)
    checks.append({
        "check_id": "engine/boundedness/proximal-plane",
        "pass": rep.passed,
        "detail": rep.to_json(),
    })
    return checks


def _suite_lemmas(seed, samples, tol):
    checks = []
    bundle = preset("harmonic")

    inst = V.telescoping_instance(1000)
    for k in (0, 3, 10, 25, 50):
        res = V.check_xu_lemma(
            inst, k=k, n=0, q=999, sigma_star=bundle.sigma_star, tol=tol
        )
        checks.append({
            "check_id": f"lemmas/xu-telescoping/k={k}",
            "pass": res.passed and res.hypothesis_status == "met",
            "detail": res.to_json(),
        })
    for i in range(20):
        k, q = 2, 900
        inst = V.random_instance(seed + i, 1000, k=k, q=q)
        res = V.check_xu_lemma(
            inst, k=k, n=0, q=q, sigma_star=bundle.sigma_star, tol=tol
        )
        checks.append({
            "check_id": f"lemmas/xu-random/{i}",
            "pass": res.passed,
            "detail": res.to_json(),
        })

    scenarios = _builtin_scenarios()
    import random as _random

    rng = _random.Random(seed)
    for name, sc in scenarios.items():
        traj = run(sc.space, sc.family, sc.bundle, sc.u, sc.x0, 500,
                   scenario_hash=sc.scenario_hash)
        for i in range(3):
            x = sc.space.sample(rng, 2.0)
            res = V.check_recursive_inequalities(traj, sc.family, sc.bundle, x, tol)
            checks.append({
                "check_id": f"lemmas/recursive-inequalities/{name}/{i}",
                "pass": res.passed,
                "detail": res.to_json(),
            })

    sc = scenarios["rotation-plane"]
    v1 = Point.euclidean(1e-4, 0.0)
    v2 = Point.euclidean(0.0, 1e-4)
    res = V.check_convex_afp(
        sc.space, sc.family, v1, v2, sc.p, K=2, k=3, n_max=5, t_grid=11
    )
    checks.append({
        "check_id": "lemmas/convex-afp/rotation",
        "pass": res.passed,
        "detail": res.to_json(),
    })

    space = Euclidean(2)
    x = Point.euclidean(0.0, 0.0)
    y = Point.euclidean(1.0, 0.0)
    u = Point.euclidean(-1.0, 0.5)
    res = V.check_variational(space, x, y, u, x, K=2, k=4, t_grid=11, tol=tol)
    checks.append({
        "check_id": "lemmas/variational/projection-characterization",
        "pass": res.passed,
        "detail": res.to_json(),
    })
    return checks


SUITES = {
    "geometry": _suite_geometry,
    "schedules": _suite_schedules,
    "engine": _suite_engine,
    "lemmas": _suite_lemmas,
}


@main.command("verify")
@click.option("--suite", "suite_name", required=True,
              type=click.Choice(list(SUITES) + ["all"]))
@click.option("--seed", type=int, default=0)
@click.option("--samples", type=int, default=10_000)
@click.option("--tol", type=float, default=1e-9)
@click.option("--report", "report_path", type=click.Path(), default=None)
@click.option("--inject-broken-model", is_flag=True, hidden=True,
              help="Add a deliberately non-geodesic model to the geometry suite.")
def cmd_verify(suite_name, seed, samples, tol, report_path, inject_broken_model):
    """Run a verification suite and emit a JSON report."""
    names = list(SUITES) if suite_name == "all" else [suite_name]
    checks = []
    for name in names:
        fn = SUITES[name]
        if name == "geometry":
            checks += fn(seed, samples, tol, broken=inject_broken_model)
        else:
            checks += fn(seed, samples, tol)
    report = {
        "suites": names,
        "seed": seed,
        "samples": samples,
        "tol": tol,
        "checks": checks,
        "pass": all(c["pass"] for c in checks),
    }
    payload = json.dumps(report, indent=2, default=str)
    if report_path:
        with open(report_path, "w", encoding="utf-8") as fh:
            fh.write(payload + "\n")
    else:
        click.echo(payload)
    for c in checks:
        log.info("%s: %s", c["check_id"], "pass" if c["pass"] else "FAIL")
    sys.exit(EXIT_OK if report["pass"] else EXIT_FAIL)


@main.command("metastable")
@click.argument("config_path", type=click.Path())
@click.option("--k", type=int, default=0)
@click.option("--cf", default="const:0", help="Counterfunction (mini-grammar).")
@click.option("--cap", type=int, default=10_000, help="Search horizon.")
@click.option("--phi", default=None,
              help="Optional single-map regularity rate override (mini-grammar).")
@click.option("--report", "report_path", type=click.Path(), default=None)
def cmd_metastable(config_path, k, cf, cap, phi, report_path):
    """Search the metastability index and compare it with the computed rate."""
    sc = _load_scenario(config_path)
    try:
        f = parse_counterfunction(cf)
        phi_cf = parse_counterfunction(phi) if phi else None
    except RateError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    traj = run(sc.space, sc.family, sc.bundle, sc.u, sc.x0, sc.steps,
               scenario_hash=sc.scenario_hash)
    if traj.error:
        click.echo(f"solver failure: {traj.error}", err=True)
        sys.exit(EXIT_SOLVER)
    query = V.MetastabilityQuery(k=k, f=f, cap=cap)
    bound = R.mu_star(
        k, f, sc.bundle, sc.K, sc.chi_T_fn,
        Phi_override=phi_cf, bit_cap=sc.bit_cap,
    )
    result = V.check_mu(traj, query, bound, tol=sc.tol)
    payload = json.dumps(result.to_json(), indent=2)
    if report_path:
        with open(report_path, "w", encoding="utf-8") as fh:
            fh.write(payload + "\n")
    else:
        click.echo(payload)
    sys.exit(EXIT_OK if result.passed else EXIT_FAIL)


if __name__ == "__main__":  # pragma: no cover
    main()
