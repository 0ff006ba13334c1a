"""Empirical verification of the quantitative statements.

Every check returns a CheckResult carrying pass/fail, hypothesis status,
the witness index on failure and the horizons used, so a single failing
instance can be re-run in isolation.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from .geometry import Point, SpaceModel
from .mappings import MappingFamily
from .rates import Counterfunction, RateValue, zeta, zeta_star
from .schedules import ScheduleBundle
from .engine import Trajectory


class VerifyError(ValueError):
    pass


@dataclass
class CheckResult:
    check_id: str
    passed: bool
    hypothesis_status: str = "met"  # "met" | "unmet" | "n/a"
    witness: Optional[dict] = None
    horizons: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)
    scenario_hash: str = ""

    def to_json(self):
        return {
            "check_id": self.check_id,
            "scenario_hash": self.scenario_hash,
            "pass": self.passed,
            "hypothesis_status": self.hypothesis_status,
            "witnesses": self.witness,
            "horizons": self.horizons,
            "details": self.details,
        }

    def __str__(self):
        return json.dumps(self.to_json())


# ---------------------------------------------------------------------------
# Asymptotic-regularity checks
# ---------------------------------------------------------------------------


def _suffix_first_hit(values: Sequence[float], bound: float) -> int:
    """Least n such that every value from n on stays below the bound."""
    hit = len(values)
    for i in range(len(values) - 1, -1, -1):
        if values[i] > bound:
            break
        hit = i
    return hit


def _ar_check(check_id, values, rate, k, cap, tol, scenario_hash) -> CheckResult:
    bound = 1.0 / (k + 1) + tol
    end = len(values)
    start_cap = min(cap, end)
    if rate.is_astronomical:
        start = start_cap
        bound_ok = True  # vacuous: every finite index is below the sentinel
        flagged = "rate astronomical; bound comparison vacuous"
    else:
        start = min(int(rate.value), start_cap)
        flagged = ""
    if end <= start:
        raise VerifyError(
            f"{check_id}: trajectory of length {end} too short for start {start}"
        )
    bad = next((i for i in range(start, end) if values[i] > bound), None)
    first_hit = _suffix_first_hit(values, bound)
    bound_ok = rate >= first_hit  # RateValue order; Astronomical dominates
    passed = bad is None and bound_ok
    return CheckResult(
        check_id=check_id,
        passed=passed,
        witness=None if bad is None else {"n": bad, "value": values[bad]},
        horizons={"suffix_start": start, "cap": cap, "length": end},
        details={
            "k": k,
            "first_hit": first_hit,
            "rate": rate.render(),
            "flag": flagged,
        },
        scenario_hash=scenario_hash,
    )


def check_ar(
    traj: Trajectory,
    rate: RateValue,
    k: int,
    cap: int,
    tol: float = 1e-9,
) -> CheckResult:
    """Successive-step distances d(x_n, x_{n+1}) below 1/(k+1) from the
    rate on, and the empirical first-hit index never exceeds the rate."""
    values = [rec.d_step for rec in traj.records]
    return _ar_check("ar", values, rate, k, cap, tol, traj.scenario_hash)


def check_family_ar(
    traj: Trajectory,
    family: MappingFamily,
    rate: RateValue,
    k: int,
    cap: int,
    tol: float = 1e-9,
) -> CheckResult:
    values = [rec.d_Tn for rec in traj.records]
    return _ar_check("family-ar", values, rate, k, cap, tol, traj.scenario_hash)


def check_Tm_ar(
    traj: Trajectory,
    family: MappingFamily,
    m: int,
    rate: RateValue,
    k: int,
    cap: int,
    tol: float = 1e-9,
) -> CheckResult:
    space = traj.space
    values = [
        space.dist(rec.x, family.apply(m, rec.x)) for rec in traj.records
    ]
    return _ar_check(f"Tm-ar[m={m}]", values, rate, k, cap, tol, traj.scenario_hash)


# ---------------------------------------------------------------------------
# Metastability
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MetastabilityQuery:
    k: int
    f: Counterfunction
    cap: int

    def __post_init__(self):
        if self.cap < 1:
            raise VerifyError("search cap must be >= 1")


@dataclass
class MetastabilitySearch:
    found: Optional[int]
    truncated: bool
    scanned: int


def search_metastable(
    traj: Trajectory, query: MetastabilityQuery, tol: float = 1e-9
) -> MetastabilitySearch:
    """Least n <= cap with all pairwise distances on {n, ..., f(n)} below
    1/(k+1); windows with f(n) < n hold vacuously."""
    bound = 1.0 / (query.k + 1) + tol
    length = len(traj)
    truncated = False
    for n in range(min(query.cap, length) + 1):
        end = query.f(n)
        if end < n:
            return MetastabilitySearch(found=n, truncated=False, scanned=n)
        if end >= length:
            truncated = True
            break
        if _window_ok(traj, n, end, bound):
            return MetastabilitySearch(found=n, truncated=False, scanned=n)
    return MetastabilitySearch(found=None, truncated=truncated, scanned=n)


def _window_ok(traj, n, end, bound) -> bool:
    pts = [traj.records[i].x for i in range(n, end + 1)]
    dist = traj.space.dist
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            if dist(pts[i], pts[j]) > bound:
                return False
    return True


def check_mu(
    traj: Trajectory,
    query: MetastabilityQuery,
    mu_value: RateValue,
    tol: float = 1e-9,
) -> CheckResult:
    """Searched metastability index against the computed rate bound."""
    search = search_metastable(traj, query, tol)
    flag = ""
    if mu_value.is_astronomical:
        flag = "bound not informative at desk scale"
    if search.found is None:
        return CheckResult(
            check_id="metastability-bound",
            passed=False,
            hypothesis_status="n/a",
            witness={"search": "none found", "truncated": search.truncated},
            horizons={"cap": query.cap, "length": len(traj)},
            details={"k": query.k, "f": query.f.render(), "mu": mu_value.render()},
            scenario_hash=traj.scenario_hash,
        )
    ok = mu_value >= search.found
    return CheckResult(
        check_id="metastability-bound",
        passed=ok,
        witness=None if ok else {"searched_n": search.found},
        horizons={"cap": query.cap, "length": len(traj)},
        details={
            "k": query.k,
            "f": query.f.render(),
            "searched_n": search.found,
            "mu": mu_value.render(),
            "flag": flag,
        },
        scenario_hash=traj.scenario_hash,
    )


# ---------------------------------------------------------------------------
# Recurrence lemma (synthetic instances)
# ---------------------------------------------------------------------------


@dataclass
class SyntheticXuInstance:
    """Sequences satisfying s_{n+1} <= (1 - a_n)(s_n + v_n) + a_n r_n by
    construction, with s_n bounded by S."""

    s: list
    a: list
    v: list
    r: list
    S: int
    generator: str = ""

    def __post_init__(self):
        n = len(self.s) - 1
        if not (len(self.a) >= n and len(self.v) >= n and len(self.r) >= n):
            raise VerifyError("sequence lengths inconsistent")
        for i in range(n):
            rhs = (1 - self.a[i]) * (self.s[i] + self.v[i]) + self.a[i] * self.r[i]
            if self.s[i + 1] > rhs + 1e-12:
                raise VerifyError(f"recurrence violated at index {i}")
            if not (0 <= self.s[i] <= self.S + 1e-12):
                raise VerifyError(f"s_{i} outside [0, S]")


def telescoping_instance(length: int, s0: float = 1.0) -> SyntheticXuInstance:
    """a_n = 1/(n+2), v = r = 0: the recurrence telescopes to s_n = s0/(n+1)."""
    a = [1.0 / (n + 2) for n in range(length)]
    s = [s0]
    for n in range(length):
        s.append((1.0 - a[n]) * s[n])
    return SyntheticXuInstance(
        s=s, a=a, v=[0.0] * length, r=[0.0] * length, S=max(1, math.ceil(s0)),
        generator="telescoping",
    )


def random_instance(
    seed: int, length: int, k: int, q: int, slack: float = 1.0
) -> SyntheticXuInstance:
    """Seeded instance whose hypotheses (bounds on v and r over every
    window up to q) hold by construction; a_n = 1/(n+2) so the harmonic
    divergence/product rates apply."""
    rng = random.Random(seed)
    S = rng.randint(1, 4)
    v_bound = 1.0 / (3 * (k + 1) * (q + 1))
    r_bound = 1.0 / (3 * (k + 1))
    a = [1.0 / (n + 2) for n in range(length)]
    v = [rng.uniform(0.0, v_bound) for _ in range(length)]
    r = [rng.uniform(0.0, r_bound) for _ in range(length)]
    s = [rng.uniform(0.0, S)]
    for n in range(length):
        rhs = (1.0 - a[n]) * (s[n] + v[n]) + a[n] * r[n]
        s.append(min(float(S), rhs * rng.uniform(0.0, 1.0) ** slack))
    return SyntheticXuInstance(s=s, a=a, v=v, r=r, S=S, generator=f"random:{seed}")


def check_xu_lemma(
    instance: SyntheticXuInstance,
    k: int,
    n: int,
    q: int,
    sigma: Optional[Counterfunction] = None,
    sigma_star: Optional[Callable[[int, int], int]] = None,
    tol: float = 1e-9,
) -> CheckResult:
    """If the window hypotheses hold on [n, q], the conclusion
    s_i <= 1/(k+1) must hold from the computed threshold to q.

    Pass sigma for the divergence-rate variant, sigma_star for the
    product-rate variant (exactly one of the two).
    """
    if (sigma is None) == (sigma_star is None):
        raise VerifyError("provide exactly one of sigma, sigma_star")
    if q >= len(instance.s):
        raise VerifyError("instance shorter than q")
    v_bound = 1.0 / (3 * (k + 1) * (q + 1))
    r_bound = 1.0 / (3 * (k + 1))
    for i in range(n, q + 1):
        if i < len(instance.v) and instance.v[i] > v_bound + tol:
            return CheckResult(
                check_id="xu-lemma", passed=True, hypothesis_status="unmet",
                witness={"i": i, "v": instance.v[i]},
                horizons={"n": n, "q": q},
            )
        if i < len(instance.r) and instance.r[i] > r_bound + tol:
            return CheckResult(
                check_id="xu-lemma", passed=True, hypothesis_status="unmet",
                witness={"i": i, "r": instance.r[i]},
                horizons={"n": n, "q": q},
            )
    if sigma is not None:
        threshold = zeta(k, n, sigma, instance.S)
        variant = "divergence-rate"
    else:
        threshold = zeta_star(k, n, sigma_star, instance.S)
        variant = "product-rate"
    if threshold.is_astronomical or threshold.value > q:
        return CheckResult(
            check_id="xu-lemma", passed=True, hypothesis_status="met",
            horizons={"n": n, "q": q},
            details={"variant": variant, "threshold": threshold.render(),
                     "note": "threshold beyond q; conclusion vacuous"},
        )
    start = threshold.value
    bound = 1.0 / (k + 1) + tol
    bad = next(
        (i for i in range(start, q + 1) if instance.s[i] > bound), None
    )
    return CheckResult(
        check_id="xu-lemma",
        passed=bad is None,
        witness=None if bad is None else {"i": bad, "s": instance.s[bad]},
        horizons={"n": n, "q": q, "threshold": start},
        details={"variant": variant, "k": k, "S": instance.S},
    )


def check_chi_T_series(
    traj: Trajectory,
    family: MappingFamily,
    chi_T_fn: Callable[[int], int],
    k_max: int,
    tol: float = 1e-8,
) -> CheckResult:
    """chi_T is a Cauchy modulus for the series sum_n d(T_{n+1} u_n, T_n u_n):
    the tail from chi_T(k) on stays below 1/(k+1)."""
    space = traj.space
    terms = [
        space.dist(family.apply(n + 1, rec.u), family.apply(n, rec.u))
        for n, rec in enumerate(traj.records)
    ]
    tails = [0.0] * (len(terms) + 1)
    for i in range(len(terms) - 1, -1, -1):
        tails[i] = tails[i + 1] + terms[i]
    worst = (-math.inf, None)
    for k in range(k_max + 1):
        start = chi_T_fn(k)
        if start >= len(terms):
            continue
        res = tails[start] - 1.0 / (k + 1)
        if res > worst[0]:
            worst = (res, {"k": k, "start": start, "tail_sum": tails[start]})
    passed = worst[0] <= tol
    return CheckResult(
        check_id="chi-T-series",
        passed=passed,
        witness=None if passed else worst[1],
        horizons={"length": len(terms), "k_max": k_max},
        details={"max_residual": worst[0]},
        scenario_hash=traj.scenario_hash,
    )


# ---------------------------------------------------------------------------
# Trajectory inequality checks
# ---------------------------------------------------------------------------


def check_recursive_inequalities(
    traj: Trajectory,
    family: MappingFamily,
    bundle: ScheduleBundle,
    x: Point,
    tol: float = 1e-9,
) -> CheckResult:
    """The three per-step inequalities relating d(x_{n+1}, x), d(u_n, x)
    and the quasilinearization term, for an arbitrary reference point x."""
    space = traj.space
    u = traj.anchor
    d = space.dist
    d2 = lambda a, b: d(a, b) ** 2
    worst = (-math.inf, None)
    for rec in traj.records[:-1]:
        n = rec.n
        beta = bundle.beta(n)
        x_next = traj.records[n + 1].x
        Tx = family.apply(n, x)
        ql = space.quasilin(x, u, x, rec.x)
        du = d(rec.u, x)
        dT = d(Tx, x)
        w_n = 2.0 * du * dT + dT * dT
        res1 = d(x_next, x) - (du + dT)
        res2 = d2(rec.u, x) - (
            beta * d2(rec.x, x)
            + 2.0 * beta * (1.0 - beta) * ql
            + (1.0 - beta) ** 2 * d2(x, u)
        )
        res3 = d2(x_next, x) - (
            beta * (d2(rec.x, x) + int(bundle.B(n)) * w_n)
            + (1.0 - beta) * (2.0 * beta * ql)
            + (1.0 - beta) * d2(x, u)
        )
        for part, res in (("i", res1), ("ii", res2), ("iii", res3)):
            if res > worst[0]:
                worst = (res, {"n": n, "part": part})
    return CheckResult(
        check_id="recursive-inequalities",
        passed=worst[0] <= tol,
        witness=None if worst[0] <= tol else worst[1],
        horizons={"length": len(traj)},
        details={"max_residual": worst[0]},
        scenario_hash=traj.scenario_hash,
    )


def check_convex_afp(
    space: SpaceModel,
    family: MappingFamily,
    v1: Point,
    v2: Point,
    p: Point,
    K: int,
    k: int,
    n_max: int,
    t_grid: int = 101,
) -> CheckResult:
    """If v1, v2 are strict 1/omega1(k)-approximate fixed points in the
    K-ball, every convex combination is a 1/(k+1)-approximate fixed point."""
    from .rates import omega1

    w1 = omega1(k, K)
    for v in (v1, v2):
        if space.dist(v, p) > K + 1e-9 or any(
            space.dist(v, family.apply(n, v)) >= 1.0 / w1
            for n in range(n_max + 1)
        ):
            return CheckResult(
                check_id="convex-afp", passed=True, hypothesis_status="unmet",
                horizons={"n_max": n_max},
                details={"k": k, "omega1": w1},
            )
    bound = 1.0 / (k + 1)
    for j in range(t_grid):
        t = j / (t_grid - 1)
        w = space.comb(v1, v2, t)
        for n in range(n_max + 1):
            val = space.dist(w, family.apply(n, w))
            if val >= bound + 1e-9:
                return CheckResult(
                    check_id="convex-afp",
                    passed=False,
                    witness={"t": t, "n": n, "value": val},
                    horizons={"n_max": n_max, "t_grid": t_grid},
                    details={"k": k},
                )
    return CheckResult(
        check_id="convex-afp", passed=True,
        horizons={"n_max": n_max, "t_grid": t_grid}, details={"k": k},
    )


def check_variational(
    space: SpaceModel,
    x: Point,
    y: Point,
    u: Point,
    p: Point,
    K: int,
    k: int,
    t_grid: int = 101,
    tol: float = 1e-9,
) -> CheckResult:
    """If x nearly minimizes the distance to u along the segment [x, y],
    then the quasilinearization term <xu, xy> is small."""
    from .rates import omega2

    w2 = omega2(k, K)
    if space.dist(x, p) > K + 1e-9 or space.dist(y, p) > K + 1e-9:
        return CheckResult(
            check_id="variational", passed=True, hypothesis_status="unmet",
            details={"reason": "points outside the K-ball"},
        )
    d2xu = space.dist(x, u) ** 2
    for j in range(t_grid):
        t = j / (t_grid - 1)
        w = space.comb(x, y, t)
        if d2xu > space.dist(w, u) ** 2 + 1.0 / w2:
            return CheckResult(
                check_id="variational", passed=True, hypothesis_status="unmet",
                witness={"t": t},
                details={"k": k, "omega2": w2},
            )
    val = space.quasilin(x, u, x, y)
    ok = val <= 1.0 / (k + 1) + tol
    return CheckResult(
        check_id="variational",
        passed=ok,
        witness=None if ok else {"quasilin": val},
        horizons={"t_grid": t_grid},
        details={"k": k, "quasilin": val},
    )
