"""Verification checks: AR rates, metastability, synthetic recurrences,
trajectory inequalities."""

import math

import pytest

from tmlab import rates as R
from tmlab import verify as V
from tmlab.engine import run
from tmlab.geometry import Euclidean, Point
from tmlab.mappings import HalfSquaredNorm, ProximalFamily, RotationFamily
from tmlab.scenario import scenario_from_text
from tmlab.schedules import preset

IDENTITY_LINE = """
space.kind = euclidean
space.dim = 1
family.kind = identity
schedule.preset = harmonic
run.u = 0
run.x0 = 1
"""


@pytest.fixture(scope="module")
def identity_traj():
    sc = scenario_from_text(IDENTITY_LINE)
    traj = run(sc.space, sc.family, sc.bundle, sc.u, sc.x0, 6000,
               scenario_hash=sc.scenario_hash)
    return sc, traj


# ---------------------------------------------------------------------------
# Asymptotic regularity
# ---------------------------------------------------------------------------


def test_ar_first_hit_identity(identity_traj):
    sc, traj = identity_traj
    rate = R.Sigma_star(5, sc.bundle, sc.K, sc.chi_T_fn)
    assert rate.value == 5185
    res = V.check_ar(traj, rate, k=5, cap=5000)
    assert res.passed
    # d_step = 1/((n+1)(n+2)) <= 1/6 first at n = 1
    assert res.details["first_hit"] == 1


def test_ar_astronomical_rate_vacuous(identity_traj):
    sc, traj = identity_traj
    astro = R.RateValue.astronomical("huge", 20)
    res = V.check_ar(traj, astro, k=3, cap=1000)
    assert res.passed
    assert "vacuous" in res.details["flag"]


def test_ar_detects_broken_rate(identity_traj):
    sc, traj = identity_traj
    res = V.check_ar(traj, R.RateValue.finite(0), k=5, cap=1000)
    assert not res.passed  # d_step at n=0 is 1/2 > 1/6


def test_family_ar_identity_trivial(identity_traj):
    sc, traj = identity_traj
    rate = R.Sigma_tilde_star(2, sc.bundle, sc.K, sc.chi_T_fn)
    res = V.check_family_ar(traj, sc.family, rate, k=2, cap=1000)
    assert res.passed
    assert res.details["first_hit"] == 0


def test_ar_insufficient_data(identity_traj):
    sc, traj = identity_traj
    big = R.RateValue.finite(10 ** 9)
    with pytest.raises(V.VerifyError):
        V.check_ar(traj, big, k=0, cap=10 ** 9)


# ---------------------------------------------------------------------------
# Metastability
# ---------------------------------------------------------------------------


def test_search_singleton_windows(identity_traj):
    _, traj = identity_traj
    for k in (0, 9, 50):
        q = V.MetastabilityQuery(k=k, f=R.Identity(), cap=100)
        assert V.search_metastable(traj, q).found == 0


def test_search_vacuous_window():
    sc = scenario_from_text(IDENTITY_LINE)
    traj = run(sc.space, sc.family, sc.bundle, sc.u, sc.x0, 50)
    # f(n) = 0 < n for n >= 1, and the n = 0 window is the singleton {x_0}
    q = V.MetastabilityQuery(k=10, f=R.Const(0), cap=40)
    assert V.search_metastable(traj, q).found == 0


def test_search_least_index_semantics(identity_traj):
    # with windows forced past the trivial prefix, the brute-force least
    # index for k=9, f(n)=2n over x_n = 1/(n+1) is n=4:
    # 1/(n+1) - 1/(2n+1) <= 1/10 first holds there for n >= 1
    _, traj = identity_traj
    q = V.MetastabilityQuery(k=9, f=R.Affine(2, 0), cap=100)
    res = V.search_metastable(traj, q)
    assert res.found == 0  # the n = 0 window [0, 0] is a singleton
    values = [
        1.0 / (n + 1) - 1.0 / (2 * n + 1) <= 0.1 + 1e-9 for n in range(1, 8)
    ]
    assert values.index(True) + 1 == 4


def test_search_monotone_in_cap(identity_traj):
    _, traj = identity_traj
    f = R.Affine(1, 30)
    for k in (2, 5):
        found = []
        for cap in (10, 100, 1000):
            q = V.MetastabilityQuery(k=k, f=f, cap=cap)
            found.append(V.search_metastable(traj, q).found)
        hits = [n for n in found if n is not None]
        assert all(n == hits[0] for n in hits)


def test_search_truncation_flag(identity_traj):
    _, traj = identity_traj
    q = V.MetastabilityQuery(k=100000, f=R.Affine(10, 10 ** 6), cap=10)
    res = V.search_metastable(traj, q)
    assert res.found is None
    assert res.truncated


def test_check_mu_pass_and_fail(identity_traj):
    sc, traj = identity_traj
    q = V.MetastabilityQuery(k=0, f=R.Const(0), cap=1000)
    bound = R.mu_star(0, R.Const(0), sc.bundle, sc.K, sc.chi_T_fn,
                      Phi_override=R.Const(0))
    res = V.check_mu(traj, q, bound)
    assert res.passed
    assert res.details["searched_n"] == 0

    # adversarial broken bound: a window that only closes later
    space = Euclidean(2)
    fam = RotationFamily(space, math.pi / 2)
    rot_traj = run(space, fam, preset("harmonic"),
                   Point.euclidean(0, 0), Point.euclidean(1, 0), 500)
    q2 = V.MetastabilityQuery(k=9, f=R.Affine(1, 3), cap=400)
    search = V.search_metastable(rot_traj, q2)
    assert search.found is not None and search.found > 0
    broken = V.check_mu(rot_traj, q2, R.RateValue.finite(0))
    assert not broken.passed


def test_check_mu_astronomical_flag(identity_traj):
    sc, traj = identity_traj
    q = V.MetastabilityQuery(k=1, f=R.Const(0), cap=100)
    res = V.check_mu(traj, q, R.RateValue.astronomical("big", 20))
    assert res.passed
    assert "not informative" in res.details["flag"]


# ---------------------------------------------------------------------------
# Synthetic recurrence instances
# ---------------------------------------------------------------------------


def test_telescoping_closed_form():
    inst = V.telescoping_instance(100)
    for n in range(101):
        assert inst.s[n] == pytest.approx(1.0 / (n + 1), abs=1e-12)


def test_xu_lemma_telescoping_all_k():
    inst = V.telescoping_instance(1100)
    b = preset("harmonic")
    for k in range(51):
        res = V.check_xu_lemma(inst, k=k, n=0, q=1000,
                               sigma_star=b.sigma_star)
        assert res.passed and res.hypothesis_status == "met"
        assert res.horizons["threshold"] == 3 * k + 4


def test_xu_lemma_divergence_variant():
    inst = V.telescoping_instance(3000)
    b = preset("harmonic")
    res = V.check_xu_lemma(inst, k=1, n=0, q=2900, sigma=b.sigma)
    assert res.passed


def test_xu_lemma_boundary_r():
    k, q, length = 2, 800, 900
    r_bound = 1.0 / (3 * (k + 1))
    a = [1.0 / (n + 2) for n in range(length)]
    v = [0.0] * length
    r = [r_bound] * length
    s = [1.0]
    for n in range(length):
        s.append((1 - a[n]) * (s[n] + v[n]) + a[n] * r[n])
    inst = V.SyntheticXuInstance(s=s, a=a, v=v, r=r, S=1)
    res = V.check_xu_lemma(inst, k=k, n=0, q=q,
                           sigma_star=preset("harmonic").sigma_star)
    assert res.passed and res.hypothesis_status == "met"


def test_xu_lemma_hypotheses_unmet():
    length = 50
    a = [1.0 / (n + 2) for n in range(length)]
    r = [1.0] * length
    s = [1.0]
    for n in range(length):
        s.append((1 - a[n]) * s[n] + a[n] * r[n])
    inst = V.SyntheticXuInstance(s=s, a=a, v=[0.0] * length, r=r, S=1)
    res = V.check_xu_lemma(inst, k=5, n=0, q=40,
                           sigma_star=preset("harmonic").sigma_star)
    assert res.passed
    assert res.hypothesis_status == "unmet"


def test_xu_lemma_argument_validation():
    inst = V.telescoping_instance(50)
    b = preset("harmonic")
    with pytest.raises(V.VerifyError):
        V.check_xu_lemma(inst, k=0, n=0, q=10)
    with pytest.raises(V.VerifyError):
        V.check_xu_lemma(inst, k=0, n=0, q=10, sigma=b.sigma,
                         sigma_star=b.sigma_star)
    with pytest.raises(V.VerifyError):
        V.check_xu_lemma(inst, k=0, n=0, q=100, sigma_star=b.sigma_star)


def test_random_instance_is_valid_and_seeded():
    a = V.random_instance(7, 300, k=2, q=250)
    b = V.random_instance(7, 300, k=2, q=250)
    assert a.s == b.s
    assert V.random_instance(8, 300, k=2, q=250).s != a.s


def test_instance_generation_rejects_violations():
    with pytest.raises(V.VerifyError):
        V.SyntheticXuInstance(s=[0.0, 1.0], a=[0.5], v=[0.0], r=[0.0], S=1)


# ---------------------------------------------------------------------------
# Trajectory inequalities
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("kind", ["euclidean", "disk", "tripod"])
def test_recursive_inequalities(kind):
    import random

    if kind == "euclidean":
        text = IDENTITY_LINE
    elif kind == "disk":
        text = """
space.kind = disk
family.kind = proximal
family.center = 0,0
schedule.preset = harmonic
run.u = 0.2,0
run.x0 = 0.4,0.1
"""
    else:
        text = """
space.kind = tripod
family.kind = rotation
family.angle = 2.0943951023931953
schedule.preset = harmonic
run.u = 0:0
run.x0 = 1:1.0
"""
    sc = scenario_from_text(text)
    traj = run(sc.space, sc.family, sc.bundle, sc.u, sc.x0, 300,
               scenario_hash=sc.scenario_hash)
    rng = random.Random(1)
    for _ in range(5):
        x = sc.space.sample(rng, 2.0)
        res = V.check_recursive_inequalities(traj, sc.family, sc.bundle, x)
        assert res.passed, (kind, res.details)


def test_recursive_inequalities_at_fixed_point(identity_traj):
    sc, traj = identity_traj
    res = V.check_recursive_inequalities(traj, sc.family, sc.bundle, sc.p)
    assert res.passed


# ---------------------------------------------------------------------------
# Approximate-fixed-point lemmas
# ---------------------------------------------------------------------------


def test_convex_afp_trivial_and_near():
    space = Euclidean(2)
    fam = RotationFamily(space, math.pi / 2)
    p = fam.fixed_point
    res = V.check_convex_afp(space, fam, p, p, p, K=1, k=5, n_max=5)
    assert res.passed and res.hypothesis_status == "met"

    v1, v2 = Point.euclidean(1e-4, 0), Point.euclidean(0, 1e-4)
    res = V.check_convex_afp(space, fam, v1, v2, p, K=1, k=3, n_max=5,
                             t_grid=11)
    assert res.passed and res.hypothesis_status == "met"


def test_convex_afp_premise_violated():
    space = Euclidean(2)
    fam = RotationFamily(space, math.pi / 2)
    p = fam.fixed_point
    far = Point.euclidean(0.9, 0)
    res = V.check_convex_afp(space, fam, far, p, p, K=1, k=5, n_max=3)
    assert res.passed
    assert res.hypothesis_status == "unmet"


def test_variational_projection_characterization():
    space = Euclidean(2)
    x, y = Point.euclidean(0, 0), Point.euclidean(1, 0)
    u = Point.euclidean(-1.0, 0.5)
    res = V.check_variational(space, x, y, u, x, K=2, k=4)
    assert res.passed and res.hypothesis_status == "met"
    assert res.details["quasilin"] <= 0.0


def test_variational_x_equals_u():
    space = Euclidean(2)
    x = Point.euclidean(0.2, 0.1)
    y = Point.euclidean(1, 1)
    res = V.check_variational(space, x, y, x, x, K=2, k=3)
    assert res.passed
    assert res.details["quasilin"] == pytest.approx(0.0, abs=1e-12)


def test_variational_premise_violated():
    space = Euclidean(2)
    # u on the far side of y: x does not minimize along [x, y]
    x, y, u = Point.euclidean(0, 0), Point.euclidean(1, 0), Point.euclidean(2, 0)
    res = V.check_variational(space, x, y, u, x, K=2, k=4)
    assert res.passed
    assert res.hypothesis_status == "unmet"


# ---------------------------------------------------------------------------
# Series Cauchy modulus
# ---------------------------------------------------------------------------


def test_chi_T_series_proximal():
    space = Euclidean(2)
    bundle = preset("harmonic")
    fam = ProximalFamily(space, HalfSquaredNorm(space.base_point()),
                         bundle.gamma)
    traj = run(space, fam, bundle, Point.euclidean(0.5, 0),
               Point.euclidean(1, 0), 5000)
    fn = fam.chi_T_fn(bundle, K=1)
    res = V.check_chi_T_series(traj, fam, fn, k_max=10, tol=1e-8)
    assert res.passed, res.details


def test_chi_T_series_detects_broken_modulus():
    space = Euclidean(2)
    bundle = preset("harmonic")
    fam = ProximalFamily(space, HalfSquaredNorm(space.base_point()),
                         bundle.gamma)
    traj = run(space, fam, bundle, Point.euclidean(2.0, 0),
               Point.euclidean(2, 1), 5000)
    res = V.check_chi_T_series(traj, fam, lambda k: 0, k_max=200, tol=1e-12)
    assert not res.passed  # the whole series exceeds 1/(k+1) for large k
