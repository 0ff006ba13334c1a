"""Counterfunction algebra, big-natural helpers and rate formulas."""

import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tmlab import rates as R
from tmlab.schedules import preset


# ---------------------------------------------------------------------------
# ceil_ln
# ---------------------------------------------------------------------------


def test_ceil_ln_small_values():
    for m in range(1, 2000):
        assert R.ceil_ln(m) == math.ceil(math.log(m))


def test_ceil_ln_near_powers_of_e():
    # e^n is irrational, so ln(ceil(e^n)) lies strictly in (n, n+1) and
    # ln(floor(e^n)) strictly in (n-1, n); the ceilings are n+1 and n
    import mpmath

    for n in range(1, 400):
        with mpmath.workprec(n * 2 + 80):
            m = int(mpmath.ceil(mpmath.exp(n)))
        assert R.ceil_ln(m) == n + 1
        assert R.ceil_ln(m - 1) == n


def test_ceil_ln_huge():
    # ln(2^k) = k ln 2; compare against exact rational bracketing
    m = 1 << 100_000
    got = R.ceil_ln(m)
    assert got == math.ceil(100_000 * math.log(2.0))


def test_ceil_ln_rejects_zero():
    with pytest.raises(R.RateError):
        R.ceil_ln(0)


# ---------------------------------------------------------------------------
# Counterfunction nodes and parser
# ---------------------------------------------------------------------------


CF_TEXTS = [
    "id",
    "const:7",
    "affine:2,0",
    "pow:3",
    "max(id,const:5)",
    "comp(affine:3,1,pow:2)",
    "table:[4,1,9]",
    "mono(table:[4,1,9])",
]


@pytest.mark.parametrize("text", CF_TEXTS)
def test_parser_render_round_trip(text):
    f = R.parse_counterfunction(text)
    assert R.parse_counterfunction(f.render()).render() == f.render()


def test_parser_rejects_garbage():
    for bad in ("", "pow:0", "affine:-1,0", "max(id)", "table:[]", "nope:3"):
        with pytest.raises(R.RateError):
            R.parse_counterfunction(bad)


def test_node_semantics():
    assert R.Identity()(41) == 41
    assert R.Const(9)(1234) == 9
    assert R.Affine(2, 3)(10) == 23
    assert R.Power(2)(12) == 144
    assert R.Max((R.Identity(), R.Const(5)))(3) == 5
    assert R.Compose(R.Power(2), R.Affine(1, 1))(4) == 25
    assert R.Table((4, 1, 9))(0) == 4
    assert R.Table((4, 1, 9))(50) == 9  # extends by the last value


def test_table_monotonize():
    f = R.monotonize(R.Table((4, 1, 9, 2)))
    assert [f(i) for i in range(6)] == [4, 4, 9, 9, 9, 9]


@given(st.lists(st.integers(0, 1000), min_size=1, max_size=20),
       st.integers(0, 40))
def test_monotonize_dominates_and_is_monotone(values, n):
    f = R.Table(tuple(values))
    g = R.monotonize(f)
    assert g(n) >= f(n)
    if n > 0:
        assert g(n) >= g(n - 1)


@given(st.lists(st.integers(0, 1000), min_size=1, max_size=20))
def test_monotonize_idempotent(values):
    f = R.monotonize(R.Table(tuple(values)))
    g = R.monotonize(f)
    for n in range(len(values) + 3):
        assert g(n) == f(n)


def test_monotonize_identity_on_monotone_trees():
    f = R.Affine(3, 1)
    assert R.monotonize(f) is f


def test_power_cap_precheck():
    with pytest.raises(R.CapExceeded):
        R.Power(3)(1 << 40, cap=64)
    assert R.Power(2)(10, cap=64) == 100


def test_ceil_scaled_exp_matches_float():
    f = R.CeilScaledExp(2)
    for n in range(0, 30):
        assert f(n) == math.ceil(2 * math.e ** n) or abs(
            f(n) - math.ceil(2 * math.e ** n)
        ) <= 1  # float ceiling may differ by one ulp-step near integers


def test_ceil_scaled_exp_overflow_detected_early():
    f = R.CeilScaledExp(2)
    with pytest.raises(R.CapExceeded):
        f(10 ** 9, cap=1000)  # never tries to build the number


# ---------------------------------------------------------------------------
# RateValue ordering
# ---------------------------------------------------------------------------


rate_values = st.one_of(
    st.integers(0, 10 ** 12).map(R.RateValue.finite),
    st.just(R.RateValue.astronomical("x", 8)),
)


@given(rate_values, rate_values, rate_values)
def test_ratevalue_total_order(a, b, c):
    assert a <= b or b <= a
    if a <= b and b <= c:
        assert a <= c
    if a <= b and b <= a:
        assert a == b


def test_astronomical_dominates():
    astro = R.RateValue.astronomical("big", 20)
    assert astro > 10 ** 100
    assert astro >= R.RateValue.finite(0)
    assert astro == R.RateValue.astronomical("other", 26)
    assert astro.render().startswith("ASTRO:")


def test_ratevalue_int_comparison():
    assert R.RateValue.finite(5) >= 5
    assert R.RateValue.finite(5) < 6
    with pytest.raises(TypeError):
        R.RateValue.finite(5) < "x"


# ---------------------------------------------------------------------------
# Elementary formulas
# ---------------------------------------------------------------------------


def test_omega_formulas():
    assert R.r_of_k(3, 2) == 16
    assert R.omega1(0, 1) == 24
    assert R.omega2(0, 1) == 4
    for k in range(6):
        for K in (1, 2, 3):
            assert R.omega1_cf(K)(k) == R.omega1(k, K)


def test_hat_combines_omega1_and_f():
    f = R.Affine(2, 0)
    h = R.hat(f, 1)
    for k in range(5):
        w = R.omega1(k, 1)
        assert h(k) == max(w, 2 * w)


def test_iterate():
    f = R.Affine(1, 1)
    assert R.iterate(f, 10, 0).value == 10
    res = R.iterate(R.Power(2), 100, 2, bit_cap=64)
    assert res.is_astronomical


def test_bound_n_star_oracle():
    # independent straight-line recomputation for k=0, f=0, K=1
    def w1(n):
        return 24 * (n + 1) ** 2

    steps = 1 * (4 * 1 * 1 * (0 + 1) ** 2 + 1)  # r(omega2(0))
    v = 0
    for _ in range(steps):
        v = w1(v)  # hat(const 0) = omega1
    expected = w1(v)
    got = R.bound_n_star(0, R.Const(0), 1, bit_cap=2 ** 26)
    assert got.value == expected


def test_zeta_star_telescoping_closed_form():
    b = preset("harmonic")
    for k in range(60):
        assert R.zeta_star(k, 0, b.sigma_star, 1).value == 3 * k + 4


def test_zeta_uses_ceil_ln():
    sigma = R.Identity()
    # zeta(k, n) = n + ceil(ln(3(k+1))) + 1 with S = 1
    assert R.zeta(0, 0, sigma, 1).value == math.ceil(math.log(3)) + 1
    assert R.zeta(9, 5, sigma, 1).value == 5 + math.ceil(math.log(30)) + 1


# ---------------------------------------------------------------------------
# Golden chain (constant step sizes, harmonic anchor weights, K = 1)
# ---------------------------------------------------------------------------


@pytest.fixture
def golden():
    bundle = preset("constant-gamma-harmonic-beta")
    return bundle, 1, (lambda k: 0)


def test_chi_golden(golden):
    b, K, ct = golden
    assert R.chi(0, b, K, ct).value == 7
    for k in range(10):
        assert R.chi(k, b, K, ct).value == 8 * (k + 1) - 1


def test_sigma_star_golden(golden):
    b, K, ct = golden
    assert R.Sigma_star(0, b, K, ct).value == 145
    # closed form: (chi(3k+2) + 1) * 6(k+1) + 1
    for k in range(10):
        expected = (8 * (3 * k + 3) - 1 + 1) * 6 * (k + 1) + 1
        assert R.Sigma_star(k, b, K, ct).value == expected


def test_sigma_tilde_star_golden(golden):
    b, K, ct = golden
    assert R.Sigma_tilde_star(0, b, K, ct).value == 2305


def test_psi_star_golden(golden):
    b, K, ct = golden
    assert R.Psi_star(0, b, K, ct).value == 20737


def test_sigma_golden_exponential(golden):
    b, K, ct = golden
    expected = math.ceil(2 * math.e ** 27) + 1
    assert R.Sigma(0, b, K, ct).value == expected


def test_mu_star_golden_constant_phi(golden):
    b, K, ct = golden
    got = R.mu_star(0, R.Const(0), b, K, ct, Phi_override=R.Const(0))
    assert got.value == 4609


def test_mu_star_default_phi_astronomical(golden):
    # the default regularity-rate plug-in puts a near-squaring tower with
    # thousands of levels inside the bound; it blows any desk-scale bit cap
    # (verified separately up to 2**26, which takes minutes of GMP time)
    b, K, ct = golden
    got = R.mu_star(0, R.Const(0), b, K, ct, bit_cap=2 ** 20)
    assert got.is_astronomical


def test_sigma_astronomical_under_tiny_cap(golden):
    b, K, ct = golden
    assert R.Sigma(0, b, K, ct, bit_cap=16).is_astronomical
    assert R.Sigma(0, b, K, ct, bit_cap=2 ** 20).value is not None


def test_rates_monotone_in_k(golden):
    b, K, ct = golden
    for name, fn in (
        ("chi", R.chi),
        ("Sigma_star", R.Sigma_star),
        ("Sigma_tilde_star", R.Sigma_tilde_star),
        ("Psi_star", R.Psi_star),
    ):
        vals = [fn(k, b, K, ct).value for k in range(8)]
        assert vals == sorted(vals), name


def test_psi_from_phi_matches_psi_star(golden):
    b, K, ct = golden
    phi = R.Wrapped(
        lambda j, cap: R._Sigma_star_int(
            2 * b.Lambda * (j + 1) - 1, b, K, ct, cap
        ),
        "tilde-inline",
    )
    # Psi* is the single-member rate built from Sigma~*; reproduce it via
    # the generic promotion with the bundle's Gamma, G, N_Gamma
    inline = R.psi_from_phi(
        R.Wrapped(
            lambda j, cap: R._tilde(R._Sigma_star_int, j, b, K, ct, cap),
            "st",
        ),
        0,
        b.Gamma,
        b.G,
        b.N_Gamma,
    )
    assert inline.value == R.Psi_star(0, b, K, ct).value


def test_scenario_bounds_validation():
    R.ScenarioBounds(K=2, M=1.5)
    with pytest.raises(R.RateError):
        R.ScenarioBounds(K=1, M=1.5)
    with pytest.raises(R.RateError):
        R.ScenarioBounds(K=1, M=0.5, S=0)
