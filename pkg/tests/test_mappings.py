"""Mapping families: nonexpansiveness, step-size compatibility, solvers."""

import math

import pytest

from tmlab.geometry import Euclidean, PoincareDisk, Point, SampleSpec, Tripod
from tmlab.mappings import (
    BallSet,
    ConstantFamily,
    HalfSquaredNorm,
    IdentityFamily,
    IndicatorOfBall,
    MetricProjectionFamily,
    ProximalFamily,
    ResolventFamily,
    RotationFamily,
    SolverFailure,
    check_afp_membership,
    check_condition_c1,
    check_nonexpansive,
)
from tmlab.schedules import preset

SMALL = SampleSpec(seed=3, count=200)

HARMONIC_GAMMA = preset("harmonic").gamma


def euclid2():
    return Euclidean(2)


# ---------------------------------------------------------------------------
# Construction and fixed points
# ---------------------------------------------------------------------------


def test_identity_fixed_point_defaults_to_base():
    fam = IdentityFamily(euclid2())
    assert fam.fixed_point.data == (0.0, 0.0)
    x = Point.euclidean(1.0, -2.0)
    assert fam.apply(17, x) is x


def test_rotation_requires_dim_two():
    from tmlab.geometry import GeometryError

    with pytest.raises(GeometryError):
        RotationFamily(Euclidean(3), 1.0)


def test_rotation_fixes_base_point():
    for space in (euclid2(), PoincareDisk(), Tripod()):
        fam = RotationFamily(space, 2.0 * math.pi / 3.0)
        p = fam.fixed_point
        assert space.dist(p, fam.apply(0, p)) <= 1e-12


def test_tripod_rotation_is_leg_shift():
    fam = RotationFamily(Tripod(), 2.0 * math.pi / 3.0)
    assert fam.apply(0, Point.tripod(0, 1.5)).data == (1, 1.5)
    assert fam.apply(0, Point.tripod(2, 1.5)).data == (0, 1.5)


def test_projection_inside_ball_is_identity():
    space = euclid2()
    fam = MetricProjectionFamily(space, BallSet(Point.euclidean(0, 0), 1.0))
    x = Point.euclidean(0.3, 0.4)
    assert fam.apply(0, x) is x
    y = fam.apply(0, Point.euclidean(3.0, 4.0))
    assert space.dist(y, fam.fixed_point) == pytest.approx(1.0, abs=1e-12)


def test_proximal_half_squared_norm_closed_form():
    space = euclid2()
    fam = ProximalFamily(space, HalfSquaredNorm(Point.euclidean(0, 0)),
                         lambda n: 1.0)
    # prox of d^2(., 0)/2 at step 1 is x / 2
    got = fam.apply(5, Point.euclidean(2.0, -4.0))
    assert got.data == pytest.approx((1.0, -2.0))


def test_proximal_ball_indicator_is_projection():
    space = euclid2()
    fam = ProximalFamily(
        space, IndicatorOfBall(Point.euclidean(0, 0), 1.0), HARMONIC_GAMMA
    )
    got = fam.apply(0, Point.euclidean(0.0, 5.0))
    assert got.data == pytest.approx((0.0, 1.0))


def test_resolvent_matches_linear_solve():
    # base map T = rotation by theta; the resolvent solves
    # z = (1 - c) x + c R z, a 2x2 linear system with exact inverse
    space = euclid2()
    theta = 1.0
    base = RotationFamily(space, theta)
    fam = ResolventFamily(
        space, lambda p: base.apply(0, p), base.fixed_point, lambda n: 1.0
    )
    x = (1.2, -0.7)
    c = 0.5
    cos, sin = math.cos(theta), math.sin(theta)
    # (I - cR) z = (1-c) x
    a11, a12 = 1 - c * cos, c * sin
    a21, a22 = -c * sin, 1 - c * cos
    det = a11 * a22 - a12 * a21
    rhs = ((1 - c) * x[0], (1 - c) * x[1])
    z = (
        (a22 * rhs[0] - a12 * rhs[1]) / det,
        (-a21 * rhs[0] + a11 * rhs[1]) / det,
    )
    got = fam.apply(0, Point.euclidean(*x))
    assert got.data == pytest.approx(z, abs=1e-10)


def test_resolvent_reports_solver_failure():
    space = euclid2()
    base = RotationFamily(space, 1.0)
    fam = ResolventFamily(
        space, lambda p: base.apply(0, p), base.fixed_point,
        lambda n: 1.0, inner_tol=1e-16, max_iterations=3,
    )
    with pytest.raises(SolverFailure) as exc:
        fam.apply(0, Point.euclidean(5.0, 5.0))
    assert exc.value.iterations == 3
    assert exc.value.residual > 0


# ---------------------------------------------------------------------------
# Empirical checks
# ---------------------------------------------------------------------------


def families_for(space):
    yield IdentityFamily(space)
    if not isinstance(space, Euclidean) or space.dim == 2:
        yield RotationFamily(space, math.pi / 2)
    yield MetricProjectionFamily(space, BallSet(space.base_point(), 0.5))
    yield ProximalFamily(space, HalfSquaredNorm(space.base_point()),
                         HARMONIC_GAMMA)


@pytest.mark.parametrize("space", [euclid2(), PoincareDisk(), Tripod()],
                         ids=["euclidean", "disk", "tripod"])
def test_families_are_nonexpansive(space):
    for fam in families_for(space):
        rep = check_nonexpansive(fam, 5, SMALL, tol=1e-9)
        assert rep.passed, rep.axiom


def test_proximal_satisfies_step_size_compatibility():
    for space in (euclid2(), PoincareDisk(), Tripod()):
        fam = ProximalFamily(space, HalfSquaredNorm(space.base_point()),
                             HARMONIC_GAMMA)
        rep = check_condition_c1(fam, HARMONIC_GAMMA, 8, SMALL, tol=1e-9)
        assert rep.passed, (space.kind, rep.max_violation)


def test_condition_c1_fails_for_unrelated_family():
    # a rotation family is not driven by the step sizes at all, so the
    # compatibility inequality has no reason to hold
    fam = ConstantFamily(euclid2(), lambda p: Point.euclidean(0.0, 0.0),
                         Point.euclidean(0.0, 0.0))

    class TwoMaps(ConstantFamily):
        def apply(self, n, x):
            if n == 0:
                return x
            return Point.euclidean(0.0, 0.0)

    fam = TwoMaps(euclid2(), lambda p: p, Point.euclidean(0.0, 0.0))
    rep = check_condition_c1(fam, lambda n: 1.0, 3, SMALL)
    assert not rep.passed


def test_afp_membership():
    space = euclid2()
    fam = RotationFamily(space, math.pi / 2)
    p = fam.fixed_point
    assert check_afp_membership(fam, p, p, K=1, k=10, n_max=5)
    near = Point.euclidean(1e-3, 0.0)
    assert check_afp_membership(fam, near, p, K=1, k=100, n_max=5)
    far = Point.euclidean(5.0, 0.0)
    assert not check_afp_membership(fam, far, p, K=1, k=10, n_max=5)


def test_chi_T_fn_is_zero_without_step_sizes():
    fam = IdentityFamily(euclid2())
    fn = fam.chi_T_fn(preset("harmonic"), K=2)
    assert [fn(k) for k in range(4)] == [0, 0, 0, 0]


def test_chi_T_fn_uses_gamma_modulus():
    space = euclid2()
    fam = ProximalFamily(space, HalfSquaredNorm(space.base_point()),
                         HARMONIC_GAMMA)
    b = preset("harmonic")
    fn = fam.chi_T_fn(b, K=2)
    # max{N_Gamma, chi_gamma(2*K*Gamma*(k+1) - 1)} with chi_gamma = id
    assert fn(0) == 2 * 2 * 1 * 1 - 1
    assert fn(3) == 2 * 2 * 1 * 4 - 1
