import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kramers_moments import (
    NumericalError,
    ValidationError,
    assemble_boundary_system,
    gu_r26_viscosity,
    lockerby_viscosity,
    solve_kramers,
)

KN = 1.0 / math.sqrt(2.0)

# coefficients re-derived at 60-digit precision; frozen to full double accuracy
FROZEN = {
    (4, 0.3): (-7.3504178826450334, -0.24830443785719838),
    (4, 1.0): (-1.4035626515504679, -0.15024851423496761),
    (5, 0.3): (-7.3161250977896078, -0.16050873975132954),
    (5, 1.0): (-1.3789730649202211, -0.094244195703540662),
}
FROZEN_SLIP = {
    (8, 1.0): 1.0077219457924364,
    (20, 1.0): 1.0134106420482203,
    (40, 1.0): 1.0148938150232807,
}


def closed_form_m4(chi):
    c_hat = math.sqrt(math.pi) * (chi - 2.0) / (2.0 * (math.sqrt(3 * math.pi) * (2 - chi) + 2 * math.sqrt(2) * chi))
    c0 = (
        math.sqrt(math.pi / 2)
        * (chi - 2.0)
        / chi
        * (1.0 + math.sqrt(2) * chi / (4 * math.sqrt(2) * chi + 2 * math.sqrt(3 * math.pi) * (2 - chi)))
    )
    return c0, c_hat


def closed_form_m5(chi):
    c_hat = -3 * math.sqrt(math.pi) * (chi - 2.0) / (2.0 * (3 * math.sqrt(7 * math.pi) * (chi - 2) - 10 * math.sqrt(2) * chi))
    c0 = (
        math.sqrt(math.pi / 2)
        * (chi - 2.0)
        / chi
        * (1.0 - 2 * math.sqrt(2) * chi / (3 * math.sqrt(7 * math.pi) * (chi - 2) - 10 * math.sqrt(2) * chi))
    )
    return c0, c_hat


@pytest.mark.parametrize("key", sorted(FROZEN))
def test_frozen_coefficients(key):
    order, chi = key
    sol = solve_kramers(order, chi, KN)
    c0, c1 = FROZEN[key]
    assert sol.c0 == pytest.approx(c0, rel=1e-13)
    assert sol.c_hat[0] == pytest.approx(c1, rel=1e-13)


@pytest.mark.parametrize("key", sorted(FROZEN_SLIP))
def test_frozen_slip_values(key):
    order, chi = key
    sol = solve_kramers(order, chi, KN)
    assert sol.slip_coefficient() == pytest.approx(FROZEN_SLIP[key], rel=1e-11)


def test_m3_closed_form():
    # single wall condition: c0 = -sigma * sqrt(pi/2) (2 - chi)/chi
    for chi in (0.2, 0.6, 1.0):
        sol = solve_kramers(3, chi, KN)
        assert sol.c_hat.size == 0
        assert sol.c0 == pytest.approx(-math.sqrt(math.pi / 2) * (2 - chi) / chi, rel=1e-14)


def test_assembly_shapes_and_m3():
    asm = assemble_boundary_system(3, 0.5)
    assert asm.matrix_a.shape == (1, 1)
    assert asm.det_a == pytest.approx(1.0 / math.sqrt(2 * math.pi), rel=1e-14)
    asm8 = assemble_boundary_system(8, 0.5)
    assert asm8.matrix_a.shape == (4, 4)
    assert asm8.cond_a < 1e12


def test_solution_residual_invariant():
    for order in (4, 11, 26, 40):
        for chi in (0.05, 0.55, 1.0):
            sol = solve_kramers(order, chi, KN)
            assert sol.residual < 1e-12


def test_linearity_in_shear_stress():
    a = solve_kramers(9, 0.7, KN, sigma12=1.0)
    b = solve_kramers(9, 0.7, KN, sigma12=2.0)
    assert b.c0 == 2.0 * a.c0
    np.testing.assert_array_equal(b.c_hat, 2.0 * a.c_hat)


def test_slip_proportional_to_knudsen():
    for kn in (0.1, KN, 2.0):
        sol = solve_kramers(12, 0.4, kn)
        base = solve_kramers(12, 0.4, 1.0)
        assert sol.slip_coefficient() == pytest.approx(kn * base.slip_coefficient(), rel=1e-14)


def test_velocity_shape():
    sol = solve_kramers(3, 1.0, KN)
    ys = np.linspace(0.0, 5.0, 7)
    vals = [sol.velocity(y) for y in ys]
    # affine at order 3
    np.testing.assert_allclose(np.diff(vals, 2), 0.0, atol=1e-13)

    sol4 = solve_kramers(4, 1.0, KN)
    assert sol4.velocity(0.0) == pytest.approx(-2.0 * sol4.c_hat[0] + sol4.c0, rel=1e-14)
    # far field approaches the affine asymptote within the decay envelope
    y = 30.0
    tail_bound = 2.0 * np.sum(np.abs(sol4.c_hat)) * math.exp(-y / (KN * sol4.lambda_hat.max()))
    assert abs(sol4.velocity(y) + sol4.sigma12 * y / KN - sol4.c0) <= tail_bound + 1e-300


def test_wall_values_match_frozen_coefficients():
    c0, c1 = FROZEN[(4, 1.0)]
    sol = solve_kramers(4, 1.0, KN)
    assert sol.velocity(0.0) == pytest.approx(-2 * c1 + c0, rel=1e-13)
    assert sol.velocity_defect(0.0) == pytest.approx(-2.0 * KN * c1, rel=1e-13)
    assert sol.slip_coefficient() == pytest.approx(-KN * c0, rel=1e-13)
    amp = -2.0 * c1 / math.sqrt(3)
    assert sol.effective_viscosity(0.0) == pytest.approx(1.0 / (1.0 + amp), rel=1e-12)
    # the wall layer thins the effective viscosity
    assert sol.effective_viscosity(0.0) < 1.0


@settings(max_examples=40, deadline=None)
@given(
    order=st.integers(min_value=3, max_value=24),
    chi=st.floats(min_value=0.05, max_value=1.0),
    kn=st.floats(min_value=0.05, max_value=3.0),
    y=st.floats(min_value=0.0, max_value=40.0),
)
def test_velocity_decomposition_identity(order, chi, kn, y):
    sol = solve_kramers(order, chi, kn)
    lhs = sol.normalized_velocity(y)
    rhs = y + sol.slip_coefficient() - sol.velocity_defect(y)
    assert abs(lhs - rhs) <= 1e-13 * max(1.0, abs(lhs))


def test_defect_vanishes_far_away():
    sol = solve_kramers(10, 0.8, KN)
    assert abs(sol.velocity_defect(80.0)) < 1e-30


def test_effective_viscosity_against_finite_difference():
    sol = solve_kramers(12, 0.9, KN)
    h = 1e-5
    grad = (sol.normalized_velocity(1.0 + h) - sol.normalized_velocity(1.0 - h)) / (2 * h)
    assert grad == pytest.approx(1.0 / sol.effective_viscosity(1.0), rel=1e-8)


def test_effective_viscosity_far_field():
    sol = solve_kramers(16, 1.0, KN)
    y_far = 20.0 * KN * sol.lambda_hat.max()
    assert sol.effective_viscosity(y_far) == pytest.approx(1.0, abs=1e-6)


def test_gu_coefficient_transcription():
    denom = 0.0048517 + 0.64884 + 8.0995
    c1 = -(0.081265 + 1.2824) / denom
    value = gu_r26_viscosity(1.0, KN, 0.0)
    c2 = -(0.0008565 + 0.362) / denom
    assert value == pytest.approx(1.0 / (1.0 - (1.3042 * c1 + 1.6751 * c2)), rel=1e-14)
    assert value == pytest.approx(0.7857792675885776, rel=1e-13)
    assert gu_r26_viscosity(1.0, KN, 60.0) == pytest.approx(1.0, abs=1e-12)


def test_lockerby_values():
    assert lockerby_viscosity(1.0) == pytest.approx(0.9222090178285178, rel=1e-13)
    assert lockerby_viscosity(200.0) == pytest.approx(1.0, abs=1e-14)
    # ratio collapses towards zero approaching the wall
    assert lockerby_viscosity(1e-12) < 1e-4
    with pytest.raises(ValidationError):
        lockerby_viscosity(0.0)


def test_domain_validation():
    with pytest.raises(ValidationError):
        solve_kramers(4, 0.0, KN)
    with pytest.raises(ValidationError):
        solve_kramers(4, 1.2, KN)
    with pytest.raises(ValidationError):
        solve_kramers(4, 1.0, -0.5)
    with pytest.raises(ValidationError):
        solve_kramers(2, 1.0, KN)
    sol = solve_kramers(4, 1.0, KN, sigma12=0.0)
    with pytest.raises(ValidationError):
        sol.slip_coefficient()
    with pytest.raises(ValidationError):
        sol.normalized_velocity(1.0)
    with pytest.raises(ValidationError):
        sol.velocity(-1.0)


def test_closed_forms_match_solver():
    for chi in (0.1, 0.5, 1.0):
        sol4 = solve_kramers(4, chi, KN)
        c0, c_hat = closed_form_m4(chi)
        assert sol4.c0 == pytest.approx(c0, rel=1e-13)
        assert sol4.c_hat[0] == pytest.approx(c_hat, rel=1e-13)
        sol5 = solve_kramers(5, chi, KN)
        c0, c_hat = closed_form_m5(chi)
        assert sol5.c0 == pytest.approx(c0, rel=1e-13)
        assert sol5.c_hat[0] == pytest.approx(c_hat, rel=1e-13)
