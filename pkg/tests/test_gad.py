import math

import numpy as np
import pytest
import scipy.integrate
from hypothesis import given, settings
from hypothesis import strategies as st

from kraus_forge.errors import QuadratureFailure, SingularTime
from kraus_forge.gad import (
    BathSpectrum,
    GadRates,
    GadScaled,
    ReferenceGadParams,
    compose_z_rotation,
    gad_F_closed,
    gad_L,
    gad_L_scaled,
    gad_bloch_rates,
    gad_bloch_scaled,
    gad_choi_eigenvalues,
    gad_generator,
    gad_intermediates,
    gad_kraus_asymptotic,
    gad_kraus_closed,
    lamb_stark_shift,
    rates_from_physics,
    reference_gad_kraus,
    rescale,
    spectral_density,
    textbook_ad_kraus,
    thermal_occupation,
)
from kraus_forge.kraus import (
    apply_channel,
    choi_distance,
    choi_from_propagator,
    kraus_from_choi,
    propagate,
)
from kraus_forge.lindblad import build_L
from kraus_forge.linalg import SIGMA_I, SIGMA_X, SIGMA_Z, hermitian_eig, matrix_exp

scaled_params = st.builds(
    GadScaled,
    theta=st.floats(min_value=-8.0, max_value=8.0),
    omega=st.floats(min_value=-2.0, max_value=-0.01),
    tau=st.floats(min_value=1e-4, max_value=25.0),
)


def channel_action(kset, operator):
    return sum(e @ operator @ e.conj().T for e in kset.operators)


# ---------------------------------------------------------------- rescaling

def test_rescale_direct_substitution():
    scaled = rescale(GadRates(1.0, 3.0, 1.0), 0.5)
    assert (scaled.theta, scaled.omega, scaled.tau) == (1.0, -1.0, 1.0)


def test_rescale_zero_temperature_regime():
    scaled = rescale(GadRates(0.0, 0.8, 0.0), 1.3)
    assert scaled.theta == 0.0
    assert scaled.omega == -2.0


def test_rescale_zero_time():
    assert rescale(GadRates(0.2, 1.0, 0.5), 0.0).tau == 0.0


def test_rates_validation():
    with pytest.raises(ValueError):
        GadRates(0.0, 1.0, 1.0)  # y must exceed z
    with pytest.raises(ValueError):
        GadRates(0.0, 1.0, -0.1)
    with pytest.raises(ValueError):
        GadScaled(0.0, 0.0, 1.0)  # omega = 0 excluded
    with pytest.raises(ValueError):
        GadScaled(0.0, -1.0, -0.5)  # backward evolution rejected


# ---------------------------------------------------------------- matrices

def test_gad_L_zero_temperature_entries():
    expected = np.array(
        [[0, 0, 0, 0], [0, -0.5, 0, 0], [0, 0, -0.5, 0], [-1, 0, 0, -1]], float
    )
    assert np.abs(gad_L(GadRates(0.0, 1.0, 0.0)) - expected).max() == 0.0


def test_gad_L_rotation_entry():
    assert gad_L(GadRates(1.0, 3.0, 1.0))[1, 2] == -2.0


def test_gad_L_matches_lindblad_route():
    for rates in (GadRates(1.0, 3.0, 1.0), GadRates(-0.4, 0.9, 0.2)):
        assert np.abs(gad_L(rates) - build_L(gad_generator(rates))).max() < 1e-14


def test_gad_F_closed_at_zero_time():
    assert np.abs(gad_F_closed(GadScaled(2.0, -1.0, 0.0)) - np.eye(4)).max() == 0.0


def test_gad_F_closed_zero_temperature_block():
    tau = 0.8
    prop = gad_F_closed(GadScaled(0.0, -2.0, tau))
    decay = math.exp(-tau)
    assert abs(prop[1, 1] - decay) < 1e-15
    assert abs(prop[2, 2] - decay) < 1e-15
    assert abs(prop[3, 3] - decay**2) < 1e-15
    # -2 sinh(tau) e^(-tau) telescopes to e^(-2 tau) - 1
    assert abs(prop[3, 0] - (decay**2 - 1.0)) < 1e-15


def test_gad_F_closed_matches_numeric_exponential():
    scaled = GadScaled(1.0, -1.0, 1.0)
    numeric = matrix_exp(gad_L_scaled(scaled), scaled.tau)
    assert np.abs(gad_F_closed(scaled) - numeric).max() < 1e-10


def test_gad_F_closed_matches_rates_route():
    rates = GadRates(1.0, 3.0, 1.0)
    t = 0.5
    closed = gad_F_closed(rescale(rates, t))
    assert np.abs(propagate(gad_L(rates), t) - closed).max() < 1e-10


# ---------------------------------------------------------------- spectrum

def test_choi_eigenvalues_zero_temperature_point():
    values = gad_choi_eigenvalues(GadScaled(0.0, -2.0, math.log(2.0)))
    assert np.abs(values - np.array([0.75, 0.0, 0.0, 1.25])).max() < 1e-14


def test_choi_eigenvalues_longtime_limits():
    omega = -1.2
    values = gad_choi_eigenvalues(GadScaled(0.0, omega, 40.0))
    expected = np.array(
        [(2 - omega) / 4, (2 + omega) / 4, (2 + omega) / 4, (2 - omega) / 4]
    )
    assert np.abs(values - expected).max() < 1e-12


@settings(max_examples=60, deadline=None)
@given(scaled=scaled_params)
def test_choi_eigenvalues_sum_to_two_and_nonnegative(scaled):
    values = gad_choi_eigenvalues(scaled)
    assert abs(values.sum() - 2.0) < 1e-12
    assert values.min() >= 0.0


def test_choi_eigenvalues_match_pipeline():
    for omega in (-2.0, -1.0, -0.1):
        for tau in (0.1, 1.0, 5.0):
            scaled = GadScaled(0.7, omega, tau)
            closed = np.sort(gad_choi_eigenvalues(scaled))[::-1]
            pipeline = hermitian_eig(
                choi_from_propagator(gad_F_closed(scaled))
            )[0]
            assert np.abs(closed - pipeline).max() < 1e-10


def test_choi_eigenvalues_theta_independent():
    for theta in (1.0, 5.0):
        base = gad_choi_eigenvalues(GadScaled(0.0, -1.0, 1.3))
        other = gad_choi_eigenvalues(GadScaled(theta, -1.0, 1.3))
        assert np.abs(base - other).max() == 0.0


def test_radical_rewrite_identity():
    # omega^2 + e^(2 tau)(16 + (e^(2 tau) - 2) omega^2) equals
    # 16 e^(2 tau) + omega^2 (e^(2 tau) - 1)^2; the right side is the
    # cancellation-free form used in the implementation
    for omega in (-2.0, -1.3, -0.05):
        for tau in (0.05, 1.0, 4.0):
            grow = math.exp(2 * tau)
            raw = omega**2 + grow * (16.0 + (grow - 2.0) * omega**2)
            stable = 16.0 * grow + omega**2 * (grow - 1.0) ** 2
            assert abs(raw - stable) <= 1e-12 * abs(stable)


def test_choi_eigenvector_equatorial_pair():
    # the two equatorial eigenvectors are (0, 1, -+i, 0)/sqrt(2) after the
    # phase convention, independent of tau
    scaled = GadScaled(0.6, -1.0, 0.7)
    choi = choi_from_propagator(gad_F_closed(scaled))
    values, vectors = hermitian_eig(choi)
    closed = gad_choi_eigenvalues(scaled)
    for idx in (0, 1):
        target = np.where(np.abs(values - closed[idx]) < 1e-12)[0]
        assert target.size == 1
        vec = vectors[:, target[0]]
        assert abs(vec[0]) < 1e-12 and abs(vec[3]) < 1e-12
        assert abs(abs(vec[1]) - 1 / math.sqrt(2)) < 1e-12
        ratio = vec[2] / vec[1]
        assert abs(ratio - (-1j if idx == 0 else 1j)) < 1e-10


# ---------------------------------------------------------------- kraus sets

def test_closed_kraus_zero_temperature_reduction():
    tau = math.log(2.0)
    kset = gad_kraus_closed(GadScaled(0.0, -2.0, tau))
    lower, upper, diag_minus, diag_plus = kset.operators
    expected_amp = math.sqrt(1.0 - math.exp(-2 * tau))
    assert np.abs(lower - np.array([[0, 0], [1j * expected_amp, 0]])).max() < 1e-14
    assert np.abs(upper).max() == 0.0
    assert np.abs(diag_minus).max() == 0.0
    assert np.abs(diag_plus - np.diag([-0.5, -1.0])).max() < 1e-14


@settings(max_examples=40, deadline=None)
@given(scaled=scaled_params)
def test_closed_kraus_completeness(scaled):
    assert gad_kraus_closed(scaled).completeness_residual() < 1e-9


def test_closed_kraus_weights_are_choi_eigenvalues():
    scaled = GadScaled(1.0, -1.0, 1.0)
    kset = gad_kraus_closed(scaled)
    assert np.abs(np.array(kset.weights) - gad_choi_eigenvalues(scaled)).max() < 1e-14
    for op, weight in zip(kset.operators, kset.weights):
        assert abs(np.trace(op.conj().T @ op).real - weight) < 1e-12


def test_closed_kraus_matches_pipeline():
    for theta in (0.0, 1.0, 5.0):
        for omega in (-2.0, -1.0, -0.1):
            for tau in (0.1, 1.0, 5.0):
                scaled = GadScaled(theta, omega, tau)
                pipeline = kraus_from_choi(
                    choi_from_propagator(gad_F_closed(scaled))
                )
                assert choi_distance(gad_kraus_closed(scaled), pipeline) < 1e-9


def test_closed_kraus_identity_branch_below_singular_time():
    kset = gad_kraus_closed(GadScaled(1.0, -1.0, 0.0))
    assert len(kset) == 1
    assert np.abs(kset.operators[0] - SIGMA_I).max() == 0.0
    assert len(gad_kraus_closed(GadScaled(1.0, -1.0, 0.99e-8))) == 1
    assert len(gad_kraus_closed(GadScaled(1.0, -1.0, 1.01e-8))) == 4


def test_intermediates_singular_at_zero_time():
    with pytest.raises(SingularTime):
        gad_intermediates(GadScaled(1.0, -1.0, 0.0))


def test_intermediates_recompute_agreement():
    # naive re-evaluation with the raw exponential forms
    scaled = GadScaled(0.9, -0.7, 1.4)
    sub = gad_intermediates(scaled)
    theta, omega, tau = scaled.theta, scaled.omega, scaled.tau
    grow = math.exp(2 * tau)
    root = math.sqrt(16.0 * grow + omega**2 * (grow - 1.0) ** 2)
    assert abs(sub.a - (-2j * math.sin(theta * tau) + omega * math.sinh(tau))) < 1e-12
    assert abs(sub.b_plus - math.exp(-4 * tau) * (2 + 2 * grow + root)) < 1e-12
    assert abs(sub.b_minus - math.exp(-4 * tau) * (2 + 2 * grow - root)) < 1e-12
    for sign, value in ((1.0, sub.c_plus), (-1.0, sub.c_minus)):
        raw = math.exp(-2 * tau) * (
            root + sign * 4 * math.exp(tau) * math.cos(theta * tau)
        ) ** 2
        assert abs(value - raw) < 1e-12 * max(1.0, raw)
    assert abs(sub.d - 4 * math.exp(tau) * np.exp(-1j * theta * tau)) < 1e-12
    assert abs(sub.e_plus - ((1 - grow) * omega + root)) < 1e-9 * max(1.0, abs(root))
    assert abs(sub.e_minus - ((1 - grow) * omega - root)) < 1e-9 * max(1.0, abs(root))
    assert sub.b_plus >= 0 and sub.b_minus >= 0
    assert sub.c_plus >= 0 and sub.c_minus >= 0


def test_asymptotic_kraus_zero_temperature():
    kset = gad_kraus_asymptotic(-2.0)
    lower, upper, drop, raise_ = kset.operators
    assert np.abs(lower - np.array([[0, 0], [1j, 0]])).max() < 1e-15
    assert np.abs(upper).max() == 0.0
    assert np.abs(drop - np.diag([0.0, -1.0])).max() < 1e-15
    assert np.abs(raise_).max() == 0.0


def test_asymptotic_kraus_completeness_and_fixed_point():
    for omega in (-2.0, -1.0, -0.1):
        kset = gad_kraus_asymptotic(omega)
        assert kset.completeness_residual() < 1e-12
        for rho in (
            np.diag([1.0, 0.0]).astype(complex),
            np.diag([0.0, 1.0]).astype(complex),
            0.5 * (SIGMA_I + SIGMA_X),
        ):
            out = apply_channel(kset, rho)
            z_component = np.trace(SIGMA_Z @ out).real
            assert abs(z_component - omega / 2) < 1e-12
            assert np.abs(out - np.diag(np.diag(out))).max() < 1e-12


def test_closed_kraus_converges_to_asymptotic():
    for omega in (-2.0, -1.0, -0.1):
        closed = gad_kraus_closed(GadScaled(1.0, omega, 20.0))
        assert choi_distance(closed, gad_kraus_asymptotic(omega)) < 1e-7


def test_reference_kraus_identity_at_zero_weight():
    kset = reference_gad_kraus(ReferenceGadParams(0.0, 0.3))
    ops = kset.operators
    assert np.abs(ops[0] - math.sqrt(0.3) * SIGMA_I).max() < 1e-15
    assert np.abs(ops[1]).max() == 0.0
    assert np.abs(ops[2] - math.sqrt(0.7) * SIGMA_I).max() < 1e-15
    assert np.abs(ops[3]).max() == 0.0
    rho = 0.5 * (SIGMA_I + SIGMA_X)
    assert np.abs(apply_channel(kset, rho) - rho).max() < 1e-15


def test_reference_kraus_reduces_to_textbook_pair():
    lam = 0.4
    full = reference_gad_kraus(ReferenceGadParams(lam, 1.0))
    pair = textbook_ad_kraus(lam)
    assert choi_distance(full, pair) < 1e-15
    assert np.abs(full.operators[0] - pair.operators[0]).max() == 0.0
    assert np.abs(full.operators[1] - pair.operators[1]).max() == 0.0


def test_reference_bridge_matches_closed_kraus():
    # p = (2 - omega)/4 with lambda = 1 - e^(-2 tau) gives the same channel
    for omega in (-2.0, -1.0, -0.3):
        for tau in (0.2, 1.0, 4.0):
            scaled = GadScaled(0.0, omega, tau)
            reference = reference_gad_kraus(ReferenceGadParams.from_scaled(scaled))
            assert choi_distance(reference, gad_kraus_closed(scaled)) < 1e-9


def test_reference_params_from_thermal():
    params = ReferenceGadParams.from_thermal(n_th=0.5, gamma0=1.0, t=0.5)
    assert params.p == pytest.approx(0.75)
    assert params.lambda_t == pytest.approx(1 - math.exp(-1.0))
    # omega = -2/(2 n + 1) = -1 maps to the same p through the bridge
    bridged = ReferenceGadParams.from_scaled(GadScaled(0.0, -1.0, 0.5))
    assert bridged.p == pytest.approx(params.p)
    assert bridged.lambda_t == pytest.approx(params.lambda_t)
    assert bridged.n_th == pytest.approx(0.5)


def test_rotated_reference_matches_rotating_channel():
    scaled = GadScaled(1.0, -1.0, 1.0)
    reference = compose_z_rotation(
        reference_gad_kraus(ReferenceGadParams.from_scaled(scaled)),
        scaled.theta * scaled.tau,
    )
    assert choi_distance(reference, gad_kraus_closed(scaled)) < 1e-9


# ---------------------------------------------------------------- actions

def test_channel_action_identities():
    for theta, omega, tau in [(0.0, -2.0, 0.7), (1.0, -1.0, 1.0), (5.0, -0.1, 2.0)]:
        scaled = GadScaled(theta, omega, tau)
        kset = gad_kraus_closed(scaled)
        decay = math.exp(-tau)
        shrink = math.exp(-2 * tau)
        cos_a, sin_a = math.cos(theta * tau), math.sin(theta * tau)
        sx, sy = SIGMA_X, np.array([[0, -1j], [1j, 0]])
        checks = [
            (SIGMA_I, SIGMA_I + 0.5 * omega * (1 - shrink) * SIGMA_Z),
            (sx, decay * (cos_a * sx + sin_a * sy)),
            (sy, decay * (cos_a * sy - sin_a * sx)),
            (SIGMA_Z, shrink * SIGMA_Z),
        ]
        for operator, expected in checks:
            assert np.abs(channel_action(kset, operator) - expected).max() < 1e-9


def test_bloch_solution_closure():
    scaled = GadScaled(1.0, -1.0, 0.9)
    kset = gad_kraus_closed(scaled)
    sy = np.array([[0, -1j], [1j, 0]])
    for u in np.linspace(0, 2 * math.pi, 7, endpoint=False):
        for v in np.linspace(0, math.pi, 7):
            direction = np.array(
                [math.sin(v) * math.cos(u), math.sin(v) * math.sin(u), math.cos(v)]
            )
            rho = 0.5 * (
                SIGMA_I + direction[0] * SIGMA_X + direction[1] * sy + direction[2] * SIGMA_Z
            )
            out = apply_channel(kset, rho)
            bloch = np.array(
                [
                    np.trace(SIGMA_X @ out).real,
                    np.trace(sy @ out).real,
                    np.trace(SIGMA_Z @ out).real,
                ]
            )
            assert np.abs(bloch - gad_bloch_scaled(scaled, u, v)).max() < 1e-9


def test_bloch_solutions_rates_vs_scaled():
    rates = GadRates(0.8, 2.5, 0.6)
    t = 0.75
    scaled = rescale(rates, t)
    for u in (0.0, 1.1, 4.0):
        for v in (0.0, 0.7, 2.2, math.pi):
            assert np.abs(
                gad_bloch_rates(rates, t, u, v) - gad_bloch_scaled(scaled, u, v)
            ).max() < 1e-10


# ---------------------------------------------------------------- physics

def test_spectral_density_ohmic_value():
    bath = BathSpectrum(0.02, 10.0, 15.0, 0.0)
    assert spectral_density(bath, 10.0) == pytest.approx(0.2 * math.exp(-2.0 / 3.0))
    assert spectral_density(bath, 0.0) == 0.0


def test_thermal_occupation_values():
    assert thermal_occupation(10.0, 0.0) == 0.0
    assert thermal_occupation(10.0, 100.0) == pytest.approx(9.50833194477505)
    assert thermal_occupation(1e4, 1.0) == 0.0  # exponent overflow guard


def test_rates_from_physics_zero_temperature():
    bath = BathSpectrum(0.02, 10.0, 15.0, 0.0)
    rates = rates_from_physics(bath)
    assert rates.z == 0.0
    assert rates.y == pytest.approx(0.645178979752011, abs=1e-12)
    assert rates.x == 0.0


def test_rates_from_physics_thermal_balance():
    bath = BathSpectrum(0.02, 10.0, 15.0, 100.0)
    rates = rates_from_physics(bath)
    scaled = rescale(rates, 1.0)
    assert scaled.omega == pytest.approx(-0.09991674991575995, abs=1e-12)
    # the difference y - z is temperature independent
    cold = rates_from_physics(BathSpectrum(0.02, 10.0, 15.0, 0.0))
    assert rates.y - rates.z == pytest.approx(cold.y, rel=1e-12)


def test_lamb_stark_vanishes_without_coupling():
    shifts = lamb_stark_shift(BathSpectrum(0.0, 10.0, 15.0, 100.0))
    assert shifts == (0.0, 0.0, 0.0, 0.0)


def test_lamb_stark_thermal_part_vanishes_at_zero_temperature():
    shifts = lamb_stark_shift(BathSpectrum(0.02, 10.0, 15.0, 0.0))
    assert shifts.delta_prime == 0.0
    assert shifts.delta != 0.0


def test_lamb_stark_against_adaptive_oracle():
    # frozen oracle values from scipy's Cauchy-weight quadrature over the
    # same [0, 50 * cutoff] window
    shifts = lamb_stark_shift(BathSpectrum(0.02, 10.0, 15.0, 100.0))
    assert shifts.delta == pytest.approx(-0.20057282751074212, abs=1e-6)
    assert shifts.delta_prime == pytest.approx(1.0891478116425708, abs=1e-6)
    assert shifts.delta_error < 1e-6
    assert shifts.delta_prime_error < 1e-6


def test_lamb_stark_self_convergence():
    # recompute with scipy directly to confirm the reported error estimate
    # is not understated
    bath = BathSpectrum(0.013, 7.0, 11.0, 40.0)
    shifts = lamb_stark_shift(bath)

    def vacuum(w):
        return spectral_density(bath, w)

    reference, _ = scipy.integrate.quad(
        vacuum, 0.0, 50.0 * bath.omega_c, weight="cauchy", wvar=bath.omega0, limit=400
    )
    assert shifts.delta == pytest.approx(-reference, abs=1e-8)


def test_lamb_stark_rejects_pole_outside_window():
    with pytest.raises(ValueError):
        lamb_stark_shift(BathSpectrum(0.02, 1000.0, 15.0, 0.0))


def test_quadrature_failure_when_tolerance_unreachable():
    with pytest.raises(QuadratureFailure):
        lamb_stark_shift(BathSpectrum(0.02, 10.0, 15.0, 100.0), rel_tol=1e-18)


def test_bath_model_tag_rejected():
    with pytest.raises(ValueError):
        BathSpectrum(0.02, 10.0, 15.0, 0.0, model="lorentzian")
