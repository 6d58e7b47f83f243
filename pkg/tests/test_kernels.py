import math
from functools import partial

import numpy as np
import pytest

from src.core.kernels import (
    KernelVariant, bilinear_coeffs, effective_kernel_scaled, energy_scale_comparison,
    kernel_effective, kernel_exact, kernel_leading, kernel_linear, kernel_symmetrized,
    kernel_symmetrized_scaled, kernel_transcribed, symmetric_dps, symmetrize,
)
from src.utils.error_handler import DomainError

# reference values from an independent 160-digit evaluation on the O(1) background
INFLATION_EQUAL_MOMENTA = -94447812.27949227  # p = q = 1e-4, costheta = 1, eta' = -100
RADIATION_SYMMETRIC = -2.429753273788903e17  # p = 1e-3, q = 2e-3, costheta = 0.3, eta' = -0.5
LINEAR_EXACT = -20201369637667.29  # q = 1e-4, eta' = -30


def leading_symmetric(era, p, q, eta_prime, params, terms=4):
    return float(symmetrize(partial(kernel_leading, era), p, q, eta_prime, params, terms).to_numpy())


def test_variant_aliases():
    assert KernelVariant.parse("ExactQuadratic") is KernelVariant.EXACT_QUADRATIC
    assert KernelVariant.parse("leading-quadratic") is KernelVariant.LEADING_QUADRATIC
    assert KernelVariant.parse("linearized") is KernelVariant.LINEARIZED
    with pytest.raises(DomainError):
        KernelVariant.parse("cubic")


def test_exact_kernel_reference_value(toy_params):
    value = kernel_exact("inflation", 1e-4, 1e-4, 1.0, -100.0, None, toy_params, dps=60)
    assert value.value == pytest.approx(INFLATION_EQUAL_MOMENTA, rel=1e-9)
    assert value.variant is KernelVariant.EXACT_QUADRATIC


@pytest.mark.parametrize("p,q,costheta,eta_prime,tol", [
    (1e-4, 2e-4, 0.3, -100.0, 1e-3),
    (1e-4, 1e-4, 1.0, -3.0, 1e-6),
    (5e-5, 1e-4, 0.0, -30.0, 1e-4),
    (2e-4, 1e-4, 0.9, -200.0, 1e-3),
])
def test_inflation_exact_matches_leading_superhorizon(toy_params, p, q, costheta, eta_prime, tol):
    exact = kernel_symmetrized("inflation", p, q, costheta, eta_prime, None, toy_params).value
    leading = leading_symmetric("inflation", p, q, eta_prime, toy_params)
    assert abs(exact / leading - 1) < tol


@pytest.mark.parametrize("costheta", [-0.6, 0.4])
def test_inflation_leading_error_shrinks_with_the_horizon_ratio(toy_params, costheta):
    eta_prime = -10.0
    deviations = []
    for q_eta in (1e-3, 5e-4, 2.5e-4):
        q = q_eta / abs(eta_prime)
        exact = kernel_symmetrized("inflation", q, q, costheta, eta_prime, None, toy_params).value
        deviations.append(abs(exact / leading_symmetric("inflation", q, q, eta_prime, toy_params) - 1))
    assert deviations[0] < 1e-4
    assert deviations[1] <= 0.6 * deviations[0]
    assert deviations[2] <= 0.6 * deviations[1]


@pytest.mark.parametrize("p,q,costheta,eta_prime", [
    (1e-3, 2e-3, 0.3, -0.5),
    (5e-4, 1e-3, -0.7, 5.0),
    (1e-3, 1e-3, 1.0, 0.25),
])
def test_radiation_exact_matches_leading_superhorizon(toy_params, p, q, costheta, eta_prime):
    exact = kernel_symmetrized("radiation", p, q, costheta, eta_prime, None, toy_params).value
    leading = leading_symmetric("radiation", p, q, eta_prime, toy_params)
    assert abs(exact / leading - 1) < 1e-3


def test_radiation_symmetric_reference_value(toy_params):
    value = kernel_symmetrized("radiation", 1e-3, 2e-3, 0.3, -0.5, None, toy_params)
    assert value.value == pytest.approx(RADIATION_SYMMETRIC, rel=1e-9)


@pytest.mark.parametrize("p,q,costheta,eta_prime,eta_end", [
    (1e-3, 2e-3, 0.3, -100.0, -1.0),
    (0.5, 0.2, -0.4, -3.0, -1.0),
    (1e-2, 1e-2, 1.0, -50.0, -2.0),
])
def test_inflation_transcription_equals_composition(toy_params, p, q, costheta, eta_prime, eta_end):
    composed = kernel_exact("inflation", p, q, costheta, eta_prime, eta_end, toy_params, dps=60)
    transcribed = kernel_transcribed("inflation", p, q, costheta, eta_prime, eta_end, toy_params, dps=60)
    assert transcribed.value == pytest.approx(composed.value, rel=1e-14)


@pytest.mark.parametrize("era,eta_prime", [("inflation", -100.0), ("radiation", -0.5), ("radiation", 5.0)])
def test_symmetrized_routes_agree(toy_params, era, eta_prime):
    composed = kernel_symmetrized(era, 5e-4, 1e-3, -0.7, eta_prime, None, toy_params, route="compose")
    transcribed = kernel_symmetrized(era, 5e-4, 1e-3, -0.7, eta_prime, None, toy_params, route="transcribe")
    assert transcribed.value == pytest.approx(composed.value, rel=1e-15)


def test_radiation_transcription_differs_only_by_antisymmetric_part(toy_params):
    composed = kernel_exact("radiation", 1e-3, 2e-3, 0.3, -0.5, None, toy_params, dps=60)
    transcribed = kernel_transcribed("radiation", 1e-3, 2e-3, 0.3, -0.5, None, toy_params, dps=60)
    assert abs(transcribed.value / composed.value - 1) > 0.5


def test_double_precision_exact_kernel_off_superhorizon(toy_params):
    doubles = kernel_exact("inflation", 0.5, 0.2, -0.4, -3.0, -1.0, toy_params)
    extended = kernel_exact("inflation", 0.5, 0.2, -0.4, -3.0, -1.0, toy_params, dps=50)
    assert doubles.value == pytest.approx(extended.value, rel=1e-8)


def test_scaled_symmetrized_kernel_on_subhorizon_nodes(toy_params):
    p = np.array([0.5, 1.0, 2.0, 0.3])
    costheta = np.array([-0.4, 0.2, 0.9, 1.0])
    fast = kernel_symmetrized_scaled("inflation", p, 0.7, costheta, -10.0, None, toy_params)
    assert fast.resolved().all()
    values = fast.value.to_numpy()
    for i in range(p.size):
        reference = kernel_symmetrized("inflation", p[i], 0.7, costheta[i], -10.0, None, toy_params).value
        assert values[i] == pytest.approx(reference, rel=1e-9)


@pytest.mark.parametrize("era,eta_prime", [("inflation", -100.0), ("radiation", -0.5), ("radiation", 5.0)])
def test_scaled_symmetrized_kernel_flags_cancellation(toy_params, era, eta_prime):
    p = np.array([1e-4, 2e-4, 3e-4])
    costheta = np.array([1.0, 0.3, -0.7])
    fast = kernel_symmetrized_scaled(era, p, 1e-4, costheta, eta_prime, None, toy_params)
    resolved = fast.resolved()
    if era == "inflation":
        assert not resolved.any()
    values = fast.value.to_numpy()
    for i in np.flatnonzero(resolved):
        reference = kernel_symmetrized(era, p[i], 1e-4, costheta[i], eta_prime, None, toy_params).value
        assert values[i] == pytest.approx(reference, rel=1e-8)


def test_bilinear_coefficients_relations(toy_params):
    c = bilinear_coeffs("inflation", 0.3, 0.7, 0.2, -4.0, toy_params, dps=40)
    coupling = 0.3 * 0.7 * 0.2 + 2 / 16.0
    assert complex(c.b) == pytest.approx(complex(c.j - coupling * c.f), rel=1e-12)
    assert complex(c.d) == pytest.approx(complex(c.l - coupling * c.g), rel=1e-12)
    doubles = bilinear_coeffs("inflation", 0.3, 0.7, 0.2, -4.0, toy_params)
    assert complex(doubles.f.to_numpy()) == pytest.approx(complex(c.f), rel=1e-12)


def test_leading_kernel_forms(toy_params):
    two = kernel_leading("inflation", 1e-3, 2e-3, -50.0, toy_params, terms=2).value
    expected = -0.5 / (2e-3 ** 3 * 2500.0) - (4.0 / 9.0) / (1e-3 ** 3 * 2500.0)
    assert two == pytest.approx(expected, rel=1e-13)
    radiation = kernel_leading("radiation", 1e-3, 2e-3, 3.0, toy_params).value
    assert radiation == pytest.approx(-54.0 / (0.005 ** 3 * 2e-3 ** 3), rel=1e-13)
    with pytest.raises(DomainError):
        kernel_leading("inflation", 1e-3, 2e-3, -50.0, toy_params, terms=3)


def test_effective_kernel_relabels_onto_q(toy_params):
    q, eta = 1e-3, -50.0
    effective = kernel_effective("inflation", q, eta, toy_params).value
    assert effective == pytest.approx(kernel_leading("inflation", q, q, eta, toy_params).value, rel=1e-13)
    grid = effective_kernel_scaled("inflation", np.array([1e-3, 2e-3]), eta, toy_params)
    assert np.allclose(grid.to_numpy()[1] / grid.to_numpy()[0], 1 / 8.0, rtol=1e-13)


def test_fiducial_leading_kernel_stays_scaled(fiducial):
    value = kernel_leading("inflation", 1e-60, 2e-60, fiducial.eta_e * 10, fiducial)
    assert math.isfinite(value.log10_abs())
    assert value.mantissa < 0


def test_linear_kernel(toy_params):
    exact = kernel_linear(1e-4, -30.0, toy_params)
    assert exact.value == pytest.approx(LINEAR_EXACT, rel=1e-9)
    leading = kernel_linear(1e-4, -30.0, toy_params, variant="leading")
    assert abs(exact.value / leading.value - 1) < 1e-2
    close = kernel_linear(1e-4, -2.0, toy_params)
    assert close.value == pytest.approx(kernel_linear(1e-4, -2.0, toy_params, "leading").value, rel=1e-4)
    with pytest.raises(DomainError):
        kernel_linear(1e-4, -30.0, toy_params, variant="other")


def test_symmetric_precision_grows_with_depth(fiducial):
    assert symmetric_dps(2e-62, 2e-58, fiducial) > symmetric_dps(1e-33, 1e-33, fiducial)


def test_energy_scales(fiducial):
    scales = energy_scale_comparison(5e-60, fiducial)
    assert set(scales) >= {"log10_quadratic", "log10_linear", "log10_ratio"}
    assert scales["log10_ratio"] == pytest.approx(scales["log10_quadratic"] - scales["log10_linear"], abs=1e-9)


def test_kernel_domain_errors(toy_params):
    with pytest.raises(DomainError):
        kernel_exact("inflation", -1.0, 1.0, 0.0, -10.0, None, toy_params)
    with pytest.raises(DomainError):
        kernel_exact("inflation", 1.0, 1.0, 1.5, -10.0, None, toy_params)
    with pytest.raises(DomainError):
        kernel_exact("inflation", 1.0, 1.0, 0.0, -0.5, None, toy_params)
    with pytest.raises(DomainError):
        kernel_symmetrized("inflation", 1.0, 1.0, 0.0, -10.0, None, toy_params, route="other")
