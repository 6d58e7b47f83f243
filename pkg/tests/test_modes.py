import math

import numpy as np
import pytest

from src.core.modes import (
    curvature_perturbation, expected_wronskian, log_grid, mode, mode_grid_table, mode_inflation,
    mode_radiation, mode_sho, ode_residual, scaled_mode, wronskian_dps,
)
from src.core.spectrum import power_spectrum_standard, power_spectrum_u, power_spectrum_u_superhorizon
from src.utils.error_handler import DomainError

Q_WINDOW = (2e-62, 2e-58)


def test_sho_wronskian():
    state = mode_sho(2.5, 0.7)
    assert state.wronskian() == pytest.approx(1j, abs=1e-14)


def test_inflation_wronskian_grid(fiducial):
    k_values = log_grid(*Q_WINDOW, 50)
    eta_values = log_grid(fiducial.eta0, fiducial.eta_e, 50, negative=True)
    table = mode_grid_table("inflation", k_values, eta_values, fiducial)
    assert len(table) == 2500
    assert table["wronskian_error"].max() < 1e-10


@pytest.mark.parametrize("normalization", ["matched", "canonical"])
def test_radiation_wronskian_grid(fiducial, normalization):
    k_values = log_grid(*Q_WINDOW, 50)
    eta_values = log_grid(-fiducial.eta_e, fiducial.eta_r, 50)
    table = mode_grid_table("radiation", k_values, eta_values, fiducial, normalization)
    assert table["wronskian_error"].max() < 1e-10


@pytest.mark.parametrize("era", ["inflation", "radiation"])
def test_low_requested_precision_is_only_a_floor(fiducial, era):
    inflation = era == "inflation"
    lo, hi = (fiducial.eta0, fiducial.eta_e) if inflation else (-fiducial.eta_e, fiducial.eta_r)
    table = mode_grid_table(era, log_grid(*Q_WINDOW, 3), log_grid(lo, hi, 3, negative=inflation),
                            fiducial, dps=30)
    assert table["wronskian_error"].max() < 1e-10


def test_wronskian_precision_tracks_the_smallest_scale(fiducial):
    assert wronskian_dps("inflation", 1e-62, fiducial.eta_e, fiducial) >= 110
    assert wronskian_dps("radiation", 1e-62, fiducial.eta_r, fiducial) >= 160
    assert wronskian_dps("inflation", 1e-58, fiducial.eta0, fiducial) < 40


def test_expected_wronskians(fiducial):
    assert expected_wronskian(fiducial.era("inflation"), 0.005) == 1j
    assert expected_wronskian(fiducial.era("radiation"), 0.005) == pytest.approx(1200j)
    assert expected_wronskian(fiducial.era("radiation"), 0.005, "canonical") == 1j


@pytest.mark.parametrize("era,eta", [("inflation", -3.0), ("inflation", -400.0),
                                     ("radiation", 0.5), ("radiation", 9.0)])
@pytest.mark.parametrize("k", [1e-3, 0.1, 2.0])
def test_mode_equation_residual(toy_params, era, eta, k):
    assert ode_residual(era, k, eta, toy_params) < 1e-8
    assert ode_residual(era, k, eta, toy_params, dps=40) < 1e-30


def test_superhorizon_residual_in_doubles(fiducial):
    assert ode_residual("inflation", 2e-62, fiducial.eta_e, fiducial) < 1e-8


@pytest.mark.parametrize("k", [1e-60, 1e-58, 5e-36])
def test_curvature_matches_across_end_of_inflation(fiducial, k):
    assert abs(k * fiducial.eta_e) < 1e-2
    inflation = mode("inflation", k, fiducial.eta_e, fiducial, dps=60)
    radiation = mode("radiation", k, fiducial.eta_e, fiducial, dps=60)
    r_inf, r_dot_inf = curvature_perturbation("inflation", inflation, fiducial)
    r_rad, r_dot_rad = curvature_perturbation("radiation", radiation, fiducial)
    assert abs(complex(r_rad) / complex(r_inf) - 1) < 1e-8
    assert abs(complex(r_dot_rad) / complex(r_dot_inf) - 1) < 1e-8


def test_scaled_mode_agrees_with_extended_precision(fiducial):
    k, eta = 3e-60, -1e40
    v, v_dot = scaled_mode("inflation", k, eta, fiducial)
    reference = mode_inflation(k, eta, dps=40)
    assert complex(v.to_numpy()) == pytest.approx(complex(reference.v), rel=1e-12)
    assert complex(v_dot.to_numpy()) == pytest.approx(complex(reference.v_dot), rel=1e-12)


def test_scaled_radiation_mode(toy_params):
    v, v_dot = scaled_mode("radiation", 0.3, 4.0, toy_params)
    reference = mode_radiation(0.3, 4.0, toy_params.eta_e, toy_params.eps_inf, dps=40)
    assert complex(v.to_numpy()) == pytest.approx(complex(reference.v), rel=1e-12)
    assert complex(v_dot.to_numpy()) == pytest.approx(complex(reference.v_dot), rel=1e-12)


def test_superhorizon_standard_spectrum(fiducial):
    expected = fiducial.h_inf ** 2 / (8 * math.pi ** 2 * fiducial.eps_inf)
    assert expected == pytest.approx(2.533e-10, rel=1e-3)
    for k in (2e-62, 5e-60, 2e-58):
        assert power_spectrum_standard(k, fiducial.eta_e, "inflation", fiducial) == pytest.approx(expected, rel=1e-9)


def test_radiation_spectrum_frozen_outside_horizon(fiducial):
    end_inflation = power_spectrum_standard(5e-60, fiducial.eta_e, "inflation", fiducial)
    later = power_spectrum_standard(5e-60, -fiducial.eta_e, "radiation", fiducial)
    assert later == pytest.approx(end_inflation, rel=1e-9)


def test_field_spectrum_superhorizon_limit(toy_params):
    eta = -2.0
    assert power_spectrum_u(1e-6, eta, "inflation", toy_params) == pytest.approx(
        power_spectrum_u_superhorizon(eta), rel=1e-9)


def test_domain_errors(toy_params):
    with pytest.raises(DomainError):
        mode_inflation(1.0, 0.5)
    with pytest.raises(DomainError):
        mode_inflation(-1.0, -0.5)
    with pytest.raises(DomainError):
        mode_radiation(1.0, -2.0, toy_params.eta_e, toy_params.eps_inf)
    with pytest.raises(DomainError):
        mode_radiation(1.0, 2.0, toy_params.eta_e, toy_params.eps_inf, normalization="other")


def test_log_grid():
    grid = log_grid(-1.0, -100.0, 3, negative=True)
    assert np.allclose(grid, [-1.0, -10.0, -100.0])


def _relative_errors(values, references):
    return np.abs(values - references) / np.abs(references)


def test_scaled_inflation_modes_against_fifty_digits(fiducial):
    rng = np.random.default_rng(20)
    k = 10.0 ** rng.uniform(math.log10(Q_WINDOW[0]), math.log10(Q_WINDOW[1]), 1000)
    eta = -(10.0 ** rng.uniform(math.log10(-fiducial.eta_e), math.log10(-fiducial.eta0), 1000))
    v, v_dot = scaled_mode("inflation", k, eta, fiducial)
    states = [mode("inflation", float(ki), float(ei), fiducial, dps=50) for ki, ei in zip(k, eta)]
    assert np.max(_relative_errors(v.to_numpy(), np.array([complex(s.v) for s in states]))) < 1e-11
    assert np.max(_relative_errors(v_dot.to_numpy(), np.array([complex(s.v_dot) for s in states]))) < 1e-11


def test_scaled_radiation_modes_against_fifty_digits(fiducial):
    rng = np.random.default_rng(21)
    k = 10.0 ** rng.uniform(math.log10(Q_WINDOW[0]), math.log10(Q_WINDOW[1]), 1000)
    eta = rng.uniform(fiducial.eta_e, fiducial.eta_r, 1000)
    v, v_dot = scaled_mode("radiation", k, eta, fiducial)
    states = [mode("radiation", float(ki), float(ei), fiducial, dps=50) for ki, ei in zip(k, eta)]
    # a double sin/cos of a phase theta is only good to ~1e-16 theta near its zeros
    theta = k * (eta - fiducial.eta_e) / math.sqrt(3.0)
    away = (np.abs(np.sin(theta)) > 1e-4) & (np.abs(np.cos(theta)) > 1e-4)
    assert away.sum() > 990
    v_err = _relative_errors(v.to_numpy(), np.array([complex(s.v) for s in states]))
    v_dot_err = _relative_errors(v_dot.to_numpy(), np.array([complex(s.v_dot) for s in states]))
    assert np.max(v_err[away]) < 1e-9
    assert np.max(v_dot_err[away]) < 1e-9


@pytest.mark.parametrize("era,eta", [("inflation", [-3.0, -40.0, -900.0]), ("radiation", [-0.5, 2.0, 9.0])])
def test_scaled_mode_broadcasts_like_scalar_calls(toy_params, era, eta):
    k = np.array([1e-3, 0.4, 7.0])
    v, v_dot = scaled_mode(era, k[:, None], np.array(eta)[None, :], toy_params)
    assert v.shape == (3, 3)
    for i, ki in enumerate(k):
        for j, ej in enumerate(eta):
            one_v, one_v_dot = scaled_mode(era, float(ki), ej, toy_params)
            assert complex(v[i, j].to_numpy()) == pytest.approx(complex(one_v.to_numpy()), rel=1e-15)
            assert complex(v_dot[i, j].to_numpy()) == pytest.approx(complex(one_v_dot.to_numpy()), rel=1e-15)
