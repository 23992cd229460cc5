import math

import pytest

import regkernel as rk


def test_kernel_values():
    spec = rk.KernelSpec(2, 0.5, 0)
    assert rk.green_reg(spec, 0.0) == pytest.approx(-math.log(0.5) / (2 * math.pi), rel=1e-15)
    assert rk.green(3, 2.0) == pytest.approx(1 / (8 * math.pi), rel=1e-15)
    assert spec.regularized and spec.dim == 2 and spec.n == 0
    assert not rk.KernelSpec(3).regularized


def test_laplacian_forms_agree():
    spec = rk.KernelSpec(3, 0.5, 10)
    assert rk.laplacian_reg_closed(spec, 2.0) == pytest.approx(-2.2553522134621844e-14, rel=1e-13)
    assert rk.laplacian_reg_series(spec, 2.0) == pytest.approx(rk.laplacian_reg_closed(spec, 2.0), rel=1e-13)
    assert rk.laplacian_mass(rk.KernelSpec(1, 1e-2, 4), 10.0) == pytest.approx(-1.0, abs=1e-6)


def test_calibration():
    assert rk.solve_epsilon_smoothing(10, 3, 1e-2) == pytest.approx(2.8378e-2, rel=1e-4)
    eps = rk.solve_epsilon_modelling(2, 1, 1e-6, "osc1d")
    assert rk.modelling_error(rk.KernelSpec(1, eps, 2), "osc1d") == pytest.approx(1e-6, rel=1e-6)
    with pytest.raises(rk.CalibrationError):
        rk.solve_epsilon_smoothing(0, 1, 10.0)


def test_errors_map_to_python():
    with pytest.raises(ValueError):
        rk.KernelSpec(4, 0.1, 0)
    with pytest.raises(ValueError):
        rk.KernelSpec(2, -0.1, 0)


def test_simulate_and_orbit():
    run = rk.simulate(rk.KernelSpec(1, 2.0001e-2, 1), "osc1d", 1e-2, T=1.0)
    assert len(run["t"]) == 101
    assert run["modelling_error"] == pytest.approx(6.3605e-7, rel=1e-4)
    metrics = rk.orbit_metrics(rk.KernelSpec(3, 2.8378e-2, 10), 2.29e-3)
    assert set(metrics) == {"dt", "period_error", "hamiltonian_error", "modelling_error"}
    assert 0 < metrics["period_error"] < 0.1


def test_convergence_study():
    reports = rk.convergence_study("osc1d", [rk.KernelSpec(1, 3.6572e-2, 4)], [2.0**-k for k in range(2, 8)], 8.0)
    assert len(reports) == 1 and len(reports[0]["max_H_error"]) == 6
    assert reports[0]["plateau"] == pytest.approx(1.417e-11, rel=1e-3)
