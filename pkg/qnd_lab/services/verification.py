"""
Acceptance suite

Every check returns a CriterionResult with the measured worst case and its tolerance. The quick
level shrinks parameter grids and skips the finest resolutions; the full level runs the complete
grids. Checks run in parallel and are reported in a fixed order.
"""
import json
import math
import tempfile
import time
from pathlib import Path
from typing import Callable, Iterator, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from loguru import logger

from ..models.bath_models import BathSpec, SpinBathSpec, SpinMode, TemperatureMode
from ..models.scenario_models import CriterionResult, VerificationReport, VerifyLevel
from ..models.system_models import (
    BlochVector,
    Channel,
    DiffusionSolutionParams,
    PureState,
    SystemSpectrum,
    TwoLevelInitial,
)
from ..utils import QNDLabError, parallel_map, validation_error
from . import bath_kernels, phase_space, spin_bath
from .composite_oracle import default_scenarios, verify_against_analytic
from .integrators import rk4_trajectory
from .qnd_dynamics import (
    coherent_state_populations,
    density_from_state,
    evolve_density,
    fit_exponential_rate,
    fit_power_law_exponent,
    ho_spectrum,
    integrate_master_equation,
    two_level_spectrum,
)
from .scenarios import FIGURE_SCENARIOS, run_figure
from .two_level_channels import (
    asymptotic_state,
    bloch_cloud,
    bloch_from_density,
    density_from_bloch,
    lindblad_bloch,
    lindblad_params,
    lindblad_rhs,
    transverse_decay_rates,
)

Check = Callable[[VerifyLevel], CriterionResult]

FIG1_BATH = dict(gamma0=0.1, omega_c=50.0, a=0.0)


def _result(name: str, measured: float, tolerance: float, detail: str = "") -> CriterionResult:
    passed = bool(np.isfinite(measured) and measured <= tolerance)
    return CriterionResult(name=name, passed=passed, measured=float(measured), tolerance=tolerance, detail=detail)


def _full(level: VerifyLevel) -> bool:
    return level == VerifyLevel.FULL


def _two_level_superposition() -> PureState:
    return PureState(np.full(2, 1 / math.sqrt(2), dtype=complex))


# ---------------------------------------------------------------------------
# Kernels
# ---------------------------------------------------------------------------

def _kernel_grid(level: VerifyLevel) -> Iterator[BathSpec]:
    full = _full(level)
    for g0 in ((0.1, 1.0) if full else (0.1,)):
        for wc in ((10.0, 50.0) if full else (50.0,)):
            for r in ((-0.4, 0.0, 0.4) if full else (0.0, 0.4)):
                for a in (0.0, 0.01):
                    yield BathSpec(gamma0=g0, omega_c=wc, r=r, a=a)
                    yield BathSpec(gamma0=g0, omega_c=wc, r=r, a=a, temperature_mode=TemperatureMode.HIGH, T=300.0)


def check_kernel_quadrature(level: VerifyLevel) -> CriterionResult:
    """Closed-form gamma against adaptive quadrature with the matching thermal factor"""
    n_t = 20 if _full(level) else 5

    def worst(spec: BathSpec) -> float:
        ts = np.geomspace(2 * spec.a + 1e-3, 5.0, n_t)
        closed = np.asarray(bath_kernels.gamma(ts, spec))
        quad = np.array([bath_kernels.gamma_quadrature(float(t), spec) for t in ts])
        return float(np.max(np.abs(closed - quad) / np.abs(quad)))

    specs = list(_kernel_grid(level))
    errors = parallel_map(worst, specs)
    k = int(np.argmax(errors))
    return _result("kernel_closed_vs_quadrature", errors[k], 1e-6,
                   f"{len(specs)} bath specs x {n_t} times; worst at {specs[k].model_dump()}")


def check_thermal_limit(level: VerifyLevel) -> CriterionResult:
    """r = a = 0 against the unsqueezed thermal-bath expressions"""
    worst = 0.0
    ts = np.geomspace(1e-3, 5.0, 20)
    for g0 in (0.1, 1.0):
        for wc in (10.0, 50.0):
            cold = BathSpec(gamma0=g0, omega_c=wc)
            hot = BathSpec(gamma0=g0, omega_c=wc, temperature_mode=TemperatureMode.HIGH, T=300.0)
            T = hot.T
            pairs = [
                (bath_kernels.gamma(ts, cold), g0 / (2 * math.pi) * np.log(1 + wc ** 2 * ts ** 2)),
                (bath_kernels.gamma_dot(ts, hot), 2 * g0 * T / math.pi * np.arctan(wc * ts)),
                (bath_kernels.gamma(ts, hot),
                 2 * g0 * T / math.pi * (ts * np.arctan(wc * ts) - np.log(1 + wc ** 2 * ts ** 2) / (2 * wc))),
            ]
            for value, reference in pairs:
                worst = max(worst, float(np.max(np.abs(value - reference) / np.abs(reference))))
    return _result("thermal_limit_regression", worst, 1e-12)


def check_long_time(level: VerifyLevel) -> CriterionResult:
    """1/t tail of the zero-temperature rate and the saturated high-temperature rate at omega_c t = 1e3"""
    zero_err, high_err = 0.0, 0.0
    for r in (-0.4, 0.0, 0.4):
        cold = BathSpec(r=r, **FIG1_BATH)
        t = 1e3 / cold.omega_c
        tail = bath_kernels.longtime_limits(cold).zero_t_rate_coefficient
        zero_err = max(zero_err, abs(bath_kernels.gamma_dot(t, cold) * t / tail - 1))

        hot = BathSpec(r=r, temperature_mode=TemperatureMode.HIGH, T=300.0, **FIG1_BATH)
        plateau = bath_kernels.longtime_limits(hot).gamma_dot_inf
        high_err = max(high_err, abs(bath_kernels.gamma_dot(t, hot) / plateau - 1))
    measured = max(zero_err / 1e-2, high_err / 1e-3)
    return _result("long_time_asymptotes", measured, 1.0,
                   f"zero-T relative error {zero_err:.2e} (tol 1e-2), high-T {high_err:.2e} (tol 1e-3)")


# ---------------------------------------------------------------------------
# Oracles
# ---------------------------------------------------------------------------

def check_composite(level: VerifyLevel) -> CriterionResult:
    scenarios = default_scenarios()
    if not _full(level):
        scenarios = scenarios[:2]
    reports = parallel_map(verify_against_analytic, scenarios)
    ratio = max(rep.max_deviation / rep.tolerance for rep in reports)
    detail = "; ".join(
        f"{rep.name}: {rep.max_deviation:.2e} (tol {rep.tolerance:.0e}, drift {rep.diagonal_drift:.1e})"
        for rep in reports
    )
    return _result("composite_oracle", ratio, 1.0, detail)


def _master_equation_error(spectrum: SystemSpectrum, spec: BathSpec, times: Sequence[float]) -> float:
    rho0 = density_from_state(PureState(np.full(spectrum.dimension, 1 / math.sqrt(spectrum.dimension),
                                                dtype=complex)))
    worst = 0.0
    for t in times:
        numeric = integrate_master_equation(rho0, t, spec, spectrum).entries
        closed = evolve_density(rho0, t, spec, spectrum).entries
        worst = max(worst, float(np.max(np.abs(numeric - closed))))
    return worst


def _lindblad_cases(level: VerifyLevel) -> List[Tuple[float, float, float]]:
    if _full(level):
        return [(r, Phi, T) for r in (0.0, 0.4) for Phi in (0.0, 1.5) for T in (0.0, 5.0)]
    return [(0.0, 0.0, 0.0), (0.4, 1.5, 5.0)]


def _lindblad_error(case: Tuple[float, float, float], n_times: int) -> float:
    r, Phi, T = case
    params = lindblad_params(0.6, r, Phi, 1.0, T)
    times = np.linspace(0.0, 5.0 / params.gamma0, n_times)
    worst = 0.0
    for init in (TwoLevelInitial(theta0=math.pi / 3, phi0=math.pi / 4), TwoLevelInitial(theta0=2.0, phi0=4.0)):
        rho0 = density_from_bloch(BlochVector.from_initial(init))
        path = rk4_trajectory(lambda s, y: lindblad_rhs(y, params), rho0, times)
        for t, rho in zip(times, path):
            numeric = bloch_from_density(rho).as_array()
            closed = lindblad_bloch(float(t), init, params).as_array()
            worst = max(worst, float(np.max(np.abs(numeric - closed))))
    return worst


def check_ode_oracles(level: VerifyLevel) -> CriterionResult:
    """RK4 on both master equations against their closed-form solutions"""
    spec = BathSpec(r=0.4, **FIG1_BATH)
    times = (0.5, 1.0, 2.0) if _full(level) else (1.0,)
    spectra = [SystemSpectrum(energies=[1.0, 0.0]), ho_spectrum(1.0, 2)]
    qnd_err = max(_master_equation_error(s, spec, times) for s in spectra)
    n_times = 6 if _full(level) else 3
    lind_err = max(parallel_map(lambda c: _lindblad_error(c, n_times), _lindblad_cases(level)))
    return _result("ode_oracles", max(qnd_err, lind_err), 1e-6,
                   f"QND master equation {qnd_err:.2e}, Lindblad {lind_err:.2e}")


# ---------------------------------------------------------------------------
# Physics claims
# ---------------------------------------------------------------------------

def _cross_term(ts: np.ndarray, spec: BathSpec) -> np.ndarray:
    """C(t) - C(infinity) = 2 |rho_01(t)|^2 for the equal superposition with dE = 1"""
    rho0 = density_from_state(_two_level_superposition())
    spectrum = two_level_spectrum(1.0)
    return np.array([2 * abs(evolve_density(rho0, float(t), spec, spectrum).entries[0, 1]) ** 2 for t in ts])


def check_regimes(level: VerifyLevel) -> CriterionResult:
    """Power law at T = 0, exponential decay at high T"""
    cold = BathSpec(**FIG1_BATH)
    ts = np.geomspace(10 / cold.omega_c, 1e3 / cold.omega_c, 30)
    slope = fit_power_law_exponent(ts, _cross_term(ts, cold))
    slope_ref = -2 * cold.gamma0 / math.pi
    slope_err = abs(slope / slope_ref - 1)

    hot = BathSpec(r=0.4, temperature_mode=TemperatureMode.HIGH, T=300.0, **FIG1_BATH)
    ts = np.linspace(2.0, 5.0, 20)
    rate = fit_exponential_rate(ts, _cross_term(ts, hot))
    rate_ref = 2 * hot.gamma0 * hot.T * math.cosh(2 * hot.r)
    rate_err = abs(rate / rate_ref - 1)
    return _result("regime_discrimination", max(slope_err, rate_err), 2e-2,
                   f"log-log slope {slope:.5f} vs {slope_ref:.5f}; rate {rate:.3f} vs {rate_ref:.3f}")


def check_channel_geometry(level: VerifyLevel) -> CriterionResult:
    sampling = (16, 16)
    spec = BathSpec(gamma0=0.2, omega_c=40.0, r=0.5, a=0.5)
    cloud = bloch_cloud(Channel.QND, 20.0, sampling, spec=spec, omega=1.0)
    sz_drift = max(abs(p.final.sz - p.initial.sz) for p in cloud)

    fixed_err = 0.0
    for r, T in ((0.0, 0.0), (0.0, 5.0), (0.4, 5.0)):
        params = lindblad_params(0.6, r, 0.0, 1.0, T)
        base = 2 * params.N + 1
        t = 50 / (params.gamma0 * base)
        # squeezing slows one transverse direction; wait 25 of its e-folding times
        t = max(t, 25 / transverse_decay_rates(params)[0])
        target = asymptotic_state(params)[0].as_array()
        points = bloch_cloud(Channel.LINDBLAD, t, sampling, params=params)
        fixed_err = max(fixed_err, max(float(np.max(np.abs(p.final.as_array() - target))) for p in points))
    measured = max(sz_drift / 1e-12, fixed_err / 1e-8)
    return _result("channel_geometry", measured, 1.0,
                   f"QND sz drift {sz_drift:.1e} (tol 1e-12), Lindblad fixed-point distance {fixed_err:.1e} (tol 1e-8)")


def check_figures(level: VerifyLevel) -> CriterionResult:
    names = list(FIGURE_SCENARIOS) if _full(level) else ["fig1", "fig3"]
    with tempfile.TemporaryDirectory() as tmp:
        for name in names:
            run_figure(name, tmp)
        fig1 = {label: pd.read_csv(Path(tmp) / f"fig1_{label}.csv") for label in ("r0", "r0.4")}
        fig3 = {label: pd.read_csv(Path(tmp) / f"fig3_{label}.csv") for label in ("r0", "r-0.3")}

    late = fig1["r0"]["t"].iloc[-1]
    ratio = fig1["r0.4"]["gamma_dot"].iloc[-1] / fig1["r0"]["gamma_dot"].iloc[-1]
    expected = math.cosh(0.8) + 0.5 * math.sinh(0.8)
    ratio_err = abs(ratio / expected - 1)

    window = fig3["r0"]["t"].between(5.0, 100.0)
    below = bool(np.all(fig3["r-0.3"]["S"][window] < fig3["r0"]["S"][window]))
    measured = ratio_err / 2e-2 if below else math.inf
    return _result("figure_reproduction", measured, 1.0,
                   f"{len(names)} figures; gamma_dot ratio at t={late:g}: {ratio:.4f} vs {expected:.4f}; "
                   f"r=-0.3 entropy below r=0 on [5, 100]: {below}")


# ---------------------------------------------------------------------------
# Phase space
# ---------------------------------------------------------------------------

def _q_residual(spec: BathSpec, rho0: np.ndarray, n_xi: int, n_theta: int, dt: float,
                t: float = 1.0) -> phase_space.PdeResidual:
    xi, theta = phase_space.polar_grid(phase_space.default_xi_max(1.0), n_xi, n_theta)
    series = phase_space.q_snapshots(rho0, [t - dt, t, t + dt], spec, 1.0, xi, theta)
    return phase_space.q_pde_residual(series, spec, 1.0)


def _analytic_residuals(rng: np.random.Generator, n: int = 100) -> float:
    worst = 0.0
    for _ in range(n):
        theta, t = rng.uniform(-math.pi, math.pi), rng.uniform(0.0, 5.0)
        omega, lam = rng.uniform(0.5, 2.0), rng.uniform(0.0, 2.0)
        q = phase_space.longtime_solution_T0(theta, t, lam, omega)
        worst = max(worst, abs(phase_space.residual_T0(theta, t, lam, omega)) / (lam * q + 1e-300))

        spec = BathSpec(gamma0=rng.uniform(0.05, 0.5), omega_c=5.0, r=rng.uniform(-0.5, 0.5),
                        temperature_mode=TemperatureMode.HIGH, T=rng.uniform(100.0, 400.0))
        A1 = phase_space.diffusion_coefficient(spec, omega)
        params = DiffusionSolutionParams(
            lambda_=0.0, alpha_sep=rng.uniform(0.0, omega ** 2 / (4 * A1)), c1=rng.uniform(0.1, 1.0),
            c2=rng.uniform(0.1, 1.0), A1=A1, omega=omega,
        )
        theta = rng.uniform(-0.5, 0.5)
        q = phase_space.longtime_solution_highT(theta, t, params, omega)
        scale = abs(params.alpha_sep * q) + abs(omega * q * params.A) + abs(params.A1 * q * params.A ** 2)
        worst = max(worst, abs(phase_space.residual_highT(theta, t, params)) / scale)
    return float(worst)


def check_q_function(level: VerifyLevel) -> CriterionResult:
    spec = BathSpec(**FIG1_BATH)
    rho0 = density_from_state(coherent_state_populations(1.0)).entries
    xi, theta = phase_space.polar_grid(phase_space.default_xi_max(1.0), 201, 128)
    norm_err = max(
        abs(phase_space.normalization(q) - 1.0)
        for q in phase_space.q_snapshots(rho0, [0.0, 1.0], spec, 1.0, xi, theta)
    )

    coarse_grid = (64, 512, 1e-3) if _full(level) else (48, 256, 2e-3)
    fine_grid = (2 * coarse_grid[0] - 1, 2 * coarse_grid[1], coarse_grid[2] / 2)
    coarse = _q_residual(spec, rho0, *coarse_grid)
    fine = _q_residual(spec, rho0, *fine_grid)
    order = phase_space.convergence_order(coarse.norm, fine.norm)

    analytic = _analytic_residuals(np.random.default_rng(20240611))
    parts = [norm_err / 1e-6, coarse.relative / 1e-3, 1.8 / order if order > 0 else math.inf, analytic / 1e-12]
    return _result("q_function_suite", max(parts), 1.0,
                   f"normalization {norm_err:.1e}, residual {coarse.relative:.2e}, order {order:.2f}, "
                   f"analytic residual {analytic:.1e}")


# ---------------------------------------------------------------------------
# Spin bath
# ---------------------------------------------------------------------------

def check_spin_bath(level: VerifyLevel) -> CriterionResult:
    spectrum = two_level_spectrum(1.0)
    rho0 = density_from_state(_two_level_superposition())
    baths = [
        SpinBathSpec(modes=[SpinMode(omega=1.0, C=0.5)]),
        SpinBathSpec(modes=[SpinMode(omega=1.0, C=0.5), SpinMode(omega=1.7, C=0.3)]),
    ]
    worst = 0.0
    for spec in baths:
        states = [
            (spin_bath.maximally_mixed_bath_state(spec), False),
            (spin_bath.ground_bath_state(spec), True),
            (spin_bath.thermal_bath_state(spec, 0.8), True),
        ]
        for t in (0.5, 1.0, 2.0):
            for bath_state, polarized in states:
                exact = spin_bath.exact_spin_bath_evolution(rho0, t, spec, spectrum, bath_state).entries
                if polarized:
                    z = spin_bath.bath_polarizations(bath_state, spec)
                    formula = spin_bath.reduced_density_polarized_spin_bath(rho0, t, spec, spectrum, z).entries
                else:
                    formula = spin_bath.reduced_density_spin_bath(rho0, t, spec, spectrum).entries
                worst = max(worst, float(np.max(np.abs(exact - formula))))
    return _result("spin_bath", worst, 1e-10, "unpolarized product formula and polarized formula vs exact")


CHECKS: List[Tuple[str, Check]] = [
    ("kernel_closed_vs_quadrature", check_kernel_quadrature),
    ("thermal_limit_regression", check_thermal_limit),
    ("long_time_asymptotes", check_long_time),
    ("composite_oracle", check_composite),
    ("ode_oracles", check_ode_oracles),
    ("regime_discrimination", check_regimes),
    ("channel_geometry", check_channel_geometry),
    ("figure_reproduction", check_figures),
    ("q_function_suite", check_q_function),
    ("spin_bath", check_spin_bath),
]


def _run_check(entry: Tuple[str, Check], level: VerifyLevel) -> CriterionResult:
    name, check = entry
    start = time.perf_counter()
    try:
        result = check(level)
    except (QNDLabError, ValueError, ArithmeticError) as e:
        logger.error(f"Criterion {name} raised {type(e).__name__}: {e}")
        result = CriterionResult(name=name, passed=False, detail=f"{type(e).__name__}: {e}")
    result.elapsed_s = time.perf_counter() - start
    status = "passed" if result.passed else "FAILED"
    (logger.info if result.passed else logger.warning)(
        f"Criterion {name} {status}: measured={result.measured}, tolerance={result.tolerance} "
        f"({result.elapsed_s:.1f}s)"
    )
    return result


def run_verify(level: VerifyLevel = VerifyLevel.QUICK, report: Optional[str] = None,
               only: Optional[Sequence[str]] = None) -> VerificationReport:
    """
    Run the acceptance suite. `only` restricts it to the named criteria.

    The JSON report is written to `report` when given; the caller decides the exit status.
    """
    level = VerifyLevel(level)
    unknown = sorted(set(only or ()) - {name for name, _ in CHECKS})
    if unknown:
        raise validation_error(f"unknown criteria: {', '.join(unknown)}", "only")
    entries = [e for e in CHECKS if only is None or e[0] in only]
    logger.info(f"Verification ({level.value}): {len(entries)} criteria")
    results = parallel_map(lambda e: _run_check(e, level), entries)
    summary = VerificationReport(level=level, criteria=results)
    if report:
        path = Path(report)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(summary.summary(), indent=2))
        logger.info(f"Verification report written to {path}")
    if summary.passed:
        logger.info(f"Verification ({level.value}) passed")
    else:
        logger.warning(f"Verification ({level.value}) failed: {', '.join(summary.failed)}")
    return summary
