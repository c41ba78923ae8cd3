"""
Scenario runner

Turns a ScenarioConfig into CSV tables (kernels, entropy, Bloch trajectories or clouds, Q grids)
and holds the parameter table for the published figure curves.
"""
import math
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np
import pandas as pd
from loguru import logger

from ..core.config import settings
from ..models.bath_models import BathSpec, TemperatureMode
from ..models.scenario_models import (
    ChannelConfig,
    CloudConfig,
    FigureCurve,
    FigureScenario,
    Quantity,
    ScenarioConfig,
    SystemConfig,
    SystemKind,
    TimeGrid,
)
from ..models.system_models import Channel, PureState, SystemSpectrum, TwoLevelInitial
from ..utils import parallel_map, validation_error
from . import bath_kernels, phase_space
from .qnd_dynamics import (
    coherence_curve,
    coherent_state_populations,
    density_from_state,
    ho_spectrum,
    two_level_spectrum,
)
from .two_level_channels import (
    bloch_cloud,
    lindblad_bloch,
    lindblad_params,
    qnd_bloch,
    schrodinger_rotation,
)

KERNEL_COLUMNS = ['t', 'eta', 'eta_dot', 'gamma', 'gamma_dot']
ENTROPY_COLUMNS = ['t', 'S', 'C']
BLOCH_COLUMNS = ['t', 'sx', 'sy', 'sz']
CLOUD_COLUMNS = BLOCH_COLUMNS + ['sx0', 'sy0', 'sz0']
QFUNC_COLUMNS = ['xi', 'theta', 'q']

Table = Tuple[str, pd.DataFrame]


# ---------------------------------------------------------------------------
# Systems
# ---------------------------------------------------------------------------

def system_state(system: SystemConfig) -> Tuple[PureState, SystemSpectrum]:
    """Initial pure state and spectrum for a system section"""
    if system.kind == SystemKind.TWO_LEVEL:
        return PureState(np.full(2, 1 / math.sqrt(2), dtype=complex)), two_level_spectrum(system.omega)
    if system.kind == SystemKind.OSCILLATOR:
        state = coherent_state_populations(system.alpha_sq, system.n_max)
        return state, ho_spectrum(system.omega, state.dimension - 1)
    dim = len(system.energies)
    return PureState(np.full(dim, 1 / math.sqrt(dim), dtype=complex)), SystemSpectrum(energies=system.energies)


# ---------------------------------------------------------------------------
# Sweeps
# ---------------------------------------------------------------------------

def _kernel_table(config: ScenarioConfig) -> List[Table]:
    return [(config.scenario, bath_kernels.sample_grid(config.time.times(), config.bath))]


def _entropy_table(config: ScenarioConfig) -> List[Table]:
    state, spectrum = system_state(config.system)
    return [(config.scenario, coherence_curve(state, config.time.times(), config.bath, spectrum))]


def _lindblad(config: ScenarioConfig):
    bath = config.bath
    return lindblad_params(bath.gamma0, bath.r, config.channel.Phi, config.system.omega, bath.T)


def _bloch_table(config: ScenarioConfig) -> List[Table]:
    channel, omega = config.channel, config.system.omega
    if channel.cloud is not None:
        return [(config.scenario, _cloud_frame(config, channel.cloud))]

    init = TwoLevelInitial(theta0=channel.theta0, phi0=channel.phi0)
    times = config.time.times()
    if channel.channel == Channel.QND:
        vectors = [qnd_bloch(float(t), init, config.bath, omega) for t in times]
    else:
        params = _lindblad(config)
        vectors = [lindblad_bloch(float(t), init, params) for t in times]
        if channel.schrodinger:
            vectors = [schrodinger_rotation(v, omega, float(t)) for v, t in zip(vectors, times)]
    frame = pd.DataFrame({
        't': times,
        'sx': [v.sx for v in vectors],
        'sy': [v.sy for v in vectors],
        'sz': [v.sz for v in vectors],
    })
    return [(config.scenario, frame)]


def _cloud_frame(config: ScenarioConfig, cloud: CloudConfig) -> pd.DataFrame:
    channel = config.channel
    sampling = (cloud.n_theta, cloud.n_phi)
    if channel.channel == Channel.QND:
        points = bloch_cloud(Channel.QND, cloud.t, sampling, spec=config.bath, omega=config.system.omega)
    else:
        points = bloch_cloud(Channel.LINDBLAD, cloud.t, sampling, params=_lindblad(config),
                             omega=config.system.omega, schrodinger=channel.schrodinger)
    return pd.DataFrame({
        't': [cloud.t] * len(points),
        'sx': [p.final.sx for p in points],
        'sy': [p.final.sy for p in points],
        'sz': [p.final.sz for p in points],
        'sx0': [p.initial.sx for p in points],
        'sy0': [p.initial.sy for p in points],
        'sz0': [p.initial.sz for p in points],
    })


def _qfunc_tables(config: ScenarioConfig) -> List[Table]:
    system, grid = config.system, config.qgrid
    state, _ = system_state(system)
    xi_max = grid.xi_max or phase_space.default_xi_max(system.alpha_sq)
    xi, theta = phase_space.polar_grid(xi_max, grid.n_xi, grid.n_theta)
    snapshots = phase_space.q_snapshots(
        density_from_state(state).entries, config.time.times(), config.bath, system.omega, xi, theta
    )
    xi_mesh, theta_mesh = np.meshgrid(xi, theta, indexing='ij')
    tables = []
    for k, q in enumerate(snapshots):
        frame = pd.DataFrame({'xi': xi_mesh.ravel(), 'theta': theta_mesh.ravel(), 'q': q.values.ravel()})
        tables.append((f"{config.scenario}_t{k:03d}", frame))
    return tables


_SWEEPS = {
    Quantity.KERNELS: _kernel_table,
    Quantity.ENTROPY: _entropy_table,
    Quantity.BLOCH: _bloch_table,
    Quantity.QFUNC: _qfunc_tables,
}


def sweep_tables(config: ScenarioConfig) -> List[Table]:
    """
    Evaluate the configured quantity without touching the filesystem.

    Returns (stem, frame) pairs in output order: one table for kernels, entropy and Bloch
    output, one table per time point for Q grids.
    """
    logger.info(f"Scenario {config.scenario}: {config.quantity.value} on {config.time.points} time points")
    return _SWEEPS[config.quantity](config)


def write_csv(frame: pd.DataFrame, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format=settings.CSV_FLOAT_FORMAT, lineterminator="\n")
    logger.info(f"Wrote {len(frame)} rows to {path}")
    return path


def _output_paths(config: ScenarioConfig, stems: List[str], out: Optional[str]) -> List[Path]:
    target = Path(out or config.out or Path(settings.OUTPUT_DIR) / f"{config.scenario}.csv")
    if len(stems) == 1:
        return [target]
    # one file per stem next to the requested path
    return [target.with_name(f"{target.stem}{stem[len(config.scenario):]}{target.suffix or '.csv'}")
            for stem in stems]


def run_sweep(config: ScenarioConfig, out: Optional[str] = None) -> List[Path]:
    """Evaluate a sweep and write its CSV file(s)"""
    tables = sweep_tables(config)
    paths = _output_paths(config, [stem for stem, _ in tables], out)
    return [write_csv(frame, path) for (_, frame), path in zip(tables, paths)]


# ---------------------------------------------------------------------------
# Figures
# ---------------------------------------------------------------------------

def _curves(name: str, quantity: Quantity, bath: Dict, squeezings, time: TimeGrid,
            system: SystemConfig = SystemConfig()) -> List[FigureCurve]:
    return [
        FigureCurve(label=f"r{r:g}", config=ScenarioConfig(
            scenario=f"{name}_r{r:g}", quantity=quantity, bath=BathSpec(r=r, **bath), system=system, time=time,
        ))
        for r in squeezings
    ]


def _cloud(name: str, bath: BathSpec, channel: ChannelConfig, t: float) -> List[FigureCurve]:
    cloud_channel = channel.model_copy(update={'cloud': CloudConfig(t=t, n_theta=16, n_phi=16)})
    return [FigureCurve(label="cloud", config=ScenarioConfig(
        scenario=f"{name}_cloud", quantity=Quantity.BLOCH, bath=bath,
        system=SystemConfig(kind=SystemKind.TWO_LEVEL, omega=1.0),
        time=TimeGrid(t_min=0.0, t_max=t, points=2), channel=cloud_channel,
    ))]


def _figure_table() -> Dict[str, FigureScenario]:
    zero_bath = dict(gamma0=0.1, omega_c=50.0, a=0.0, temperature_mode=TemperatureMode.ZERO, T=0.0)
    hot_bath = dict(gamma0=0.1, omega_c=50.0, a=0.0, temperature_mode=TemperatureMode.HIGH, T=300.0)
    oscillator = SystemConfig(kind=SystemKind.OSCILLATOR, omega=1.0, alpha_sq=5.0)
    lindblad_bath = BathSpec(gamma0=0.6, omega_c=40.0, r=0.4, temperature_mode=TemperatureMode.EXACT, T=5.0)

    figures = [
        FigureScenario(
            name="fig1", caption="decoherence rate, gamma0=0.1, omega_c=50, a=0, T=0, r in {0, 0.4}",
            curves=_curves("fig1", Quantity.KERNELS, zero_bath, (0.0, 0.4), TimeGrid(t_max=5.0, points=501)),
        ),
        FigureScenario(
            name="fig2", caption="decoherence rate at T=300, r in {0, 0.4}",
            curves=_curves("fig2", Quantity.KERNELS, hot_bath, (0.0, 0.4), TimeGrid(t_max=5.0, points=501)),
        ),
        FigureScenario(
            name="fig3", caption="linear entropy, |alpha|^2=5, omega=1, T=0, r in {0, -0.3, 0.4}",
            curves=_curves("fig3", Quantity.ENTROPY, zero_bath, (0.0, -0.3, 0.4),
                           TimeGrid(t_max=100.0, points=1001), oscillator),
        ),
        FigureScenario(
            name="fig4", caption="linear entropy at T=300, r in {0, -0.5, 2}",
            curves=_curves("fig4", Quantity.ENTROPY, hot_bath, (0.0, -0.5, 2.0),
                           TimeGrid(t_max=0.5, points=501), oscillator),
        ),
        FigureScenario(
            name="fig5b", caption="QND Bloch cloud at t=20, gamma0=0.2, T=0, omega=1, omega_c=40, r=a=0.5",
            curves=_cloud("fig5b", BathSpec(gamma0=0.2, omega_c=40.0, r=0.5, a=0.5), ChannelConfig(), 20.0),
        ),
        FigureScenario(
            name="fig5c", caption="Lindblad Bloch cloud at t=0.15, gamma0=0.6, T=5, r=0.4, Phi=0",
            curves=_cloud("fig5c", lindblad_bath, ChannelConfig(channel=Channel.LINDBLAD, Phi=0.0), 0.15),
        ),
        FigureScenario(
            name="fig5d", caption="Lindblad Bloch cloud at t=0.15, gamma0=0.6, T=5, r=0.4, Phi=1.5",
            curves=_cloud("fig5d", lindblad_bath, ChannelConfig(channel=Channel.LINDBLAD, Phi=1.5), 0.15),
        ),
    ]
    return {f.name: f for f in figures}


FIGURE_SCENARIOS: Dict[str, FigureScenario] = _figure_table()


def run_figure(which: str, out_dir: Optional[str] = None) -> List[Path]:
    """
    Write one CSV per curve of a figure as <out_dir>/<figure>_<label>.csv.

    Curves are evaluated in parallel; files are written in table order.
    """
    if which not in FIGURE_SCENARIOS:
        raise validation_error(
            f"unknown figure {which!r}; choose from {', '.join(FIGURE_SCENARIOS)}", "figure"
        )
    figure = FIGURE_SCENARIOS[which]
    directory = Path(out_dir or settings.OUTPUT_DIR)
    logger.info(f"Figure {which}: {figure.caption}")
    results = parallel_map(lambda curve: sweep_tables(curve.config), figure.curves)
    paths = []
    for curve, tables in zip(figure.curves, results):
        for _, frame in tables:
            paths.append(write_csv(frame, directory / f"{which}_{curve.label}.csv"))
    return paths
