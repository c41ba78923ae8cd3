"""
Command-line front end

    qnd-lab kernels|entropy|bloch|qfunc [flags] [--config FILE]
    qnd-lab figure fig1|fig2|fig3|fig4|fig5b|fig5c|fig5d [--out DIR]
    qnd-lab verify [--level quick|full] [--report FILE]

Exit codes: 0 success, 1 validation, 2 numerical failure, 3 verification failure.
"""
import argparse
import configparser
import json
import sys
from typing import Any, Dict, List, Optional

from loguru import logger
from pydantic import ValidationError

from .core.config import settings
from .core.events import setup_logging
from .models.scenario_models import Quantity, ScenarioConfig, SystemKind, VerifyLevel
from .services.scenarios import run_figure, run_sweep
from .services.verification import run_verify
from .utils import QNDLabError, validation_error, verification_failure

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL, EXIT_VERIFICATION = 0, 1, 2, 3

BATH_KEYS = ("gamma0", "omega_c", "r", "a", "temp_mode", "T")
SYSTEM_KEYS = ("system", "omega", "alpha_sq", "n_max", "energies")
TIME_KEYS = ("t_min", "t_max", "points")
CHANNEL_KEYS = ("channel", "theta0", "phi0", "Phi", "schrodinger")
CLOUD_KEYS = ("cloud_t", "cloud_n_theta", "cloud_n_phi")
QGRID_KEYS = ("n_xi", "n_theta", "xi_max")
SCENARIO_KEYS = ("scenario", "out")
KNOWN_KEYS = set(BATH_KEYS + SYSTEM_KEYS + TIME_KEYS + CHANNEL_KEYS + CLOUD_KEYS + QGRID_KEYS + SCENARIO_KEYS)

DEFAULT_SYSTEM = {
    Quantity.KERNELS: SystemKind.TWO_LEVEL,
    Quantity.ENTROPY: SystemKind.OSCILLATOR,
    Quantity.BLOCH: SystemKind.TWO_LEVEL,
    Quantity.QFUNC: SystemKind.OSCILLATOR,
}


# ---------------------------------------------------------------------------
# Config assembly
# ---------------------------------------------------------------------------

def read_config_file(path: str) -> Dict[str, str]:
    """
    Flatten an INI file into key -> raw string.

    Section names only group keys; every key is unique across sections. Key case is kept
    so that T and Phi survive.
    """
    parser = configparser.ConfigParser()
    parser.optionxform = str
    if not parser.read(path):
        raise validation_error(f"config file {path} not found or unreadable", "config")
    values: Dict[str, str] = {}
    for section in parser.sections():
        for key, raw in parser.items(section):
            if key not in KNOWN_KEYS:
                raise validation_error(f"unknown key {key!r} in section [{section}] of {path}", key)
            values[key] = raw
    logger.debug(f"Loaded {len(values)} keys from {path}")
    return values


def merge_values(file_values: Dict[str, Any], args: argparse.Namespace) -> Dict[str, Any]:
    """CLI flags override file values; unset flags are None and do not override"""
    merged = dict(file_values)
    for key in KNOWN_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value
    return merged


def _pick(values: Dict[str, Any], keys, rename: Optional[Dict[str, str]] = None) -> Dict[str, Any]:
    rename = rename or {}
    return {rename.get(k, k): values[k] for k in keys if k in values}


def build_config(quantity: Quantity, values: Dict[str, Any]) -> ScenarioConfig:
    """Assemble and validate a ScenarioConfig from flat keys"""
    system = _pick(values, SYSTEM_KEYS, {"system": "kind"})
    system.setdefault("kind", DEFAULT_SYSTEM[quantity])
    if isinstance(system.get("energies"), str):
        system["energies"] = [float(e) for e in system["energies"].split(",") if e.strip()]

    channel = _pick(values, CHANNEL_KEYS)
    if "cloud_t" in values:
        channel["cloud"] = {
            "t": values["cloud_t"],
            **_pick(values, ("cloud_n_theta", "cloud_n_phi"), {"cloud_n_theta": "n_theta", "cloud_n_phi": "n_phi"}),
        }

    payload = {
        "quantity": quantity,
        "bath": _pick(values, BATH_KEYS, {"temp_mode": "temperature_mode"}),
        "system": system,
        "time": _pick(values, TIME_KEYS),
        "channel": channel,
        "qgrid": _pick(values, QGRID_KEYS),
        **_pick(values, SCENARIO_KEYS),
    }
    payload.setdefault("scenario", quantity.value)
    return ScenarioConfig.model_validate(payload)


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def _sweep_parent() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    bath = p.add_argument_group("bath")
    bath.add_argument("--gamma0", type=float, help="dimensionless coupling strength")
    bath.add_argument("--omega-c", dest="omega_c", type=float, help="cutoff frequency")
    bath.add_argument("--r", type=float, help="squeezing magnitude")
    bath.add_argument("--a", type=float, help="squeezing-phase slope, Phi(w) = a w")
    bath.add_argument("--temp-mode", dest="temp_mode", choices=["zero", "high", "exact"])
    bath.add_argument("--T", type=float, help="temperature (hbar = k_B = 1)")

    system = p.add_argument_group("system")
    system.add_argument("--system", choices=[k.value for k in SystemKind])
    system.add_argument("--omega", type=float, help="system frequency")
    system.add_argument("--alpha-sq", dest="alpha_sq", type=float, help="coherent-state |alpha|^2")
    system.add_argument("--n-max", dest="n_max", type=int, help="Fock truncation")
    system.add_argument("--energies", help="comma-separated spectrum for --system custom")

    grid = p.add_argument_group("time grid")
    grid.add_argument("--t-min", dest="t_min", type=float)
    grid.add_argument("--t-max", dest="t_max", type=float)
    grid.add_argument("--points", type=int)

    out = p.add_argument_group("output")
    out.add_argument("--scenario", help="scenario name used for default file names")
    out.add_argument("--out", help="CSV path")
    out.add_argument("--config", help="INI file with [bath], [system], [time], ... sections")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qnd-lab", description="QND decoherence in squeezed thermal baths")
    parser.add_argument("--version", action="version", version=f"{settings.APP_NAME} {settings.VERSION}")
    parser.add_argument("--log-level", dest="log_level", default=None,
                        help=f"loguru level (default {settings.LOG_LEVEL})")
    sub = parser.add_subparsers(dest="command", required=True)
    parent = _sweep_parent()

    sub.add_parser("kernels", parents=[parent], help="eta, gamma and their rates over a time grid")
    sub.add_parser("entropy", parents=[parent], help="linear entropy S(t) and coherence C(t)")

    bloch = sub.add_parser("bloch", parents=[parent], help="two-level Bloch trajectory or cloud")
    bloch.add_argument("--channel", choices=["qnd", "lindblad"])
    bloch.add_argument("--theta0", type=float)
    bloch.add_argument("--phi0", type=float)
    bloch.add_argument("--Phi", type=float, help="bath squeezing phase (Lindblad channel)")
    bloch.add_argument("--schrodinger", action="store_true", default=None,
                       help="rotate Lindblad output into the Schrodinger picture")
    bloch.add_argument("--cloud-t", dest="cloud_t", type=float, help="emit a Bloch cloud at this time")
    bloch.add_argument("--cloud-n-theta", dest="cloud_n_theta", type=int)
    bloch.add_argument("--cloud-n-phi", dest="cloud_n_phi", type=int)

    qfunc = sub.add_parser("qfunc", parents=[parent], help="Husimi Q grids, one CSV per time point")
    qfunc.add_argument("--n-xi", dest="n_xi", type=int)
    qfunc.add_argument("--n-theta", dest="n_theta", type=int)
    qfunc.add_argument("--xi-max", dest="xi_max", type=float)

    figure = sub.add_parser("figure", help="curves of a published figure")
    figure.add_argument("name", help="fig1, fig2, fig3, fig4, fig5b, fig5c or fig5d")
    figure.add_argument("--out", help=f"output directory (default {settings.OUTPUT_DIR})")

    verify = sub.add_parser("verify", help="run the acceptance suite")
    verify.add_argument("--level", choices=[lv.value for lv in VerifyLevel], default=VerifyLevel.QUICK.value)
    verify.add_argument("--report", help="write the JSON report here")
    verify.add_argument("--only", action="append", help="run only this criterion (repeatable)")
    return parser


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def _run_sweep(args: argparse.Namespace) -> int:
    file_values = read_config_file(args.config) if args.config else {}
    config = build_config(Quantity(args.command), merge_values(file_values, args))
    for path in run_sweep(config):
        print(path)
    return EXIT_OK


def _run_figure(args: argparse.Namespace) -> int:
    for path in run_figure(args.name, args.out):
        print(path)
    return EXIT_OK


def _run_verify(args: argparse.Namespace) -> int:
    report = run_verify(VerifyLevel(args.level), report=args.report, only=args.only)
    print(json.dumps(report.summary(), indent=2))
    if not report.passed:
        raise verification_failure(report.failed)
    return EXIT_OK


COMMANDS = {
    "kernels": _run_sweep,
    "entropy": _run_sweep,
    "bloch": _run_sweep,
    "qfunc": _run_sweep,
    "figure": _run_figure,
    "verify": _run_verify,
}


def _field_messages(e: ValidationError) -> List[str]:
    return [f"{'.'.join(str(p) for p in err['loc'])}: {err['msg']}" for err in e.errors()]


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    level = "DEBUG" if settings.DEBUG else (args.log_level or settings.LOG_LEVEL)
    setup_logging(level, settings.LOG_FILE)
    try:
        return COMMANDS[args.command](args)
    except ValidationError as e:
        for message in _field_messages(e):
            logger.error(f"Invalid configuration: {message}")
        return EXIT_VALIDATION
    except QNDLabError as e:
        logger.error(f"{e.error_code}: {e.message}")
        return e.exit_code
    except OSError as e:
        logger.error(f"I/O failure: {e}")
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
