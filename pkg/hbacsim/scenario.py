"""Scenario configuration and orchestration.

A scenario config is a TOML document. Top-level keys configure the protocol
runs; the optional [solomon] and [output] tables configure the rate-equation
integration and where results go:

    scenario = "compare"        # ppa | noe | solomon | compare
    n = 2
    sweep = [0.001, 0.01, 0.1]  # or a single eps_b = 0.1

    [output]
    path = "report.json"
    format = "json"             # json | csv

run_scenario() evaluates a validated config, writes the report and returns
the process exit status.
"""

import concurrent.futures
import dataclasses
import logging
import math
import re

from .error import ConfigError, ParameterError, ValidationError
from .noe import NoeConfig, enhancement_report, run_noe
from .noe import steady_state_polarization as noe_steady_state
from .output import render_csv, render_json, write_text
from .ppa import DEFAULT_MAX_ITERS, DEFAULT_TOL, ORDERS, PpaConfig, run_ppa
from .ppa import steady_state_polarization as ppa_steady_state
from .solomon import (
    SolomonParams,
    check_step,
    enhancement_factor,
    integrate,
    steady_state_saturated,
)
from .state import BathSpec, maximally_mixed

try:
    import tomllib
except ImportError:  # Python < 3.11
    import tomli as tomllib

log = logging.getLogger(__name__)

SCENARIOS = ("ppa", "noe", "solomon", "compare")
FORMATS = ("json", "csv")
SCHEMA_VERSION = 1

MAX_QUBITS = 20

TOP_KEYS = (
    "scenario",
    "n",
    "eps_b",
    "sweep",
    "tol",
    "max_iters",
    "reset_qubits",
    "order",
    "driven_qubit",
    "active_pair",
    "ratio",
    "jobs",
    "solomon",
    "output",
)
SOLOMON_KEYS = (
    "rho1",
    "rho2",
    "sigma",
    "s1_eq",
    "s2_eq",
    "s1_0",
    "s2_0",
    "t_end",
    "dt",
    "saturated",
)
SOLOMON_REQUIRED = ("rho1", "rho2", "sigma", "s1_eq", "s2_eq", "t_end", "dt")
OUTPUT_KEYS = ("path", "format")

# Exit statuses
EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NONCONVERGENCE = 2


@dataclasses.dataclass(frozen=True)
class SolomonBlock:
    rho1: float
    rho2: float
    sigma: float
    s1_eq: float
    s2_eq: float
    t_end: float
    dt: float
    s1_0: float = 0.0
    s2_0: float = 0.0
    saturated: bool = True

    def params(self):
        return SolomonParams(self.rho1, self.rho2, self.sigma, self.s1_eq, self.s2_eq)


@dataclasses.dataclass(frozen=True)
class ScenarioConfig:
    """A validated scenario configuration. Build it with parse_config() or
    config_from_table()."""

    scenario: str
    n: int = 2
    eps_b: float = None
    sweep: tuple = None
    tol: float = DEFAULT_TOL
    max_iters: int = DEFAULT_MAX_ITERS
    reset_qubits: tuple = None
    order: str = "refresh-sort"
    driven_qubit: int = 1
    active_pair: tuple = None
    ratio: float = None
    jobs: int = 1
    solomon: SolomonBlock = None
    output_path: str = None
    output_format: str = "json"

    @property
    def sweep_points(self):
        """The bath polarizations to evaluate, in input order."""
        if self.sweep is not None:
            return self.sweep
        return (self.eps_b,)

    def ppa_config(self, eps_b):
        bath = BathSpec(eps_b)
        if self.reset_qubits is None:
            return PpaConfig.for_register(
                self.n, bath, tol=self.tol, max_iters=self.max_iters, order=self.order
            )
        return PpaConfig(
            self.reset_qubits, bath, tol=self.tol, max_iters=self.max_iters, order=self.order
        )

    def noe_config(self, eps_b):
        return NoeConfig(
            BathSpec(eps_b),
            driven_qubit=self.driven_qubit,
            active_pair=self.active_pair,
            ratio_override=self.ratio,
            tol=self.tol,
            max_iters=self.max_iters,
        )


# ---- Parsing and validation --------------------------------------------------


def load_table(text):
    """Parses TOML config text into a plain dict.

    Raises ConfigError with the decoder's line number on syntax errors.
    """
    try:
        return tomllib.loads(text)
    except tomllib.TOMLDecodeError as err:
        line = getattr(err, "lineno", None)
        if line is None:
            match = re.search(r"line (\d+)", str(err))
            line = int(match.group(1)) if match else None
        raise ConfigError(f"cannot parse config: {err}", line=line) from err


def _check_keys(table, allowed, prefix=""):
    for key in table:
        if key not in allowed:
            raise ConfigError(f'unknown config key "{prefix}{key}"', key=prefix + key)


def _is_int(value):
    return isinstance(value, int) and not isinstance(value, bool)


def _is_number(value):
    return isinstance(value, (int, float)) and not isinstance(value, bool)


class _Checker:
    """Collects invariant violations so they can be reported together."""

    def __init__(self):
        self.problems = []

    def fail(self, msg):
        self.problems.append(msg)

    def number(self, table, key, prefix=""):
        value = table.get(key)
        if value is None:
            return None
        if not _is_number(value):
            self.fail(f"{prefix}{key} must be a number, got {value!r}")
            return None
        if not math.isfinite(value):
            self.fail(f"{prefix}{key} must be finite, got {value!r}")
            return None
        return float(value)

    def integer(self, table, key, prefix=""):
        value = table.get(key)
        if value is None:
            return None
        if not _is_int(value):
            self.fail(f"{prefix}{key} must be an integer, got {value!r}")
            return None
        return value

    def int_list(self, table, key):
        value = table.get(key)
        if value is None:
            return None
        if not isinstance(value, (list, tuple)) or not all(_is_int(v) for v in value):
            self.fail(f"{key} must be a list of integers, got {value!r}")
            return None
        return tuple(value)

    def polarization(self, value, name):
        if value is not None and not 0.0 <= value < 1.0:
            self.fail(f"{name} must lie in [0, 1), got {value!r}")


def config_from_table(table):
    """Validates a parsed config table and returns a ScenarioConfig.

    Unknown keys raise ConfigError; every other violated invariant is
    collected into a single ValidationError.
    """
    _check_keys(table, TOP_KEYS)
    solomon_table = table.get("solomon", {})
    output_table = table.get("output", {})
    if not isinstance(solomon_table, dict):
        raise ConfigError('"solomon" must be a table', key="solomon")
    if not isinstance(output_table, dict):
        raise ConfigError('"output" must be a table', key="output")
    _check_keys(solomon_table, SOLOMON_KEYS, "solomon.")
    _check_keys(output_table, OUTPUT_KEYS, "output.")

    chk = _Checker()

    scenario = table.get("scenario")
    if scenario not in SCENARIOS:
        chk.fail(f"scenario must be one of {', '.join(SCENARIOS)}, got {scenario!r}")

    n = chk.integer(table, "n")
    if n is None:
        n = 2
    elif not 1 <= n <= MAX_QUBITS:
        chk.fail(f"n must lie in [1, {MAX_QUBITS}], got {n}")

    eps_b = chk.number(table, "eps_b")
    chk.polarization(eps_b, "eps_b")

    sweep = table.get("sweep")
    if sweep is not None:
        if not isinstance(sweep, (list, tuple)) or not sweep:
            chk.fail(f"sweep must be a non-empty list of numbers, got {sweep!r}")
            sweep = None
        elif not all(_is_number(v) for v in sweep):
            chk.fail(f"sweep must be a non-empty list of numbers, got {sweep!r}")
            sweep = None
        else:
            sweep = tuple(float(v) for v in sweep)
            for idx, value in enumerate(sweep):
                chk.polarization(value, f"sweep[{idx}]")

    tol = chk.number(table, "tol")
    if tol is None:
        tol = DEFAULT_TOL
    elif not tol > 0:
        chk.fail(f"tol must be positive, got {tol!r}")

    max_iters = chk.integer(table, "max_iters")
    if max_iters is None:
        max_iters = DEFAULT_MAX_ITERS
    elif max_iters < 1:
        chk.fail(f"max_iters must be at least 1, got {max_iters}")

    reset_qubits = chk.int_list(table, "reset_qubits")
    if reset_qubits is not None:
        if not reset_qubits:
            chk.fail("reset_qubits must not be empty")
        for q in reset_qubits:
            if not 0 <= q < n:
                chk.fail(f"reset qubit {q} out of range for {n} qubits")

    order = table.get("order", "refresh-sort")
    if order not in ORDERS:
        chk.fail(f"order must be one of {', '.join(ORDERS)}, got {order!r}")

    driven_qubit = chk.integer(table, "driven_qubit")
    if driven_qubit is None:
        driven_qubit = 1
    elif not 0 <= driven_qubit < n:
        chk.fail(f"driven_qubit {driven_qubit} out of range for {n} qubits")

    active_pair = chk.int_list(table, "active_pair")
    if active_pair is not None:
        if len(active_pair) != 2 or active_pair[0] == active_pair[1]:
            chk.fail(f"active_pair must be two distinct basis indices, got {list(active_pair)}")
        for k in active_pair:
            if not 0 <= k < 2**n:
                chk.fail(f"active_pair index {k} out of range for {n} qubits")
    elif driven_qubit == 0:
        chk.fail("driven_qubit must differ from the target qubit 0")

    ratio = chk.number(table, "ratio")
    if ratio is not None and not ratio > 0:
        chk.fail(f"ratio must be positive, got {ratio!r}")

    jobs = chk.integer(table, "jobs")
    if jobs is None:
        jobs = 1
    elif jobs < 1:
        chk.fail(f"jobs must be at least 1, got {jobs}")

    if scenario in ("ppa", "noe", "compare"):
        if eps_b is None and sweep is None and "sweep" not in table:
            chk.fail(f"{scenario} scenario needs eps_b or sweep")
        if n < 2:
            chk.fail(f"{scenario} scenario needs at least 2 qubits, got {n}")
        if eps_b is not None and sweep is not None:
            log.warning("both eps_b and sweep given, ignoring eps_b")

    solomon = None
    if scenario == "solomon":
        solomon = _solomon_block(solomon_table, chk)

    out_path = output_table.get("path")
    if out_path is not None and not isinstance(out_path, str):
        chk.fail(f"output.path must be a string, got {out_path!r}")
    out_format = output_table.get("format", "json")
    if out_format not in FORMATS:
        chk.fail(f"output.format must be one of {', '.join(FORMATS)}, got {out_format!r}")

    if chk.problems:
        raise ValidationError(chk.problems)

    return ScenarioConfig(
        scenario=scenario,
        n=n,
        eps_b=eps_b,
        sweep=sweep,
        tol=tol,
        max_iters=max_iters,
        reset_qubits=reset_qubits,
        order=order,
        driven_qubit=driven_qubit,
        active_pair=active_pair,
        ratio=ratio,
        jobs=jobs,
        solomon=solomon,
        output_path=out_path,
        output_format=out_format,
    )


def _solomon_block(table, chk):
    values = {}
    for key in SOLOMON_REQUIRED:
        if key not in table:
            chk.fail(f"solomon scenario needs solomon.{key}")
        values[key] = chk.number(table, key, "solomon.")
    for key in ("s1_0", "s2_0"):
        value = chk.number(table, key, "solomon.")
        values[key] = 0.0 if value is None else value

    saturated = table.get("saturated", True)
    if not isinstance(saturated, bool):
        chk.fail(f"solomon.saturated must be a boolean, got {saturated!r}")
    values["saturated"] = saturated

    if any(values[key] is None for key in SOLOMON_REQUIRED):
        return None

    block = SolomonBlock(**values)
    try:
        check_step(block.params(), block.t_end, block.dt)
    except ParameterError as err:
        chk.fail(f"solomon: {err}")
        return None

    return block


def _line_of_key(text, key):
    """Best-effort 1-based line number of a key's assignment in config text."""
    name = re.escape(key.rsplit(".", 1)[-1])
    for lineno, line in enumerate(text.splitlines(), 1):
        if re.match(rf"\s*{name}\s*=", line):
            return lineno
    return None


def merge_overrides(table, overrides):
    """Applies overrides key by key onto table; nested tables merge too."""
    for key, value in overrides.items():
        if isinstance(value, dict) and isinstance(table.get(key), dict):
            merge_overrides(table[key], value)
        else:
            table[key] = value
    return table


def parse_config(text, overrides=None):
    """Parses and validates TOML config text, returning a ScenarioConfig.

    overrides, a dict shaped like the parsed config, takes precedence over
    the text's values.
    """
    table = merge_overrides(load_table(text), overrides or {})
    try:
        return config_from_table(table)
    except ValidationError:
        raise
    except ConfigError as err:
        if err.key is not None and err.line is None:
            err.line = _line_of_key(text, err.key)
            if err.line is not None:
                err.args = (f"{err.args[0]} (line {err.line})",)
        raise


# ---- Evaluation --------------------------------------------------------------


@dataclasses.dataclass(frozen=True, eq=False)
class PointResult:
    """Runs for one sweep point; fields not requested by the scenario are None."""

    eps_b: float
    ppa: object = None
    noe: object = None
    enhancement: object = None

    @property
    def converged(self):
        return all(r.converged for r in (self.ppa, self.noe) if r is not None)


@dataclasses.dataclass(frozen=True, eq=False)
class ScenarioResult:
    report: dict
    header: tuple
    rows: list
    converged: bool


def evaluate_point(cfg, eps_b):
    """Runs the protocols the scenario asks for at one bath polarization,
    each from the maximally mixed state."""
    s0 = maximally_mixed(cfg.n)
    ppa = noe = enhancement = None

    if cfg.scenario in ("ppa", "compare"):
        ppa = run_ppa(s0, cfg.ppa_config(eps_b))
    if cfg.scenario in ("noe", "compare"):
        noe = run_noe(s0, cfg.noe_config(eps_b))
    if ppa is not None and noe is not None and ppa.converged and noe.converged:
        enhancement = enhancement_report(ppa, noe)

    return PointResult(eps_b=eps_b, ppa=ppa, noe=noe, enhancement=enhancement)


def _evaluate_points(cfg):
    points = cfg.sweep_points
    if cfg.jobs > 1 and len(points) > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            # map() yields in submission order, whatever order workers finish.
            return list(pool.map(evaluate_point, [cfg] * len(points), points))
    return [evaluate_point(cfg, eps_b) for eps_b in points]


def _ppa_reference(cfg, report):
    qubits = cfg.ppa_config(report.bath.eps_b).reset_qubits
    if qubits == tuple(range(1, cfg.n)):
        return ppa_steady_state(report.bath, len(qubits))
    return None


def _noe_reference(cfg, report):
    if cfg.n == 2 and cfg.active_pair is None:
        return noe_steady_state(report.bath, cfg.ratio)
    return None


def _run_record(report, reference):
    return {
        "protocol": report.protocol,
        "converged": report.converged,
        "iterations": report.iterations,
        "residual": report.residual,
        "target_polarization": report.target_polarization,
        "reference_polarization": reference,
        "final_polarizations": [float(v) for v in report.final_polarizations],
        "final_populations": [float(v) for v in report.final_state.p],
    }


def _config_record(cfg):
    record = {"n": cfg.n, "tol": cfg.tol, "max_iters": cfg.max_iters}
    if cfg.scenario in ("ppa", "compare"):
        record["reset_qubits"] = list(cfg.ppa_config(cfg.sweep_points[0]).reset_qubits)
        record["order"] = cfg.order
    if cfg.scenario in ("noe", "compare"):
        noe = cfg.noe_config(cfg.sweep_points[0])
        record["driven_qubit"] = cfg.driven_qubit
        record["active_pair"] = list(noe.pair_for(cfg.n))
        record["ratio"] = cfg.ratio
    record["sweep"] = list(cfg.sweep_points)
    return record


def _protocol_result(cfg, results):
    points = []
    rows = []

    for point in results:
        record = {"eps_b": point.eps_b}
        if point.ppa is not None:
            record["ppa"] = _run_record(point.ppa, _ppa_reference(cfg, point.ppa))
        if point.noe is not None:
            record["noe"] = _run_record(point.noe, _noe_reference(cfg, point.noe))
        if cfg.scenario == "compare":
            enh = point.enhancement
            record["enhancement"] = None if enh is None else {
                "eps_ppa": enh.eps_ppa,
                "eps_noe": enh.eps_noe,
                "ratio": enh.ratio,
                "excess": enh.excess,
            }
        points.append(record)

        if cfg.scenario == "compare":
            enh = point.enhancement
            if enh is None:
                rows.append([point.eps_b] + [float("nan")] * 4)
            else:
                ratio = float("nan") if enh.ratio is None else enh.ratio
                rows.append([point.eps_b, enh.eps_ppa, enh.eps_noe, ratio, enh.excess])
        else:
            run = point.ppa if point.ppa is not None else point.noe
            for iteration, pols in enumerate(run.trajectory):
                rows.append([point.eps_b, iteration, *pols])

    if cfg.scenario == "compare":
        header = ("eps_b", "eps_ppa", "eps_noe", "ratio", "excess")
    else:
        header = ("eps_b", "iteration", *(f"eps_{i}" for i in range(cfg.n)))

    converged = all(point.converged for point in results)
    report = {
        "schema_version": SCHEMA_VERSION,
        "scenario": cfg.scenario,
        "config": _config_record(cfg),
        "converged": converged,
        "points": points,
    }
    return ScenarioResult(report=report, header=header, rows=rows, converged=converged)


def _solomon_result(cfg):
    block = cfg.solomon
    params = block.params()
    traj = integrate(params, block.s1_0, block.s2_0, block.t_end, block.dt, block.saturated)

    steady = steady_state_saturated(params) if block.saturated else params.s1_eq
    terminal_s1 = float(traj.s1[-1])
    factor = enhancement_factor(params) if params.s1_eq != 0 else None

    report = {
        "schema_version": SCHEMA_VERSION,
        "scenario": "solomon",
        "config": {
            "rho1": params.rho1,
            "rho2": params.rho2,
            "sigma": params.sigma,
            "s1_eq": params.s1_eq,
            "s2_eq": params.s2_eq,
            "s1_0": block.s1_0,
            "s2_0": block.s2_0,
            "t_end": block.t_end,
            "dt": block.dt,
            "saturated": block.saturated,
        },
        "converged": True,
        "solomon": {
            "mode": traj.mode,
            "samples": len(traj.t),
            "steady_state": steady,
            "enhancement_factor": factor,
            "terminal_s1": terminal_s1,
            "terminal_s2": float(traj.s2[-1]),
            "deviation": abs(terminal_s1 - steady),
        },
    }
    return ScenarioResult(
        report=report, header=("t", "s1", "s2"), rows=traj.columns(), converged=True
    )


def evaluate_scenario(cfg):
    """Runs every computation the config asks for and assembles the result."""
    if cfg.scenario == "solomon":
        return _solomon_result(cfg)
    return _protocol_result(cfg, _evaluate_points(cfg))


def render_result(result, fmt="json"):
    if fmt == "csv":
        return render_csv(result.header, result.rows)
    return render_json(result.report)


def run_scenario(cfg):
    """Evaluates the scenario, writes its output and returns the exit status:
    EXIT_OK, or EXIT_NONCONVERGENCE when any run hit its iteration cap (the
    report gets written either way).

    Raises FileError when the output can't be written.
    """
    result = evaluate_scenario(cfg)
    write_text(render_result(result, cfg.output_format), cfg.output_path)

    if not result.converged:
        log.warning("%s scenario: not all runs converged", cfg.scenario)
        return EXIT_NONCONVERGENCE
    return EXIT_OK
