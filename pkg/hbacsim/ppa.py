"""The Partner Pairing Algorithm, and the fixed-point driver shared by all
protocols.

A PPA round refreshes every reset qubit from the bath and then applies SORT.
run_protocol() iterates any round, given as a list of protocol steps, until
the state stops moving.
"""

import dataclasses
import logging
import math

import numpy as np

from .channels import Reset, Sort, apply_steps
from .error import IndexRangeError, NonConvergenceError, ParameterError
from .state import BathSpec, check_qubit, l1_distance, polarizations

log = logging.getLogger(__name__)

DEFAULT_TOL = 1e-12
DEFAULT_MAX_ITERS = 10**6

ORDERS = ("refresh-sort", "sort-refresh")


@dataclasses.dataclass(frozen=True, eq=False)
class RunReport:
    """Outcome of iterating a protocol round to its fixed point.

    iterations counts the rounds that moved the state by more than the
    tolerance. The trajectory holds the polarization vector of the initial
    state and after each counted round, so it has iterations + 1 rows.
    residual is the L1 distance between final_state and its image under one
    more round; a converged run has residual <= tol.
    """

    protocol: str
    bath: BathSpec
    iterations: int
    converged: bool
    residual: float
    trajectory: np.ndarray
    final_state: object

    @property
    def n(self):
        return self.final_state.n

    @property
    def final_polarizations(self):
        return self.trajectory[-1]

    @property
    def target_polarization(self):
        """Final polarization of qubit 0."""
        return float(self.trajectory[-1][0])

    def check(self):
        """Raises NonConvergenceError when the run didn't converge, returns
        the report otherwise."""
        if not self.converged:
            raise NonConvergenceError(self)
        return self


def check_run_limits(tol, max_iters):
    if not tol > 0:
        raise ParameterError(f"tolerance must be positive, got {tol!r}")
    if max_iters < 1:
        raise ParameterError(f"iteration cap must be at least 1, got {max_iters!r}")


def run_protocol(
    s0,
    steps,
    bath,
    tol=DEFAULT_TOL,
    max_iters=DEFAULT_MAX_ITERS,
    protocol="custom",
):
    """Iterates the round given by steps from s0 until L1(s, round(s)) <= tol.

    Returns a RunReport. Hitting max_iters doesn't raise; the report comes
    back with converged=False (see RunReport.check()).
    """
    check_run_limits(tol, max_iters)

    state = s0
    trajectory = [polarizations(state)]
    converged = False
    residual = math.inf

    while True:
        nxt = apply_steps(state, steps)
        residual = l1_distance(state, nxt)

        if residual <= tol:
            converged = True
            break
        if len(trajectory) > max_iters:
            break

        state = nxt
        trajectory.append(polarizations(state))

    iterations = len(trajectory) - 1

    if converged:
        log.debug(
            "%s run converged after %d rounds, residual %.3g",
            protocol,
            iterations,
            residual,
        )
    else:
        log.warning(
            "%s run hit the cap of %d rounds, residual %.3g",
            protocol,
            max_iters,
            residual,
        )

    return RunReport(
        protocol=protocol,
        bath=bath,
        iterations=iterations,
        converged=converged,
        residual=residual,
        trajectory=np.array(trajectory),
        final_state=state,
    )


@dataclasses.dataclass(frozen=True)
class PpaConfig:
    """Configuration of a PPA run.

    order selects whether a round refreshes before sorting (the default,
    "refresh-sort") or after ("sort-refresh").
    """

    reset_qubits: tuple
    bath: BathSpec
    tol: float = DEFAULT_TOL
    max_iters: int = DEFAULT_MAX_ITERS
    order: str = "refresh-sort"

    def __post_init__(self):
        qubits = tuple(sorted(set(self.reset_qubits)))
        if not qubits:
            raise ParameterError("PPA needs at least one reset qubit")
        if any(q < 0 for q in qubits):
            raise IndexRangeError(f"negative reset qubit in {qubits}")
        if self.order not in ORDERS:
            raise ParameterError(
                f"round order must be one of {', '.join(ORDERS)}, got {self.order!r}"
            )
        check_run_limits(self.tol, self.max_iters)
        object.__setattr__(self, "reset_qubits", qubits)

    @classmethod
    def for_register(cls, n, bath, **kwargs):
        """The standard layout: qubit 0 is the target, all others get reset."""
        if n < 2:
            raise ParameterError(f"PPA needs a target and a reset qubit, got {n} qubits")
        return cls(tuple(range(1, n)), bath, **kwargs)

    def steps(self):
        refresh = Reset(self.reset_qubits, self.bath)
        if self.order == "refresh-sort":
            return [refresh, Sort()]
        return [Sort(), refresh]


def _check_register(s, cfg):
    for q in cfg.reset_qubits:
        check_qubit(s, q)


def ppa_round(s, cfg):
    """One PPA round: refresh all reset qubits, then SORT (or the reverse,
    per cfg.order)."""
    _check_register(s, cfg)
    return apply_steps(s, cfg.steps())


def run_ppa(s0, cfg):
    """Iterates ppa_round from s0 to its fixed point."""
    _check_register(s0, cfg)
    return run_protocol(
        s0, cfg.steps(), cfg.bath, tol=cfg.tol, max_iters=cfg.max_iters, protocol="ppa"
    )


def steady_state_polarization(bath, reset_count=1):
    """Target polarization at the PPA fixed point of one target qubit
    compressed against reset_count reset qubits: tanh(reset_count * delta).

    One reset qubit only reproduces the bath polarization; two give
    2 eps_b / (1 + eps_b^2).
    """
    if reset_count < 1:
        raise ParameterError(f"need at least one reset qubit, got {reset_count}")
    return math.tanh(reset_count * bath.delta)
