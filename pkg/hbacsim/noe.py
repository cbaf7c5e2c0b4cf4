"""Cooling by cross relaxation: the Overhauser-style protocol.

A round equilibrates the populations of |0...0> and |1...1> (restricted to
the target and the driven qubit) to the doubled Boltzmann ratio e^(4 delta),
leaving all other populations alone, and then saturates the driven qubit.
Iterated, this pushes the target past the bath polarization, which no
reset-qubit refresh in the PPA can do on two qubits.
"""

import dataclasses
import math

from .channels import Saturate, StateReset, apply_steps
from .error import (
    IndexRangeError,
    NonConvergenceError,
    ParameterError,
    ReportMismatchError,
)
from .ppa import DEFAULT_MAX_ITERS, DEFAULT_TOL, check_run_limits, run_protocol
from .state import BathSpec, boltzmann_ratio, check_basis_index, check_qubit


@dataclasses.dataclass(frozen=True)
class NoeConfig:
    """Configuration of a cross-relaxation run.

    active_pair defaults to the basis states with the target and the driven
    qubit both 0 and both 1 (all other qubits 0); for two qubits that's
    (|00>, |11>). ratio_override replaces the default ratio e^(4 delta).
    """

    bath: BathSpec
    driven_qubit: int = 1
    active_pair: tuple = None
    ratio_override: float = None
    tol: float = DEFAULT_TOL
    max_iters: int = DEFAULT_MAX_ITERS

    def __post_init__(self):
        if self.driven_qubit < 0:
            raise IndexRangeError(f"negative driven qubit {self.driven_qubit}")
        if self.active_pair is not None:
            pair = tuple(self.active_pair)
            if len(pair) != 2 or pair[0] == pair[1]:
                raise ParameterError(
                    f"active pair must be two distinct basis states, got {pair}"
                )
            object.__setattr__(self, "active_pair", pair)
        if self.ratio_override is not None and not self.ratio_override > 0:
            raise ParameterError(
                f"ratio override must be positive, got {self.ratio_override!r}"
            )
        check_run_limits(self.tol, self.max_iters)

    @property
    def ratio(self):
        if self.ratio_override is not None:
            return self.ratio_override
        return boltzmann_ratio(self.bath, gap=2)

    def pair_for(self, n):
        """The (i, j) basis-index pair that the state reset acts on in an
        n-qubit register."""
        if self.active_pair is not None:
            return self.active_pair
        return 0, (1 << (n - 1)) | (1 << (n - 1 - self.driven_qubit))

    def steps(self, n):
        i, j = self.pair_for(n)
        return [StateReset(i, j, self.ratio), Saturate(self.driven_qubit)]


def _check_register(s, cfg):
    if s.n < 2:
        raise ParameterError("cross relaxation needs at least two qubits")
    check_qubit(s, cfg.driven_qubit)
    if cfg.driven_qubit == 0 and cfg.active_pair is None:
        raise ParameterError("the driven qubit must differ from the target qubit 0")
    for k in cfg.pair_for(s.n):
        check_basis_index(s, k)


def noe_round(s, cfg):
    """One round: state reset of the active pair, then saturation of the
    driven qubit."""
    _check_register(s, cfg)
    return apply_steps(s, cfg.steps(s.n))


def run_noe(s0, cfg):
    """Iterates noe_round from s0 to its fixed point."""
    _check_register(s0, cfg)
    return run_protocol(
        s0,
        cfg.steps(s0.n),
        cfg.bath,
        tol=cfg.tol,
        max_iters=cfg.max_iters,
        protocol="noe",
    )


def steady_state_polarization(bath, ratio=None):
    """Closed-form two-qubit fixed point of the target: (r - 1) / (r + 1).

    With the default ratio r = e^(4 delta) this is tanh(2 delta), i.e.
    2 eps_b / (1 + eps_b^2).
    """
    r = boltzmann_ratio(bath, gap=2) if ratio is None else ratio
    if not r > 0:
        raise ParameterError(f"ratio must be positive, got {r!r}")
    if math.isinf(r):
        return 1.0
    return (r - 1.0) / (r + 1.0)


@dataclasses.dataclass(frozen=True)
class EnhancementRecord:
    eps_ppa: float
    eps_noe: float
    ratio: float  # None when eps_ppa is zero.
    excess: float


def enhancement_report(ppa, noe):
    """Compares the target polarization of a PPA and a cross-relaxation run.

    Both runs must have converged on the same register size and bath.
    """
    for report in (ppa, noe):
        if not report.converged:
            raise NonConvergenceError(report)
    if ppa.n != noe.n:
        raise ReportMismatchError(f"qubit counts differ: {ppa.n} vs {noe.n}")
    if ppa.bath != noe.bath:
        raise ReportMismatchError(
            f"bath polarizations differ: {ppa.bath.eps_b!r} vs {noe.bath.eps_b!r}"
        )

    eps_ppa = ppa.target_polarization
    eps_noe = noe.target_polarization

    return EnhancementRecord(
        eps_ppa=eps_ppa,
        eps_noe=eps_noe,
        ratio=eps_noe / eps_ppa if eps_ppa != 0 else None,
        excess=eps_noe - eps_ppa,
    )
