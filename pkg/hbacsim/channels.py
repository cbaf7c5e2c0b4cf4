"""Channels on diagonal states.

All channels here map diagonal states to diagonal states: classical
reversible gates (population permutations), the SORT compression, the
thermal refresh of reset qubits, the two-level "state reset" equilibration
and the saturation drive.

The ProtocolStep classes at the bottom wrap these functions into values that
protocols can be assembled from. Their apply() methods validate indices
against the state they get applied to, since the register size isn't known
at construction time.
"""

import dataclasses

import numpy as np

from .error import ChannelError
from .state import (
    BathSpec,
    DiagonalState,
    check_basis_index,
    check_qubit,
    insert_qubit,
    thermal_qubit,
    trace_out,
)


def check_permutation(perm, size=None):
    """Returns perm as an integer array, raising ChannelError unless it's a
    bijection on {0, ..., len(perm)-1} (of length size, when given)."""
    perm = np.asarray(perm)
    if perm.ndim != 1 or not np.issubdtype(perm.dtype, np.integer):
        raise ChannelError("permutation must be a vector of integers")
    if size is not None and perm.size != size:
        raise ChannelError(
            f"permutation has {perm.size} entries, state has {size} populations"
        )
    if not np.array_equal(np.sort(perm), np.arange(perm.size)):
        raise ChannelError("permutation is not a bijection")
    return perm


def apply_permutation(s, perm):
    """Moves population p[k] to position perm[k]."""
    perm = check_permutation(perm, len(s))
    p = np.empty_like(s.p)
    p[perm] = s.p
    return DiagonalState(p)


def sort_step(s):
    """SORT: rearranges the populations in non-increasing order.

    Of all population permutations, this one maximizes the polarization of
    qubit 0.
    """
    return DiagonalState(s.p[np.argsort(-s.p, kind="stable")])


def refresh_reset(s, q, bath):
    """Rethermalizes qubit q with the bath, dropping its correlations."""
    check_qubit(s, q)
    if s.n == 1:
        return thermal_qubit(bath)
    return insert_qubit(trace_out(s, q), q, thermal_qubit(bath))


def refresh_resets(s, qubits, bath):
    """Rethermalizes several qubits at once.

    Refreshes of distinct qubits commute, so applying them in turn equals
    the simultaneous refresh.
    """
    for q in sorted(set(qubits)):
        s = refresh_reset(s, q, bath)
    return s


def state_reset(s, i, j, ratio):
    """Equilibrates basis states i and j to population ratio p[i]/p[j] = ratio.

    The pair's total population is kept; every other entry is left untouched.
    """
    check_basis_index(s, i)
    check_basis_index(s, j)
    if i == j:
        raise ChannelError(f"state reset needs two distinct basis states, got {i} twice")
    if not ratio > 0:
        raise ChannelError(f"state reset ratio must be positive, got {ratio!r}")

    total = s.p[i] + s.p[j]
    p = s.p.copy()
    p[i] = total * ratio / (1.0 + ratio)
    p[j] = total / (1.0 + ratio)
    return DiagonalState(p)


def saturate(s, q):
    """Idealized strong drive of qubit q: equalizes each pair of populations
    that differ only in bit q, which zeroes q's polarization."""
    fibers = s.fibers(q)
    averaged = np.broadcast_to(fibers.mean(axis=1, keepdims=True), fibers.shape)
    return DiagonalState(averaged.ravel())


# ---- Protocol steps ----------------------------------------------------------


class ProtocolStep:
    """One channel application within a protocol round."""

    def apply(self, state):
        raise NotImplementedError


@dataclasses.dataclass(frozen=True)
class Sort(ProtocolStep):
    def apply(self, state):
        return sort_step(state)


@dataclasses.dataclass(frozen=True)
class Reset(ProtocolStep):
    qubits: tuple
    bath: BathSpec

    def __post_init__(self):
        qubits = tuple(sorted(set(self.qubits)))
        if not qubits:
            raise ChannelError("reset needs at least one qubit")
        object.__setattr__(self, "qubits", qubits)

    def apply(self, state):
        return refresh_resets(state, self.qubits, self.bath)


@dataclasses.dataclass(frozen=True)
class StateReset(ProtocolStep):
    i: int
    j: int
    ratio: float

    def __post_init__(self):
        if self.i == self.j:
            raise ChannelError(f"state reset needs two distinct basis states, got {self.i} twice")
        if not self.ratio > 0:
            raise ChannelError(f"state reset ratio must be positive, got {self.ratio!r}")

    def apply(self, state):
        return state_reset(state, self.i, self.j, self.ratio)


@dataclasses.dataclass(frozen=True)
class Saturate(ProtocolStep):
    qubit: int

    def apply(self, state):
        return saturate(state, self.qubit)


@dataclasses.dataclass(frozen=True, eq=False)
class Permute(ProtocolStep):
    perm: tuple

    def __post_init__(self):
        perm = check_permutation(self.perm)
        object.__setattr__(self, "perm", tuple(int(k) for k in perm))

    def apply(self, state):
        return apply_permutation(state, self.perm)


def apply_steps(state, steps):
    """Applies the given protocol steps in order."""
    for step in steps:
        state = step.apply(state)
    return state
