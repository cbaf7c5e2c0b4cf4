"""Diagonal n-qubit states.

Every protocol in this package acts on the diagonal of the density matrix
only, so a state is a probability vector over the 2^n computational basis
states. Basis index k encodes the qubit values with qubit 0 (the target) as
the most significant bit and qubit n-1 as the least significant one. This
convention matters: SORT maximizes the polarization of the most significant
qubit.

With that ordering, reshaping the population vector to (2^i, 2, 2^(n-i-1))
puts qubit i on the middle axis, which is how the marginal and fiber
operations below work.
"""

import dataclasses
import math

import numpy as np

from .error import IndexRangeError, ParameterError, RegisterSizeError, StateError

MAX_REGISTER_SIZE = 2**20  # Maximum number of populations in a register.
NEGATIVE_TOLERANCE = 1e-15  # Negative populations above -tol get clamped to 0.
SUM_TOLERANCE = 1e-12  # Allowed deviation of the population sum from 1.


@dataclasses.dataclass(frozen=True)
class BathSpec:
    """The heat bath, given by the polarization it imprints on a single qubit.

    delta is the dimensionless inverse-temperature parameter with
    eps_b = tanh(delta).
    """

    eps_b: float
    delta: float = dataclasses.field(init=False, repr=False)

    def __post_init__(self):
        eps_b = float(self.eps_b)
        if not 0.0 <= eps_b < 1.0:
            raise ParameterError(
                f"bath polarization must lie in [0, 1), got {self.eps_b!r}"
            )
        object.__setattr__(self, "eps_b", eps_b)
        object.__setattr__(self, "delta", math.atanh(eps_b))

    @classmethod
    def from_delta(cls, delta):
        """Builds the bath with eps_b = tanh(delta)."""
        if delta < 0:
            raise ParameterError(f"delta must be non-negative, got {delta!r}")
        return cls(math.tanh(delta))


def boltzmann_ratio(bath, gap=1):
    """Returns the equilibrium population ratio across an energy gap.

    gap is measured in units of a single qubit's splitting: gap=1 gives the
    ratio (1+eps_b)/(1-eps_b) = e^(2 delta) of one thermal qubit, gap=2 the
    doubled factor e^(4 delta) between |00> and |11>.
    """
    return math.exp(2.0 * gap * bath.delta)


@dataclasses.dataclass(frozen=True, eq=False)
class DiagonalState:
    """A diagonal density matrix, stored as its population vector.

    The constructor copies and validates the populations: the length must be
    a power of two no larger than MAX_REGISTER_SIZE, entries must be
    non-negative (tiny negative drift is clamped) and sum to one. The stored
    array is read-only.
    """

    p: np.ndarray
    n: int = dataclasses.field(init=False)

    def __post_init__(self):
        p = np.array(self.p, dtype=np.float64)

        if p.ndim != 1:
            raise StateError(f"populations must be a vector, got shape {p.shape}")

        size = p.size
        if size > MAX_REGISTER_SIZE:
            raise RegisterSizeError(
                f"{size} populations exceed the register maximum of {MAX_REGISTER_SIZE}"
            )
        if size < 2 or size & (size - 1):
            raise StateError(
                f"number of populations must be a power of two >= 2, got {size}"
            )
        if not np.all(np.isfinite(p)):
            raise StateError("populations must be finite")

        lowest = p.min()
        if lowest < -NEGATIVE_TOLERANCE:
            raise StateError(f"negative population {lowest!r}")
        if lowest < 0:
            p = np.maximum(p, 0.0)

        total = p.sum()
        if abs(total - 1.0) > SUM_TOLERANCE:
            raise StateError(f"populations sum to {total!r}, not 1")

        p.setflags(write=False)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "n", size.bit_length() - 1)

    def __len__(self):
        return self.p.size

    def __repr__(self):
        return f"DiagonalState(n={self.n}, p={self.p.tolist()!r})"

    def fibers(self, i):
        """Returns a (2^i, 2, 2^(n-i-1)) view with qubit i on the middle axis."""
        check_qubit(self, i)
        return self.p.reshape(2**i, 2, -1)


def check_qubit(s, i):
    """Raises IndexRangeError unless i is a qubit index of state s."""
    if not 0 <= i < s.n:
        raise IndexRangeError(f"qubit index {i} out of range for {s.n} qubits")


def check_basis_index(s, k):
    """Raises IndexRangeError unless k is a basis index of state s."""
    if not 0 <= k < len(s):
        raise IndexRangeError(
            f"basis index {k} out of range for {len(s)} populations"
        )


def thermal_qubit(bath):
    """The single qubit in equilibrium with the bath."""
    return DiagonalState([(1.0 + bath.eps_b) / 2.0, (1.0 - bath.eps_b) / 2.0])


def maximally_mixed(n):
    """The n-qubit state with all populations equal."""
    if n < 1:
        raise StateError(f"need at least one qubit, got {n}")
    if 2**n > MAX_REGISTER_SIZE:
        raise RegisterSizeError(f"{n} qubits exceed the register maximum")
    return DiagonalState(np.full(2**n, 1.0 / 2**n))


def tensor(a, b, max_size=MAX_REGISTER_SIZE):
    """The product state a (x) b; b's qubits follow a's."""
    size = len(a) * len(b)
    if size > max_size:
        raise RegisterSizeError(
            f"{a.n} + {b.n} qubits exceed the register maximum of {max_size} populations"
        )
    return DiagonalState(np.kron(a.p, b.p))


def thermal_state(n, bath):
    """n uncorrelated qubits, each in equilibrium with the bath."""
    if n < 1:
        raise StateError(f"need at least one qubit, got {n}")
    state = thermal_qubit(bath)
    for _ in range(n - 1):
        state = tensor(state, thermal_qubit(bath))
    return state


def qubit_marginal(s, i):
    """The populations (p_0, p_1) of qubit i alone."""
    return s.fibers(i).sum(axis=(0, 2))


def qubit_polarization(s, i):
    """The Pauli-Z expectation of qubit i: sum_k p[k] * (-1)^bit_i(k)."""
    up, down = qubit_marginal(s, i)
    return float(up - down)


def polarizations(s):
    """The polarization vector of all qubits of s, in qubit order."""
    return np.array([qubit_polarization(s, i) for i in range(s.n)])


def trace_out(s, i):
    """Removes qubit i, summing the two fibers over its bit."""
    check_qubit(s, i)
    if s.n == 1:
        raise StateError("cannot trace out the only qubit of a register")
    return DiagonalState(s.fibers(i).sum(axis=1).ravel())


def insert_qubit(s, q, qubit):
    """Places the single-qubit state qubit uncorrelated at position q of s.

    This undoes trace_out: q may range over 0..s.n, the result has s.n + 1
    qubits.
    """
    if qubit.n != 1:
        raise StateError(f"can only insert a single qubit, got {qubit.n}")
    if not 0 <= q <= s.n:
        raise IndexRangeError(f"insert position {q} out of range for {s.n} qubits")
    if len(s) * 2 > MAX_REGISTER_SIZE:
        raise RegisterSizeError(f"{s.n + 1} qubits exceed the register maximum")

    blocks = s.p.reshape(2**q, 1, -1)
    return DiagonalState((blocks * qubit.p[None, :, None]).ravel())


def l1_distance(a, b):
    """Sum of absolute population differences between equally sized states."""
    if len(a) != len(b):
        raise StateError(f"cannot compare {a.n}- and {b.n}-qubit states")
    return float(np.abs(a.p - b.p).sum())


def entropy(s):
    """Shannon entropy of the populations, in bits."""
    p = s.p[s.p > 0]
    return float(-(p * np.log2(p)).sum())
