"""Helpers for the various test_*.py files."""

import numpy as np

import hbacsim

# Bath polarizations the steady-state checks run over.
BATH_POLARIZATIONS = (0.001, 0.01, 0.1, 0.3, 0.5, 0.9)

# Two-qubit states along the first PPA round at eps_b = 0.1.
POST_REFRESH = [0.275, 0.225, 0.275, 0.225]
POST_SORT = [0.275, 0.275, 0.225, 0.225]

# A minimal compare-scenario config.
COMPARE_CONFIG = """\
scenario = "compare"
n = 2
sweep = [0.001, 0.01, 0.1]
"""


def random_populations(rng, n):
    """A random population vector over n qubits."""
    p = rng.random(2**n)
    return p / p.sum()


def random_state(rng, n):
    return hbacsim.DiagonalState(random_populations(rng, n))


def noe_limit(eps_b):
    """The analytic two-qubit cross-relaxation fixed point."""
    return 2 * eps_b / (1 + eps_b**2)


def brute_force_fixed_point(round_fn, state, tol=1e-15, max_rounds=100000):
    """Applies round_fn until the populations stop moving by more than tol.

    Independent of the package's fixed-point driver; used as a test oracle.
    """
    for _ in range(max_rounds):
        nxt = round_fn(state)
        if np.abs(nxt.p - state.p).sum() <= tol:
            return nxt
        state = nxt
    raise AssertionError("oracle iteration did not settle")
