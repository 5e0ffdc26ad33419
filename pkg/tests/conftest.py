import math

import numpy as np
import pytest

from qdimer.errors import BoundaryIndeterminateError


def circ_dist(a, b):
    """Distance between angles on the circle."""
    d = np.abs(np.asarray(a) - np.asarray(b)) % (2 * math.pi)
    return np.minimum(d, 2 * math.pi - d)


def bisect_phase_boundary(classify, lo, hi, in_upper_phase, tol=5e-4):
    """Bisect a phase transition along one lambda axis.

    ``classify(lam)`` returns a PhaseLabel; ``in_upper_phase(label)`` says
    whether ``lam`` is past the transition. A boundary-indeterminate point is
    the transition itself and ends the search.
    """
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        try:
            label = classify(mid)
        except BoundaryIndeterminateError:
            return mid
        if in_upper_phase(label):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


@pytest.fixture
def rng_np():
    return np.random.default_rng(1234)
