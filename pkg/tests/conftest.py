import numpy as np
import pytest

from gcsim.assignment import build_cluster_assignment, build_static_clusters

# The worked examples use K=12 workers in P=4 clusters of ell=3, with every
# worker eligible for n=2 clusters.  Shifts (1, 3, 3) reproduce the known
# eligibility matrix:
#   rows 0-2 (static): [0,1,2,3], [5,6,7,4], [8,9,10,11]
#   rows 3-5 (shifted): [3,0,1,2], [6,7,4,5], [9,10,11,8]
REFERENCE_SHIFTS = [(1, 3, 3)]

# One straggler realization with 5 slow and 7 fast workers (0-based ids;
# slow = {2, 4, 5, 6, 7}), and one with 4 slow workers ({2, 7, 8, 10}) whose
# static clustering loses cluster 2 entirely.
FIVE_STRAGGLERS = [1, 1, 0, 1, 0, 0, 0, 0, 1, 1, 1, 1]
FOUR_STRAGGLERS = [1, 1, 0, 1, 1, 1, 1, 0, 0, 1, 0, 1]


@pytest.fixture(scope="session")
def reference_assignment():
    static = build_static_clusters(12, 4)
    return build_cluster_assignment(static, 2, seed=0, shifts=REFERENCE_SHIFTS)


@pytest.fixture()
def rng():
    return np.random.default_rng(12345)
