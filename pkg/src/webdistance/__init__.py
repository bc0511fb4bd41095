"""Web distance on the coalescing random walk web: exact oracles, boundary
curves, last-passage solvers and Monte Carlo experiments."""

import os

import numba

if "NUMBA_THREADING_LAYER_PRIORITY" not in os.environ:
    # the bundled TBB is often too old and warns on every launch
    numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]

from .boundary import (BoundaryPair, DrivingWalks, advance_boundary,  # noqa: E402
                       boundaries, boundary_by_recursion, curves_from_walks,
                       extract_driving_walks, initial_boundary, lpp_curve,
                       region_membership)
from .lpp import (BrownianGrid, SJInstance, brownian_lpp_dp,  # noqa: E402
                  brownian_lpp_skorokhod, sj_fluctuation_sample, sj_last_passage)
from .oracle import (INF, DistanceField, TargetSpec, Window,  # noqa: E402
                     distance_field, distance_point, jump_witness, replay_witness)
from . import crosscheck, stats  # noqa: E402
from .stats import ExperimentResult, ks_distance  # noqa: E402
from .tracy_widom import TWReference, tw_reference  # noqa: E402
from .web import (Direction, DomainError, LatticePoint, ParityError,  # noqa: E402
                  SignField, WalkPath, walk_backward, walk_forward, xi)

__version__ = "0.1.0"

__all__ = [
    "BoundaryPair", "BrownianGrid", "ExperimentResult", "crosscheck", "ks_distance", "stats", "Direction", "DistanceField", "DomainError",
    "DrivingWalks", "INF", "LatticePoint", "ParityError", "SJInstance", "SignField",
    "TWReference", "TargetSpec", "WalkPath", "Window", "advance_boundary", "boundaries",
    "boundary_by_recursion", "brownian_lpp_dp", "brownian_lpp_skorokhod",
    "curves_from_walks", "distance_field", "distance_point", "extract_driving_walks",
    "initial_boundary", "jump_witness", "lpp_curve", "region_membership",
    "replay_witness", "sj_fluctuation_sample", "sj_last_passage",
    "tw_reference", "walk_backward", "walk_forward", "xi",
]
