"""Dynamic persistent homology: keep an R = DV decomposition valid while the filtration order changes."""

from .engine import FiltrationFamily, RunResult, run_moves, run_naive, run_strategy, run_vineyard_family
from .filtration import Filtration, FiltrationError, Simplex, build_lower_star, build_rips
from .matrix import OpCounter, PermutableMatrix
from .moves import donor_trace, move, move_left, move_right
from .reduce import (Decomposition, InvariantError, PersistenceDiagram, PersistencePair, betti_curve,
                     extract_pairs, reduce, validate)
from .schedule import MoveSchedule, greedy_schedule, kendall_distance, lcs_sort, lis
from .vineyard import FaceOrderError, straight_line_schedule, transpose

__version__ = "0.1.0"
