"""Secrecy-rate maximization for cooperative jamming with two-antenna helpers."""

from .errors import (
    ConvergenceError,
    CoopJamError,
    DomainError,
    ParseError,
    SizeError,
    ZeroChannelError,
)
from .inner import InnerSolution, oracle_inner_grid, per_relay_best, solve_inner, z_max
from .linalg2 import ComplexPair, EigenPair2, Hermitian2, herm_eig2, null_direction, quad_form
from .model import (
    RelayLink,
    SystemInstance,
    from_db,
    load_instance,
    paper_instance,
    random_instance,
    save_instance,
    to_db,
)
from .nulling import NullingSolution, r1_of_weights, solve_nulling
from .outer import OuterSolution, g_of_z, optimize, r2_of_z, zstar_upper_bound

__version__ = "0.1.0"
