"""Exact state-separating game proofs over finite sample spaces."""

from .command import FAIL, Ok, interpret, procedure
from .equivcheck import check_bisimulation, strategy_cross_check, transcript_equiv
from .exactdist import Dist, dist_bind, dist_equal, mk_uniform
from .game import Game, Guess, Query, advantage, run_game, seuf_experiment
from .heap import Location, heap_ignore, heap_init
from .package import Package, ProcSig, compose_rename, compose_seq, validate

__version__ = "0.1.0"

__all__ = [
    "FAIL",
    "Dist",
    "Game",
    "Guess",
    "Location",
    "Ok",
    "Package",
    "ProcSig",
    "Query",
    "advantage",
    "check_bisimulation",
    "compose_rename",
    "compose_seq",
    "dist_bind",
    "dist_equal",
    "heap_ignore",
    "heap_init",
    "interpret",
    "mk_uniform",
    "procedure",
    "run_game",
    "seuf_experiment",
    "strategy_cross_check",
    "transcript_equiv",
    "validate",
]
