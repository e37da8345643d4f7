"""aginglab: a Monte Carlo laboratory for two-time aging in stationary growth models.

Seeded, replica-parallel simulations of TASEP, stationary last-passage
percolation, the O'Connell-Yor polymer and Ginzburg-Landau interfaces, with
a covariance-to-variance correlation estimator and the exact aging functions
as references.
"""

from .backends import BACKEND
from . import closedform, glew, lpp, polymer, statcore, tasep
from .rng import analysis_stream, replica_stream

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "closedform",
    "glew",
    "lpp",
    "polymer",
    "statcore",
    "tasep",
    "replica_stream",
    "analysis_stream",
]
