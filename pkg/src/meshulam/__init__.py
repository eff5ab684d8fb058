"""Exact Fourier analysis on finite Abelian groups: Meshulam's function theta,
its equality cases, and rank-one decompositions of extracted Fourier matrices.
"""

from .errors import InvariantViolation, MeshulamError
from .groups import FiniteAbelianGroup, parse_group
from .transform import GroupFunction, dft, idft
from .uncertainty import meshulam_bound, theta, theta_closed, theta_profile

__version__ = "0.1.0"

__all__ = [
    "FiniteAbelianGroup",
    "GroupFunction",
    "InvariantViolation",
    "MeshulamError",
    "dft",
    "idft",
    "meshulam_bound",
    "parse_group",
    "theta",
    "theta_closed",
    "theta_profile",
]
