"""Exact computation with Schur rings over small abelian groups."""

from .abelian import Group, GroupMap, Section, Subgroup, make_group
from .errors import SchurError
from .sring import SRing, group_ring, tau, validate_partition, wielandt_closure

__version__ = "0.1.0"

__all__ = [
    "Group",
    "GroupMap",
    "Section",
    "Subgroup",
    "make_group",
    "SchurError",
    "SRing",
    "group_ring",
    "tau",
    "validate_partition",
    "wielandt_closure",
    "__version__",
]
