"""Exact permutation-group engine."""

from .perm import Permutation, PermutationGroup
from .subgroups import (
    TIER_A,
    TIER_B,
    SubgroupClass,
    SubgroupClassList,
    conjugacy_classes,
    element_table,
    is_conjugate_subgroup,
    perfect_subgroups,
    subgroup_classes,
)
from .table import ElementTable, TierExceeded

__all__ = [
    "Permutation",
    "PermutationGroup",
    "ElementTable",
    "TierExceeded",
    "TIER_A",
    "TIER_B",
    "SubgroupClass",
    "SubgroupClassList",
    "element_table",
    "perfect_subgroups",
    "subgroup_classes",
    "conjugacy_classes",
    "is_conjugate_subgroup",
]
