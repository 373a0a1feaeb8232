"""Concrete base-class constructions."""

from .alternating import AlternatingParams, alternating_member
from .glue import glue_classes
from .hard import HardClassParams, green_red_branches, hard_class_sample
from .linear import LinearGen, latch_embed, linear_eval
from .rules import prefix_path_rule, rule_filter
from .taxonomy import RateFunction, TaxonomyParams, taxonomy_baseline, taxonomy_member, taxonomy_shatter_witness

__all__ = [
    "AlternatingParams",
    "HardClassParams",
    "LinearGen",
    "RateFunction",
    "TaxonomyParams",
    "alternating_member",
    "glue_classes",
    "green_red_branches",
    "hard_class_sample",
    "latch_embed",
    "linear_eval",
    "prefix_path_rule",
    "rule_filter",
    "taxonomy_baseline",
    "taxonomy_member",
    "taxonomy_shatter_witness",
]
