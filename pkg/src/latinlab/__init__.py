"""latinlab: Latin-square parity laboratory.

Samplers (exact, chain, triangle removal, binomial hypergraph), intercalate
classification and switching, configuration detectors, F2 kernel analysis,
reference parity distributions, and exhaustive desk-scale verification.
"""

from .core import (
    Entry,
    LatinSquare,
    OrderedPartialLatinSquare,
    ParityTriple,
    PartialLatinSquare,
    Template,
    cycle_switch,
    enumerate_all,
    exact_uniform_sample,
    f_of_n,
    parity_counts,
    slice_permutation,
    template_intersect,
    template_sample,
    validate_square,
)
from .intercalates import (
    Intercalate,
    SigmaKey,
    enumerate_intercalates,
    isolated_intercalates,
    sigma_set,
    stable_intercalates,
    switch_intercalate,
    verify_canonicity,
)
from .samplers import TrpOutcome, binomial_hypergraph, chain_sample, strip_conflicts, trp_sample

__all__ = [
    "Entry",
    "LatinSquare",
    "OrderedPartialLatinSquare",
    "ParityTriple",
    "PartialLatinSquare",
    "Template",
    "Intercalate",
    "SigmaKey",
    "TrpOutcome",
    "validate_square",
    "slice_permutation",
    "parity_counts",
    "f_of_n",
    "cycle_switch",
    "enumerate_all",
    "exact_uniform_sample",
    "template_sample",
    "template_intersect",
    "enumerate_intercalates",
    "isolated_intercalates",
    "stable_intercalates",
    "sigma_set",
    "switch_intercalate",
    "verify_canonicity",
    "trp_sample",
    "binomial_hypergraph",
    "strip_conflicts",
    "chain_sample",
]

__version__ = "0.1.0"
