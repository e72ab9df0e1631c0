"""Exact integer homological algebra."""

from .complex import (ChainMap, GradedComplex, InvalidComplex, NotAChainMap, mapping_cone,
                      validate_chain_map)
from .exact import (LongExactSequence, NotExact, ShortExactSequence, TwistNotCompatible,
                    check_exactness, exactness_failures, label_sequence, long_exact_sequence,
                    preimage, twisted_sum)
from .homology import (GradedAbelianGroup, Homology, homology, induced_map_on_homology,
                       is_quasi_isomorphism)
from .matrix import ZMatrix
from .reduce import Reduction, ReductionError, reduce_by_pairs, reduce_greedy
from .snf import hnf_columns, invariant_factors, kernel_basis, smith_normal_form, solve

__all__ = [
    "ChainMap", "GradedComplex", "InvalidComplex", "NotAChainMap", "mapping_cone",
    "validate_chain_map", "LongExactSequence", "NotExact", "ShortExactSequence",
    "TwistNotCompatible", "check_exactness", "exactness_failures", "long_exact_sequence",
    "twisted_sum", "label_sequence", "preimage", "GradedAbelianGroup", "Homology", "homology", "induced_map_on_homology",
    "is_quasi_isomorphism", "ZMatrix", "Reduction", "ReductionError", "reduce_by_pairs",
    "reduce_greedy", "hnf_columns", "invariant_factors", "kernel_basis", "smith_normal_form",
    "solve",
]
