"""Private information retrieval over linearly coded distributed storage.

Modules: ``field`` (GF(q) arithmetic), ``code`` (linear codes and their
analytics), ``ratematrix`` (PIR achievable rate matrices), ``rates``
(closed-form capacities and rates), ``dss`` (the simulated store),
``protocols`` (query plans, recovery, privacy audit) and ``cli``.
"""

from .code import LinearCode, direct_sum_decompose, generalized_hamming_weight, paper_codes
from .dss import CodedStore, FileSet, encode_store, generate_files, node_respond
from .field import FieldElement, FieldSpec, gf
from .ratematrix import RateMatrix, find_min_ratio, find_rate_matrix, is_capacity_achieving
from .rates import mds_pir_capacity, rate_asymmetric, rate_direct_sum, rate_symmetric

__version__ = "0.1.0"

__all__ = [
    "CodedStore",
    "FieldElement",
    "FieldSpec",
    "FileSet",
    "LinearCode",
    "RateMatrix",
    "direct_sum_decompose",
    "encode_store",
    "find_min_ratio",
    "find_rate_matrix",
    "generalized_hamming_weight",
    "generate_files",
    "gf",
    "is_capacity_achieving",
    "mds_pir_capacity",
    "node_respond",
    "paper_codes",
    "rate_asymmetric",
    "rate_direct_sum",
    "rate_symmetric",
]
