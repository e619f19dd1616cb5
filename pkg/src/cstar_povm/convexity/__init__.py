"""Extreme and C*-extreme decision procedures with checkable certificates."""
from .combination import CStarCombination, CStarTerm, combine, krein_milman_decompose
from .cstar import (
    CStarVerdict,
    cstar_extreme_test,
    decomposition_defects,
    random_block_projection,
    witness_decomposition,
)
from .equivalence import (
    EQUIVALENT,
    INCONCLUSIVE,
    INEQUIVALENT,
    EquivalenceCertificate,
    certificate_defects,
    find_distinguishing_word,
    unitary_equivalent,
    word_trace,
)
from .extreme import ExtremeResult, compression_matrix, extreme_split, extreme_test
from .radon_nikodym import RadonNikodymDerivative, check_domination, derivative_defects, radon_nikodym
from .zhou import (
    ZhouResult,
    default_probe_window,
    normalized_tuple,
    probe_lower_bound,
    spectral_probe,
    zhou_test,
)

__all__ = [
    "CStarCombination",
    "CStarTerm",
    "combine",
    "krein_milman_decompose",
    "CStarVerdict",
    "cstar_extreme_test",
    "decomposition_defects",
    "random_block_projection",
    "witness_decomposition",
    "EQUIVALENT",
    "INEQUIVALENT",
    "INCONCLUSIVE",
    "EquivalenceCertificate",
    "certificate_defects",
    "find_distinguishing_word",
    "unitary_equivalent",
    "word_trace",
    "ExtremeResult",
    "compression_matrix",
    "extreme_split",
    "extreme_test",
    "RadonNikodymDerivative",
    "check_domination",
    "derivative_defects",
    "radon_nikodym",
    "ZhouResult",
    "default_probe_window",
    "normalized_tuple",
    "probe_lower_bound",
    "spectral_probe",
    "zhou_test",
]
