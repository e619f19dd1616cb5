"""Finite POVMs: Naimark dilations, extreme and C*-extreme decisions, certificates."""
from .matrix_kernel import DEFAULT_TOL, Tolerance
from .povm import (
    FinitePOVM,
    IsoWitness,
    atoms,
    coarsen,
    direct_sum,
    is_pvm,
    measure_isomorphic,
    mutually_singular,
    pairing_measure,
    support,
    validate,
)
from .dilation import (
    CommutantBasis,
    NaimarkDilation,
    are_disjoint,
    commutant,
    dilation_commutant,
    intertwiners,
    naimark_dilate,
)
from .convexity import (
    CStarCombination,
    EquivalenceCertificate,
    RadonNikodymDerivative,
    combine,
    cstar_extreme_test,
    extreme_test,
    krein_milman_decompose,
    radon_nikodym,
    spectral_probe,
    unitary_equivalent,
    witness_decomposition,
    zhou_test,
)
from .ucp import UcpMap, choi, cstar_extreme_ucp, is_cp, is_homomorphism, povm_from_ucp, stinespring, ucp_from_povm

__version__ = "0.1.0"
