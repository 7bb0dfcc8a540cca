"""Symmetric paraunitary extension and symmetric multiwavelet filter banks."""

from __future__ import annotations

from .errors import PreconditionError, ReductionError
from .extension import (
    CascadeFactorization,
    StandardSymmetrySplit,
    check_cascade,
    extend,
    normalizer_for,
    support_control,
    support_reduction,
)
from .filterbank import (
    FilterBank,
    FilterSpec,
    HighPassSet,
    SymmetrizationData,
    conjugate_bank,
    derive_highpass,
    reassemble,
    subsymbols,
    symmetrize,
    verify_bank,
)
from .laurent import (
    CompatibleSymmetry,
    LaurentMatrix,
    LaurentPoly,
    SymmetryType,
    coeffsupp,
    detect_compatible_symmetry,
    is_paraunitary,
    mat_mul,
    mutually_compatible,
    paraunitarity_defect,
    support_length,
    sym_of,
)
from .unitary import householder_for_vector, paired_reduce, reduce_matrix, unit_completion

__all__ = [
    "CascadeFactorization", "CompatibleSymmetry", "FilterBank", "FilterSpec", "HighPassSet",
    "LaurentMatrix", "LaurentPoly", "PreconditionError", "ReductionError",
    "StandardSymmetrySplit", "SymmetrizationData", "SymmetryType", "check_cascade",
    "coeffsupp", "conjugate_bank", "derive_highpass", "detect_compatible_symmetry", "extend",
    "householder_for_vector", "is_paraunitary", "mat_mul", "mutually_compatible",
    "normalizer_for", "paired_reduce", "paraunitarity_defect", "reassemble", "reduce_matrix",
    "subsymbols", "support_control", "support_length", "support_reduction", "sym_of",
    "symmetrize", "unit_completion", "verify_bank",
]
