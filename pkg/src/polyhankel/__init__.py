"""Hankel operators on Bergman spaces of the polydisc over product radial measures."""

from .hankel import (
    CompactnessVerdict,
    HankelGram,
    IndexBox,
    compactness_certificate,
    decay_limit,
    decay_sweep,
    hankel_gram,
    hs_norm_upper_bound,
    lambda_closed_form,
    monomial_pairing,
    project_fe,
)
from .moments import Atomic, PowerWeight, ProductMeasure, c_index, kernel_diag, kernel_diag_closed_form, validate
from .numeric import numeric_mode
from .symbols import (
    BoundaryPart,
    QuasiPart,
    Symbol,
    boundary_parts,
    boundary_restrict,
    boundary_vanishes,
    cesaro_mean,
    model_monomial,
    parse_symbol,
    quasi_decompose,
)

__all__ = [
    "Atomic", "BoundaryPart", "CompactnessVerdict", "HankelGram", "IndexBox", "PowerWeight",
    "ProductMeasure", "QuasiPart", "Symbol", "boundary_parts", "boundary_restrict",
    "boundary_vanishes", "c_index", "cesaro_mean", "compactness_certificate", "decay_limit",
    "decay_sweep", "hankel_gram", "hs_norm_upper_bound", "kernel_diag", "kernel_diag_closed_form",
    "lambda_closed_form", "model_monomial", "monomial_pairing", "numeric_mode", "parse_symbol", "project_fe",
    "quasi_decompose", "validate",
]
