"""Dimension estimation from discrete-time expectation-value sequences."""

from .classical import StochasticModel, evolve_classical, random_stochastic
from .dilation import QuantumRealization, quantum_realization, verify_cptp
from .quantum import (
    DensityMatrix,
    KrausChannel,
    Observable,
    conserved_space,
    ergodicity_report,
    evolve_expectations,
    random_instance,
    transfer_matrix,
)
from .realization import (
    LinearRealization,
    dimension_bounds,
    effective_rank,
    enforce_contraction,
    linear_realization,
    noise_epsilon,
)
from .sequences import HankelPair, MultiSequence, RealSequence, build_block_hankel, build_hankel
from .spectral import (
    min_classical_dimension,
    poles,
    spectral_report,
    unity_hull,
    ztransform_eval,
)

__version__ = "0.1.0"
