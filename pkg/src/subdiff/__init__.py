"""Subordination machinery for fractional Cauchy problems.

The package evaluates one-sided stable subordinator densities and their
inverse (hitting-time) densities, applies Levy semigroups spectrally,
solves fractional-in-time Cauchy problems by subordination, samples the
associated processes by Monte Carlo, and verifies the governing
equations by residual and transform-identity checks.
"""

from subdiff.stable_laws import (
    StableLaw,
    InverseSubordinatorLaw,
    stable_pdf,
    laplace_of_pdf,
    inverse_subordinator_pdf,
    sample_stable,
    sample_inverse_subordinator,
)
from subdiff.semigroup import (
    LevySymbol,
    GridFunction,
    symbol_eval,
    semigroup_apply,
    generator_apply,
    brownian_kernel,
    ResolutionError,
)
from subdiff.fractional import (
    TimeSeriesField,
    caputo_l1,
    rl_forcing_weight,
    mittag_leffler,
)
from subdiff.subordination import (
    subordinate_solution,
    fourier_ml_solution,
    QuadratureError,
)
from subdiff.montecarlo import (
    SampleSet,
    CtrwSpec,
    simulate_marginal_pair,
    simulate_ctrw,
    ks_distance,
    tail_moment,
)
from subdiff.verify import (
    ResidualReport,
    residual_higher_order,
    residual_fractional,
    transform_identity,
    nonuniqueness_demo,
)

__version__ = "0.1.0"

__all__ = [
    "StableLaw",
    "InverseSubordinatorLaw",
    "stable_pdf",
    "laplace_of_pdf",
    "inverse_subordinator_pdf",
    "sample_stable",
    "sample_inverse_subordinator",
    "LevySymbol",
    "GridFunction",
    "symbol_eval",
    "semigroup_apply",
    "generator_apply",
    "brownian_kernel",
    "ResolutionError",
    "TimeSeriesField",
    "caputo_l1",
    "rl_forcing_weight",
    "mittag_leffler",
    "subordinate_solution",
    "fourier_ml_solution",
    "QuadratureError",
    "SampleSet",
    "CtrwSpec",
    "simulate_marginal_pair",
    "simulate_ctrw",
    "ks_distance",
    "tail_moment",
    "ResidualReport",
    "residual_higher_order",
    "residual_fractional",
    "transform_identity",
    "nonuniqueness_demo",
]
