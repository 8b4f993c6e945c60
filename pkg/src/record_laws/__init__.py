"""Joint laws of lower and upper record values: closed forms, a general term
generator, and quadrature, dynamic-programming and Monte-Carlo oracles."""

__version__ = "0.1.0"

from .distributions import (
    DiscreteDistribution,
    DistributionModel,
    Exponential,
    Pareto,
    Uniform,
    finite_uniform,
    load_tabulated,
    parse_descriptor,
    reflect,
)
from .errors import DomainError, NumericError, RecordLawsError, StateError, StatisticsError, TableFormatError
from .interleaving import enumerate_interleavings, evaluate_general_density, generate_density_terms, stay_region
from .joint_density import (
    density_z2_continuous,
    density_z2_discrete,
    density_z3_continuous,
    density_z3_discrete,
    l_terms,
)
from .marginals import numeric_marginal, pair_density_continuous, pair_density_discrete, upper_records_density
from .oracle import dp_probability_discrete, mc_box_probability
from .point import JointPoint
from .quadrature import integrate_1d, integrate_section
from .records import Interleaving, RecordTrace, classify_ordering, extract_records, inter_record_gaps
from .simulation import compare_to_closed_form, run_batch, simulate_one

__all__ = [
    "DiscreteDistribution", "DistributionModel", "Exponential", "Pareto", "Uniform",
    "finite_uniform", "load_tabulated", "parse_descriptor", "reflect",
    "DomainError", "NumericError", "RecordLawsError", "StateError", "StatisticsError", "TableFormatError",
    "enumerate_interleavings", "evaluate_general_density", "generate_density_terms", "stay_region",
    "density_z2_continuous", "density_z2_discrete", "density_z3_continuous", "density_z3_discrete", "l_terms",
    "numeric_marginal", "pair_density_continuous", "pair_density_discrete", "upper_records_density",
    "dp_probability_discrete", "mc_box_probability",
    "JointPoint",
    "integrate_1d", "integrate_section",
    "Interleaving", "RecordTrace", "classify_ordering", "extract_records", "inter_record_gaps",
    "compare_to_closed_form", "run_batch", "simulate_one",
]
