"""Densities of quasismooth hypersurface sections on simplicial toric varieties over finite fields."""

from .density import (
    ClosedFormMu,
    TaylorCondition,
    TruncatedDensity,
    finite_sing_density,
    main_density,
    scheme_length_density,
    subset_limit_identity,
    taylor_factor,
    zeta_inverse,
)
from .errors import CapExceeded, QsdError, ValidationError
from .ff import FieldDescriptor, FieldElement, embed, frobenius, make_field, minimal_degree
from .harness import DensityReport, ExperimentConfig, enumerate_sections, run_experiment, sample_sections, singular_points
from .jets import JetRing, MuTable, Unstable, local_length, mu_exhaustive, mu_monte_carlo
from .points import (
    ClosedPoint,
    closed_point_counts,
    count_points,
    enumerate_closed_points,
    point_from_coords,
    singular_locus_membership,
)
from .quasismooth import (
    AmbientSubscheme,
    NuProfile,
    beta_diagnostic,
    is_quasismooth_at,
    jet_vector,
    nu,
    nu_certified,
    nu_profile,
)
from .toric import (
    ClassGroup,
    DivisorClass,
    Fan,
    Section,
    ToricVariety,
    class_group,
    evaluate,
    is_relevant,
    load_variety,
    monomial_basis,
    partial_derivative,
    product_fan,
    projective_space,
    standard_degree_delta,
    weighted_projective,
)

__version__ = "0.1.0"
