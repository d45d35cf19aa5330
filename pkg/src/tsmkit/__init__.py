"""Numerical toolkit for twisted spherical means on step-two groups.

The package builds step-two nilpotent group structures (Heisenberg,
H-type, and Metivier families), reduces a centre direction to its
canonical symplectic frame, and machine-checks the identities that the
reduced twisted calculus satisfies: harmonic degree splitting, the
annihilating Euler operator stacks, vanishing of means of the singular
product family, spectral projection identities, and the boundary radial
profile equation.  Everything is deterministic for a fixed seed and is
exercised through the ``tsmkit`` command line or the suite runner.
"""

__version__ = "0.1.0"

from .groups import (
    GroupPoint,
    MetivierReport,
    StepTwoGroup,
    TwistTable,
    ValidationReport,
    canonical_group,
    check_metivier,
    complexify,
    group_from_dict,
    group_law,
    heisenberg_group,
    load_group,
    quaternionic_group,
    realify,
    save_group,
    twist_coefficients,
    validate_group,
)
from .means import (
    BoundaryOdeReport,
    FrameEquivalenceReport,
    HeckeReport,
    QuadratureValue,
    SingularNodeError,
    boundary_ode_probe,
    diagonal_phase_factor,
    frame_equivalence_check,
    hecke_bochner_check,
    laguerre_gaussian,
    laguerre_product_check,
    laguerre_radial_sum,
    laguerre_values,
    phase_linear_coeffs,
    radial_twisted_convolution,
    structural_phase_factor,
    twisted_convolution,
    twisted_sphere_mean,
)
from .polynomials import (
    BiPolynomial,
    change_frame,
    gamma_constant,
    harmonic_decompose,
    in_frame_harmonic_class,
    is_harmonic,
    laplacian,
    project_bidegree,
    sphere_average,
    sphere_inner,
    sphere_moment,
    split_coordinate_product,
)
from .quadrature import (
    SpaceRule,
    SphereRule,
    gaussian_mc_rule,
    mc_sphere_rule,
    parse_sphere_rule,
    product_sphere_rule,
    tensor_grid_rule,
    truncation_radius,
)
from .radial import (
    AnnihilationReport,
    EulerAtom,
    OperatorStack,
    RadialMultAtom,
    RadialSum,
    TypeFunction,
    annihilation_check,
    apply_field,
    monomial_stack,
    null_family,
    twisted_euler,
)
from .reduction import (
    DegenerateCombinationError,
    PhaseIdentity,
    ReducedFrame,
    canonical_frame,
    frame_twist_table,
    phase_identity_check,
    reduce_direction,
    structure_combination,
    transport_point,
)
from .suites import (
    SUITES,
    SuiteConfig,
    SuiteConfigError,
    SuiteReport,
    resolve_group,
    run_suite,
)

__all__ = [name for name in dir() if not name.startswith("_")]
