"""Star-product calculus on a noncommutative phase space.

Exact (Gaussian-rational) and float polynomial arithmetic in
``(x1, x2, p1, p2)``, the deformed Moyal star product, perfect-square
Hamiltonians with their Laguerre-Gaussian Wigner functions, and the full
solution of two coupled oscillators.
"""

from .errors import (
    BackendMismatchError,
    BranchSelectionError,
    CausticError,
    ConfigurationError,
    DegenerateHamiltonianError,
    NcPhaseError,
    NonFiniteError,
    NonRationalError,
    SingularTransformError,
    UnstablePotentialError,
    UnsupportedProductError,
)
from .oscillators import (
    CoupledOscillatorSpec,
    OscillatorSolution,
    WignerState,
    energy,
    energy_commutative,
    energy_perturbative,
    fourier_dirichlet_coupled,
    mixing_angle,
    rescale,
    solve,
    time_evolution,
    to_normal_coords,
    to_original_coords,
    wigner_state,
)
from .poly import (
    DeformationParams,
    GaussLagFn,
    PhasePoint,
    PhasePoly,
    gausslag_eval,
    grid_normalize,
    poly_eval,
    substitute_linear,
)
from .quadratic import (
    PerfectSquareHamiltonian,
    fourier_dirichlet_sum,
    k_of,
    laguerre,
    spectrum,
    wigner_n,
)
from .scalars import EXACT, FLOAT, CRational
from .star import (
    ClosedStarExp,
    StarContext,
    moyal_bracket,
    star,
    star_exp_closed,
    star_exp_series,
    star_exp_taylor,
    star_power,
    verify_operator_reduction,
)

__version__ = "0.1.0"
