"""mixlab: mixmaster dynamics as the extended continued-fraction shift.

Submodules
----------
cfrac       continued fractions, convergent matrices, the action on P^1(F_2)
mixmaster   Kasner eras and cycles, geodesic coding, (u, v, delta) dynamics
transfer    transfer operators, pressure, invariant densities
dimension   Hausdorff dimension of bounded-digit sets, spectral Lyapunov exponents
lyapunov    Monte Carlo Lyapunov exponents and digit samplers
markov      the matrix A_N, graph properties, Bowen-Franks and K-theory
kms         KMS admissibility, eigenmeasure cylinder masses, finite-level states
"""

__version__ = "0.1.0"

from .cfrac import (  # noqa: E402
    Coset,
    Digits,
    ExtendedPoint,
    axis_permutation,
    cf_digits,
    cf_value,
    continuant,
    convergent_matrix,
    coset_act,
    extended_shift,
    gauss_shift,
)
from .dimension import (  # noqa: E402
    HausdorffDimension,
    hausdorff_dim_spectral,
    hensley_dim_asymptotic,
    lyapunov_spectral,
)
from .exceptions import (  # noqa: E402
    ConvergenceError,
    CuspError,
    DomainError,
    InadmissibleParameterError,
    MixlabError,
    NotFittedError,
)
from .kms import KMSState, finite_level_state, gibbs_cylinder_mass, kms_beta_bound, var0_h  # noqa: E402
from .lyapunov import GibbsDigitSampler, lyapunov_mc, sample_EN  # noqa: E402
from .markov import (  # noqa: E402
    bowen_franks,
    build_AN,
    is_aperiodic,
    is_irreducible,
    k_theory,
    spectral_radius,
)
from .mixmaster import (  # noqa: E402
    GeodesicData,
    KasnerTransformer,
    axis_frequencies,
    era_transition,
    evolve_universe,
    kasner_exponents,
    two_sided_shift,
    v_evolution,
)
from .surd import QuadraticSurd, parse_surd  # noqa: E402
from .transfer import (  # noqa: E402
    OperatorSpec,
    TransferOperator,
    build_operator,
    invariant_density_full,
    leading_eigen,
    pressure,
)

__all__ = [
    "__version__",
    "axis_frequencies",
    "axis_permutation",
    "bowen_franks",
    "build_AN",
    "build_operator",
    "cf_digits",
    "cf_value",
    "continuant",
    "ConvergenceError",
    "convergent_matrix",
    "Coset",
    "coset_act",
    "CuspError",
    "Digits",
    "DomainError",
    "era_transition",
    "evolve_universe",
    "extended_shift",
    "ExtendedPoint",
    "finite_level_state",
    "gauss_shift",
    "GeodesicData",
    "gibbs_cylinder_mass",
    "GibbsDigitSampler",
    "hausdorff_dim_spectral",
    "HausdorffDimension",
    "hensley_dim_asymptotic",
    "InadmissibleParameterError",
    "invariant_density_full",
    "is_aperiodic",
    "is_irreducible",
    "k_theory",
    "kasner_exponents",
    "KasnerTransformer",
    "kms_beta_bound",
    "KMSState",
    "leading_eigen",
    "lyapunov_mc",
    "lyapunov_spectral",
    "MixlabError",
    "NotFittedError",
    "OperatorSpec",
    "parse_surd",
    "pressure",
    "QuadraticSurd",
    "sample_EN",
    "spectral_radius",
    "TransferOperator",
    "two_sided_shift",
    "v_evolution",
    "var0_h",
]
