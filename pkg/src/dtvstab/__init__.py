"""Stability certificates for discrete time-varying linear systems.

A family of step matrices A_n generates the propagators U(n, m) of
x_{n+1} = A_n x_n. The package brackets the growth bound of the family, the
norm of the convolution operator f -> U * f on sequence spaces, and checks
the inequalities tying the two together.
"""

from .certify import (
    StabilityCertificate,
    analyze,
    certify,
    certify_family,
    corollary2_report,
    datko_check,
    oracle,
    sweep,
)
from .config import Config, load_config, parse_config
from .convolution import (
    NormBracket,
    apply_convolution,
    conv_norm_bracket,
    conv_norm_lower,
    conv_norm_upper,
    dense_oracle_matrix,
    u1_bracket,
)
from .errors import *  # noqa: F401,F403
from .family import (
    EvolutionFamily,
    ExponentialBound,
    GeneratorSpec,
    exponential_bound,
    growth_bound_oracle,
    semigroup_spectral_radius,
    solve_cauchy,
)
from .linalg import op_norm, spectral_radius
from .resolvent import (
    disk_bound_check,
    elementary_inequality_check,
    resolvent_circle_bound,
    rotation_identity_check,
)
from .sequences import SpaceSpec, dual_pair, seq_norm

__version__ = "0.1.0"
