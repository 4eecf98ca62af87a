"""
Singular values of spherical and discrete Radon transforms, and Monte Carlo
checks of how well random sections sample a set.

Submodules
----------
specfun
    Log-Gamma family, Gegenbauer polynomials, band measures on S^{n-1}.
spectrum
    Eigenvalues of ``S_k = R_k^* R_k`` by quadrature and in closed form.
sphere_sim
    Random geodesics and subspaces against test sets on the sphere.
convex_sim
    Hit-and-run lines in isotropic convex bodies, random simplex ellipses.
torus_sim
    Arithmetic progressions on ``(Z/pZ)^n``.
cli
    The ``radon-sampling`` command.
"""

from .errors import ConfigError, DomainError, NumericalError
from .montecarlo import ExperimentReport
from .specfun import (
    BandSpec,
    GegenbauerParams,
    band_measure,
    band_measure_beta,
    band_threshold,
    gegenbauer_eval,
    gegenbauer_explicit,
    log_binomial,
    log_gamma,
    log_pochhammer,
)
from .spectrum import (
    CorrelationQuery,
    SpectrumQuery,
    correlation_eigenvalue,
    eigenvalue_general,
    eigenvalue_k2,
    eigenvalue_quadrature,
    eigenvalue_ratio,
    spectrum_table,
    vandermonde_check,
    variance_bound,
)
from .sphere_sim import (
    SphereSet,
    run_correlation_experiment,
    run_sharpness_check,
    run_sphere_experiment,
    sample_frame,
)
from .convex_sim import (
    make_isotropic_body,
    run_ellipse_experiment,
    run_tail_checks,
    run_zero_one_experiment,
    simplex_pushforward,
    slab_threshold,
)
from .torus_sim import (
    Progression,
    TorusConfig,
    TorusFunction,
    apply_S,
    eigen_check,
    radon_ap,
    run_torus_experiment,
)

__version__ = "0.1.0"
