"""Two-level atom coupled to a single bosonic mode in the strong-coupling limit.

Closed-form propagator, pointer states, decoherence of the reduced density
matrix, and an exact truncated-Fock oracle to check them against.
"""

__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .model_core import (  # noqa: F401
    BlochVector,
    CompositeState,
    DensityMatrix2,
    EnvWavefunction,
    ModelParams,
    PositionGrid,
    QubitAmplitudes,
    bloch_from_density,
    coherent_state,
    gaussian_package,
    gaussian_to_fock,
    make_params,
)
from .analytic import EOperators, evolve_composite, env_overlap, ode_residual  # noqa: F401
from .decoherence import (  # noqa: F401
    bloch_series,
    decoherence_time,
    reduced_density_closed,
    reduced_density_from_composite,
    rho12_pointer_basis,
)
from .pointer import (  # noqa: F401
    atom_field_ansatz,
    compute_ab,
    extract_g,
    jcm_operators,
    parallelism_defect,
    scan_bloch_sphere,
    trivial_ansatz,
)
