"""Almost reducibility and spectral classification for one-frequency SL(2) cocycles."""

__version__ = "0.1.0"

from .kernels import BACKEND
from .errors import AlmostRedError, DomainVerdict, InvalidInput
from .arithmetic import Frequency, cf_expand, beta_upper, select_scale
from .analytic import FourierMap, trig_polynomial
from .cocycle import Cocycle, schrodinger_cocycle, amo_potential, constant_cocycle, rotation
from .lyapunov import finite_le, le_estimate, strip_profile, acceleration, regularity_test
from .hyperbolicity import directions, uh_certificate, angle_profile, q_pair
from .conjugacy import complex_conjugacy, real_conjugacy, ConjugacyConfig
from .schrodinger import classify_energy, dichotomy_report, ids, rotation_number, SchrodingerConfig

__all__ = [
    "BACKEND", "AlmostRedError", "DomainVerdict", "InvalidInput",
    "Frequency", "cf_expand", "beta_upper", "select_scale",
    "FourierMap", "trig_polynomial",
    "Cocycle", "schrodinger_cocycle", "amo_potential", "constant_cocycle", "rotation",
    "finite_le", "le_estimate", "strip_profile", "acceleration", "regularity_test",
    "directions", "uh_certificate", "angle_profile", "q_pair",
    "complex_conjugacy", "real_conjugacy", "ConjugacyConfig",
    "classify_energy", "dichotomy_report", "ids", "rotation_number", "SchrodingerConfig",
]
