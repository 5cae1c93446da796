"""
Physical constants, preset magnitudes and numerical defaults.

Single source of truth for every number the simulator uses. CODATA values
come from scipy.constants; the quoted reference magnitudes (B_crit, preset
fields, couplings) are kept here so they can be audited in one place.
"""

import math

from scipy import constants as sc

# ---------------------------------------------------------------------------
# 1. CODATA inputs
#    alpha, electron rest energy (eV), hc (eV*m)
# ---------------------------------------------------------------------------
ALPHA: float = sc.fine_structure
M_E_EV: float = sc.physical_constants["electron mass energy equivalent in MeV"][0] * 1e6
HC_EV_M: float = sc.h * sc.c / sc.e
HC_EV_NM: float = HC_EV_M * 1e9

# ---------------------------------------------------------------------------
# 2. Heaviside-Lorentz natural units (hbar = c = 1)
#    e = sqrt(4 pi alpha); 1 T = hbar c^2 / (e_SI * sqrt(4 pi alpha))  eV^2
#    => 1 G ~ 1.95e-2 eV^2
# ---------------------------------------------------------------------------
E_CHARGE_NATURAL: float = math.sqrt(4.0 * math.pi * ALPHA)
TESLA_TO_EV2: float = sc.hbar * sc.c**2 / sc.e / E_CHARGE_NATURAL
GAUSS_TO_EV2: float = TESLA_TO_EV2 * 1e-4

# ---------------------------------------------------------------------------
# 3. Critical (Schwinger) field
#    Quoted value 4.4e13 G; oracle m_e^2 / e must agree within 2%
# ---------------------------------------------------------------------------
B_CRIT_GAUSS_QUOTED: float = 4.4e13
B_CRIT_TOLERANCE: float = 0.02

# ---------------------------------------------------------------------------
# 4. Euler-Heisenberg photon mass coefficient
#    Q_gamma = omega^2 * (7 alpha / 45 pi) * (B / B_crit)^2
# ---------------------------------------------------------------------------
EH_COEFFICIENT: float = 7.0 * ALPHA / (45.0 * math.pi)

# ---------------------------------------------------------------------------
# 5. Coupling unit: 1 GeV^-1 = 1e-9 eV^-1
# ---------------------------------------------------------------------------
INV_GEV_TO_INV_EV: float = 1e-9

# ---------------------------------------------------------------------------
# 6. Laboratory cavity preset (desk-scale magnitudes)
# ---------------------------------------------------------------------------
LAB_B0_GAUSS: float = 1e5
LAB_B1_GAUSS_PER_M: float = 1e6
LAB_LENGTH_M: float = 1.0
LAB_WAVELENGTH_M: float = 1e-6
LAB_G_A_GEV_INV: float = 1e-10
LAB_PASSES: int = 10_000
LAB_SEPARATION_QUOTED_M: float = 1e-9
LAB_SPLITTING_QUOTED_RAD: float = 1e-15
LAB_GEOMETRIC_FACTOR_QUOTED: float = 50.0
SPLITTING_PER_COUPLING_QUOTED: float = 1e-5
EFFECTIVE_SPLITTING_QUOTED_RAD: float = 1e-10

# ---------------------------------------------------------------------------
# 7. Magnetar preset
#    f_G = (B1/B0) L = 0.1
# ---------------------------------------------------------------------------
MAGNETAR_B0_GAUSS: float = 1e16
MAGNETAR_B1_GAUSS_PER_M: float = 1e11
MAGNETAR_SPLITTING_QUOTED_RAD: float = 1e-2

# ---------------------------------------------------------------------------
# 8. Quoted intensity figures and growth laws
#    instantaneous drop ~1e-9, integrated ~1e-4, growth z^sqrt(2)
# ---------------------------------------------------------------------------
DEFICIT_QUOTED: float = 1e-9
INTEGRATED_DEFICIT_QUOTED: float = 1e-4
GROWTH_EXPONENT_QUOTED: float = math.sqrt(2.0)
GROWTH_EXPONENT_AFFINE: float = 1.5
EFFECTIVE_PATH_LENGTH_M: float = 1e5

# ---------------------------------------------------------------------------
# 9. Numerical defaults
# ---------------------------------------------------------------------------
QUAD_ABS_TOL: float = 1e-12
ODE_REL_TOL: float = 1e-10
ODE_ABS_TOL: float = 1e-14
MAX_ENUMERATION_PASSES: int = 22
FWHM_XTOL_FRACTION: float = 1e-9
PROFILE_POINTS_PER_WIDTH: int = 64
PROFILE_HALF_WIDTH_SIGMAS: float = 12.0
PROFILE_MAX_POINTS: int = 20_001
SMALL_SHIFT_THRESHOLD: float = 1e-12
TRAJECTORY_SAMPLES: int = 201
CHECKPOINTS_PER_DECADE: int = 8
CSV_FLOAT_FORMAT: str = "%.17g"
