"""Exact oscillatory integrals over Q_p and F_p((t)) with stationary-phase certificates."""

__version__ = "0.1.0"

from .charfun import Region, StepFunction, indicator, psi
from .cyclotomic import CycloNum
from .integrate import gauss_brute, gauss_closed, oscillatory_brute
from .localfield import FieldConfig, LocalNum, from_rational
from .morse import MorseData, find_critical_points, morse_normal_form, verify_morse
from .motivic import LPoly, UniformFormula, check_uniform, specialize, uniform_normal_form
from .polynomial import RationalPoly, parse_phase
from .series import MultiSeries, SeriesMap
from .stationary import PhaseCertificate, nonstationary_bound, stationary_phase, verify_certificate

__all__ = [
    "CycloNum",
    "FieldConfig",
    "LPoly",
    "LocalNum",
    "MorseData",
    "MultiSeries",
    "PhaseCertificate",
    "RationalPoly",
    "Region",
    "SeriesMap",
    "StepFunction",
    "UniformFormula",
    "check_uniform",
    "find_critical_points",
    "from_rational",
    "gauss_brute",
    "gauss_closed",
    "indicator",
    "morse_normal_form",
    "nonstationary_bound",
    "oscillatory_brute",
    "parse_phase",
    "psi",
    "specialize",
    "stationary_phase",
    "uniform_normal_form",
    "verify_certificate",
    "verify_morse",
]
