"""Fucik spectrum and asymptotically linear problems for the one-dimensional wave operator."""

__version__ = "0.1.0"

from .classical import (Family, OdePoint, dirichlet_b_of_a, periodic_b_of_a, shoot_dirichlet,
                        shoot_periodic)
from .curves import (Curve, CurvePoint, Region, classify, classify_point, map_point,
                     spectrum_point_check, trace)
from .dual import ShiftConfigLower, ShiftConfigUpper, Side, make_config, validate_lower, \
    validate_upper
from .exceptions import (BracketFailure, ConditioningFailure, DomainError, FucikError,
                         HypothesisViolated, IntegratorFailure, InvalidEps, NeighborUnresolved,
                         NoConvergence, ParseError, RegionError, ValidationError,
                         ZeroEigenvalue)
from .expr import PExpression, parse_p
from .maximizer import MaximizerConfig, MaximizerResult, brute_force_sup, maximize_ratio
from .nonhomog import (DualNonlinearity, HypothesisReport, NonlinearitySpec, SolveResult,
                       check_hypotheses, conjugate_eval, from_catalog, functional_I, solve)
from .spectral import (ModeIndex, Parity, SpectralField, TruncationSpec, analyze,
                       enumerate_spectrum, synthesize)
