"""Kossowski metrics: jets, classification of semi-definite points,
isometric realization as frontals, verification and pre-distance."""
from .errors import ForgeError, PreconditionError, ResidualError
from .jets import DEFAULT_ORDER, DTYPE, Jet1, Jet2
from .metric import (
    KossowskiMetric,
    check_admissible,
    connection_coeffs,
    curvature_density,
    flat_metric,
    gaussian_curvature_regular,
    metric_from_A2_data,
    metric_from_A3_data,
    metric_from_coeffs,
    sphere_metric,
    to_K_orthogonal,
)
from .classify import PointClassification, characteristic_curve, classify_point, sign_cone_check
from .realization import CurveSpec, FrontalGerm, SecondData, curve_invariants, realize, realize_from_data
from .verify import congruence_check, first_form_residual, normal_form, verification_report
from .distance import GridGraph, metric_axiom_report, pre_distance

__version__ = "0.1.0"
