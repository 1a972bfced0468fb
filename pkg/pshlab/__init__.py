from .expr import ComplexField, ScalarField, parse_field, to_dsl, wirtinger
from .cframe import frame_at, hessian_matrix_LN, levi, real_hessian_matrix
from .boundary import SampleSet, project_to_boundary, refine_samples, sample_boundary
from .classify import Verdict, classify_point, point_type
from .construct import graft, multiplier_normal, multiplier_strict4
from .certify import Certificate, Condition, ratio_O

from . import defaults, errors, gallery, utils
