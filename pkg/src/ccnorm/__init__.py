"""Normalizing constants of the continuous categorical distribution.

Several independent routes to the same number: the closed-form sum (in a
chosen binary format, with cancellation diagnostics), an adaptive
arbitrary-precision oracle, nested quadrature, numerical inverse Laplace
transforms, a one-variable-at-a-time recursion, and an exact treatment
of tied parameters via moments of the collapsed distribution.
"""

from .errors import (AmbiguousTies, CCNormError, DegenerateParameters,
                     InvalidParameters, InversionDiverged, MomentInconsistent,
                     OverflowInSummand, PoleHit, PrecisionExhausted,
                     UnsupportedDimension)
from .params import (EvalResult, MeanParams, NaturalParams, SimplexPoint,
                     eta_to_lambda, lambda_to_eta, log_density,
                     parse_eta_array, parse_lambda_array)
from .closed_form import (CancellationReport, cancellation_diagnostics,
                          log_norm_const_signed, norm_const_closed, region_of,
                          summands)
from .oracle import OracleConfig, norm_const_oracle, norm_const_quadrature
from .laplace import (InversionSettings, LaplaceImage, image_eval, image_for,
                      invert, scaled_c)
from .inductive import OrderingStrategy, cb_norm_taylor, norm_const_inductive
from .repeated import (MomentIndex, MultisetParams, cc_moment,
                       collapse_params, norm_const_repeated)
from .bench import (ExperimentConfig, ExperimentRecord, MilestoneRow,
                    VerdictRecord, digit_loss_milestones, run_all,
                    run_figure1, run_figure2)

__version__ = "0.1.0"

__all__ = [
    "AmbiguousTies", "CCNormError", "DegenerateParameters",
    "InvalidParameters", "InversionDiverged", "MomentInconsistent",
    "OverflowInSummand", "PoleHit", "PrecisionExhausted",
    "UnsupportedDimension",
    "EvalResult", "MeanParams", "NaturalParams", "SimplexPoint",
    "eta_to_lambda", "lambda_to_eta", "log_density", "parse_eta_array",
    "parse_lambda_array",
    "CancellationReport", "cancellation_diagnostics", "log_norm_const_signed",
    "norm_const_closed", "region_of", "summands",
    "OracleConfig", "norm_const_oracle", "norm_const_quadrature",
    "InversionSettings", "LaplaceImage", "image_eval", "image_for", "invert",
    "scaled_c",
    "OrderingStrategy", "cb_norm_taylor", "norm_const_inductive",
    "MomentIndex", "MultisetParams", "cc_moment", "collapse_params",
    "norm_const_repeated",
    "ExperimentConfig", "ExperimentRecord", "MilestoneRow", "VerdictRecord",
    "digit_loss_milestones", "run_all", "run_figure1", "run_figure2",
    "__version__",
]
