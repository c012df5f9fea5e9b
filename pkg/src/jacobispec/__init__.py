"""Spectral analysis of Jacobi matrices through continued fractions and
orthogonal polynomials."""

__version__ = "0.1.0"

from .approx import (DistributionSamples, WeightCurve, Rn, Rn_boundary, ac_conditions_An,
                     fn_at_zero, offband_eigenvalues, sigma_n, weight_curve, weight_fJ,
                     weight_fn, zero_eigenvalue_test)
from .coefficients import (BandInterval, CoefficientError, CoefficientSequence, IndexBeyondTable,
                           band_interval, carleman_diagnostic, centered_check, family_preset,
                           load_table, save_table)
from .contfrac import (ApproximantPole, BandError, ConvergenceCertificate, boundary_K,
                       constant_tail_K, resolvent_approximant, resolvent_limit, tail_assembled_R,
                       tail_series_K)
from .criteria import (TransferState, asymptotic_conditions_check, bounded_weight_criterion,
                       discreteness_check, equicontinuity_diagnostic, gn_derivative_bound,
                       main_estimate_infimum, transfer_lower_bound, transfer_matrix)
from .estimators import ApproximantSpectralDensity, TruncatedSpectralMeasure
from .oracle import SpectralMeasureDiscrete, dense_resolvent, kolmogorov_distance, truncation_measure
from .polynomials import (NumericalBreakdown, alt_denominator, eval_P_grid, eval_PQ, turan_determinant,
                          turan_sum, wronskian_residual)
from .reports import CriterionReport
