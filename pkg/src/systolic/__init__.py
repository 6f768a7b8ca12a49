"""Conformal torus metrics: curvature, systoles, and the isosystolic defect.

The package represents metrics f^2 (dx^2 + dy^2) over a plane lattice,
computes Gaussian curvature through Liouville's equation, finds systoles by
shortest-path search on the periodic grid, and verifies the variance lower
bound for the systolic defect together with the exact-solution identities
of the constant-curvature case.
"""

from ._kernels import USING_COMPILED
from .averaging import (AveragedInequalityReport, DiskField, JensenReport,
                        VarianceCheck, averaged_inequality_check,
                        disk_field_from_function, disk_field_from_metric,
                        disk_mean, disk_variance, jensen_exp_check,
                        log_average, rotational_average,
                        variance_monotonicity_check)
from .defect import (DefectReport, build_report, equality_case_check,
                     random_corpus)
from .fields import (ConformalMetric, InvalidFactorError,
                     NumericalConsistencyError, ScalarField, area,
                     flat_laplacian, from_analytic, gaussian_curvature,
                     gaussian_curvature_grad_form, gradient_squared, mean,
                     patch_curvature, read_grid, sample_periodic, variance,
                     write_grid)
from .lattice import (InvalidLatticeError, Lattice2D, TauParameter, from_tau,
                      gauss_reduce, hexagonal, lambda1, normalize_coarea,
                      primitive_classes_up_to, primitive_vectors_up_to,
                      square, tau_of)
from .liouville import (DiskPatch, HolomorphicSolution,
                        InsufficientResolutionError, InvalidDomainError,
                        PolarProfile, RiemannProfile, SweepRow,
                        TOperatorReport, constant_curvature_error,
                        curvature_from_reciprocal, holomorphic_factor,
                        linear_phi, liouville_residual_cartesian,
                        polar_laplacian, riemann_profile, t_operator_check,
                        t_variance, variance_sweep_experiment, zeta_form,
                        zeta_variance)
from .systole import (FubiniCheck, StripExhaustedError, SystoleResult,
                      cover_distance, fubini_bound_check, straight_loop_bound,
                      systole)

__version__ = "0.1.0"
