"""Numerical toolkit for model spaces (Theta H^2)^perp.

Clark measures, reproducing kernels, Carleson/reverse-Carleson window
certificates, Volberg norm-equivalence scans, and dominating-set
constructions, exact at finite-Blaschke scale and grid-stamped otherwise.
"""

from .clark import (MeasureSpec, aleksandrov_identity_residual, arcs_measure,
                    cauchy_embed, clark_measure, default_probes,
                    herglotz_inversion, herglotz_transform, kapustin_partition,
                    lebesgue, poisson_transform)
from .embedding import (CertificateReport, EmbeddingConstants, SvcConstruction,
                        dominating_verify, embedding_constants,
                        interpolating_reverse, kapustin_dominating,
                        measure_gram, perturbation_ratio, polar_grid_min,
                        svc_construct, volberg_infimum)
from .errors import NumericalError, PreconditionError
from .geometry import (Arc, SublevelGrid, WhitneyArc, amplify, cls_test,
                       distance_to_sublevel, dyadic_arcs, privalov_shadow,
                       sublevel_grid, whitney_decompose, window_contains,
                       window_mass, window_scan)
from .inner import (InnerFunction, angular_derivative_modulus, blaschke,
                    evaluate, evaluate_modulus, frostman_shift, mobius,
                    product, singular, spectrum_estimate)
from .numerics import (QuadratureRule, boundary_phase, hermitian_eigensystem,
                       hermitian_eigenvalues, integrate_circle,
                       integrate_circle_adaptive, unimodular_roots)
from .spaces import (ModelBasis, ModelElement, build_basis, crofoot,
                     evaluate_element, fit_element, kernel_element, kernel_eval)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
