"""Identifiability of bilinear inverse problems through lifting.

Set ``BILINID_DISABLE_NUMBA=1`` before import to run every kernel as plain
numpy.
"""
from ._accel import backend
from .certify import (CertificationResult, Verdict, estimate_stability_constant, find_rank2_in_kernel,
                      invert_rank_one_difference, orbit_distance, weak_identifiability_test)
from .config import DEFAULT_TOLERANCES, Tolerances
from .convolution import (SubspaceBasis, circ_conv, circ_conv_fft, deconv_map, fourier_to_signal, gaussian_basis,
                          haar_subspace, standard_conv, standard_conv_embedding)
from .errors import ConfigError, ConvergenceError, DegenerateInputError, DimensionError, PreconditionError
from .harness import ExperimentConfig, ExperimentRecord, csv_text, run_experiment, write_results
from .lifting import (MeasurementMap, StructuredRows, apply_bilinear, apply_linear, from_structured,
                      random_dense_map, random_structured_rows, restrict_to_subspaces, vectorization_map)
from .models import (SparseRankOnePoint, SupportPattern, embed, enumerate_supports, expected_dimension, extract,
                     injectivity_threshold, jacobian_rank_dimension)
from .numerics import dft_matrix, kernel_basis, numeric_rank, svd
from .recover import RecoveryResult, blind_recover, empirical_strong_identifiability

__version__ = "0.1.0"
