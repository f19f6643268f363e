"""Monte Carlo verifiers for extreme singular value bounds."""
from .columns import (identical_columns_sampler, incoherence_m, verify_heavy_tailed_columns,
                      verify_subgaussian_columns)
from .covariance import (covariance_error, effective_rank, isometry_matrix, random_subframe,
                         random_submatrix, verify_random_submatrix,
                         sample_covariance, verify_covariance_estimation)
from .gaussian import isotropic_gap, verify_bai_yin, verify_gaussian_deviation, verify_gordon
from .oracles import (coordinate_expected_max_deviation, coupon_all_covered_probability,
                      deviation_from_one_check)
from .report import (FITTED, HOLDS, VIOLATED, ConfigError, ExperimentConfig, ExperimentReport,
                     TrialRecord, Verdict)
from .rows import (verify_coupon_collector, verify_heavy_tailed_rows,
                   verify_heavy_tailed_rows_expectation, verify_subgaussian_rows)
from .identities import (verify_approximate_isometries, verify_decoupling, verify_khintchine,
                         verify_matrix_bernstein, verify_matrix_decoupling, verify_nets)
