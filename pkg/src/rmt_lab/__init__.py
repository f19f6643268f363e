"""Non-asymptotic random matrix experiments: ensembles, singular values,
concentration bounds, epsilon-nets and restricted isometry constants."""
__version__ = "0.1.0"

from .seeding import SeedSpec
from .spectra import extreme_singular_values, spectral_norm, svd_values
