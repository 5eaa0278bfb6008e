"""Sparse, frequency-localized principal component analysis of multivariate
stationary time series in the frequency domain."""

__version__ = "0.1.0"

from .analysis import FrequencyBand, band_coherence, band_from_grid, band_power, bands_from_flags
from .bench import BenchReport, run_grid, run_replicate
from .driver import (
    LspcaFit,
    LspcaParams,
    ScreeSummary,
    classical_fdpca,
    frequency_select,
    lspca_fit,
    principal_spectrum_reconstruct,
    scree_summary,
)
from .fantope import (
    AdmmConfig,
    admm_solve,
    default_admm_config,
    fantope_project,
    initial_subspace,
    soft_threshold_matrix,
)
from .linalg import (
    complex_to_real_embed,
    hermitian_eig,
    real_to_complex_subspace,
    row_support,
    subspace_distance,
    thin_qr,
)
from .simulate import SimScenario, ar4_simulate, ideal_bandpass, lspca_process
from .soap import SoapConfig, soap_solve, truncate_rows
from .spectral import (
    SpectralEstimate,
    autocovariance_lags,
    dft_frame,
    discrete_fourier_transform,
    smoothed_spectral_matrix,
    truncated_periodogram,
)
from .tuning import (
    TuneConfig,
    block_folds,
    cv_select,
    iterative_tune,
    select_eta,
    whittle_log_likelihood,
)

__all__ = [
    "__version__",
    "AdmmConfig",
    "BenchReport",
    "FrequencyBand",
    "LspcaFit",
    "LspcaParams",
    "ScreeSummary",
    "SimScenario",
    "SoapConfig",
    "SpectralEstimate",
    "TuneConfig",
    "admm_solve",
    "ar4_simulate",
    "autocovariance_lags",
    "band_coherence",
    "band_from_grid",
    "band_power",
    "bands_from_flags",
    "block_folds",
    "classical_fdpca",
    "complex_to_real_embed",
    "cv_select",
    "default_admm_config",
    "dft_frame",
    "discrete_fourier_transform",
    "fantope_project",
    "frequency_select",
    "hermitian_eig",
    "ideal_bandpass",
    "initial_subspace",
    "iterative_tune",
    "lspca_fit",
    "lspca_process",
    "principal_spectrum_reconstruct",
    "real_to_complex_subspace",
    "row_support",
    "run_grid",
    "run_replicate",
    "scree_summary",
    "select_eta",
    "smoothed_spectral_matrix",
    "soap_solve",
    "soft_threshold_matrix",
    "subspace_distance",
    "thin_qr",
    "truncate_rows",
    "truncated_periodogram",
    "whittle_log_likelihood",
]
