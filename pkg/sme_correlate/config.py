"""
Configuration management using Pydantic Settings.
Loads numerical defaults from environment variables (prefix SME_CORRELATE_)
or a local .env file.
"""

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """
    Package settings loaded from environment variables.

    Attributes:
        dense_cutoff: Largest matrix size expm_dense accepts
        matrix_free_min_dim: Smallest Hilbert dimension whose superoperators act matrix-free (smaller ones are stored as d²×d² matrices)
        verify_max_dim: Largest Hilbert dimension for which both superoperator forms are cross-checked at construction
        krylov_max_dim: Maximum Krylov subspace dimension
        krylov_tol: Default expm_action tolerance (2-norm, relative to the input vector)
        krylov_max_substeps: Sub-step budget (accepted plus rejected) for one expm_action call
        threads: Worker count used when --workers is not given (env SME_CORRELATE_THREADS)
    """

    model_config = SettingsConfigDict(
        env_prefix="SME_CORRELATE_",
        env_file=".env",
        case_sensitive=False,
        extra="ignore",
    )

    # Linear algebra
    dense_cutoff: int = 4096
    matrix_free_min_dim: int = 64
    verify_max_dim: int = 16
    krylov_max_dim: int = 30
    krylov_tol: float = 1e-10
    krylov_max_substeps: int = 100_000

    # Correlation engine
    max_sharp_points: int = 8
    max_filtered_legs: int = 6
    rk_rtol: float = 1e-9
    rk_atol: float = 1e-12
    quad_tol: float = 1e-9
    quad_limit: int = 200
    quad_propagator_cache: int = 4096

    # Trajectories
    jump_probability_cap: float = 0.1
    negative_eigenvalue_abort: float = -1e-6
    eigen_check_stride: int = 100

    # Monte Carlo comparisons
    z_threshold: float = 5.0
    n_traj: int = 10_000
    chunk_size: int = 500
    threads: int = 1

    log_level: str = "INFO"
    environment: str = "development"


# Global settings instance
settings = Settings()
