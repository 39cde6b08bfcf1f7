"""
Configuration settings for the application.
"""
from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    """Application settings loaded from environment variables."""

    # Application Configuration
    APP_NAME: str = "GHZ Entanglement Broadcasting Simulator"
    LOG_LEVEL: str = "WARNING"  # logs go to stderr, results to stdout

    # Comparison tolerance against exact published values (also the CLI --tolerance default)
    TOLERANCE: float = 1e-9

    # Invariant tolerances for states and density matrices
    HERMITICITY_TOL: float = 1e-12
    TRACE_TOL: float = 1e-12
    PSD_FLOOR: float = -1e-10  # roundoff leaves tiny negative eigenvalues
    NORM_TOL: float = 1e-12
    IMAG_TOL: float = 1e-12  # imaginary residue allowed on Pauli expectation values

    # State file parsing
    PARSE_NORM_TOL: float = 1e-6

    # Simulation vs channel-composition oracle
    ORACLE_TOL: float = 1e-10

    # Output Configuration
    SIGNIFICANT_DIGITS: int = 12
    FRACTION_MAX_DENOMINATOR: int = 1000
    DEFAULT_FORMAT: str = "table"  # table, text

    class Config:
        env_file = ".env"
        env_file_encoding = "utf-8"
        case_sensitive = True


# Create global settings instance
settings = Settings()
