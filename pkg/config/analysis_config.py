import os
import logging
from typing import Dict, Any


class AnalysisConfig:
    """Configuration for entropy analysis runs."""

    def __init__(self):
        self.logger = logging.getLogger(__name__)

        # Oracle Configuration
        self.oracle_max_qubits = int(os.getenv('ENTROPY_ORACLE_MAX_QUBITS', '14'))
        self.float_tolerance = float(os.getenv('ENTROPY_FLOAT_TOLERANCE', '1e-9'))

        # Sampling Configuration
        self.distance_samples = int(os.getenv('ENTROPY_DISTANCE_SAMPLES', '10000'))
        self.logical_reduction_passes = int(os.getenv('ENTROPY_LOGICAL_REDUCTION_PASSES', '4'))
        self.workers = int(os.getenv('ENTROPY_WORKERS', '1'))

        # Output Configuration
        self.csv_decimals = int(os.getenv('ENTROPY_CSV_DECIMALS', '6'))
        self.log_level = os.getenv('ENTROPY_LOG_LEVEL', 'WARNING').upper()

    def get_oracle_config(self) -> Dict[str, Any]:
        """Get dense oracle configuration."""
        return {
            'max_qubits': self.oracle_max_qubits,
            'tolerance': self.float_tolerance
        }

    def get_sampling_config(self) -> Dict[str, Any]:
        """Get sampling configuration."""
        return {
            'distance_samples': self.distance_samples,
            'reduction_passes': self.logical_reduction_passes,
            'workers': self.workers
        }

    def get_output_config(self) -> Dict[str, Any]:
        """Get output configuration."""
        return {
            'csv_decimals': self.csv_decimals,
            'log_level': self.log_level
        }

    def validate_config(self) -> bool:
        """Validate configuration."""
        if self.oracle_max_qubits < 1 or self.oracle_max_qubits > 24:
            self.logger.warning(f"Oracle cap {self.oracle_max_qubits} outside 1..24")
            return False
        if self.workers < 1:
            self.logger.warning(f"Worker count must be positive, got {self.workers}")
            return False
        if self.csv_decimals < 0:
            self.logger.warning(f"CSV decimals must be non-negative, got {self.csv_decimals}")
            return False
        if self.log_level not in ('DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL'):
            self.logger.warning(f"Unknown log level {self.log_level}")
            return False
        return True

    @classmethod
    def from_env(cls) -> 'AnalysisConfig':
        """Create configuration from environment variables."""
        return cls()
