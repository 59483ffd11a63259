"""
Manifest and dataset validators
"""

from .validation_result import ValidationResult
from .manifest_validator import ManifestValidator

__all__ = ["ManifestValidator", "ValidationResult"]
