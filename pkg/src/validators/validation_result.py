"""
Validation result model
"""

from typing import List
from pydantic import BaseModel


def _bullets(items: List[str], marker: str, empty: str) -> str:
    return "\n".join(f"{marker} {item}" for item in items) if items else empty


class ValidationResult(BaseModel):
    """Outcome of a manifest check: errors reject the manifest, warnings are logged."""

    valid: bool
    errors: List[str] = []
    warnings: List[str] = []

    @property
    def has_errors(self) -> bool:
        return bool(self.errors)

    @property
    def has_warnings(self) -> bool:
        return bool(self.warnings)

    def format_errors(self) -> str:
        return _bullets(self.errors, "❌", "No errors")

    def format_warnings(self) -> str:
        return _bullets(self.warnings, "⚠️ ", "No warnings")
