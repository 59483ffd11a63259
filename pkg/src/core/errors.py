"""
Exception base for the lab.
Every module raises a subclass carrying a short machine-readable code.
"""


class SpatialLabError(Exception):
    """Base exception for all expected failures."""

    code: str = "error"

    def __init__(self, message: str, code: str | None = None):
        super().__init__(message)
        if code is not None:
            self.code = code

    def to_dict(self) -> dict[str, str]:
        return {"error": str(self), "code": self.code, "type": type(self).__name__}


class ConfigError(SpatialLabError):
    """Invalid configuration block or flag combination."""

    code = "config"
