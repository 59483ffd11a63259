from src.core.errors import SpatialLabError


class DownstreamError(SpatialLabError):
    """Downstream evaluation cannot run on the given inputs."""

    code = "downstream"
