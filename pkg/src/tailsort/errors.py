class TailsortError(Exception):
    pass


class DepthCapExceeded(TailsortError):
    """Two strings agree on more bits than the configured depth cap."""


class SizeError(TailsortError, ValueError):
    """Requested size is outside what an exact oracle supports."""


class DomainError(TailsortError, ValueError):
    """Argument outside the domain of a bound or transform."""
