"""
Custom exceptions raised by the geometry package.
"""


class GeometryError(ValueError):
    """
    Raised when a sliding-window configuration is invalid for a given input
    resolution, e.g. no patch fits or the backward padding would be negative.
    """
    pass
