"""
Custom exception classes raised by the gradcheck package.
"""


class GradCheckError(Exception):
    """
    Raised when analytic gradients disagree with their finite-difference
    estimates beyond the tolerance, or a check cannot be set up (unknown
    layer kind, oversized instance).
    """
    pass
