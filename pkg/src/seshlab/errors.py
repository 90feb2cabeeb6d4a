"""Exception hierarchy.

Everything mathematically refusable (as opposed to a plain usage mistake)
derives from SeshlabError so the command line front end can map it to a
dedicated exit code.
"""


class SeshlabError(Exception):
    """Base class for mathematical refusals."""


class DimensionMismatchError(SeshlabError):
    """Operands live in different ambient spaces."""


class InvalidFanError(SeshlabError):
    """Structurally broken fan, or a fan failing a required validation."""


class NotProjectiveError(SeshlabError):
    """Nef cone is not full dimensional."""


class UnsupportedCenterError(SeshlabError):
    """Blowup center outside the supported range (e.g. one-dimensional)."""


class UnboundedPatternError(SeshlabError):
    """A contributing cohomology pattern polytope is unbounded."""


class DegenerateRayError(SeshlabError):
    """A ray argument that must be nonzero was zero."""
