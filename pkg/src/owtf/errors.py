"""Exception hierarchy.

Every error carries a short machine-readable ``code`` which the command line
front end maps to an exit status.
"""


class OWTFError(ValueError):
    code = "error"


class InvalidGridError(OWTFError):
    code = "invalid-grid"


class DimensionMismatchError(OWTFError):
    code = "dimension-mismatch"


class UnsupportedGridError(OWTFError):
    """Raised by the Weyl-family routines for even N (2 is not invertible)."""

    code = "unsupported-grid"


class DegenerateWindowError(OWTFError):
    code = "degenerate-window"


class WindowCountError(OWTFError):
    code = "window-count"


class NotHermitianError(OWTFError):
    code = "not-hermitian"


class NotPositiveError(OWTFError):
    code = "not-positive"


class FormatError(OWTFError):
    code = "format"


class SpecError(OWTFError):
    """Unparseable weight/mask/operator/signal spec string."""

    code = "parse"
