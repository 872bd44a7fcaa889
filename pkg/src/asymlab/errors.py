"""Exception types raised by asymlab."""


class AsymlabError(ValueError):
    """Base class for all asymlab errors."""


class DimensionMismatch(AsymlabError):
    pass


class InvalidInstance(AsymlabError):
    """Malformed input: bad JSON schema, invalid matrix, failed axiom, ..."""


class PreconditionFailed(AsymlabError):
    """A mathematical hypothesis required by an operation does not hold.

    ``witness`` carries the offending data (a point, a ray, ...) when one
    is available.
    """

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class UnresolvedReference(AsymlabError):
    """A bundle entry names an id that the bundle does not define."""
