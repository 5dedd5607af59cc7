"""Domain exception hierarchy.

Every error the engine raises derives from AuricError so callers (CLI,
HTTP service) can map domain failures uniformly.
"""


class AuricError(Exception):
    """Base class for all domain errors."""


# --- event stream ---------------------------------------------------------

class MalformedLine(AuricError):
    """Event line is not a well-formed record."""


class UnknownKind(AuricError):
    """Event kind is not part of the taxonomy."""


class BadEmbedding(AuricError):
    """Face embedding has the wrong shape or is not unit-norm."""


class NegativeTimestamp(AuricError):
    """Event timestamp is before the epoch."""


# --- semantic filter ------------------------------------------------------

class NotAppScoped(AuricError):
    """A lifecycle or capture event reached the coalescer."""


# --- session engine -------------------------------------------------------

class InvalidStream(AuricError):
    """Stream failed validation before ingestion."""


class ProfileDimensionMismatch(AuricError):
    """Capture embedding dimension differs from the enrollment profile."""


class ProviderFailure(AuricError):
    """Live capture provider failed or missed its deadline."""


# --- face gate ------------------------------------------------------------

class WrongPortraitCount(AuricError):
    """Enrollment requires exactly three portraits."""


class DimensionMismatch(AuricError):
    """Sample and portrait embeddings have different dimensions."""


# --- store ----------------------------------------------------------------

class DuplicateSession(AuricError):
    """Session id already present in the store."""


class NotFound(AuricError):
    """Requested session or capture does not exist."""


class IoFailure(AuricError):
    """Underlying filesystem operation failed."""


# --- scenario harness -----------------------------------------------------

class UnknownScenario(AuricError):
    """No builtin scenario with that name."""
