"""Exception hierarchy.

Every error raised on purpose by the package derives from :class:`SymdynError`,
which lets the CLI map them onto exit status 2 in one place.
"""


class SymdynError(Exception):
    """Base class for all package errors."""


class ArgumentError(SymdynError, ValueError):
    """Bad arguments: out-of-range indices, mismatched lengths, ..."""


class ConstructionError(SymdynError, ValueError):
    """A model, graph or decomposition could not be built as requested."""


class ConsistencyError(SymdynError):
    """Two oracles that must agree disagreed."""


class ResourceError(SymdynError):
    """A configured depth or memory budget would be exceeded."""


class InsufficientDataError(SymdynError):
    """The question is undecidable from the finite data available (e.g. a z-prefix that is too short)."""


class ConfigError(SymdynError, ValueError):
    """Unparseable or out-of-bounds configuration."""
