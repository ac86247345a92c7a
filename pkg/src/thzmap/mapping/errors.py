from __future__ import annotations


class MappingError(RuntimeError):
    """Raised when a map cloud cannot be built or scored."""
