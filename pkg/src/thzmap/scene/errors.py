"""Scene validation errors."""


class SceneError(ValueError):
    """Raised when a scene description violates geometric invariants."""
