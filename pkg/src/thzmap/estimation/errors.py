from __future__ import annotations


class EstimationError(RuntimeError):
    """Raised when a response cannot be preprocessed or decomposed into paths."""
