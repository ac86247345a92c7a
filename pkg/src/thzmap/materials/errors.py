from __future__ import annotations


class MaterialError(ValueError):
    """Raised when material data cannot be read, matched or extracted."""


class DatabaseFormatError(MaterialError):
    def __init__(self, message: str, line_number: int | None = None) -> None:
        self.line_number = line_number
        prefix = f"line {line_number}: " if line_number is not None else ""
        super().__init__(f"{prefix}{message}")
