"""Shared model bases."""

from thzmap.models.base import DomainModel

__all__ = ["DomainModel"]
