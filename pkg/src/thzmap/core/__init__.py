"""Core utilities."""

from thzmap.core.seed import SeedManager

__all__ = ["SeedManager"]
