"""Unit test package."""
