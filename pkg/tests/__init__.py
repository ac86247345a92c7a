"""Test package markers."""
