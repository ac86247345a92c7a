"""Channel module test package."""
