"""Scene module test package."""
