"""Materials module test package."""
