"""Mapping module test package."""
