"""Estimation module test package."""
