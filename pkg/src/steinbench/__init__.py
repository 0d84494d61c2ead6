"""Workbench for Steinberg algebras over semifields."""

__version__ = "0.1.0"
