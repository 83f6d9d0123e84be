"""Toolkit for generalised free field states: correlator combinatorics,
CCR algebra rewriting, wavefront-cone queries and smeared state models."""

__version__ = "0.1.0"
