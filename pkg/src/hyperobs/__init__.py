"""Observability analysis for polynomial dynamical systems on hypergraphs."""

__version__ = "0.1.0"
