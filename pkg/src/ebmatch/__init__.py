"""Simulation and verification toolkit for bipartite matching models
with arrival compatibilities."""

__version__ = "0.1.0"
