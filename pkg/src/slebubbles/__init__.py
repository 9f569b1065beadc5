"""Simulation and analysis of pairs of spectrally negative stable processes
and the bubble structure they encode."""

__version__ = "0.1.0"
