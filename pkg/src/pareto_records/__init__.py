"""Simulation and analysis of kill counts for multivariate Pareto records."""

__version__ = "0.1.0"
