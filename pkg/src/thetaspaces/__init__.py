"""Finite computations with Segal Theta_n-spaces and their precompletions."""

__version__ = "0.1.0"
