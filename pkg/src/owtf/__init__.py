"""Operator windows and time-frequency analysis on the finite phase space Z_N x Z_N."""

__version__ = "0.1.0"
