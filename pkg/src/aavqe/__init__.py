"""Adiabatically assisted variational quantum eigensolver on a state-vector simulator."""

__version__ = "0.1.0"
