"""Projected SGD laboratory with Goldstein-cone stationarity measures."""

__version__ = "0.1.0"
