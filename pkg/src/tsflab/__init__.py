"""Desk-scale laboratory for LLM-style time-series forecasting studies."""

__version__ = "0.1.0"
