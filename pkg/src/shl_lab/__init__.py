"""Exact-arithmetic laboratory for spin Hall-Littlewood functions, their vertex models and ASEP formulas."""

__version__ = "0.1.0"
