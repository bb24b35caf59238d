"""Krylov-complexity and saddle-scrambling toolkit for LMG and Feingold-Peres spin models."""

__version__ = "0.1.0"
