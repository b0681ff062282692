"""Evidentia: graphical models for legal evidence.

A small engine for three formalisms used to structure evidential reasoning
about a criminal case: discrete Bayesian networks (with an object-oriented
extension), chain event graphs, and Wigmore charts, plus a worked corpus of
models for the Meredith Kercher knife evidence.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .errors import EvidentiaError

__all__ = ["EvidentiaError", "__version__"]
