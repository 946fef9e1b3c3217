"""Bayesian structure learning of Gaussian graphical models over forests and trees."""

__version__ = "0.1.0"

from .graph import LabeledGraph, is_forest, is_tree  # noqa: E402,F401
