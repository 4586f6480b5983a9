"""Simulation toolkit for exponential random graph models and their
first- and second-order approximations."""

__version__ = "0.1.0"
