"""Multigroup radiative transfer in a stratified atmosphere."""

__version__ = "0.1.0"
