"""Combinatorial and numerical toolkit for torus fibrations of quintic threefolds and their mirrors."""

__version__ = "0.1.0"
