"""Collinear-tuple hypergraphs on integer grids and the extremal checks built on them."""

__version__ = "0.1.0"
