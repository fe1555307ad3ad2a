"""Proofdoor laboratory: CNF tooling, CacheSAT, a locked-down CDCL engine,
resolution proof checking and interpolation, and circuit-miter generators."""

__version__ = "0.1.0"
