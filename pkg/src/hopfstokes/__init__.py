"""Validated enclosures of the Stokes constant of Hopf-zero inner equations."""

__version__ = "0.1.0"
