"""Validated integration of the real six-dimensional inner system."""

from ..state import StateBox
from .lohner import FlowConfig, SectionHit, integrate, poincare_minus, poincare_plus

__all__ = ["StateBox", "FlowConfig", "SectionHit", "integrate", "poincare_minus", "poincare_plus"]
