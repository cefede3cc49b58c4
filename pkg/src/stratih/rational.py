"""Exact rationals: gmpy2's mpq when available (much faster), else Fraction."""

from __future__ import annotations

try:
    from gmpy2 import mpq as Rational
except ImportError:  # pragma: no cover
    from fractions import Fraction as Rational

__all__ = ["Rational"]
