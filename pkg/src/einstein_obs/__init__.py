"""Numerical verification of Hitchin-Thorpe-type inequalities on noncompact Einstein 4-manifolds."""
from __future__ import annotations

__version__ = "0.1.0"
