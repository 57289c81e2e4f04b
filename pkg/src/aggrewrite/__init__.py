"""Rewrite explicit "at least b distinct objects" rules into #count aggregates."""

from .parser import parse, render
from .syntax import Program, Rule

__all__ = ["Program", "Rule", "parse", "render"]
__version__ = "0.1.0"
