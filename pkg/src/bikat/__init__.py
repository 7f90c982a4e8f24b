"""Relational verification workbench over Kleene algebra with tests."""

__version__ = "0.1.0"
