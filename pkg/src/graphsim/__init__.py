"""Composable measurement-based simulation of quantum circuits with Pauli frames."""

from __future__ import annotations

__version__ = "0.1.0"
