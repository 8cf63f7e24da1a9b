"""Numerical laboratory for localization of quasiperiodic Schroedinger operators
with monotone (anti-Lipschitz) potentials."""

from __future__ import annotations

__version__ = "0.1.0"
