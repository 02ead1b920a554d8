"""Canonical three-class instances used by the demos and the test suite."""

from __future__ import annotations

from .model import SystemParams


def well_separated_instance() -> SystemParams:
    """Three classes with strongly separated service rates (160, 14, 1.2).

    Load is about 0.911 and every adjacent rate ratio stays below 1 - rho,
    so weight comparisons on this instance can be fully certified.
    """
    return SystemParams(lam=[1.0, 1.0, 1.0], mu=[160.0, 14.0, 1.2])


def near_equal_instance() -> SystemParams:
    """Three classes with nearly equal service rates (3.5, 3.2, 3.1).

    Load is about 0.92 and both adjacent rate ratios exceed 1 - rho, so the
    separation condition fails; certification requires coalescing weights.
    """
    return SystemParams(lam=[1.0, 1.0, 1.0], mu=[3.5, 3.2, 3.1])
