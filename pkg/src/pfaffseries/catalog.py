"""Named example systems used by the tests and the README."""

from __future__ import annotations

from .system import PfaffianSystem


def euler() -> PfaffianSystem:
    """``x^2 y' = y - x``: the divergent Euler series ``sum (k-1)! x^k``."""
    return PfaffianSystem.from_strings([2], [["y1 - x1"]])


def e2() -> PfaffianSystem:
    """Integrable Fuchsian pair; solutions ``u/(1-u)`` with ``u = lambda*x1*x2``."""
    return PfaffianSystem.from_strings([1, 1], [["y1 + y1^2"], ["y1 + y1^2"]])


def e3() -> PfaffianSystem:
    """Non-integrable Fuchsian pair with the formal solution ``x1``."""
    return PfaffianSystem.from_strings([1, 1], [["y1"], ["y1^2 - x1*y1"]])


def e5() -> PfaffianSystem:
    """Irregular pair with zero Jacobians; solutions ``-x1 - x2 + lambda*x1*x2``."""
    return PfaffianSystem.from_strings([2, 2], [["x1*y1 + x1*x2"], ["x2*y1 + x1*x2"]])


def resonant() -> PfaffianSystem:
    """``x y' = y + x``: resonance at degree one, no formal solution."""
    return PfaffianSystem.from_strings([1], [["y1 + x1"]])


CATALOG = {
    "euler": euler,
    "e2": e2,
    "e3": e3,
    "e5": e5,
    "resonant": resonant,
}
