"""Builtin presentations used by the CLI and the test-suite."""

from __future__ import annotations

from .core import ConcentricPresentation, h7_family


def tc7() -> ConcentricPresentation:
    """Smallest tightly concentric shape: ``m = 7, d = 5`` with only
    ``eps_{5,0}`` set."""
    return ConcentricPresentation(7, 5, ((1, 0), (0, 0, 0)), name="tc7")


def c2m(m: int = 7) -> ConcentricPresentation:
    """Elementary abelian ``C_2^m`` (``d = m``, no relation rows)."""
    return ConcentricPresentation(m, m, (), name="c2m")


def d8(m: int = 7) -> ConcentricPresentation:
    """A ``d' = 1`` presentation (``d = m - 1``, only ``eps_{d,0}`` set)."""
    d = m - 1
    row = [0] * (3 * d - 2 * m + 1)
    row[0] = 1
    return ConcentricPresentation(m, d, (tuple(row),), name="d8")


BUILTINS = {
    "h7m9": lambda: h7_family(9),
    "h7m10": lambda: h7_family(10),
    "tc7": tc7,
    "c2m": c2m,
    "d8": d8,
}

#: builtins expected to certify; the others exercise the rejection path
CERTIFIABLE = ("tc7", "h7m9", "h7m10")


def builtin(name: str) -> ConcentricPresentation:
    try:
        return BUILTINS[name]()
    except KeyError:
        raise ValueError(f"unknown instance {name!r}; choose from {sorted(BUILTINS)}") from None
