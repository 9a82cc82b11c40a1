"""Divisor classes on compactifications of A_4, with exact rational coefficients.

A class is a + b D + e E written over the basis (L, D, E): L is the
Hodge (modular forms of weight one) bundle, D the boundary divisor of the
respective compactification and E the exceptional divisor of the Voronoi
compactification over the Igusa one.  E exists only on the Voronoi space.

* Partial and Igusa: Pic tensor Q = Q L + Q D.
* Voronoi: Pic tensor Q = Q L + Q D + Q E.
* Pullback along Voronoi -> Igusa: L -> L, D -> D + 4 E.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import SpaceMismatchError, ValidationError

PARTIAL = "partial"
IGUSA = "igusa"
VORONOI = "voronoi"
SPACES = (PARTIAL, IGUSA, VORONOI)


def _space(name: str) -> str:
    key = str(name).lower()
    if key not in SPACES:
        raise ValidationError(f"unknown space {name!r}; expected one of {SPACES}")
    return key


def _q(x) -> Fraction:
    if isinstance(x, float):
        raise ValidationError("coefficients must be exact (int, Fraction or str)")
    return Fraction(x)


@dataclass(frozen=True)
class DivisorClass:
    space: str
    L: Fraction = Fraction(0)
    D: Fraction = Fraction(0)
    E: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "space", _space(self.space))
        for name in ("L", "D", "E"):
            object.__setattr__(self, name, _q(getattr(self, name)))
        if self.space != VORONOI and self.E != 0:
            raise ValidationError("E is a basis element only on the Voronoi compactification")

    def coeffs(self):
        return (self.L, self.D, self.E)

    def _check(self, other):
        if not isinstance(other, DivisorClass):
            return NotImplemented
        if other.space != self.space:
            raise SpaceMismatchError(f"{self.space} vs {other.space}")
        return None

    def __add__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return DivisorClass(self.space, self.L + other.L, self.D + other.D, self.E + other.E)

    def __neg__(self):
        return DivisorClass(self.space, -self.L, -self.D, -self.E)

    def __sub__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rmul__(self, q):
        q = _q(q)
        return DivisorClass(self.space, q * self.L, q * self.D, q * self.E)

    def __eq__(self, other):
        if not isinstance(other, DivisorClass):
            return NotImplemented
        self._check(other)
        return self.coeffs() == other.coeffs()

    def __hash__(self):
        return hash((self.space,) + self.coeffs())

    def is_zero(self) -> bool:
        return not any(self.coeffs())

    def __str__(self):
        return format_class(self)


def add(a: DivisorClass, b: DivisorClass) -> DivisorClass:
    return a + b


def scale(q, a: DivisorClass) -> DivisorClass:
    return q * a


def equal(a: DivisorClass, b: DivisorClass) -> bool:
    return a == b


def L(space) -> DivisorClass:
    return DivisorClass(space, 1, 0, 0)


def D(space) -> DivisorClass:
    return DivisorClass(space, 0, 1, 0)


def E() -> DivisorClass:
    return DivisorClass(VORONOI, 0, 0, 1)


def pullback(a: DivisorClass) -> DivisorClass:
    """Pullback from the Igusa to the Voronoi compactification: L -> L, D -> D + 4E."""
    if a.space != IGUSA:
        raise SpaceMismatchError(f"pullback is defined on igusa classes, got {a.space}")
    return DivisorClass(VORONOI, a.L, a.D, 4 * a.D)


def class_of_schottky(space) -> DivisorClass:
    """Class of the closure of the Jacobian locus: 8L - D, and 8L - D - 4E on Voronoi."""
    space = _space(space)
    if space == VORONOI:
        return pullback(class_of_schottky(IGUSA))
    return DivisorClass(space, 8, -1, 0)


def boundary_class(space) -> DivisorClass:
    """Boundary part of div F: D, and D + 4E on Voronoi (the pullback of D)."""
    space = _space(space)
    if space == VORONOI:
        return pullback(D(IGUSA))
    return D(space)


def divisor_of_F(space) -> DivisorClass:
    """Class of the zero divisor of the weight-8 form F: [J] plus the boundary part."""
    return class_of_schottky(space) + boundary_class(space)


def _fmt(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def format_class(a: DivisorClass) -> str:
    """Canonical text form, e.g. '8L - D - 4E'; the zero class prints as '0'."""
    parts = []
    for coeff, sym in zip(a.coeffs(), ("L", "D", "E")):
        if coeff == 0:
            continue
        mag = abs(coeff)
        body = sym if mag == 1 else f"{_fmt(mag)}{sym}"
        if not parts:
            parts.append(body if coeff > 0 else f"-{body}")
        else:
            parts.append(("+ " if coeff > 0 else "- ") + body)
    return " ".join(parts) if parts else "0"
