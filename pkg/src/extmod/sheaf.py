"""Hom/Ext dimension calculus for line bundles and extension-bundle data.

Line bundles are identified with their determinants.  An extension datum
``(base, x)`` stands for the non-split middle term of
``0 -> L(vw) -> E -> L(x) -> 0`` with ``det L = base``; a cokernel datum
``(y, I, b, mu)`` stands for the cokernel of the stacked monomial map
``O(y) -> sum_{i in I} O(y + b_i x_i)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import IndexNotInI, NotExtensionDatum, NotPositive, SpecMismatch
from .grading import (GroupElement, WeightSpec, generator, graded_dim, interval,
                      is_effective, leq, structure_elements, zero)
from .linalg import to_field

DEFAULT_MU = (Fraction(1), Fraction(1), Fraction(-1))


@dataclass(frozen=True)
class LineBundle:
    det: GroupElement


def _same_spec(x: GroupElement, y: GroupElement) -> None:
    if x.spec != y.spec:
        raise SpecMismatch("elements belong to different grading groups")


def hom_dim(x: GroupElement, y: GroupElement) -> int:
    """dim Hom(O(x), O(y)) = dim S_{y-x}."""
    _same_spec(x, y)
    return graded_dim(y - x)


def ext_dim(x: GroupElement, y: GroupElement) -> int:
    """dim Ext^1(O(x), O(y)) = dim S_{x+vw-y} by Serre duality."""
    _same_spec(x, y)
    _, vw, _ = structure_elements(x.spec)
    return graded_dim(x + vw - y)


def is_positive_module(L: LineBundle | GroupElement) -> bool:
    """Whether the module attached to the line bundle lies in mod+ (det effective)."""
    det = L.det if isinstance(L, LineBundle) else L
    return is_effective(det)


@dataclass(frozen=True)
class ExtensionDatum:
    """Pair (det L, x); ``I`` and ``l`` are read off x's normal form.

    Construction does not validate; use ``validate_extension_datum``.
    """

    base: GroupElement
    x: GroupElement

    @property
    def spec(self) -> WeightSpec:
        return self.base.spec

    @property
    def l(self) -> tuple[int, ...]:
        return self.x.coeffs

    @property
    def I(self) -> tuple[int, ...]:
        return tuple(i for i, (li, pi) in enumerate(zip(self.x.coeffs, self.spec.p), start=1)
                     if li <= pi - 2)

    def __str__(self):
        return f"(base {self.base}, x {self.x})"


@dataclass(frozen=True)
class CokernelDatum:
    y: GroupElement
    I: tuple[int, ...]
    b: tuple[int, ...]
    mu: tuple[Fraction, ...] = field(default=DEFAULT_MU)

    def __post_init__(self):
        object.__setattr__(self, "I", tuple(int(i) for i in self.I))
        object.__setattr__(self, "b", tuple(int(v) for v in self.b))
        object.__setattr__(self, "mu", tuple(to_field(m) for m in self.mu))
        spec = self.y.spec
        if len(self.I) != len(self.b) or len(self.I) != len(self.mu):
            raise ValueError("I, b and mu must have equal length")
        if list(self.I) != sorted(set(self.I)):
            raise ValueError(f"arm indices {self.I} must be strictly ascending")
        if any(not 1 <= i <= spec.t for i in self.I):
            raise ValueError(f"arm indices {self.I} out of range 1..{spec.t}")
        if any(m == 0 for m in self.mu):
            raise ValueError("scalars mu must be nonzero")

    @property
    def spec(self) -> WeightSpec:
        return self.y.spec

    def power(self, i: int) -> int:
        return self.b[self.I.index(i)]

    def targets(self) -> list[GroupElement]:
        return [self.y + bi * generator(self.spec, i) for i, bi in zip(self.I, self.b)]

    def powers_in_range(self) -> bool:
        return all(1 <= bi <= self.spec.p[i - 1] - 1 for i, bi in zip(self.I, self.b))

    def with_mu(self, mu: Sequence) -> "CokernelDatum":
        return CokernelDatum(self.y, self.I, self.b, tuple(mu))

    def __str__(self):
        return (f"(y {self.y}, I {','.join(map(str, self.I))}, b {','.join(map(str, self.b))}, "
                f"mu {','.join(str(m) for m in self.mu)})")


def validate_extension_datum(base: GroupElement, x: GroupElement) -> ExtensionDatum:
    _same_spec(base, x)
    spec = x.spec
    _, _, vdom = structure_elements(spec)
    if x.a != 0:
        raise NotExtensionDatum(f"x = {x} has vc-coefficient {x.a}, expected 0")
    if not (leq(zero(spec), x) and leq(x, vdom)):
        raise NotExtensionDatum(f"x = {x} is not between 0 and vdom = {vdom}")
    maximal = sum(1 for li, pi in zip(x.coeffs, spec.p) if li == pi - 1)
    if maximal != spec.t - 3:
        raise NotExtensionDatum(
            f"x = {x} has {maximal} coefficients equal to p_i - 1, expected {spec.t - 3}")
    return ExtensionDatum(base, x)


def _validated(d: ExtensionDatum) -> ExtensionDatum:
    return validate_extension_datum(d.base, d.x)


def check_exceptional_pair(d: ExtensionDatum) -> bool:
    """(L(x), L(vw)) orthogonal exceptional with Ext(L(x), L(vw)) = k, twisted by base."""
    _, vw, _ = structure_elements(d.spec)
    lx, lw = d.base + d.x, d.base + vw
    return (hom_dim(lx, lw) == 0 and hom_dim(lw, lx) == 0
            and ext_dim(lx, lw) == 1 and ext_dim(lw, lx) == 0)


def projective_cover_summands(d: ExtensionDatum) -> list[GroupElement]:
    d = _validated(d)
    _, vw, _ = structure_elements(d.spec)
    out = [d.base + vw]
    for j in d.I:
        out.append(d.base + d.x - (1 + d.l[j - 1]) * generator(d.spec, j))
    return out


def injective_hull_summands(d: ExtensionDatum) -> list[GroupElement]:
    d = _validated(d)
    _, vw, _ = structure_elements(d.spec)
    out = [d.base + d.x]
    for j in d.I:
        out.append(d.base + (1 + d.l[j - 1]) * generator(d.spec, j) + vw)
    return out


def reattachment(d: ExtensionDatum, i: int) -> ExtensionDatum:
    """The same extension bundle presented through the cover summand at arm i."""
    if i not in d.I:
        raise IndexNotInI(f"arm {i} is not in I = {d.I}")
    _, vw, _ = structure_elements(d.spec)
    step = (1 + d.l[i - 1]) * generator(d.spec, i)
    new = ExtensionDatum(d.base + d.x - step - vw, vw + vw + step + step - d.x)
    return _validated(new)


def datum_to_cokernel(d: ExtensionDatum) -> CokernelDatum:
    d = _validated(d)
    vc, _, _ = structure_elements(d.spec)
    b = tuple(d.spec.p[i - 1] - d.l[i - 1] - 1 for i in d.I)
    return CokernelDatum(d.base + d.x - vc, d.I, b)


def cokernel_to_datum(c: CokernelDatum, i0: int) -> ExtensionDatum:
    if i0 not in c.I:
        raise IndexNotInI(f"arm {i0} is not in I = {c.I}")
    if len(c.I) != 3 or not c.powers_in_range():
        raise NotExtensionDatum(f"{c} does not have three arms with 0 < b_i < p_i")
    spec = c.spec
    _, vw, _ = structure_elements(spec)
    shift = c.power(i0) * generator(spec, i0)
    x = vw - shift - shift
    for i, bi in zip(c.I, c.b):
        x = x + bi * generator(spec, i)
    return validate_extension_datum(c.y + shift - vw, x)


def positive_presentation(d: ExtensionDatum) -> tuple[CokernelDatum, str]:
    """First candidate presentation whose source determinant is effective.

    Candidates: the datum itself (source det x - vc), then the reattachment
    at each i in I in ascending order.  The target determinants of the
    accepted candidate are re-checked.
    """
    d = _validated(d)
    candidates = [("x-vc", d)] + [(f"reattach@{i}", reattachment(d, i)) for i in d.I]
    for label, cand in candidates:
        c = datum_to_cokernel(cand)
        if is_effective(c.y):
            bad = [str(t) for t in c.targets() if not is_effective(t)]
            if bad:
                raise NotPositive(f"candidate {label} has ineffective targets {bad}")
            return c, label
    raise NotPositive(f"no presentation of {d} has an effective source determinant")


def euler_characteristic(spec: WeightSpec) -> tuple[Fraction, str]:
    chi = Fraction(2 - spec.t) + sum(Fraction(1, pi) for pi in spec.p)
    label = "domestic" if chi > 0 else "tubular" if chi == 0 else "wild"
    return chi, label


def extension_data(spec: WeightSpec, base: GroupElement | None = None) -> list[ExtensionDatum]:
    """All valid extension data with the given base (default 0)."""
    base = zero(spec) if base is None else base
    _, _, vdom = structure_elements(spec)
    out = []
    for x in interval(zero(spec), vdom):
        try:
            out.append(validate_extension_datum(base, x))
        except NotExtensionDatum:
            pass
    return out
