"""The grading group L(p) of a weighted projective line.

Elements are kept in normal form ``a*vc + sum(a_i*x_i)`` with
``0 <= a_i < p_i``; the literal syntax is ``"a;a1,...,at"``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterator, Sequence

from .errors import InvalidWeights, LengthMismatch, SpecMismatch
from .linalg import format_rational, to_field


def default_lambdas(t: int) -> tuple[Fraction, ...]:
    """lambda_3 = 1 and lambda_i = i - 2 beyond it."""
    return tuple(Fraction(i - 2) for i in range(3, t + 1))


@dataclass(frozen=True)
class WeightSpec:
    """Weights p_1..p_t and parameters lambda_3..lambda_t."""

    p: tuple[int, ...]
    lambdas: tuple[Fraction, ...]

    def __post_init__(self):
        p = tuple(int(x) for x in self.p)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "lambdas", tuple(to_field(x) for x in self.lambdas))
        if len(p) < 3:
            raise InvalidWeights(f"need at least three weights, got {len(p)}")
        if any(x < 2 for x in p):
            raise InvalidWeights(f"weights must be >= 2, got {p}")
        if len(self.lambdas) != len(p) - 2:
            raise InvalidWeights(f"expected {len(p) - 2} parameters, got {len(self.lambdas)}")
        if any(x == 0 for x in self.lambdas):
            raise InvalidWeights("parameters must be nonzero")
        if len(set(self.lambdas)) != len(self.lambdas):
            raise InvalidWeights("parameters must be pairwise distinct")
        if self.lambdas[0] != 1:
            raise InvalidWeights("lambda_3 must equal 1")

    @classmethod
    def make(cls, p: Sequence[int], lambdas: Sequence | None = None) -> "WeightSpec":
        p = tuple(p)
        return cls(p, default_lambdas(len(p)) if lambdas is None else tuple(lambdas))

    @classmethod
    def parse(cls, weights: str, lambdas: str | None = None) -> "WeightSpec":
        try:
            p = [int(x) for x in weights.split(",") if x.strip()]
            lam = None if not lambdas else [Fraction(x.strip()) for x in lambdas.split(",")]
        except ValueError as exc:
            raise InvalidWeights(str(exc)) from exc
        return cls.make(p, lam)

    @property
    def t(self) -> int:
        return len(self.p)

    def lam(self, i: int) -> Fraction:
        """Parameter of arm i (1-based, i >= 3)."""
        return self.lambdas[i - 3]

    def __str__(self):
        lam = ",".join(format_rational(x) for x in self.lambdas)
        return f"p=({','.join(map(str, self.p))}) lambda=({lam})"


@dataclass(frozen=True, order=False)
class GroupElement:
    """Normal-form element ``a*vc + sum(coeffs[i]*x_{i+1})`` of L(p)."""

    spec: WeightSpec
    a: int
    coeffs: tuple[int, ...]

    def __post_init__(self):
        if len(self.coeffs) != self.spec.t:
            raise LengthMismatch(f"expected {self.spec.t} coefficients, got {len(self.coeffs)}")
        if any(not 0 <= c < p for c, p in zip(self.coeffs, self.spec.p)):
            raise ValueError(f"coefficients {self.coeffs} are not in normal form")

    def _check(self, other: "GroupElement") -> None:
        if not isinstance(other, GroupElement):
            raise TypeError(f"expected GroupElement, got {type(other).__name__}")
        if other.spec != self.spec:
            raise SpecMismatch("elements belong to different grading groups")

    def __add__(self, other: "GroupElement") -> "GroupElement":
        self._check(other)
        return make_element(self.spec, self.a + other.a,
                            [x + y for x, y in zip(self.coeffs, other.coeffs)])

    def __neg__(self) -> "GroupElement":
        return make_element(self.spec, -self.a, [-x for x in self.coeffs])

    def __sub__(self, other: "GroupElement") -> "GroupElement":
        self._check(other)
        return make_element(self.spec, self.a - other.a,
                            [x - y for x, y in zip(self.coeffs, other.coeffs)])

    def __mul__(self, k: int) -> "GroupElement":
        return make_element(self.spec, self.a * k, [x * k for x in self.coeffs])

    __rmul__ = __mul__

    def __str__(self):
        return f"{self.a};{','.join(map(str, self.coeffs))}"

    def __repr__(self):
        return f"<{self}>"

    @property
    def is_effective(self) -> bool:
        return self.a >= 0


def make_element(spec: WeightSpec, c: int, e: Sequence[int]) -> GroupElement:
    """Normal form of ``c*vc + sum(e_i*x_i)``."""
    if len(e) != spec.t:
        raise LengthMismatch(f"expected {spec.t} exponents, got {len(e)}")
    a = int(c)
    coeffs = []
    for ei, pi in zip(e, spec.p):
        q, r = divmod(int(ei), pi)
        a += q
        coeffs.append(r)
    return GroupElement(spec, a, tuple(coeffs))


def add(x: GroupElement, y: GroupElement) -> GroupElement:
    return x + y


def negate(x: GroupElement) -> GroupElement:
    return -x


def zero(spec: WeightSpec) -> GroupElement:
    return GroupElement(spec, 0, (0,) * spec.t)


def generator(spec: WeightSpec, i: int) -> GroupElement:
    """x_i for a 1-based arm index i."""
    if not 1 <= i <= spec.t:
        raise IndexError(f"arm index {i} out of range 1..{spec.t}")
    e = [0] * spec.t
    e[i - 1] = 1
    return make_element(spec, 0, e)


def is_effective(x: GroupElement) -> bool:
    return x.a >= 0


def leq(x: GroupElement, y: GroupElement) -> bool:
    return is_effective(y - x)


def structure_elements(spec: WeightSpec) -> tuple[GroupElement, GroupElement, GroupElement]:
    """The canonical, dualizing and dominant elements (vc, vw, vdom)."""
    t = spec.t
    vc = GroupElement(spec, 1, (0,) * t)
    vw = make_element(spec, t - 2, [-1] * t)
    vdom = make_element(spec, t - 3, [pi - 2 for pi in spec.p])
    assert vw + vw + vc == vdom
    return vc, vw, vdom


def graded_dim(z: GroupElement) -> int:
    """dim_k S_z: a + 1 for normal-form vc-coefficient a >= 0, else 0."""
    return z.a + 1 if z.a >= 0 else 0


def monomial_basis(z: GroupElement) -> set[tuple[int, ...]]:
    """Brute-force monomial basis of S_z.

    Tuples ``(e1, e2, c3, ..., ct)`` with ``e1, e2 >= 0`` and
    ``0 <= c_i < p_i`` whose degree is z.  Higher powers of x_i for i >= 3
    are rewritten through the defining relations of S, which is why only
    residues are enumerated there.
    """
    spec = z.spec
    p1, p2 = spec.p[0], spec.p[1]
    bound = max(z.a + 2, 1)
    found = set()
    ranges = [range(p1 * bound + 1), range(p2 * bound + 1)] + [range(pi) for pi in spec.p[2:]]
    for exps in product(*ranges):
        if make_element(spec, 0, exps) == z:
            found.add(exps)
    return found


def parse_element(spec: WeightSpec, text: str) -> GroupElement:
    """Read the literal ``"a;a1,...,at"``; the coefficients are normalized."""
    try:
        head, _, tail = text.strip().partition(";")
        a = int(head)
        e = [int(x) for x in tail.split(",")] if tail.strip() else []
    except ValueError as exc:
        raise ValueError(f"bad element literal {text!r}") from exc
    return make_element(spec, a, e)


def box(spec: WeightSpec, lo: int, hi: int) -> Iterator[GroupElement]:
    """All normal-form elements with vc-coefficient in [lo, hi]."""
    for a in range(lo, hi + 1):
        for coeffs in product(*(range(pi) for pi in spec.p)):
            yield GroupElement(spec, a, coeffs)


def interval(x: GroupElement, y: GroupElement) -> list[GroupElement]:
    """All z with x <= z <= y."""
    if not leq(x, y):
        return []
    return [x + d for d in box(x.spec, 0, (y - x).a) if leq(x + d, y)]
