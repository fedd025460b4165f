"""Explicit modules over the canonical algebra: line bundles, monomial maps,
cokernels, case reduction and closed-form extension modules."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from fractions import Fraction

from .errors import (ConditionsFailed, InternalError, NotEffective, NotInjective,
                     PowerOutOfRange, WrongCase)
from .grading import GroupElement, WeightSpec, generator, graded_dim
from .linalg import ONE, ZERO, Echelon, Matrix, to_field
from .quiver import (Morphism, Representation, build_quiver, hom_basis, hom_dim,
                     ext1_dim, hom_ext_dims, is_exceptional, stack_morphisms)
from .sheaf import CokernelDatum


def X(m: int, n: int) -> Matrix:
    """Identity over zeros, m x n."""
    return Matrix(m, n, [[ONE if r == c else ZERO for c in range(n)] for r in range(m)])


def Y(m: int, n: int) -> Matrix:
    """Zeros over identity, m x n."""
    s = m - n
    return Matrix(m, n, [[ONE if r - s == c else ZERO for c in range(n)] for r in range(m)])


def Z(m: int, n: int, lam) -> Matrix:
    """Ones on the diagonal and ``lam`` on the subdiagonal, m x n."""
    lam = to_field(lam)
    return Matrix(m, n, [[ONE if r == c else lam if r == c + 1 else ZERO for c in range(n)]
                         for r in range(m)])


def jump(arm: int, m: int, n: int) -> Matrix:
    """The dimension drop on an arm: Y on the second arm, X elsewhere."""
    return Y(m, n) if arm == 2 else X(m, n)


def line_bundle_rep(spec: WeightSpec, y: GroupElement) -> Representation:
    if y.spec != spec:
        raise ValueError("element belongs to another grading group")
    if y.a < 0:
        raise NotEffective(f"determinant {y} is not effective")
    q = build_quiver(spec)
    n = y.a
    dims = {"0": n + 1, "c": n}
    for i, pi in enumerate(spec.p, start=1):
        for j in range(1, pi):
            dims[f"{j}@{i}"] = n + 1 if j <= y.coeffs[i - 1] else n
    mats = {}
    for i, pi in enumerate(spec.p, start=1):
        ai = y.coeffs[i - 1]
        for j in range(1, pi + 1):
            if j == ai + 1:
                m = jump(i, n + 1, n)
            else:
                size = n + 1 if j <= ai else n
                m = Matrix.identity(size)
            if j == 1 and i >= 3:
                m = Z(n + 1, n + 1, spec.lam(i)) @ m
            mats[f"a{j}@{i}"] = m
    return Representation(q, dims, mats)


# monomial maps between line-bundle modules


def _normalized(m: Morphism) -> Morphism:
    """Scale a nonzero morphism so that its first nonzero entry (vertex order, row-major) is 1."""
    for v in m.source.quiver.vertices:
        for x in m.maps[v].entries():
            if x:
                return m.scaled(1 / x)
    raise InternalError("zero morphism cannot be normalized")


def power_map(spec: WeightSpec, y: GroupElement, i: int, b: int, mu=1) -> Morphism:
    """Multiplication by ``x_i^b`` from ``line_bundle_rep(y)`` to ``line_bundle_rep(y + b x_i)``.

    Without a carry the components are identities with ``X`` (``Y`` on the
    second arm) on the window ``a_i + 1 .. a_i + b`` of arm i.  With a carry
    the Hom space is still one-dimensional and the map is its normalized
    generator.
    """
    if y.a < 0:
        raise NotEffective(f"determinant {y} is not effective")
    pi = spec.p[i - 1]
    if not 1 <= b <= pi - 1:
        raise PowerOutOfRange(f"power {b} not in 1..{pi - 1} on arm {i}")
    src = line_bundle_rep(spec, y)
    dst = line_bundle_rep(spec, y + b * generator(spec, i))
    n, ai = y.a, y.coeffs[i - 1]
    if ai + b < pi:
        maps = {}
        for v in src.quiver.vertices:
            maps[v] = Matrix.identity(src.dims[v])
        for j in range(ai + 1, ai + b + 1):
            maps[f"{j}@{i}"] = jump(i, n + 1, n)
        f = Morphism(src, dst, maps)
    else:
        basis = hom_basis(src, dst)
        if len(basis) != 1:
            raise InternalError(f"expected a one-dimensional Hom space, found {len(basis)}")
        f = _normalized(basis[0])
    mu = to_field(mu)
    return f if mu == 1 else f.scaled(mu)


def assemble_map(c: CokernelDatum) -> Morphism:
    """The stacked map ``O(y) -> sum_{i in I} O(y + b_i x_i)`` with scalars mu."""
    spec = c.spec
    if c.y.a < 0:
        raise NotEffective(f"source determinant {c.y} is not effective")
    parts = [power_map(spec, c.y, i, bi, m) for i, bi, m in zip(c.I, c.b, c.mu)]
    return stack_morphisms(parts[0].source, parts)


# cokernels


def reduction_maps(f: Matrix) -> tuple[Matrix, Matrix]:
    """Reduction map g onto coker f and a section s with g s = 1.

    Block patterns ``[T; -I]`` and ``[I; R]`` give ``[I | T]`` and ``[-R | I]``;
    otherwise the complement is spanned by the standard vectors outside the
    pivot positions of the column space, pivots taken rightmost first.
    """
    m, a = f.shape
    if a == 0:
        return Matrix.identity(m), Matrix.identity(m)
    k = m - a
    if m >= a and Matrix(a, a, f.rows[k:]) == -Matrix.identity(a):
        T = Matrix(k, a, f.rows[:k])
        return Matrix.hstack([Matrix.identity(k), T]), X(m, k)
    if m >= a and Matrix(a, a, f.rows[:a]) == Matrix.identity(a):
        R = Matrix(k, a, f.rows[a:])
        return Matrix.hstack([-R, Matrix.identity(k)]), Y(m, k)
    # columns of f as rows over reversed coordinates, so pivots land rightmost
    ech = Echelon()
    for col in f.transpose().rows:
        ech.add_row({m - 1 - r: v for r, v in enumerate(col) if v})
    if ech.rank != a:
        raise NotInjective("component is not injective")
    reduced = ech.rref()
    pivots = sorted(m - 1 - p for p in reduced)
    keep = [r for r in range(m) if r not in set(pivots)]
    pos = {r: idx for idx, r in enumerate(keep)}
    g = [[ZERO] * m for _ in range(k)]
    for r in keep:
        g[pos[r]][r] = ONE
    for p_rev, row in reduced.items():
        p = m - 1 - p_rev
        for c_rev, v in row.items():
            c = m - 1 - c_rev
            if c != p:
                g[pos[c]][p] = -v
    s = [[ONE if keep[col] == r else ZERO for col in range(k)] for r in range(m)]
    return Matrix(k, m, g), Matrix(m, k, s)


def cokernel(f: Morphism) -> tuple[Representation, Morphism]:
    """Cokernel E of an injective morphism and the projection g: G -> E."""
    G = f.target
    q = G.quiver
    red = {}
    for v in q.vertices:
        if not f.maps[v].is_injective():
            raise NotInjective(f"component at vertex {v} is not injective")
        red[v] = reduction_maps(f.maps[v])
    dims = {v: red[v][0].nrows for v in q.vertices}
    mats = {a.id: red[a.source][0] @ G.mats[a.id] @ red[a.target][1] for a in q.arrows}
    E = Representation(q, dims, mats)
    g = Morphism(G, E, {v: red[v][0] for v in q.vertices})
    return E, g


# case analysis


CASES = ("A", "B1", "B2", "B3", "C1", "C2", "C3", "D")


def _overflows(c: CokernelDatum) -> tuple[bool, ...]:
    return tuple(c.y.coeffs[i - 1] + bi >= c.spec.p[i - 1] for i, bi in zip(c.I, c.b))


def classify(c: CokernelDatum) -> str:
    if c.y.a < 0:
        raise NotEffective(f"source determinant {c.y} is not effective")
    if len(c.I) != 3:
        raise ValueError("case labels are defined for three arms")
    over = _overflows(c)
    count = sum(over)
    if count == 0:
        return "A"
    if count == 3:
        return "D"
    if count == 1:
        return f"B{over.index(True) + 1}"
    return f"C{over.index(False) + 1}"


# which arms flip b -> p - b, and whether z gains a vc
_TABLE = {
    "B1": ((True, False, True), 0, (0,)),
    "B2": ((False, True, True), 0, (1,)),
    "C1": ((False, True, True), 1, (1, 2)),
    "C2": ((True, False, True), 1, (0, 2)),
    "C3": ((True, True, False), 1, (0, 1)),
    "D": ((True, False, True), 1, (0, 2)),
}


def reduce_step(c: CokernelDatum) -> CokernelDatum:
    """One row of the reduction table (identity on A and B3)."""
    label = classify(c)
    if label in ("A", "B3"):
        return c
    flips, extra_vc, overflowed = _TABLE[label]
    spec = c.spec
    coeffs = list(c.y.coeffs)
    for k, i in enumerate(c.I):
        ai, bi, pi = coeffs[i - 1], c.b[k], spec.p[i - 1]
        if k in overflowed:
            coeffs[i - 1] = ai + bi - pi
        elif k == 2 and label in ("B1", "B2"):
            coeffs[i - 1] = ai + bi
    z = GroupElement(spec, c.y.a + extra_vc, tuple(coeffs))
    d = tuple(spec.p[i - 1] - bi if flip else bi for i, bi, flip in zip(c.I, c.b, flips))
    return CokernelDatum(z, c.I, d, c.mu)


def reduce_datum(c: CokernelDatum, trace: list | None = None) -> CokernelDatum:
    """Apply reduction steps until the label is A or B3."""
    for _ in range(3):
        label = classify(c)
        if trace is not None:
            trace.append((label, c))
        if label in ("A", "B3"):
            return c
        c = reduce_step(c)
    label = classify(c)
    if label not in ("A", "B3"):
        raise InternalError(f"reduction did not terminate at {c}")
    if trace is not None:
        trace.append((label, c))
    return c


# closed forms


def _assemble(spec: WeightSpec, dims: dict[str, int], jumps: dict[tuple[int, int], Matrix],
              twist: dict[int, Matrix]) -> Representation:
    """Fill a representation from its nonidentity arrows.

    ``jumps[(i, j)]`` is the matrix of arrow ``a{j}@{i}``; unlisted arrows are
    identities.  ``twist[i]`` multiplies the first arrow of arm i on the left.
    """
    q = build_quiver(spec)
    mats = {}
    for a in q.arrows:
        m = jumps.get((a.arm, a.step))
        if m is None:
            m = Matrix.identity(dims[a.target])
        if a.step == 1 and a.arm in twist:
            m = twist[a.arm] @ m
        mats[a.id] = m
    return Representation(q, dims, mats)


def _arm_dims(dims: dict, spec: WeightSpec, i: int, levels: list[tuple[int, int]], tail: int) -> None:
    """Set dims on arm i: ``levels`` lists (last step, dim) pairs in increasing order."""
    for j in range(1, spec.p[i - 1]):
        dims[f"{j}@{i}"] = next((d for last, d in levels if j <= last), tail)


def closed_form_A(c: CokernelDatum) -> Representation:
    """Explicit matrices for the cokernel in case A (no overflow)."""
    if classify(c) != "A":
        raise WrongCase(f"{c} is not in case A")
    spec, n = c.spec, c.y.a
    i1, i2, i3 = c.I
    a = c.y.coeffs
    I_ = Matrix.identity
    dims = {"0": 2 * n + 2, "c": 2 * n}
    jumps: dict[tuple[int, int], Matrix] = {}

    for i in range(1, spec.t + 1):
        ai = a[i - 1]
        if i in c.I:
            bi = c.power(i)
            _arm_dims(dims, spec, i, [(ai, 2 * n + 2), (ai + bi, 2 * n + 1)], 2 * n)
            if i == i3:
                enter = Matrix.block([[Matrix.zeros(n + 1, n), I_(n + 1)],
                                      [jump(i, n + 1, n), I_(n + 1)]])
                leave = Matrix.block([[-I_(n), I_(n)],
                                      [jump(i, n + 1, n), Matrix.zeros(n + 1, n)]])
            elif i == i1:
                enter = Matrix.diag([I_(n + 1), jump(i, n + 1, n)])
                leave = Matrix.diag([jump(i, n + 1, n), I_(n)])
            else:
                enter = Matrix.diag([jump(i, n + 1, n), I_(n + 1)])
                leave = Matrix.diag([I_(n), jump(i, n + 1, n)])
            jumps[(i, ai + 1)] = enter
            jumps[(i, ai + bi + 1)] = leave
        else:
            _arm_dims(dims, spec, i, [(ai, 2 * n + 2)], 2 * n)
            jumps[(i, ai + 1)] = Matrix.diag([jump(i, n + 1, n), jump(i, n + 1, n)])
    twist = {i: Matrix.diag([Z(n + 1, n + 1, spec.lam(i))] * 2) for i in range(3, spec.t + 1)}
    return _assemble(spec, dims, jumps, twist)


def closed_form_B3(c: CokernelDatum) -> Representation:
    """Explicit matrices for the cokernel in case B3 (overflow on the third arm only)."""
    if classify(c) != "B3":
        raise WrongCase(f"{c} is not in case B3")
    spec, n = c.spec, c.y.a
    i1, i2, i3 = c.I
    a = c.y.coeffs
    I_ = Matrix.identity
    lam3 = spec.lam(i3)
    cut = a[i3 - 1] + c.power(i3) - spec.p[i3 - 1]
    dims = {"0": 2 * n + 3, "c": 2 * n + 1}
    jumps: dict[tuple[int, int], Matrix] = {}

    for i in range(1, spec.t + 1):
        ai = a[i - 1]
        if i in (i1, i2):
            bi = c.power(i)
            _arm_dims(dims, spec, i, [(ai, 2 * n + 3), (ai + bi, 2 * n + 2)], 2 * n + 1)
            if i == i1:
                enter = Matrix.block([[-I_(n + 1), Matrix.zeros(n + 1, n + 1)],
                                      [Z(n + 2, n + 1, -lam3), jump(i, n + 2, n + 1)]])
                leave = Matrix.block([[-jump(i, n + 1, n), Matrix.zeros(n + 1, n + 1)],
                                      [Z(n + 1, n, -lam3), I_(n + 1)]])
            else:
                enter = Matrix.diag([I_(n + 1), jump(i, n + 2, n + 1)])
                leave = Matrix.diag([jump(i, n + 1, n), I_(n + 1)])
            jumps[(i, ai + 1)] = enter
            jumps[(i, ai + bi + 1)] = leave
        elif i == i3:
            _arm_dims(dims, spec, i, [(cut, 2 * n + 3), (ai, 2 * n + 2)], 2 * n + 1)
            jumps[(i, cut + 1)] = Matrix.diag([I_(n + 1), jump(i, n + 2, n + 1)])
            jumps[(i, ai + 1)] = Matrix.diag([jump(i, n + 1, n), I_(n + 1)])
        else:
            _arm_dims(dims, spec, i, [(ai, 2 * n + 3)], 2 * n + 1)
            jumps[(i, ai + 1)] = Matrix.diag([jump(i, n + 1, n), jump(i, n + 2, n + 1)])
    twist = {i: Matrix.diag([Z(n + 1, n + 1, spec.lam(i)), Z(n + 2, n + 2, spec.lam(i))])
             for i in range(3, spec.t + 1)}
    return _assemble(spec, dims, jumps, twist)


# orchestration


def predicted_dims(c: CokernelDatum) -> dict[str, int]:
    """Vertex dimensions of the cokernel from the line-bundle dimension counts."""
    q = build_quiver(c.spec)
    out = {}
    for v, elem in q.elements.items():
        total = sum(graded_dim(t - elem) for t in c.targets())
        out[v] = total - graded_dim(c.y - elem)
    return out


def _check_buildable(c: CokernelDatum) -> None:
    if c.y.a < 0:
        raise NotEffective(f"source determinant {c.y} is not effective")
    if not c.powers_in_range():
        raise PowerOutOfRange(f"powers {c.b} not in 1..p_i - 1")


def build(c: CokernelDatum, method: str = "closed", trace: list | None = None) -> Representation:
    """The extension module of a cokernel datum, by closed form or by the cokernel pipeline."""
    _check_buildable(c)
    if method == "cokernel":
        return cokernel(assemble_map(c))[0]
    if method != "closed":
        raise ValueError(f"unknown build method {method!r}")
    if len(c.I) != 3:
        raise ValueError("closed forms need exactly three arms")
    r = reduce_datum(c, trace)
    return closed_form_A(r) if classify(r) == "A" else closed_form_B3(r)


@dataclass(frozen=True)
class Conditions:
    C1: bool
    C2: bool
    C3: bool
    C4: bool

    def failed(self) -> list[str]:
        return [k for k, v in asdict(self).items() if not v]

    def __bool__(self):
        return not self.failed()


def _flatten(m: Morphism) -> dict[int, Fraction]:
    out, pos = {}, 0
    for v in m.source.quiver.vertices:
        for x in m.maps[v].entries():
            if x:
                out[pos] = x
            pos += 1
    return out


def verify_C_conditions(f: Morphism) -> Conditions:
    """The four conditions making coker f exceptional and independent of f."""
    F, G = f.source, f.target
    c1 = is_exceptional(F)
    hom_gf, ext_gf = hom_ext_dims(G, F)
    c2 = hom_gf == 0 and ext_gf == 0
    c3 = ext1_dim(G, G) == 0
    end_g = hom_basis(G, G)
    if len(end_g) != hom_dim(F, G):
        c4 = False
    else:
        ech = Echelon()
        c4 = all(ech.add_row(_flatten(f.then(phi))) for phi in end_g)
    return Conditions(c1, c2, c3, c4)


def higher_rank(spec: WeightSpec, y: GroupElement, J, b, mu=None) -> Representation:
    """Cokernel of ``O(y) -> sum_{j in J} O(y + b_j x_j)``, exceptional of rank |J| - 1."""
    J = tuple(J)
    if not 2 <= len(J) <= spec.t:
        raise ValueError(f"need 2 <= |J| <= {spec.t}")
    if mu is None:
        mu = (1,) * (len(J) - 1) + (-1,)
    c = CokernelDatum(y, J, tuple(b), tuple(mu))
    _check_buildable(c)
    f = assemble_map(c)
    cond = verify_C_conditions(f)
    if not cond:
        raise ConditionsFailed(cond.failed())
    E = cokernel(f)[0]
    if E.dims["0"] - E.dims["c"] != len(J) - 1 or not is_exceptional(E):
        raise InternalError(f"cokernel of {c} is not exceptional of rank {len(J) - 1}")
    return E
