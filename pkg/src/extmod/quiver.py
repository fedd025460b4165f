"""The canonical quiver, its representations and their homological invariants.

Conventions.  Vertices are the elements ``0 <= v <= vc``: ``"0"``, ``"j@i"``
for ``j*x_i`` and ``"c"`` for ``vc``.  The arrow ``a{j}@{i}`` goes from
``(j-1)x_i`` to ``j x_i``; a representation stores for it the matrix of
``M_j -> M_i``, of shape ``dims(from) x dims(to)``.  The arm composite
``C_i = M_{a1@i} ... M_{ap@i}`` maps ``M_c`` to ``M_0`` and the canonical
relations read ``C_i = C_1 + lambda_i C_2`` for ``i >= 3``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache, reduce
from itertools import product
from typing import Iterable, Mapping, Sequence

from .errors import LengthMismatch, MalformedRepresentation, SpecMismatch
from .grading import GroupElement, WeightSpec, generator, make_element, zero
from .linalg import ONE, ZERO, Echelon, Matrix, to_field

log = logging.getLogger(__name__)

ISO_SEARCH_LIMIT = 100


@dataclass(frozen=True)
class Arrow:
    id: str
    source: str
    target: str
    arm: int
    step: int


class CanonicalQuiver:
    """Star-shaped quiver with t arms of lengths p_1, ..., p_t."""

    def __init__(self, spec: WeightSpec):
        self.spec = spec
        verts = ["0"]
        elems = {"0": zero(spec)}
        for i, pi in enumerate(spec.p, start=1):
            for j in range(1, pi):
                vid = f"{j}@{i}"
                verts.append(vid)
                elems[vid] = j * generator(spec, i)
        verts.append("c")
        elems["c"] = make_element(spec, 1, [0] * spec.t)
        self.vertices: tuple[str, ...] = tuple(verts)
        self.elements: dict[str, GroupElement] = elems
        self.index = {v: k for k, v in enumerate(verts)}

        arrows = []
        arms: dict[int, tuple[Arrow, ...]] = {}
        for i, pi in enumerate(spec.p, start=1):
            arm = []
            for j in range(1, pi + 1):
                src = "0" if j == 1 else f"{j - 1}@{i}"
                dst = "c" if j == pi else f"{j}@{i}"
                arm.append(Arrow(f"a{j}@{i}", src, dst, i, j))
            arms[i] = tuple(arm)
            arrows.extend(arm)
        self.arrows: tuple[Arrow, ...] = tuple(arrows)
        self.arms = arms
        self.arrow_by_id = {a.id: a for a in arrows}

    def __eq__(self, other):
        return isinstance(other, CanonicalQuiver) and other.spec == self.spec

    def __hash__(self):
        return hash(self.spec)

    @property
    def relation_count(self) -> int:
        return self.spec.t - 2

    def vertex_on_arm(self, i: int, j: int) -> str:
        """Vertex j*x_i, with 0 and p_i*x_i = vc at the ends."""
        if j == 0:
            return "0"
        if j == self.spec.p[i - 1]:
            return "c"
        return f"{j}@{i}"

    def arrow(self, i: int, j: int) -> Arrow:
        return self.arms[i][j - 1]


@lru_cache(maxsize=None)
def build_quiver(spec: WeightSpec) -> CanonicalQuiver:
    return CanonicalQuiver(spec)


class Representation:
    """Dimension per vertex and one exact matrix per arrow."""

    __slots__ = ("quiver", "dims", "mats")

    def __init__(self, quiver: CanonicalQuiver, dims: Mapping[str, int], mats: Mapping[str, Matrix]):
        self.quiver = quiver
        missing = set(quiver.vertices) - set(dims)
        if missing:
            raise MalformedRepresentation(f"no dimension for vertices {sorted(missing)}")
        self.dims = {v: int(dims[v]) for v in quiver.vertices}
        if any(d < 0 for d in self.dims.values()):
            raise MalformedRepresentation("negative dimension")
        out = {}
        for a in quiver.arrows:
            m = mats.get(a.id)
            want = (self.dims[a.source], self.dims[a.target])
            if m is None:
                m = Matrix.zeros(*want)
            if m.shape != want:
                raise MalformedRepresentation(
                    f"arrow {a.id}: matrix has shape {m.shape}, expected {want}")
            out[a.id] = m
        self.mats = out

    @property
    def spec(self) -> WeightSpec:
        return self.quiver.spec

    def dim_vector(self) -> tuple[int, ...]:
        return tuple(self.dims[v] for v in self.quiver.vertices)

    def composite(self, arm: int) -> Matrix:
        return reduce(lambda acc, a: acc @ self.mats[a.id], self.quiver.arms[arm][1:],
                      self.mats[self.quiver.arms[arm][0].id])

    def __eq__(self, other):
        return (isinstance(other, Representation) and other.quiver == self.quiver
                and other.dims == self.dims and other.mats == self.mats)

    def __repr__(self):
        return f"Representation({self.spec}, dims={self.dim_vector()})"


@dataclass(frozen=True)
class Morphism:
    source: Representation
    target: Representation
    maps: Mapping[str, Matrix]

    def __post_init__(self):
        if self.source.quiver != self.target.quiver:
            raise SpecMismatch("morphism between representations of different quivers")
        for v in self.source.quiver.vertices:
            want = (self.target.dims[v], self.source.dims[v])
            if self.maps[v].shape != want:
                raise ValueError(f"vertex {v}: map has shape {self.maps[v].shape}, expected {want}")

    def commutes(self) -> bool:
        for a in self.source.quiver.arrows:
            lhs = self.maps[a.source] @ self.source.mats[a.id]
            rhs = self.target.mats[a.id] @ self.maps[a.target]
            if lhs != rhs:
                return False
        return True

    def is_injective(self) -> bool:
        return all(m.is_injective() for m in self.maps.values())

    def is_invertible(self) -> bool:
        return all(m.is_invertible() for m in self.maps.values())

    def then(self, other: "Morphism") -> "Morphism":
        """The composite ``other o self``."""
        return Morphism(self.source, other.target,
                        {v: other.maps[v] @ self.maps[v] for v in self.source.quiver.vertices})

    def scaled(self, s) -> "Morphism":
        return Morphism(self.source, self.target, {v: s * m for v, m in self.maps.items()})

    def is_zero(self) -> bool:
        return all(m.is_zero() for m in self.maps.values())


def identity_morphism(rep: Representation) -> Morphism:
    return Morphism(rep, rep, {v: Matrix.identity(d) for v, d in rep.dims.items()})


def zero_representation(quiver: CanonicalQuiver) -> Representation:
    return Representation(quiver, {v: 0 for v in quiver.vertices}, {})


def direct_sum(reps: Sequence[Representation]) -> Representation:
    q = reps[0].quiver
    if any(r.quiver != q for r in reps):
        raise SpecMismatch("direct sum over different quivers")
    dims = {v: sum(r.dims[v] for r in reps) for v in q.vertices}
    mats = {a.id: Matrix.diag([r.mats[a.id] for r in reps]) for a in q.arrows}
    return Representation(q, dims, mats)


def stack_morphisms(source: Representation, maps: Sequence[Morphism],
                    target: Representation | None = None) -> Morphism:
    """Vertical stacking ``F -> G_1 + ... + G_k`` of morphisms out of a common source."""
    target = direct_sum([m.target for m in maps]) if target is None else target
    return Morphism(source, target,
                    {v: Matrix.vstack([m.maps[v] for m in maps]) for v in source.quiver.vertices})


def conjugate(rep: Representation, change: Mapping[str, Matrix]) -> Representation:
    """Transport ``rep`` along invertible vertex matrices ``P_v`` (new basis in old coordinates)."""
    inverses = {v: change[v].inverse() for v in rep.quiver.vertices}
    mats = {a.id: inverses[a.source] @ rep.mats[a.id] @ change[a.target] for a in rep.quiver.arrows}
    return Representation(rep.quiver, rep.dims, mats)


# validation and simple invariants


@dataclass(frozen=True)
class Validation:
    ok: bool
    message: str = ""

    def __bool__(self):
        return self.ok


def validate(rep: Representation) -> Validation:
    q = rep.quiver
    for a in q.arrows:
        want = (rep.dims[a.source], rep.dims[a.target])
        if rep.mats[a.id].shape != want:
            return Validation(False, f"arrow {a.id} has shape {rep.mats[a.id].shape}, expected {want}")
    c1, c2 = rep.composite(1), rep.composite(2)
    for i in range(3, q.spec.t + 1):
        lhs = rep.composite(i)
        rhs = c1 + q.spec.lam(i) * c2
        if lhs != rhs:
            return Validation(False, f"relation for arm {i} fails: C_{i} != C_1 + lambda_{i} C_2")
    return Validation(True, "ok")


def rank(rep: Representation) -> int:
    return rep.dims["0"] - rep.dims["c"]


def dim_vector(rep: Representation) -> tuple[int, ...]:
    return rep.dim_vector()


def entry_audit(rep: Representation, allowed: Iterable) -> bool:
    allowed = {to_field(x) for x in allowed}
    return all(x in allowed for m in rep.mats.values() for x in m.entries())


def euler_form(spec: WeightSpec, d: Sequence[int], e: Sequence[int]) -> int:
    """Homological Euler form on dimension vectors (quiver vertex order)."""
    q = build_quiver(spec)
    n = len(q.vertices)
    if len(d) != n or len(e) != n:
        raise LengthMismatch(f"dimension vectors must have length {n}")
    idx = q.index
    value = sum(x * y for x, y in zip(d, e))
    value -= sum(d[idx[a.target]] * e[idx[a.source]] for a in q.arrows)
    value += (spec.t - 2) * d[idx["c"]] * e[idx["0"]]
    return value


# Hom and Ext^1


def _check_pair(M: Representation, N: Representation) -> None:
    if M.quiver != N.quiver:
        raise SpecMismatch("representations of different quivers")


def _vertex_offsets(M: Representation, N: Representation) -> tuple[dict[str, int], int]:
    off, total = {}, 0
    for v in M.quiver.vertices:
        off[v] = total
        total += N.dims[v] * M.dims[v]
    return off, total


def _hom_equations(M: Representation, N: Representation) -> tuple[Echelon, int, dict[str, int]]:
    """Echelon form of the system ``f_src M_a - N_a f_dst = 0`` over all arrows.

    The unknown ``f_v[r, k]`` sits at column ``off[v] + r * dims_M(v) + k``.
    """
    off, total = _vertex_offsets(M, N)
    ech = Echelon()
    for a in M.quiver.arrows:
        i, j = a.source, a.target
        Ma, Na = M.mats[a.id], N.mats[a.id]
        di, dj = M.dims[i], M.dims[j]
        ei = N.dims[i]
        if ei == 0 or dj == 0:
            continue
        mcols = Ma.col_nonzeros()
        nrows = Na.row_nonzeros()
        oi, oj = off[i], off[j]
        for r in range(ei):
            base_i = oi + r * di
            nr = nrows[r]
            for c in range(dj):
                row: dict = {}
                for k, v in mcols[c]:
                    row[base_i + k] = v
                for k, v in nr:
                    col = oj + k * dj + c
                    row[col] = row.get(col, ZERO) - v
                ech.add_row(row)
    return ech, total, off


def hom_dim(M: Representation, N: Representation) -> int:
    _check_pair(M, N)
    ech, total, _ = _hom_equations(M, N)
    return total - ech.rank


def hom_basis(M: Representation, N: Representation) -> list[Morphism]:
    """Canonical basis of Hom(M, N), read off the reduced echelon form."""
    _check_pair(M, N)
    ech, total, off = _hom_equations(M, N)
    out = []
    for vec in ech.kernel_basis(total):
        maps = {}
        for v in M.quiver.vertices:
            d, e, o = M.dims[v], N.dims[v], off[v]
            maps[v] = Matrix(e, d, [vec[o + r * d: o + (r + 1) * d] for r in range(e)])
        out.append(Morphism(M, N, maps))
    return out


def _relation_rank(M: Representation, N: Representation) -> tuple[int, int]:
    """Rank of the product-rule differential on arrow families, and its domain size."""
    q = M.quiver
    spec = q.spec
    off, total = {}, 0
    for a in q.arrows:
        off[a.id] = total
        total += N.dims[a.source] * M.dims[a.target]
    e0, dc = N.dims["0"], M.dims["c"]
    if e0 == 0 or dc == 0:
        return 0, total

    # per arm: list of (arrow, prefix N-product, suffix M-product)
    def arm_terms(i: int):
        arrows = q.arms[i]
        terms = []
        prefix = Matrix.identity(e0)
        suffixes = [None] * len(arrows)
        acc = Matrix.identity(dc)
        for s in range(len(arrows) - 1, -1, -1):
            suffixes[s] = acc
            acc = M.mats[arrows[s].id] @ acc
        for s, a in enumerate(arrows):
            terms.append((a, prefix, suffixes[s]))
            prefix = prefix @ N.mats[a.id]
        return terms

    terms = {i: arm_terms(i) for i in range(1, spec.t + 1)}
    ech = Echelon()
    for i in range(3, spec.t + 1):
        coeffs = ((i, ONE), (1, -ONE), (2, -spec.lam(i)))
        rows = [[dict() for _ in range(dc)] for _ in range(e0)]
        for arm, coef in coeffs:
            for a, P, S in terms[arm]:
                width = M.dims[a.target]
                o = off[a.id]
                prow = P.row_nonzeros()
                scol = S.col_nonzeros()
                for r in range(e0):
                    for ka, pv in prow[r]:
                        base = o + ka * width
                        for c in range(dc):
                            target_row = rows[r][c]
                            for kb, sv in scol[c]:
                                col = base + kb
                                target_row[col] = target_row.get(col, ZERO) + coef * pv * sv
        for r in range(e0):
            for c in range(dc):
                ech.add_row(rows[r][c])
    return ech.rank, total


def ext1_dim(M: Representation, N: Representation) -> int:
    """dim Ext^1(M, N) = dim ker(d1) - rank(d0)."""
    _check_pair(M, N)
    ech, nvert, _ = _hom_equations(M, N)
    rank_d0 = ech.rank
    rank_d1, narrow = _relation_rank(M, N)
    return (narrow - rank_d1) - rank_d0


def hom_ext_dims(M: Representation, N: Representation) -> tuple[int, int]:
    _check_pair(M, N)
    ech, nvert, _ = _hom_equations(M, N)
    rank_d1, narrow = _relation_rank(M, N)
    return nvert - ech.rank, (narrow - rank_d1) - ech.rank


def is_exceptional(rep: Representation) -> bool:
    """End = k, Ext^1 = 0 and Euler form 1 (which then forces Ext^2 = 0)."""
    d = rep.dim_vector()
    if euler_form(rep.spec, d, d) != 1:
        return False
    hom, ext = hom_ext_dims(rep, rep)
    return hom == 1 and ext == 0


def isomorphism_status(M: Representation, N: Representation) -> str:
    """"yes", "no" or "unknown" (search exhausted without a decision)."""
    _check_pair(M, N)
    if M.dims != N.dims:
        return "no"
    if all(d == 0 for d in M.dims.values()):
        return "yes"
    basis = hom_basis(M, N)
    if not basis:
        return "no"
    for f in basis:
        if f.is_invertible():
            return "yes"
    if len(basis) == 1:
        # every morphism is a multiple of the single basis element
        return "no"
    tried = 0
    for coeffs in product(range(-2, 3), repeat=len(basis)):
        if sum(1 for c in coeffs if c) < 2:
            continue
        maps = {v: reduce(lambda acc, cf: acc + cf[0] * cf[1].maps[v],
                          zip(coeffs, basis), Matrix.zeros(N.dims[v], M.dims[v]))
                for v in M.quiver.vertices}
        if all(m.is_invertible() for m in maps.values()):
            return "yes"
        tried += 1
        if tried >= ISO_SEARCH_LIMIT:
            break
    return "unknown"


def are_isomorphic(M: Representation, N: Representation) -> bool:
    status = isomorphism_status(M, N)
    if status == "unknown":
        log.warning("isomorphism search inconclusive after %d combinations", ISO_SEARCH_LIMIT)
    return status == "yes"
