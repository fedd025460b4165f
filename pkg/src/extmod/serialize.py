"""JSON and LaTeX export of representations.

The JSON document is canonical: fixed key order, vertices and arrows in
quiver order, rationals as reduced strings.  Reading it back yields an equal
``Representation``, so a written file re-serializes byte for byte.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any

from .errors import InvalidWeights, MalformedRepresentation
from .grading import WeightSpec
from .linalg import Matrix, format_rational
from .quiver import Representation, build_quiver


def to_document(rep: Representation, meta: dict[str, Any] | None = None) -> dict[str, Any]:
    q = rep.quiver
    doc: dict[str, Any] = {
        "weights": list(q.spec.p),
        "lambdas": [format_rational(x) for x in q.spec.lambdas],
        "vertices": list(q.vertices),
        "dims": {v: rep.dims[v] for v in q.vertices},
        "arrows": [{"id": a.id, "from": a.source, "to": a.target} for a in q.arrows],
        "matrices": {a.id: [[format_rational(x) for x in row] for row in rep.mats[a.id].rows]
                     for a in q.arrows},
    }
    if meta:
        doc["datum"] = meta
    return doc


def dumps(rep: Representation, meta: dict[str, Any] | None = None) -> str:
    return json.dumps(to_document(rep, meta), indent=1) + "\n"


def _fail(msg: str):
    raise MalformedRepresentation(msg)


def from_document(doc: Any) -> Representation:
    if not isinstance(doc, dict):
        _fail("top level must be an object")
    for key in ("weights", "lambdas", "vertices", "dims", "arrows", "matrices"):
        if key not in doc:
            _fail(f"missing field {key!r}")
    try:
        spec = WeightSpec.make(doc["weights"], [Fraction(x) for x in doc["lambdas"]])
    except (InvalidWeights, TypeError, ValueError) as exc:
        raise MalformedRepresentation(f"bad weights or parameters: {exc}") from exc
    q = build_quiver(spec)
    if list(doc["vertices"]) != list(q.vertices):
        _fail("vertex list does not match the weights")
    expected = [{"id": a.id, "from": a.source, "to": a.target} for a in q.arrows]
    if doc["arrows"] != expected:
        _fail("arrow list does not match the weights")
    dims = doc["dims"]
    if not isinstance(dims, dict) or set(dims) != set(q.vertices):
        _fail("dims must give one entry per vertex")
    if any(not isinstance(d, int) or isinstance(d, bool) or d < 0 for d in dims.values()):
        _fail("dims must be nonnegative integers")
    mats = {}
    for a in q.arrows:
        rows = doc["matrices"].get(a.id)
        m, n = dims[a.source], dims[a.target]
        if not isinstance(rows, list) or len(rows) != m or any(
                not isinstance(r, list) or len(r) != n for r in rows):
            _fail(f"matrix {a.id} does not have shape {m}x{n}")
        try:
            mats[a.id] = Matrix(m, n, [[Fraction(x) for x in r] for r in rows])
        except (TypeError, ValueError, ZeroDivisionError) as exc:
            raise MalformedRepresentation(f"bad entry in matrix {a.id}: {exc}") from exc
    return Representation(q, dims, mats)


def loads(text: str) -> tuple[Representation, dict[str, Any] | None]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedRepresentation(f"invalid JSON: {exc}") from exc
    rep = from_document(doc)
    return rep, doc.get("datum")


# LaTeX


def _latex_scalar(x: Fraction, spec: WeightSpec) -> str:
    for i in range(4, spec.t + 1):
        lam = spec.lam(i)
        if lam not in (1, -1):
            if x == lam:
                return rf"\lambda_{{{i}}}"
            if x == -lam:
                return rf"-\lambda_{{{i}}}"
    if x.denominator == 1:
        return str(x.numerator)
    sign = "-" if x < 0 else ""
    return rf"{sign}\frac{{{abs(x.numerator)}}}{{{x.denominator}}}"


def to_latex(rep: Representation) -> str:
    """One display per arrow; empty matrices are shown by their shape."""
    spec = rep.spec
    out = [f"% weights {','.join(map(str, spec.p))}; dimension vector "
           + ",".join(str(d) for d in rep.dim_vector())]
    for a in rep.quiver.arrows:
        m = rep.mats[a.id]
        name = rf"M_{{\alpha^{{({a.arm})}}_{{{a.step}}}}}"
        if m.nrows == 0 or m.ncols == 0:
            body = rf"0_{{{m.nrows}\times {m.ncols}}}"
        else:
            rows = [" & ".join(_latex_scalar(x, spec) for x in r) for r in m.rows]
            body = "\\begin{pmatrix}\n" + " \\\\\n".join(rows) + "\n\\end{pmatrix}"
        out.append(f"% {a.id}: {a.source} -> {a.target}\n\\[\n{name} = {body}\n\\]")
    return "\n".join(out) + "\n"
