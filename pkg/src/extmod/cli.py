"""Command-line front end: ``extmod info | build | verify | sweep``.

Exit codes: 0 success, 1 a verification failed, 2 bad input.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import tempfile
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from pathlib import Path

from .builder import build, classify, predicted_dims, reduce_datum
from .errors import ExtmodError, MalformedRepresentation
from .grading import WeightSpec, box, parse_element, structure_elements
from .linalg import format_rational
from .quiver import (Representation, build_quiver, entry_audit, is_exceptional,
                     isomorphism_status, validate)
from .serialize import dumps, loads, to_latex
from .sheaf import DEFAULT_MU, CokernelDatum, euler_characteristic

log = logging.getLogger("extmod")

OK, FAILED, BAD_INPUT = 0, 1, 2


class InputError(Exception):
    pass


# checks shared by build, verify and sweep


@dataclass
class Check:
    name: str
    status: str  # pass | fail | skip | info
    detail: str = ""


def allowed_entries(spec: WeightSpec) -> set[Fraction]:
    vals = {Fraction(0), Fraction(1), Fraction(-1)}
    if spec.t > 3:
        vals |= {s * lam for lam in spec.lambdas for s in (1, -1)}
    return vals


def run_checks(rep: Representation, datum: CokernelDatum | None, method: str | None) -> list[Check]:
    checks = []
    v = validate(rep)
    checks.append(Check("relations", "pass" if v.ok else "fail", v.message))
    r = rep.dims["0"] - rep.dims["c"]
    if datum is None:
        checks.append(Check("rank", "info", str(r)))
        checks.append(Check("dimensions", "skip", "no datum recorded"))
    else:
        want = len(datum.I) - 1
        checks.append(Check("rank", "pass" if r == want else "fail", f"{r} (expected {want})"))
        ok = predicted_dims(datum) == rep.dims
        checks.append(Check("dimensions", "pass" if ok else "fail"))
    if v.ok:
        checks.append(Check("exceptional", "pass" if is_exceptional(rep) else "fail"))
    else:
        checks.append(Check("exceptional", "skip", "relations fail"))
    audit = entry_audit(rep, allowed_entries(rep.spec))
    if method == "cokernel":
        checks.append(Check("entries", "info", "within {0, ±1, ±λ}" if audit else "basis-dependent entries"))
    else:
        checks.append(Check("entries", "pass" if audit else "fail"))
    return checks


def checks_ok(checks: list[Check]) -> bool:
    return all(c.status != "fail" for c in checks)


def print_checks(checks: list[Check], out=None) -> None:
    out = sys.stdout if out is None else out
    for c in checks:
        line = f"  {c.name:<12} {c.status.upper():<5}"
        if c.detail:
            line += f" {c.detail}"
        print(line.rstrip(), file=out)


# argument parsing helpers


def _spec(args) -> WeightSpec:
    try:
        return WeightSpec.parse(args.weights, args.lambdas)
    except (ExtmodError, ValueError) as exc:
        raise InputError(f"invalid weights: {exc}") from exc


def _ints(text: str, what: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError as exc:
        raise InputError(f"invalid {what} {text!r}") from exc


def _datum(spec: WeightSpec, y: str, arms: str, powers: str, mu: str | None) -> CokernelDatum:
    try:
        elem = parse_element(spec, y)
        mus = DEFAULT_MU if mu is None else tuple(Fraction(x) for x in mu.split(","))
        c = CokernelDatum(elem, _ints(arms, "arms"), _ints(powers, "powers"), mus)
    except (ExtmodError, ValueError, ZeroDivisionError) as exc:
        raise InputError(str(exc)) from exc
    if len(c.I) != 3:
        raise InputError("exactly three arms are required")
    if not c.powers_in_range():
        raise InputError(f"powers {c.b} must satisfy 1 <= b_i <= p_i - 1 on arms {c.I}")
    if c.y.a < 0:
        raise InputError(f"source determinant {c.y} is not effective")
    return c


def _meta(c: CokernelDatum, method: str) -> dict:
    return {"y": str(c.y), "arms": list(c.I), "powers": list(c.b),
            "mu": [format_rational(m) for m in c.mu], "method": method, "case": classify(c)}


def _datum_from_meta(spec: WeightSpec, meta: dict) -> tuple[CokernelDatum, str]:
    try:
        c = CokernelDatum(parse_element(spec, meta["y"]), tuple(meta["arms"]), tuple(meta["powers"]),
                          tuple(Fraction(m) for m in meta["mu"]))
        return c, meta.get("method", "closed")
    except (KeyError, TypeError, ValueError, ExtmodError) as exc:
        raise MalformedRepresentation(f"bad datum record: {exc}") from exc


def _write_atomic(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-")
    with os.fdopen(fd, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


# commands


def cmd_info(args) -> int:
    spec = _spec(args)
    vc, vw, vdom = structure_elements(spec)
    chi, kind = euler_characteristic(spec)
    q = build_quiver(spec)
    print(f"t         {spec.t}")
    print(f"weights   {','.join(map(str, spec.p))}")
    print(f"lambdas   {','.join(format_rational(x) for x in spec.lambdas)}")
    print(f"vc        {vc}")
    print(f"vw        {vw}")
    print(f"vdom      {vdom}")
    print(f"chi       {format_rational(chi)}")
    print(f"type      {kind}")
    print(f"vertices  {len(q.vertices)}")
    print(f"arrows    {len(q.arrows)}")
    print(f"relations {q.relation_count}")
    return OK


def cmd_build(args) -> int:
    spec = _spec(args)
    c = _datum(spec, args.y, args.arms, args.powers, args.mu)
    trace: list = []
    rep = build(c, "closed", trace)
    if args.method == "cokernel":
        closed = rep
        rep = build(c, "cokernel")
    # keep stdout clean for the document when no output file is given
    say = sys.stdout if args.out else sys.stderr
    print(f"case      {classify(c)}", file=say)
    print("reduction " + " -> ".join(f"{lab} {d}" for lab, d in trace), file=say)
    print(f"dims      {','.join(map(str, rep.dim_vector()))}", file=say)
    print(f"rank      {rep.dims['0'] - rep.dims['c']}", file=say)
    checks = run_checks(rep, c, args.method)
    if args.method == "cokernel":
        agree = isomorphism_status(rep, closed) == "yes"
        checks.append(Check("methods", "pass" if agree else "fail",
                            "methods agree" if agree else "closed form is not isomorphic"))
    print_checks(checks, say)
    text = to_latex(rep) if args.format == "latex" else dumps(rep, _meta(c, args.method))
    if args.out:
        _write_atomic(Path(args.out), text)
    else:
        sys.stdout.write(text)
    return OK if checks_ok(checks) else FAILED


def cmd_verify(args) -> int:
    try:
        text = Path(args.path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {args.path}: {exc}") from exc
    rep, meta = loads(text)
    datum, method = (None, None) if meta is None else _datum_from_meta(rep.spec, meta)
    checks = run_checks(rep, datum, method)
    print_checks(checks)
    ok = checks_ok(checks)
    print("verdict   " + ("PASS" if ok else "FAIL"))
    return OK if ok else FAILED


def _enumerate(spec: WeightSpec, max_c: int, arms: tuple[int, ...] | None):
    triples = [arms] if arms else list(combinations(range(1, spec.t + 1), 3))
    for y in box(spec, 0, max_c):
        for I in triples:
            for b in product(*(range(1, spec.p[i - 1]) for i in I)):
                yield CokernelDatum(y, I, b)


def _file_stem(c: CokernelDatum) -> str:
    y = f"{c.y.a}_" + "-".join(map(str, c.y.coeffs))
    return f"y{y}__I{'-'.join(map(str, c.I))}__b{'-'.join(map(str, c.b))}"


def _sweep_one(job):
    c, out_dir = job
    label = classify(c)
    reduced = classify(reduce_datum(c))
    closed = build(c, "closed")
    checks = run_checks(closed, c, "closed")
    coker = build(c, "cokernel")
    agree = isomorphism_status(coker, closed) == "yes"
    checks.append(Check("methods", "pass" if agree else "fail"))
    _write_atomic(out_dir / label / f"{_file_stem(c)}.json", dumps(closed, _meta(c, "closed")))
    status = {ch.name: ch.status for ch in checks}
    return c, label, reduced, closed.dim_vector(), status, checks_ok(checks)


def cmd_sweep(args) -> int:
    spec = _spec(args)
    arms = None
    if args.arms:
        arms = _ints(args.arms, "arms")
        if len(arms) != 3 or list(arms) != sorted(set(arms)) or not all(1 <= i <= spec.t for i in arms):
            raise InputError(f"arms {arms} must be three ascending indices in 1..{spec.t}")
    out_dir = Path(args.out)
    jobs = [(c, out_dir) for c in _enumerate(spec, args.max_c, arms)]
    if args.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            results = list(pool.map(_sweep_one, jobs, chunksize=8))
    else:
        results = [_sweep_one(j) for j in jobs]
    hist = Counter()
    names = ["relations", "rank", "dimensions", "exceptional", "entries", "methods"]
    lines = ["\t".join(["y", "arms", "powers", "case", "reduced", "dims"] + names + ["status"])]
    first_bad = None
    for c, label, reduced, dims, status, ok in results:
        hist[label] += 1
        lines.append("\t".join([str(c.y), ",".join(map(str, c.I)), ",".join(map(str, c.b)), label,
                                reduced, ",".join(map(str, dims))]
                               + [status.get(n, "") for n in names] + ["ok" if ok else "FAIL"]))
        if not ok and first_bad is None:
            first_bad = c
    _write_atomic(out_dir / "summary.tsv", "\n".join(lines) + "\n")
    labels = ["A", "B1", "B2", "B3", "C1", "C2", "C3", "D"]
    _write_atomic(out_dir / "histogram.tsv",
                  "case\tcount\n" + "".join(f"{lab}\t{hist[lab]}\n" for lab in labels))
    print(f"data      {len(results)}")
    for lab in labels:
        print(f"  {lab:<3} {hist[lab]}")
    if first_bad is not None:
        print(f"first failure: {first_bad}")
        return FAILED
    print("all data pass")
    return OK


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="extmod", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    weights = argparse.ArgumentParser(add_help=False)
    weights.add_argument("--weights", required=True, help="comma-separated weights, e.g. 2,3,7")
    weights.add_argument("--lambdas", help="parameters lambda_3..lambda_t (default 1,2,...)")

    p = sub.add_parser("info", parents=[weights], help="grading group and quiver summary")
    p.set_defaults(func=cmd_info)

    p = sub.add_parser("build", parents=[weights], help="build one extension module")
    p.add_argument("--y", required=True, help='source determinant, e.g. "0;0,0,0"')
    p.add_argument("--arms", required=True, help="three ascending arm indices")
    p.add_argument("--powers", required=True, help="powers b_i, one per arm")
    p.add_argument("--mu", help="three nonzero scalars (default 1,1,-1)")
    p.add_argument("--method", choices=["closed", "cokernel"], default="closed")
    p.add_argument("--format", choices=["json", "latex"], default="json")
    p.add_argument("--out", help="output file (default stdout)")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("verify", help="check a representation JSON file")
    p.add_argument("path")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sweep", parents=[weights], help="build and verify every datum in a box")
    p.add_argument("--max-c", type=int, required=True, help="largest vc-coefficient of y")
    p.add_argument("--arms", help="restrict to one arm triple")
    p.add_argument("--out", default="sweep-out", help="output directory")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return BAD_INPUT if exc.code else OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (InputError, MalformedRepresentation) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
