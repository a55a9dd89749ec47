"""Command-line front end.

    hirzebruch-hms polytope --k 2 --out p.svg
    hirzebruch-hms hom --k 2 --a -7 --b 3
    hirzebruch-hms compose --k 2 --c 1
    hirzebruch-hms verify --k 3 --c 2 --tol 1e-8
    hirzebruch-hms flow --k 2 --a -7 --b 3 --i1 0 --i2 0 --out flow.svg
    hirzebruch-hms demo-nonminimal
"""

from __future__ import annotations

import argparse
import sys

from . import export
from .ainfinity import m1, trace_trajectory
from .errors import HMSError, M1Violation
from .geometry import HirzebruchModel
from .lagrangian import LagrangianLabel, MorphismIndex
from .morse import degree_of, hom_space, m2_failure, solve_components
from .svg import flow_svg, hom_svg, polytope_svg
from .verify import nonminimality_demo, verify_hms


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {value}")
    return value


def _positive_float(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {value}")
    return value


def _nonneg_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be nonnegative, got {value}")
    return value


def _fmt(x: float) -> str:
    return f"{x + 0.0:.10g}"


def _write(path, canvas, out):
    try:
        canvas.write(path)
    except OSError as exc:
        raise SystemExit(f"cannot write {path}: {exc.strerror or exc}") from exc
    print(f"wrote {path}", file=out)


def _model(args) -> HirzebruchModel:
    return HirzebruchModel(args.k, args.c1, args.c2)


def cmd_polytope(args, out) -> int:
    model = _model(args)
    poly = model.polytope
    if args.format == "structured":
        doc = export.category_export(model)
        doc["polytope"] = {"vertices": [list(map(float, v)) for v in poly.vertices]}
        out.write(export.dumps(doc))
    else:
        for name, v in zip(("V1", "V2", "V3", "V4"), poly.vertices):
            print(f"{name}  ({_fmt(v[0])}, {_fmt(v[1])})", file=out)
    if args.out:
        _write(args.out, polytope_svg(model), out)
    return 0


def _hom_rows(hom):
    rows = []
    for g in hom.generators:
        X = g.geometry.point
        rows.append((tuple(g.index), g.geometry.kind, X, g.geometry.stratum, str(g.degree), "ok"))
    for r in hom.rejected:
        X = r.geometry.point
        deg = "-" if r.degree is None else str(r.degree)
        rows.append((tuple(r.index), r.geometry.kind, X, r.geometry.stratum, deg, f"rejected: {r.reason}"))
    return sorted(rows, key=lambda row: (row[0][1], row[0][0], row[2][0]))


def cmd_hom(args, out) -> int:
    model = _model(args)
    hom = hom_space(model, (0, 0), (args.a, args.b), strict=False)
    if args.format == "structured":
        out.write(export.dumps(export.category_export(model, homs=[hom])))
    else:
        print(f"Mo(P)(L(0,0), L({args.a},{args.b}))  k={model.k}", file=out)
        print(f"{'index':>10}  {'kind':8} {'x1':>14} {'x2':>14}  {'stratum':9} deg  verdict", file=out)
        rows = _hom_rows(hom)
        for index, kind, X, stratum, deg, verdict in rows:
            print(
                f"{str(index):>10}  {kind:8} {_fmt(X[0]):>14} {_fmt(X[1]):>14}  "
                f"{stratum:9} {deg:>3}  {verdict}",
                file=out,
            )
        if not hom.generators:
            print("no admissible generators", file=out)
        print(f"degree counts: {hom.degree_counts()}", file=out)
    if args.out:
        _write(args.out, hom_svg(model, hom), out)
    return 0


def cmd_compose(args, out) -> int:
    model = _model(args)
    report = verify_hms(model, args.c, args.tol)
    if args.format == "structured":
        from .verify import ExceptionalCollection

        E = ExceptionalCollection(args.c).members
        rows = [export.m2_entry([E[n] for n in row.triple], row) for row in report.coefficients]
        out.write(export.dumps(export.category_export(model, m2_rows=rows)))
        return 0
    print(f"m2 on E_{args.c}, k={model.k}", file=out)
    print(f"{'triple':10} {'I':>8} {'J':>8} {'I+J':>8} {'m2':>20} {'product':>20} {'residual':>10}", file=out)
    for row in report.coefficients:
        print(
            f"{str(row.triple):10} {str(tuple(row.first)):>8} {str(tuple(row.second)):>8} "
            f"{str(tuple(row.target)):>8} {row.morse:>20.17g} {row.sheaf:>20.17g} {row.residual:>10.2e}",
            file=out,
        )
    return 0


def cmd_verify(args, out) -> int:
    model = _model(args)
    report = verify_hms(model, args.c, args.tol)
    if args.format == "structured":
        homs = [
            hom_space(model, r.source, r.target) for r in report.dimensions
        ]
        out.write(export.dumps(export.category_export(model, homs=homs, report=report)))
    else:
        print(f"k={model.k} c={args.c} tol={args.tol:g}", file=out)
        for row in report.dimensions:
            mark = "ok" if row.ok else "MISMATCH"
            print(
                f"  {str(tuple(row.source)):>8} -> {str(tuple(row.target)):<8} "
                f"morse {row.morse}  sheaf {row.sheaf}  {mark}",
                file=out,
            )
        print(f"  composition triples checked: {len(report.coefficients)}", file=out)
        print(f"  worst coefficient residual: {report.worst_residual:.3e}", file=out)
        print(f"  m1 vanishes: {all(report.m1_zero.values())}", file=out)
        print("PASS" if report.passed else "FAIL", file=out)
    if not report.passed:
        print(f"first failure: {report.failures()[0]}", file=sys.stderr)
        return 1
    return 0


def cmd_flow(args, out) -> int:
    model = _model(args)
    label = LagrangianLabel(args.a, args.b)
    index = MorphismIndex(args.i1, args.i2)
    comps = solve_components(model, label, index)
    degrees, trees = [], []
    for comp in comps:
        try:
            deg = degree_of(model, label, index, comp)
        except M1Violation:
            degrees.append(None)
            continue
        degrees.append(None if m2_failure(model, label, index, comp, deg) else deg)
    if comps and label != (0, 0):
        result = m1(model, (0, 0), label)
        trees = [t for t in result.trees if any(c.distance(t.starts[0]) < 1e-9 for c in comps)]
        for comp, deg in zip(comps, degrees):
            if deg == 0 and comp.kind == "point" and not trees:
                try:
                    trees.append(trace_trajectory(model, label, index, comp.point, (1.0, 0.0)))
                except HMSError:
                    pass
    if args.format == "table" or not args.out:
        for comp, deg in zip(comps, degrees):
            X = comp.point
            verdict = "rejected" if deg is None else f"degree {deg}"
            print(f"{comp.kind:8} ({_fmt(X[0])}, {_fmt(X[1])})  {verdict}", file=out)
        if not comps:
            print("no components for this index", file=out)
    if args.out:
        _write(args.out, flow_svg(model, label, index, comps, degrees, trees), out)
    return 0


def cmd_demo(args, out) -> int:
    model = _model(args)
    rep = nonminimality_demo(model)
    if args.format == "structured":
        hom = hom_space(model, (0, 0), (-7, 3))
        doc = export.category_export(model, homs=[hom], m1_results=[m1(model, (0, 0), (-7, 3))])
        doc["demo"] = {
            "components": [list(X) for X in rep.components],
            "verdicts": list(rep.verdicts),
            "coefficient": rep.coefficient,
            "expected": rep.expected_coefficient,
            "passed": rep.passed,
        }
        out.write(export.dumps(doc))
    else:
        print("Mo(P)(L(0,0), L(-7,3)) on k=2, index (0,0)", file=out)
        for X, e, v in zip(rep.components, rep.expected_x1, rep.verdicts):
            print(f"  x1 = {X[0]:.15f}  (expected {e:.15f})  {v}", file=out)
        print(f"  area       {rep.area:.15f}  (integrated {rep.integrated_area:.15f})", file=out)
        print(f"  m1 coeff   {rep.coefficient:.15f}  (closed form {rep.expected_coefficient:.15f})", file=out)
        print(f"  relative error {rep.relative_error:.2e}", file=out)
        print("PASS" if rep.passed else "FAIL", file=out)
    return 0 if rep.passed else 1


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--k", type=_positive_int, default=1, help="Hirzebruch index k >= 1")
    common.add_argument("--c1", type=_positive_float, default=1.0)
    common.add_argument("--c2", type=_positive_float, default=1.0)
    common.add_argument("--tol", type=_positive_float, default=1e-8)
    common.add_argument("--out", help="write a vector graphic to this path")
    common.add_argument("--format", choices=("table", "structured"), default="table")

    parser = argparse.ArgumentParser(
        prog="hirzebruch-hms",
        description="Weighted Morse homotopy on the moment polytope of a Hirzebruch surface.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("polytope", parents=[common], help="vertices and picture of P").set_defaults(
        func=cmd_polytope
    )
    p = sub.add_parser("hom", parents=[common], help="generators of Mo(P)(L(0,0), L(a,b))")
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--b", type=int, required=True)
    p.set_defaults(func=cmd_hom)
    p = sub.add_parser("compose", parents=[common], help="m2 against the product on E_c")
    p.add_argument("--c", type=_nonneg_int, default=0)
    p.set_defaults(func=cmd_compose)
    p = sub.add_parser("verify", parents=[common], help="full comparison on E_c")
    p.add_argument("--c", type=_nonneg_int, default=0)
    p.set_defaults(func=cmd_verify)
    p = sub.add_parser("flow", parents=[common], help="phase portrait of one gradient field")
    for name in ("a", "b", "i1", "i2"):
        p.add_argument(f"--{name}", type=int, required=name in ("a", "b"), default=0)
    p.set_defaults(func=cmd_flow)
    p = sub.add_parser("demo-nonminimal", parents=[common], help="the k=2, (-7,3) example")
    p.set_defaults(func=cmd_demo, k=2)
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except HMSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
