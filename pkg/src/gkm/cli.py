"""Command line surface.

Exit codes are part of the contract: 0 success, 2 axiom failure, 3
structural failure or malformed document, 4 budget exceeded.  Graph
documents read from a FILE argument or stdin ("-"); outputs go to -o or
stdout.  All outputs are byte-deterministic; timings go to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import constructions, faces as facemod, obstruction, serialize, verify
from .graph import validate

EXIT_OK = 0
EXIT_AXIOM = 2
EXIT_STRUCTURAL = 3
EXIT_BUDGET = 4


def _emit(data: str, path: str | None) -> None:
    if path and path != "-":
        serialize.write_bytes(path, data.encode())
    else:
        sys.stdout.write(data)


def _read_graph(path: str | None):
    if path and path != "-":
        return serialize.load_graph(path)
    try:
        doc = json.load(sys.stdin)
    except json.JSONDecodeError as exc:
        raise serialize.MalformedDocument(str(exc)) from exc
    return serialize.graph_from_document(doc)


def _graph_json(g) -> str:
    return serialize.canonical_bytes(serialize.graph_document(g)).decode() + "\n"


def _parse_face(g, poset, spec: str):
    if spec in (None, "top"):
        top = poset.top
        if top is None:
            raise ValueError("graph has no top face in the enumerated range")
        return top
    if spec.startswith("v:"):
        name = spec[2:]
        return poset.face_by_key((), vertex=g.names.index(name))
    darts = tuple(sorted(int(x) for x in spec.split(",")))
    return poset.face_by_key(darts)


def _poset_json(g, poset) -> str:
    doc = {
        "graph_hash": serialize.graph_hash(g),
        "max_dim": poset.max_dim,
        "f_vector": list(poset.f_vector),
        "faces": [
            {"dim": f.dim,
             "vertices": [g.names[v] for v in f.vertices],
             "darts": list(f.darts),
             "span": [list(row) for row in f.span]}
            for f in poset.faces
        ],
    }
    return serialize.canonical_bytes(doc).decode() + "\n"


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="gkm",
        description="Exact-arithmetic GKM graph toolkit: build, validate, "
                    "analyze faces, and emit obstruction certificates.")
    sub = ap.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", help="build a finite quotient graph")
    b.add_argument("--d", type=int, required=True)
    b.add_argument("--r", type=int, required=True)
    b.add_argument("--a", type=int, default=None,
                   help="quotient modulus (default 2^(r+1))")
    b.add_argument("--t", type=int, nargs="*", default=None,
                   help="parameters; searched automatically when omitted")
    b.add_argument("--strategy", choices=[constructions.PAPER_LITERAL,
                                          constructions.REGULARITY_SCALED],
                   default="")
    b.add_argument("--primitivize", dest="primitivize", action="store_true",
                   default=None)
    b.add_argument("--no-primitivize", dest="primitivize", action="store_false")
    b.add_argument("--bound", type=int, default=8,
                   help="max-norm bound for the parameter search")
    b.add_argument("-o", "--output", default=None)

    bi = sub.add_parser("builtin", help="emit a named example graph")
    bi.add_argument("name", help="cube(d), torus(d,a), or flag3")
    bi.add_argument("-o", "--output", default=None)

    v = sub.add_parser("validate", help="check the GKM axioms")
    v.add_argument("file", nargs="?", default=None)

    f = sub.add_parser("faces", help="enumerate faces and print the f-vector")
    f.add_argument("file", nargs="?", default=None)
    f.add_argument("--max-dim", type=int, default=None)
    f.add_argument("--budget", type=int, default=verify.DEFAULT_FACE_BUDGET)
    f.add_argument("-o", "--output", default=None, help="write the poset JSON")

    e = sub.add_parser("euler", help="Hall Euler characteristic below a face")
    e.add_argument("file", nargs="?", default=None)
    e.add_argument("--face", default=None, help="dart id list, v:NAME, or top")
    e.add_argument("--budget", type=int, default=verify.DEFAULT_FACE_BUDGET)

    h = sub.add_parser("homology",
                       help="reduced homology of the order complex below a face")
    h.add_argument("file", nargs="?", default=None)
    h.add_argument("--face", default=None)
    h.add_argument("--budget", type=int, default=verify.DEFAULT_FACE_BUDGET)
    h.add_argument("--simplex-budget", type=int,
                   default=verify.DEFAULT_SIMPLEX_BUDGET)
    h.add_argument("--facets", default=None,
                   help="also export the complex facet list to this file")

    c = sub.add_parser("chords", help="classify transversal darts of a face")
    c.add_argument("file", nargs="?", default=None)
    c.add_argument("--face", required=True)
    c.add_argument("--budget", type=int, default=verify.DEFAULT_FACE_BUDGET)

    x = sub.add_parser("extend-check",
                       help="search for a non-extendibility certificate")
    x.add_argument("file", nargs="?", default=None)
    x.add_argument("-o", "--output", default=None)

    vc = sub.add_parser("verify-certificate",
                        help="replay a serialized certificate against a graph")
    vc.add_argument("certificate")
    vc.add_argument("file")

    rc = sub.add_parser("realize-check",
                        help="Euler-characteristic realizability obstructions")
    rc.add_argument("file", nargs="?", default=None)
    rc.add_argument("--budget", type=int, default=verify.DEFAULT_FACE_BUDGET)

    vf = sub.add_parser("verify", help="run a verification harness")
    vf.add_argument("harness", choices=["lemma-face-counts", "lemma-euler",
                                        "lemma-projection", "main-theorem"])
    vf.add_argument("--d", type=int, required=True)
    vf.add_argument("--a", type=int, default=None)
    vf.add_argument("--r", type=int, default=None)
    vf.add_argument("--axes", default=None,
                    help="comma separated axis list for lemma-projection")
    vf.add_argument("--json", action="store_true")

    dot = sub.add_parser("export-dot", help="deterministic DOT export")
    dot.add_argument("file", nargs="?", default=None)
    dot.add_argument("-o", "--output", default=None)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _dispatch(args)
    except serialize.MalformedDocument as exc:
        print(f"malformed document: {exc}", file=sys.stderr)
        return EXIT_STRUCTURAL
    except facemod.BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except constructions.BuildError as exc:
        print(f"build failed: {exc}", file=sys.stderr)
        if exc.report is not None:
            for line in exc.report.lines():
                print(line, file=sys.stderr)
        return EXIT_AXIOM
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_STRUCTURAL


def _dispatch(args) -> int:
    cmd = args.command

    if cmd == "build":
        t = args.t
        if t is None and args.r >= 2:
            a = args.a if args.a is not None else 2 ** (args.r + 1)
            t = constructions.find_parameters(args.d, args.r, a,
                                              bound=args.bound,
                                              strategy=args.strategy)
            print(f"parameters: {list(t)}", file=sys.stderr)
        g = constructions.build_quotient(args.d, args.r, args.a, t=t,
                                         strategy=args.strategy,
                                         primitivize=args.primitivize)
        _emit(_graph_json(g), args.output)
        return EXIT_OK

    if cmd == "builtin":
        g = constructions.builtin(args.name)
        _emit(_graph_json(g), args.output)
        return EXIT_OK

    if cmd == "validate":
        g = _read_graph(args.file)
        report = validate(g)
        _emit("\n".join(report.lines()) + "\n", None)
        if not report.structurally_ok:
            return EXIT_STRUCTURAL
        return EXIT_OK if report.passed else EXIT_AXIOM

    if cmd == "faces":
        g = _read_graph(args.file)
        poset = facemod.enumerate_faces(g, max_dim=args.max_dim,
                                        budget=args.budget)
        lines = ["dim  count"]
        for q, count in enumerate(poset.f_vector):
            lines.append(f"{q:>3}  {count}")
        _emit("\n".join(lines) + "\n", None)
        if args.output:
            _emit(_poset_json(g, poset), args.output)
        return EXIT_OK

    if cmd == "euler":
        g = _read_graph(args.file)
        poset = facemod.enumerate_faces(g, budget=args.budget)
        face = _parse_face(g, poset, args.face)
        chi = facemod.hall_euler(poset, face)
        _emit(f"{chi}\n", None)
        return EXIT_OK

    if cmd == "homology":
        g = _read_graph(args.file)
        poset = facemod.enumerate_faces(g, budget=args.budget)
        face = _parse_face(g, poset, args.face)
        model = facemod.strict_subface_complex(poset, face,
                                               budget=args.simplex_budget)
        hom = facemod.reduced_homology(model)
        lines = ["deg  betti  torsion"]
        for p, (b, tor) in enumerate(hom):
            t = ",".join(map(str, tor)) if tor else "-"
            lines.append(f"{p:>3}  {b:>5}  {t}")
        _emit("\n".join(lines) + "\n", None)
        if args.facets:
            _emit("\n".join(model.facet_lines()) + "\n", args.facets)
        return EXIT_OK

    if cmd == "chords":
        g = _read_graph(args.file)
        poset = facemod.enumerate_faces(g, budget=args.budget)
        face = _parse_face(g, poset, args.face)
        rep = obstruction.chords(g, face)
        lines = [f"face dim {face.dim} with {len(face.vertices)} vertices",
                 f"chord edges: {rep.chord_edge_count}",
                 f"chord darts: {', '.join(g.dart_repr(e) for e in rep.chords) or '-'}",
                 f"non-chord transversal darts: {len(rep.non_chords)}"]
        _emit("\n".join(lines) + "\n", None)
        return EXIT_OK

    if cmd == "extend-check":
        g = _read_graph(args.file)
        search = obstruction.nonextendibility_certificate(g)
        if search.found:
            doc = search.certificate.to_document()
            _emit("certificate found: face dim %d, %d witnesses\n"
                  % (search.certificate.face.dim,
                     len(search.certificate.witnesses)), None)
            if args.output:
                _emit(serialize.canonical_bytes(doc).decode() + "\n",
                      args.output)
            return EXIT_OK
        _emit(f"no certificate: {search.reason}\n", None)
        return EXIT_OK

    if cmd == "verify-certificate":
        with open(args.certificate, "rb") as fh:
            try:
                doc = json.load(fh)
            except json.JSONDecodeError as exc:
                raise serialize.MalformedDocument(str(exc)) from exc
        g = serialize.load_graph(args.file)
        ok, issues = obstruction.verify_certificate(g, doc)
        if ok:
            _emit("certificate replays: ok\n", None)
            return EXIT_OK
        _emit("certificate replay failed:\n" +
              "\n".join(f"  {s}" for s in issues) + "\n", None)
        return EXIT_AXIOM

    if cmd == "realize-check":
        g = _read_graph(args.file)
        poset = facemod.enumerate_faces(g, budget=args.budget)
        checks = obstruction.realizability_check(g, poset)
        flagged = [o for o in checks if o.obstructed]
        lines = [f"eligible faces: {len(checks)}",
                 f"obstructed: {len(flagged)}"]
        for o in flagged:
            lines.append(f"  dim {o.dim} face ({len(o.face.vertices)} vertices): "
                         f"euler {o.euler}, required {o.required}")
        _emit("\n".join(lines) + "\n", None)
        return EXIT_OK

    if cmd == "verify":
        if args.harness == "lemma-face-counts":
            rep = verify.verify_face_counts(args.d, _need(args.a, "--a"))
        elif args.harness == "lemma-euler":
            rep = verify.verify_euler(args.d, _need(args.a, "--a"))
        elif args.harness == "lemma-projection":
            axes = tuple(int(x) for x in (args.axes or "1").split(","))
            rep = verify.verify_projection(args.d, _need(args.a, "--a"), axes)
        else:
            rep = verify.main_theorem_report(args.d, _need(args.r, "--r"))
        print(f"elapsed: {rep.seconds:.2f}s", file=sys.stderr)
        if args.json:
            _emit(serialize.canonical_bytes(rep.to_document()).decode() + "\n",
                  None)
        else:
            _emit("\n".join(rep.lines()) + "\n", None)
        return EXIT_OK if rep.passed else EXIT_AXIOM

    if cmd == "export-dot":
        g = _read_graph(args.file)
        _emit(serialize.export_dot(g), args.output)
        return EXIT_OK

    raise AssertionError(f"unhandled command {cmd}")


def _need(value, flag):
    if value is None:
        raise ValueError(f"{flag} is required for this harness")
    return value


if __name__ == "__main__":
    sys.exit(main())
