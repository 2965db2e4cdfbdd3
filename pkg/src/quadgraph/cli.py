"""Command-line interface.

Exit codes: 0 success, 1 verification failure or failed computation, 2 usage
or input error.  Reports are ``key: value`` lines in a stable order.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
import time
from collections.abc import Sequence
from fractions import Fraction
from pathlib import Path

import numpy as np

from quadgraph import catalog, curvature, cyclic, energy, frameworks, lifting, spectrum, universe
from quadgraph.graph import DEFAULT_TOL, Graph, GraphError, field_gammas, verify_state
from quadgraph.io import GraphDocument, ParseError, document_from, parse_graph, parse_real, serialize_graph

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class CommandFailed(Exception):
    pass


def _fmt(x) -> str:
    if x is None:
        return "undefined"
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    if isinstance(x, complex):
        x = complex(0.0 if abs(x.real) < 1e-12 else x.real, 0.0 if abs(x.imag) < 1e-12 else x.imag)
        return f"{x.real:.12g}{x.imag:+.12g}i"
    if isinstance(x, float):
        return f"{0.0 if abs(x) < 1e-12 else x:.12g}"
    return str(x)


def _load(path: str) -> GraphDocument:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return parse_graph(text)
    except (ParseError, GraphError) as exc:
        raise UsageError(f"{path}: {exc}") from None


def _need_field(doc: GraphDocument, path: str) -> dict[str, complex]:
    phi = doc.phi
    if phi is None:
        raise UsageError(f"{path}: no field lines")
    return phi


# -- commands --------------------------------------------------------------------------


def cmd_verify(args, out) -> int:
    doc = _load(args.file)
    phi = _need_field(doc, args.file)
    g = doc.graph
    read = field_gammas(g, phi, args.tol)
    gamma = doc.gamma_assignment()
    if gamma is None:
        print("gamma: read from field", file=out)
        gamma = {v: 0.0 if x is None else x for v, x in read.items()}
    else:
        print(f"gamma: {_fmt(doc.gamma) if doc.gamma is not None else 'per vertex'}", file=out)
    rep = verify_state(g, phi, gamma, args.tol)
    print(f"max_residual: {rep.max_residual:.3e}", file=out)
    for v in g.vertices:
        print(f"gamma_at {v}: {_fmt(read[v])}", file=out)
    values = [x for x in read.values() if x is not None]
    iso = values and all(abs(x - values[0]) <= args.tol * max(1.0, abs(values[0])) for x in values)
    if iso and doc.gamma is not None and abs(float(doc.gamma) - values[0]) <= args.tol * max(1.0, abs(values[0])):
        iso_value = _fmt(doc.gamma)  # the declared value, exact when written as a fraction
    else:
        iso_value = _fmt(values[0]) if iso else ""
    print(f"isostate: {'yes (gamma = ' + iso_value + ')' if iso else 'no'}", file=out)
    if rep.failing():
        print(f"failing: {' '.join(rep.failing())}", file=out)
    print(f"status: {'pass' if rep.passed else 'fail'}", file=out)
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_spectrum(args, out) -> int:
    doc = _load(args.file)
    g = doc.graph
    if not g.is_connected():
        raise UsageError("spectrum needs a connected graph")
    start = time.monotonic()
    budget = None if args.slow else args.budget

    def progress(ell, basis_size, pairs):
        if budget is not None and time.monotonic() - start > budget:
            raise CommandFailed(f"exceeded the {budget:g} s budget; rerun with --slow")

    gp = spectrum.gamma_polynomial(g, order=args.order, progress=progress)
    print(f"p(g) = {gp}", file=out)
    if gp.trivial:
        print("roots: none (empty spectrum)", file=out)
        return EXIT_OK
    if args.membership:
        parts = [f"{r} ({'member' if m else 'non-member'})" for r, m in spectrum.classify_roots(g, gp)]
    else:
        from quadgraph import univariate as up
        parts = [str(r) for r in up.real_roots(list(gp.coeffs))]
    print(f"roots: {', '.join(parts) if parts else 'no real roots'}", file=out)
    return EXIT_OK


def cmd_lift(args, out) -> int:
    doc = _load(args.file)
    phi = _need_field(doc, args.file)
    g = doc.graph
    gamma = args.gamma if args.gamma is not None else doc.gamma_assignment()
    if args.vertex not in g:
        raise UsageError(f"unknown vertex {args.vertex!r}")
    gx = lifting._gammas(g, phi, gamma)[args.vertex]
    if gx is None:
        raise CommandFailed(f"gamma undefined at {args.vertex!r}; pass --gamma")
    orient = None
    if args.dim == 3:
        orient = lifting.default_orientation(g)
        if args.sign is not None:
            orient = lifting.Orientation(orient.colours, {args.vertex: 1 if args.sign == "+" else -1})
    try:
        nbrs, w = lifting.lift_at(g, phi, args.vertex, gx, args.dim, orient)
        params = lifting.lift_params([phi[y] - phi[args.vertex] for y in nbrs], gx)
    except lifting.LiftError as exc:
        raise CommandFailed(str(exc)) from None
    print(f"vertex: {args.vertex}", file=out)
    print(f"gamma: {_fmt(gx)}", file=out)
    print(f"neighbours: {' '.join(nbrs)}", file=out)
    for i, row in enumerate(w):
        print(f"row {i + 1}: {' '.join(f'{x:.12g}' for x in row)}", file=out)
    print(f"residual: {lifting.lift_residual(w, params.rho, params.sigma):.3e}", file=out)
    return EXIT_OK


def cmd_curvature(args, out) -> int:
    doc = _load(args.file)
    phi = _need_field(doc, args.file)
    g = doc.graph
    gamma = doc.gamma_assignment()
    chk = universe.check_state(g, phi)
    total, ok = 0.0, True
    for v in g.vertices:
        gv = gamma if isinstance(gamma, float) else gamma.get(v) if isinstance(gamma, dict) else chk.gammas[v]
        try:
            if gv is None:
                raise curvature.CurvatureError("gamma undefined")
            k = curvature.vertex_curvature(gv, g.degree(v), args.dim)
            total += k
            print(f"curvature {v}: {k:.12g}", file=out)
        except curvature.CurvatureError as exc:
            ok = False
            print(f"curvature {v}: undefined ({exc})", file=out)
    print(f"total: {total:.12g}" if ok else "total: undefined", file=out)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_distance(args, out) -> int:
    doc = _load(args.file)
    phi = _need_field(doc, args.file)
    try:
        d = lifting.path_distance(doc.graph, phi, args.source, args.target, args.dim,
                                  doc.gamma_assignment(), args.absolute)
    except (ValueError, GraphError) as exc:
        raise CommandFailed(str(exc)) from None
    print(f"distance: {d:.12g}", file=out)
    return EXIT_OK


def cmd_energy(args, out) -> int:
    doc = _load(args.file)
    phi = _need_field(doc, args.file)
    g = doc.graph
    gamma = doc.gamma_assignment()
    total = 0.0
    try:
        for v in g.vertices:
            gv = gamma if isinstance(gamma, float) else gamma.get(v) if isinstance(gamma, dict) else None
            e = energy.vertex_energy([phi[y] - phi[v] for y in g.neighbours(v)], gv)
            total += e
            print(f"energy {v}: {e:.12g}", file=out)
    except energy.EnergyError as exc:
        raise CommandFailed(str(exc)) from None
    print(f"total: {total:.12g}", file=out)
    return EXIT_OK


def cmd_flow(args, out) -> int:
    try:
        sigma = [float(a) for a in args.angles.split(",")]
    except ValueError:
        raise UsageError("--angles must be comma-separated reals") from None
    if len(sigma) != args.order - 3:
        raise UsageError(f"--order {args.order} needs {args.order - 3} angles")
    direction = 1 if args.direction == "up" else -1
    try:
        res = energy.chain_flow(sigma, args.rate, args.steps, direction, args.branch)
    except (energy.SingularChartError, energy.NotClosableError) as exc:
        raise CommandFailed(str(exc)) from None
    header = ["iter", "E"] + [f"sigma_{i + 1}" for i in range(len(sigma))]
    rows = [[i, repr(e)] + [repr(a) for a in s] for i, (s, e) in enumerate(res.trajectory)]
    if args.out:
        with open(args.out, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(header)
            w.writerows(rows)
    else:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    print(f"# stop: {res.reason}, grad_norm: {res.grad_norm:.3e}", file=sys.stderr if not args.out else out)
    return EXIT_OK


GENERATORS = "cycle N | path N | complete N | bipartite M N | polygon P | real-cyclic a0 a1 ... | " \
             "double-cone N | schlafli p q ... | kite | two-triangles | " + " | ".join(sorted(catalog.NAMED))


def cmd_generate(args, out) -> int:
    rng = np.random.default_rng(args.seed)
    kind, params = args.kind, args.params
    try:
        ints = [int(p) for p in params]
    except ValueError:
        raise UsageError(f"integer parameters expected, got {params}") from None
    try:
        doc = _generate(kind, ints, rng)
    except (ValueError, IndexError, KeyError) as exc:
        raise UsageError(f"generate {kind}: {exc}") from None
    text = serialize_graph(doc)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        out.write(text)
    return EXIT_OK


def _framework_doc(fw, rng, name: str) -> GraphDocument:
    a = frameworks.random_orthogonal(fw.dim, rng)
    return document_from(fw.graph, fw.field(a), points=fw.points, name=name)


def _generate(kind: str, p: list[int], rng) -> GraphDocument:
    if kind == "cycle":
        return document_from(catalog.cycle(p[0]), name=f"cycle {p[0]}")
    if kind == "path":
        return document_from(catalog.path(p[0]), name=f"path {p[0]}")
    if kind == "complete":
        return document_from(catalog.complete(p[0]), name=f"complete {p[0]}")
    if kind == "bipartite":
        return document_from(catalog.complete_bipartite(p[0], p[1]), name=f"bipartite {p[0]} {p[1]}")
    if kind == "polygon":
        fw = frameworks.polygon(p[0])
        return document_from(fw.graph, fw.field(), points=fw.points, name=f"polygon {p[0]}")
    if kind == "real-cyclic":
        sol = cyclic.build_real_cyclic(p)
        g = catalog.cycle(sol.order)
        gamma = Fraction(sol.gamma).limit_denominator(10 ** 6)
        exact = gamma if abs(float(gamma) - sol.gamma) < 1e-12 else sol.gamma
        return document_from(g, sol.as_field(), gamma=exact, name=f"real-cyclic {' '.join(map(str, p))}")
    if kind == "double-cone":
        return _framework_doc(frameworks.double_cone(frameworks.polygon(p[0])).framework, rng, f"double-cone {p[0]}")
    if kind == "schlafli":
        return _framework_doc(frameworks.schlafli(p), rng, "schlafli " + " ".join(map(str, p)))
    if kind == "kite":
        return document_from(universe.kite(), universe.kite_state(), name="kite")
    if kind == "two-triangles":
        return document_from(catalog.prism(), universe.two_triangles_state(), gamma=Fraction(1), name="two-triangles")
    if kind in catalog.NAMED:
        return document_from(catalog.named(kind), name=kind)
    raise ValueError(f"unknown kind; choose from {GENERATORS}")


def cmd_cyclic(args, out) -> int:
    if args.order < 3:
        raise UsageError("--order must be at least 3")
    items = cyclic.enumerate_cyclic_spectrum(args.order)
    print(f"order: {args.order}", file=out)
    for g, sol in items:
        print(f"gamma: {g}  kind: {sol.kind}  residual: {sol.residual():.2e}", file=out)
    return EXIT_OK


# -- universe scripts ------------------------------------------------------------------


def _edge(token: str) -> tuple[str, str]:
    if "-" not in token:
        raise UsageError(f"edge {token!r} must be written a-b")
    a, b = token.split("-", 1)
    return a, b


def _prefixed(doc: GraphDocument, prefix: str) -> tuple[Graph, dict[str, complex]]:
    g = doc.graph
    phi = doc.phi
    if phi is None:
        raise UsageError("universe particles need a field")
    if prefix:
        mapping = {v: prefix + v for v in g.vertices}
        return g.relabel(mapping), {prefix + v: z for v, z in phi.items()}
    return g, phi


def run_universe_script(text: str, base: Path, out) -> int:
    u = universe.Universe()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        cmd, *a = line.split()
        try:
            if cmd == "load":
                if len(a) not in (2, 3):
                    raise UsageError("load <name> <file> [<prefix>]")
                g, phi = _prefixed(_load(str(base / a[1])), a[2] if len(a) == 3 else "")
                u.add(a[0], universe.Particle(g, (phi,), a[0]), phi)
                print(f"{lineno} load {a[0]}: {len(g.vertices)} vertices, {len(g.edges)} edges", file=out)
            elif cmd == "state":
                if len(a) not in (2, 3):
                    raise UsageError("state <name> <file> [<prefix>]")
                p, _ = u.particles[a[0]]
                g, phi = _prefixed(_load(str(base / a[1])), a[2] if len(a) == 3 else "")
                if g != p.graph:
                    raise UsageError(f"state file does not match the graph of {a[0]}")
                u.particles[a[0]] = (p.with_state(phi), universe._as_state(p.graph, phi))
                print(f"{lineno} state {a[0]}: ok", file=out)
            elif cmd == "correlate":
                if len(a) < 4:
                    raise UsageError("correlate <new> <a> <b> x-y ... [lambda re im mu re im]")
                witness = None
                rest = a[3:]
                if "lambda" in rest:
                    i = rest.index("lambda")
                    w = rest[i:]
                    if len(w) != 6 or w[3] != "mu":
                        raise UsageError("witness must be: lambda <re> <im> mu <re> <im>")
                    witness = (complex(float(parse_real(w[1])), float(parse_real(w[2]))),
                               complex(float(parse_real(w[4])), float(parse_real(w[5]))))
                    rest = rest[:i]
                res = u.correlate(a[0], a[1], a[2], [_edge(t) for t in rest], witness)
                lam, mu = res.witness
                print(f"{lineno} correlate {a[0]}: lambda {_fmt(lam)}, mu {_fmt(mu)}, "
                      f"isostate {_fmt(res.checks[0].isostate_gamma)}", file=out)
            elif cmd == "mutate":
                add, remove, mode = [], [], None
                for t in a[1:]:
                    if t in ("add", "remove"):
                        mode = t
                    elif mode == "add":
                        add.append(_edge(t))
                    elif mode == "remove":
                        remove.append(_edge(t))
                    else:
                        raise UsageError("mutate <name> [add x-y ...] [remove x-y ...]")
                res = u.mutate(a[0], add, remove)
                print(f"{lineno} mutate {a[0]}: isostate {_fmt(res.checks[0].isostate_gamma)}", file=out)
            elif cmd == "separate":
                res = u.separate(a[0])
                print(f"{lineno} separate {a[0]}: {len(res.particles)} particle(s)", file=out)
            elif cmd == "attach":
                p, phi = u.particles[a[0]]
                x = a[1]
                zs = [phi[y] - phi[x] for y in p.graph.neighbours(x)]
                loc = universe.attach_locus(zs)
                print(f"{lineno} attach {a[0]} {x}: {len(loc.points)} points, singular {_fmt(loc.singular)}", file=out)
            elif cmd == "report":
                for name, (p, phi) in u.particles.items():
                    chk = universe.check_state(p.graph, phi)
                    t = universe.thermal_time(p.graph) if p.graph.edges else 0.0
                    print(f"particle {name}: {len(p.graph.vertices)} vertices, {len(p.graph.edges)} edges, "
                          f"isostate {_fmt(chk.isostate_gamma)}, thermal_time {t:.12g}", file=out)
            else:
                raise UsageError(f"unknown command {cmd!r}")
        except UsageError as exc:
            raise UsageError(f"script line {lineno}: {exc}") from None
        except (ValueError, KeyError) as exc:
            raise CommandFailed(f"script line {lineno}: {exc}") from None
    ok = u.verify()
    print(f"status: {'pass' if ok else 'fail'}", file=out)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_universe(args, out) -> int:
    path = Path(args.script)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    return run_universe_script(text, path.parent, out)


# -- dispatch --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="quadgraph", description="Quadratic difference equations on graphs.")
    ap.add_argument("--seed", type=int, default=0, help="seed for random projections")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="check that a field is a state")
    p.add_argument("file")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("spectrum", help="gamma-polynomial and spectrum membership")
    p.add_argument("file")
    p.add_argument("--slow", action="store_true", help="no time budget")
    p.add_argument("--budget", type=float, default=120.0, help="seconds allowed without --slow")
    p.add_argument("--membership", action="store_true")
    p.add_argument("--order", default="elim", choices=["elim", "lex", "grevlex"])
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("lift", help="lift the star of a vertex")
    p.add_argument("file")
    p.add_argument("--vertex", required=True)
    p.add_argument("--dim", type=int, default=3)
    p.add_argument("--sign", choices=["+", "-"])
    p.add_argument("--gamma", type=lambda s: float(parse_real(s)))
    p.set_defaults(func=cmd_lift)

    p = sub.add_parser("curvature", help="vertex curvature")
    p.add_argument("file")
    p.add_argument("--dim", type=int, choices=[2, 3, 4], default=3)
    p.set_defaults(func=cmd_curvature)

    p = sub.add_parser("distance", help="path distance between two vertices")
    p.add_argument("file")
    p.add_argument("--from", dest="source", required=True)
    p.add_argument("--to", dest="target", required=True)
    p.add_argument("--dim", type=int, default=3)
    p.add_argument("--absolute", action="store_true")
    p.set_defaults(func=cmd_distance)

    p = sub.add_parser("energy", help="vertex and total energy")
    p.add_argument("file")
    p.set_defaults(func=cmd_energy)

    p = sub.add_parser("flow", help="gradient flow of the polygon energy")
    p.add_argument("--order", type=int, required=True)
    p.add_argument("--angles", required=True)
    p.add_argument("--steps", type=int, default=1000)
    p.add_argument("--rate", type=float, default=0.01)
    p.add_argument("--direction", choices=["up", "down"], default="down")
    p.add_argument("--branch", type=int, choices=[1, -1], default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_flow)

    p = sub.add_parser("generate", help=f"write a graph document: {GENERATORS}")
    p.add_argument("kind")
    p.add_argument("params", nargs="*")
    p.add_argument("--out")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("cyclic", help="constant-gamma spectrum of a cycle")
    p.add_argument("--order", type=int, required=True)
    p.set_defaults(func=cmd_cyclic)

    p = sub.add_parser("universe", help="replay an event script")
    p.add_argument("script")
    p.set_defaults(func=cmd_universe)
    return ap


def run_command(argv: Sequence[str] | None = None, out=None) -> int:
    out = sys.stdout if out is None else out
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args, out)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CommandFailed as exc:
        print(f"failed: {exc}", file=sys.stderr)
        return EXIT_FAIL


def main() -> None:
    sys.exit(run_command())


if __name__ == "__main__":
    main()
