"""Command-line surface.

Subcommands: validate, localize, homology, audit, grow, telescope, product,
mtel, selftest.  Exit codes: 0 success, 1 semantic failure, 2 input error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import acceptance, files
from .construction import (degree_bounds, grow_edges, localize,
                           mapping_telescope, telescope)
from .core import product, validate, vertex_degrees
from .homology import field_betti, homology
from .verify import degree_audit

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


def _read(path: str, strict: bool = False):
    try:
        return files.read_complex(path, strict=strict)
    except (files.ParseError, OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        raise SystemExit(EXIT_INPUT)


def _emit(args, text_report: str, data: dict) -> None:
    if args.format == "machine":
        sys.stdout.write(files.machine_report(data))
    else:
        sys.stdout.write(text_report)


def cmd_validate(args) -> int:
    if args.strict:
        try:
            C = files.read_complex(args.input, strict=True)
        except files.ParseError as e:
            if "strict mode" in str(e):
                print(f"invalid: {e}", file=sys.stderr)
                return EXIT_FAIL
            print(f"error: {e}", file=sys.stderr)
            return EXIT_INPUT
        except (OSError, ValueError) as e:
            print(f"error: {e}", file=sys.stderr)
            return EXIT_INPUT
    else:
        C = _read(args.input)
    rep = validate(C)
    _emit(args, str(rep) + "\n",
          {"ok": rep.ok, "problems": rep.problems,
           "counts": {d: C.count(d) for d in sorted(C.by_dim)}})
    return EXIT_OK if rep.ok else EXIT_FAIL


def cmd_localize(args) -> int:
    S = _read(args.input)
    T, p, tower = localize(S, ray_policy=args.ray_bound)
    if args.grow:
        M = degree_bounds(max(1, S.dim)).total if S.dim >= 0 else 0
        T = grow_edges(T, M, args.grow)
    bounds = degree_bounds(S.dim) if S.dim >= 1 else None
    audit = degree_audit(T, bounds.total if bounds else 0)
    hs, ht = homology(S), homology(T)
    summary = {
        "dim": S.dim,
        "levels": tower.summary(),
        "max_degree": audit.max_degree,
        "bound": bounds.total if bounds else None,
        "degree_ok": audit.ok if bounds else True,
        "dim_preserved": T.dim == S.dim,
        "homology_preserved": hs.same_groups(ht),
        "homology": str(ht),
    }
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        files.write_complex(T, os.path.join(args.out, "localized.cplx"))
        with open(os.path.join(args.out, "tower.json"), "w") as fh:
            fh.write(files.machine_report({
                "levels": tower.summary(),
                "ray_bounds": tower.ray_bounds,
                "colorings": {
                    lvl: {" ".join(str(v[0]) for v in s): c
                          for s, c in sorted(st.coloring.items())}
                    for lvl, st in ((st.level, st) for st in tower.stages)
                    if st.coloring},
            }))
        with open(os.path.join(args.out, "projection.txt"), "w") as fh:
            fh.write(files.vertex_map_table(dict(p.mapping), T.has_stage))
    lines = [f"dim {summary['dim']}  max_degree {summary['max_degree']}"
             f"  bound {summary['bound']}",
             f"degree_ok {summary['degree_ok']}  dim_preserved {summary['dim_preserved']}"
             f"  homology_preserved {summary['homology_preserved']}",
             f"homology {summary['homology']}"]
    _emit(args, "\n".join(lines) + "\n", summary)
    ok = summary["degree_ok"] and summary["dim_preserved"] and summary["homology_preserved"]
    return EXIT_OK if ok else EXIT_FAIL


def cmd_homology(args) -> int:
    C = _read(args.input)
    if args.coeff == "Z":
        H = homology(C, reduced=args.reduced)
        rows = ["dim  betti  torsion"]
        data = {"coefficients": "Z", "reduced": args.reduced, "groups": {}}
        for d in range(0, max(C.dim, 0) + 1):
            tor = ",".join(str(t) for t in H.torsion.get(d, [])) or "-"
            rows.append(f"{d:<4d} {H.betti.get(d, 0):<6d} {tor}")
            data["groups"][d] = {"betti": H.betti.get(d, 0),
                                 "torsion": H.torsion.get(d, [])}
        _emit(args, "\n".join(rows) + "\n", data)
    else:
        coeff = "Q" if args.coeff == "Q" else args.coeff
        betti = field_betti(C, coeff, reduced=args.reduced)
        rows = ["dim  betti"]
        for d in sorted(betti):
            rows.append(f"{d:<4d} {betti[d]}")
        _emit(args, "\n".join(rows) + "\n",
              {"coefficients": str(coeff), "reduced": args.reduced, "betti": betti})
    return EXIT_OK


def cmd_audit(args) -> int:
    C = _read(args.input)
    n = args.dim if args.dim is not None else max(C.dim, 1)
    M = degree_bounds(n).total
    rep = degree_audit(C, M)
    _emit(args, f"max_degree {rep.max_degree}  bound {M}  "
          f"{'pass' if rep.ok else 'FAIL'}\n",
          {"bound": M, "max_degree": rep.max_degree, "ok": rep.ok,
           "histogram": rep.histogram,
           "violators": [list(map(list, v)) for v in rep.violators[:20]]})
    return EXIT_OK if rep.ok else EXIT_FAIL


def cmd_grow(args) -> int:
    C = _read(args.input)
    n = args.dim if args.dim is not None else max(C.dim, 1)
    M = degree_bounds(n).total
    G = grow_edges(C, M, args.rounds)
    if args.out:
        files.write_complex(G, args.out)
    degs = vertex_degrees(G)
    exact = sum(1 for d in degs.values() if d == M)
    _emit(args, f"grew to {G.count(0)} vertices, {G.count(1)} edges; "
          f"{exact} at exactly {M}\n",
          {"bound": M, "rounds": args.rounds, "vertices": G.count(0),
           "edges": G.count(1), "exact": exact})
    return EXIT_OK


def cmd_telescope(args) -> int:
    C = _read(args.input)
    bound = args.ray_bound
    if bound is None:
        bound = max((c for s in C.simplices for v in s for c in v[1:]),
                    default=0) + 2
    T = telescope(C, ray_bound=bound)
    if args.out:
        files.write_complex(T, args.out)
    _emit(args, f"telescope: {T.count()} simplices, dim {T.dim}\n",
          {"simplices": T.count(), "dim": T.dim, "ray_bound": bound})
    return EXIT_OK


def cmd_product(args) -> int:
    C = _read(args.input)
    D = _read(args.second)
    if D.level != 0:
        print("error: second factor must be a level-0 complex", file=sys.stderr)
        return EXIT_INPUT
    P = product(C, D)
    if args.out:
        files.write_complex(P, args.out)
    _emit(args, f"product: {P.count()} simplices, dim {P.dim}\n",
          {"simplices": P.count(), "dim": P.dim,
           "counts": {d: P.count(d) for d in sorted(P.by_dim)}})
    return EXIT_OK


def cmd_mtel(args) -> int:
    S = _read(args.input)
    _, _, tower = localize(S, ray_policy=args.ray_bound)
    tele, proj = mapping_telescope(tower)
    hs, ht = homology(S), homology(tele)
    if args.out:
        files.write_complex(tele, args.out)
    data = {"simplices": tele.count(), "dim": tele.dim,
            "max_degree": max(vertex_degrees(tele).values(), default=0),
            "homology_preserved": hs.same_groups(ht), "homology": str(ht)}
    _emit(args, f"mapping telescope: {data['simplices']} simplices, dim {data['dim']}, "
          f"max_degree {data['max_degree']}, homology_preserved {data['homology_preserved']}\n",
          data)
    return EXIT_OK if data["homology_preserved"] else EXIT_FAIL


def cmd_selftest(args) -> int:
    sizes = acceptance.preset(args.sizes)
    if args.seed is not None:
        sizes.seed = args.seed
    results = acceptance.run_all(sizes, emit=None if args.format == "machine" else print)
    if args.format == "machine":
        sys.stdout.write(files.machine_report(
            {"preset": sizes.name, "seed": sizes.seed,
             "results": [{"number": r.number, "name": r.name, "passed": r.passed,
                          "detail": r.detail, "seconds": round(r.seconds, 2)}
                         for r in results]}))
    failed = [r for r in results if not r.passed]
    return EXIT_OK if not failed else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="locfin",
        description="bounded-degree localization of finite simplicial complexes")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, input_file=True):
        if input_file:
            p.add_argument("input", help="complex file")
        p.add_argument("--format", choices=("text", "machine"), default="text")

    p = sub.add_parser("validate", help="check the complex invariants")
    common(p)
    p.add_argument("--strict", action="store_true",
                   help="reject files whose simplex list is not closed as given")
    p.set_defaults(fn=cmd_validate)

    p = sub.add_parser("localize", help="run the localization pipeline")
    common(p)
    p.add_argument("--ray-bound", type=int, default=None,
                   help="truncate every ray at this bound")
    p.add_argument("--grow", type=int, default=0, metavar="ROUNDS",
                   help="append pendant-growing rounds")
    p.add_argument("--out", help="directory for the output files")
    p.set_defaults(fn=cmd_localize)

    p = sub.add_parser("homology", help="Betti numbers and torsion")
    common(p)
    p.add_argument("--coeff", default="Z",
                   help="Z (default), Q, or a prime p / mod-p")
    p.add_argument("--reduced", action="store_true")
    p.set_defaults(fn=cmd_homology)

    p = sub.add_parser("audit", help="edge-degree audit against the level bound")
    common(p)
    p.add_argument("--dim", type=int, default=None)
    p.set_defaults(fn=cmd_audit)

    p = sub.add_parser("grow", help="pendant growth to exact degree")
    common(p)
    p.add_argument("--dim", type=int, default=None)
    p.add_argument("--rounds", type=int, required=True)
    p.add_argument("--out", help="output complex file")
    p.set_defaults(fn=cmd_grow)

    p = sub.add_parser("telescope", help="spread a complex along its rays")
    common(p)
    p.add_argument("--ray-bound", type=int, default=None)
    p.add_argument("--out", help="output complex file")
    p.set_defaults(fn=cmd_telescope)

    p = sub.add_parser("product", help="product with a level-0 complex")
    common(p)
    p.add_argument("second", help="second factor (level-0 complex file)")
    p.add_argument("--out", help="output complex file")
    p.set_defaults(fn=cmd_product)

    p = sub.add_parser("mtel", help="mapping telescope of the tower")
    common(p)
    p.add_argument("--ray-bound", type=int, default=None)
    p.add_argument("--out", help="output complex file")
    p.set_defaults(fn=cmd_mtel)

    p = sub.add_parser("selftest", help="run the acceptance battery")
    common(p, input_file=False)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--sizes", choices=("default", "tiny"), default="default")
    p.set_defaults(fn=cmd_selftest)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
