"""
Command line driver.

    qwboost simulate --family complete --n 1024 --steps 80 --record-basis --out run.csv
    qwboost reduce --family torus --dim 2 --side 8
    qwboost spectrum --family complete --n 1024
    qwboost check-doubling --family hypercube --sizes 6,8,10
    qwboost verify

Exit codes: 0 success, 2 configuration error, 3 numerical-consistency error,
4 acceptance criterion failure, 5 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import _backend, analysis, walk
from .errors import ConsistencyError, QWBoostError
from .graphs import Family, MarkedSet, RegularGraph, antipodal_marks, build_family, read_adjacency
from .quotient import Reduction

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_CRITERION = 4
EXIT_IO = 5

DEFAULT_LADDERS = {
    "complete": ([64, 256, 1024], {}),
    "hypercube": ([6, 8, 10], {}),
    "bipartite": ([16, 64, 256], {}),
    "torus": ([8, 16, 32], {"dim": 2}),
}


class ConfigError(QWBoostError):
    pass


def _graph(args) -> RegularGraph:
    fam = args.family
    if fam == "custom":
        if not args.graph_file:
            raise ConfigError("--family custom needs --graph-file")
        return read_adjacency(args.graph_file)
    if fam == "torus":
        if args.side is None:
            raise ConfigError("--family torus needs --side")
        return build_family(fam, args.side, dim=args.dim)
    if args.n is None:
        raise ConfigError(f"--family {fam} needs --n")
    return build_family(fam, args.n)


def _marked(graph: RegularGraph, spec: str) -> MarkedSet:
    if spec == "first":
        return MarkedSet({0})
    if spec == "antipodal":
        return antipodal_marks(graph)
    try:
        marked = MarkedSet(int(x) for x in spec.split(","))
    except ValueError:
        raise ConfigError(f"--marked must be 'first', 'antipodal' or indices, got {spec!r}") from None
    marked.mask(graph)
    return marked


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def cmd_simulate(args) -> int:
    g = _graph(args)
    marked = _marked(g, args.marked)
    if args.steps == "auto":
        steps = analysis.auto_steps(g, marked)
    else:
        try:
            steps = int(args.steps)
        except ValueError:
            raise ConfigError(f"--steps must be an integer or 'auto', got {args.steps!r}") from None
        if steps < 1:
            raise ConfigError("--steps must be >= 1")
    series = walk.simulate(g, marked, steps, record_basis=args.record_basis)
    _emit(series.to_csv(), args.out)
    last = series.reports[-1]
    k = int(series.boosted.argmax())
    print(f"t={series.t[-1]} position={last.position_success:.12g} boosted={last.boosted_success:.12g} "
          f"ratio={last.boosted_success / max(last.position_success, 1e-300):.6g}; "
          f"peak boosted {series.boosted[k]:.12g} at t={k}", file=sys.stderr)
    return EXIT_OK


def cmd_reduce(args) -> int:
    g = _graph(args)
    red = Reduction.build(g, _marked(g, args.marked))
    rep = {
        "graph": {"family": g.family.value, **g.params, "N": g.n_vertices, "d": g.degree},
        "marked": sorted(red.marked.vertices),
        "doubling_assumptions": red.partition.doubling_assumptions(),
        "initial_state": [float(x) for x in red.initial()],
        "U0": red.operator(False).to_report(),
        "U": red.operator(True).to_report(),
    }
    _emit(_json(rep), args.out)
    return EXIT_OK


def cmd_spectrum(args) -> int:
    g = _graph(args)
    red = Reduction.build(g, _marked(g, args.marked))
    op = red.operator(True)
    rep = {"spectrum": analysis.spectrum(op).to_report()}
    if g.family is Family.COMPLETE and len(red.marked.vertices) == 1:
        pm = analysis.plus_minus_basis(op, op.index("ab"), op.index("ba"))
        pr = analysis.degenerate_perturbation(pm, (pm.index("-"), pm.index("bb")))
        rep["perturbation"] = pr.to_report()
    _emit(_json(rep), args.out)
    return EXIT_OK


def cmd_check_doubling(args) -> int:
    if args.family == "all":
        reports = [analysis.doubling_condition(f, sizes, marks="single", **params).to_report()
                   for f, (sizes, params) in DEFAULT_LADDERS.items()]
        reports.append(analysis.doubling_condition("hypercube", DEFAULT_LADDERS["hypercube"][0],
                                                   marks="antipodal").to_report())
    else:
        if args.family == "custom":
            raise ConfigError("check-doubling needs a size-indexed family")
        if args.sizes:
            try:
                sizes = [int(x) for x in args.sizes.split(",") if x.strip()]
            except ValueError:
                raise ConfigError(f"--sizes must be comma-separated integers, got {args.sizes!r}") from None
        else:
            sizes = DEFAULT_LADDERS[args.family][0]
        if not sizes:
            raise ConfigError("size ladder is empty")
        marks = "antipodal" if args.marked == "antipodal" else "single"
        params = {"dim": args.dim} if args.family == "torus" else {}
        reports = [analysis.doubling_condition(args.family, sizes, marks=marks, **params).to_report()]
    _emit(_json(reports if len(reports) > 1 else reports[0]), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    from .acceptance import run_all

    results = run_all(print)
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed")
    return EXIT_CRITERION if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qwboost", description=__doc__.split("\n\n")[0])
    parser.add_argument("--backend", choices=["auto", "cython", "numpy"], default=None,
                        help="kernel backend (default: compiled if available)")
    sub = parser.add_subparsers(dest="command", required=True)

    def graph_opts(p, allow_all=False):
        fams = [f.value for f in Family] + (["all"] if allow_all else [])
        p.add_argument("--family", choices=fams, required=True)
        p.add_argument("--n", type=int, help="N (complete, bipartite) or bit count (hypercube)")
        p.add_argument("--dim", type=int, default=2, help="torus dimension D")
        p.add_argument("--side", type=int, help="torus side L")
        p.add_argument("--graph-file", help="adjacency file for --family custom")
        p.add_argument("--marked", default="first", help="'first', 'antipodal' or comma-separated indices")
        p.add_argument("--out", help="output path (default stdout)")

    p = sub.add_parser("simulate", help="run the search walk and write a CSV series")
    graph_opts(p)
    p.add_argument("--steps", default="auto", help="integer or 'auto'")
    p.add_argument("--record-basis", action="store_true", help="add reduced-basis probabilities")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("reduce", help="write the reduced-subspace operator report")
    graph_opts(p)
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("spectrum", help="eigen-decomposition of the reduced search operator")
    graph_opts(p)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("check-doubling", help="evaluate (2/d)|b->a| over a size ladder")
    graph_opts(p, allow_all=True)
    p.add_argument("--sizes", help="comma-separated size parameters")
    p.set_defaults(func=cmd_check_doubling)

    p = sub.add_parser("verify", help="run the acceptance criteria")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.backend:
        _backend.use(args.backend)
    try:
        return args.func(args)
    except ConsistencyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (QWBoostError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
