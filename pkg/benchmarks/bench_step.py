"""
Time one search step (and the reduced-basis projection) per kernel backend.

    python benchmarks/bench_step.py
    python benchmarks/bench_step.py --repeat 20 --graphs complete:1024 hypercube:16
"""

import argparse
import timeit

import numpy as np

from qwboost import _backend, walk
from qwboost.graphs import MarkedSet, build_family
from qwboost.quotient import Reduction

DEFAULT_GRAPHS = ["complete:1024", "hypercube:16", "bipartite:2048", "torus:64"]


def parse_graph(spec):
    family, size = spec.split(":")
    return build_family(family, int(size))


def bench(graph, repeat, number):
    marked = MarkedSet({0})
    red = Reduction.build(graph, marked)
    rng = np.random.default_rng(0)
    s = rng.normal(size=graph.n_arcs) + 1j * rng.normal(size=graph.n_arcs)
    s /= np.linalg.norm(s)
    rows = {}
    for name in _backend.available():
        _backend.use(name)
        t_step = min(timeit.repeat(lambda: walk.step(graph, marked, s), repeat=repeat, number=number)) / number
        t_proj = min(timeit.repeat(lambda: red.project(s), repeat=repeat, number=number)) / number
        rows[name] = (t_step, t_proj)
    return rows


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("--graphs", nargs="+", default=DEFAULT_GRAPHS, help="family:size entries")
    ap.add_argument("--repeat", type=int, default=7)
    ap.add_argument("--number", type=int, default=5)
    args = ap.parse_args(argv)

    print(f"{'graph':<18}{'arcs':>10}  {'backend':<8}{'step ms':>10}{'project ms':>12}{'speedup':>9}")
    for spec in args.graphs:
        g = parse_graph(spec)
        rows = bench(g, args.repeat, args.number)
        base = rows["numpy"][0]
        for name, (ts, tp) in rows.items():
            print(f"{spec:<18}{g.n_arcs:>10}  {name:<8}{ts * 1e3:>10.3f}{tp * 1e3:>12.3f}{base / ts:>8.2f}x")
    _backend.use("auto")


if __name__ == "__main__":
    main()
