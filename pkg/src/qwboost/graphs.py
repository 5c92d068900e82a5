"""
Regular graph families with explicit port labels.

Every graph stores two ``(N, d)`` integer tables: ``neighbor[v, p]`` is the
vertex reached from ``v`` through port ``p`` and ``reverse_port[v, p]`` is the
port at that neighbor pointing back to ``v``. Arcs are indexed vertex-major,
``arc = v * d + p``, and ``reverse_arc`` is the flip-flop permutation on arcs.

Available constructors
----------------------
- build_complete(N)
- build_hypercube(n)
- build_complete_bipartite(N)
- build_torus(D, L)
- from_adjacency(rows) / read_adjacency(path)
"""

from __future__ import annotations

import enum
import itertools
import os
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from numpy.typing import NDArray

from .errors import InvalidFamilyError, InvalidParameterError

__all__ = [
    "Family",
    "RegularGraph",
    "MarkedSet",
    "build_complete",
    "build_hypercube",
    "build_complete_bipartite",
    "build_torus",
    "build_family",
    "from_adjacency",
    "read_adjacency",
    "antipodal_marks",
    "first_vertex_mark",
]


class Family(str, enum.Enum):
    COMPLETE = "complete"
    HYPERCUBE = "hypercube"
    COMPLETE_BIPARTITE = "bipartite"
    TORUS = "torus"
    CUSTOM = "custom"


@dataclass(frozen=True, eq=False)
class RegularGraph:
    """
    Arc-labeled d-regular simple graph.

    Attributes
    ----------
    neighbor: NDArray[np.int64]
        Shape (N, d); vertex reached through each port.
    reverse_port: NDArray[np.int64]
        Shape (N, d); port at the neighbor that points back.
    family: Family
        Which constructor produced the graph.
    params: dict
        Constructor parameters, e.g. ``{"n": 4}`` for a hypercube.
    """

    neighbor: NDArray[np.int64]
    reverse_port: NDArray[np.int64]
    family: Family = Family.CUSTOM
    params: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        nb = np.ascontiguousarray(self.neighbor, dtype=np.int64)
        rp = np.ascontiguousarray(self.reverse_port, dtype=np.int64)
        if nb.ndim != 2 or nb.shape != rp.shape:
            raise InvalidParameterError("neighbor and reverse_port must be equal (N, d) tables")
        nb.setflags(write=False)
        rp.setflags(write=False)
        object.__setattr__(self, "neighbor", nb)
        object.__setattr__(self, "reverse_port", rp)
        rev = (nb * nb.shape[1] + rp).ravel()
        rev.setflags(write=False)
        object.__setattr__(self, "reverse_arc", rev)
        _validate(self)

    @property
    def n_vertices(self) -> int:
        return self.neighbor.shape[0]

    @property
    def degree(self) -> int:
        return self.neighbor.shape[1]

    @property
    def n_arcs(self) -> int:
        return self.neighbor.size

    def arc(self, v: int, p: int) -> int:
        return v * self.degree + p

    def __repr__(self) -> str:
        return (f"RegularGraph(family={self.family.value}, params={self.params}, "
                f"N={self.n_vertices}, d={self.degree})")


def _validate(g: RegularGraph) -> None:
    N, d = g.neighbor.shape
    if N < 2 or d < 1:
        raise InvalidParameterError(f"degenerate graph (N={N}, d={d})")
    nb, rp = g.neighbor, g.reverse_port
    if nb.min() < 0 or nb.max() >= N:
        raise InvalidParameterError("neighbor index out of range")
    if rp.min() < 0 or rp.max() >= d:
        raise InvalidParameterError("reverse port out of range")
    if np.any(nb == np.arange(N)[:, None]):
        raise InvalidParameterError("self-loops are not allowed")
    srt = np.sort(nb, axis=1)
    if d > 1 and np.any(srt[:, 1:] == srt[:, :-1]):
        raise InvalidParameterError("parallel edges are not allowed")
    rev = g.reverse_arc
    if not np.array_equal(rev[rev], np.arange(N * d)):
        raise InvalidParameterError("arc reversal is not an involution")
    if not np.array_equal(nb.ravel()[rev], np.repeat(np.arange(N), d)):
        raise InvalidParameterError("reverse_port does not point back to the source")


@dataclass(frozen=True)
class MarkedSet:
    """Set of marked vertex indices."""

    vertices: frozenset[int]

    def __init__(self, vertices: Iterable[int]):
        object.__setattr__(self, "vertices", frozenset(int(v) for v in vertices))

    @property
    def k(self) -> int:
        return len(self.vertices)

    def mask(self, graph: RegularGraph) -> NDArray[np.bool_]:
        """Boolean per-vertex mask; validates indices against ``graph``."""
        out = np.zeros(graph.n_vertices, dtype=bool)
        for v in self.vertices:
            if not 0 <= v < graph.n_vertices:
                raise InvalidParameterError(f"marked vertex {v} outside [0, {graph.n_vertices})")
            out[v] = True
        return out

    def require_nonempty(self) -> None:
        if not self.vertices:
            raise InvalidParameterError("marked set is empty")

    def __iter__(self):
        return iter(sorted(self.vertices))


def _from_neighbors(nb: NDArray[np.int64], family: Family, params: dict) -> RegularGraph:
    """Derive reverse ports by lookup, for families without a closed form."""
    N, d = nb.shape
    pos = {}
    for v in range(N):
        for p in range(d):
            pos[(v, int(nb[v, p]))] = p
    try:
        rp = np.array([[pos[(int(nb[v, p]), v)] for p in range(d)] for v in range(N)],
                      dtype=np.int64)
    except KeyError as exc:
        raise InvalidParameterError(f"adjacency is not symmetric at arc {exc.args[0]}") from None
    return RegularGraph(nb, rp, family, params)


def build_complete(N: int) -> RegularGraph:
    """Complete graph K_N; port p of v is the p-th vertex of [0, N) minus v."""
    if N < 3:
        raise InvalidParameterError(f"complete graph needs N >= 3 (got {N})")
    v = np.arange(N)[:, None]
    p = np.arange(N - 1)[None, :]
    nb = p + (p >= v)
    # u = p + [p >= v]; the port of v at u is v - [v > u]
    rp = v - (v > nb)
    return RegularGraph(nb, rp, Family.COMPLETE, {"N": N})


def build_hypercube(n: int) -> RegularGraph:
    """n-dimensional hypercube on 2**n bit strings; port p flips bit p."""
    if n < 2:
        raise InvalidParameterError(f"hypercube needs n >= 2 (got {n})")
    N = 1 << n
    nb = np.arange(N)[:, None] ^ (1 << np.arange(n))[None, :]
    rp = np.broadcast_to(np.arange(n), (N, n))
    return RegularGraph(nb, rp, Family.HYPERCUBE, {"n": n})


def build_complete_bipartite(N: int) -> RegularGraph:
    """
    Regular complete bipartite graph K_{N/2,N/2}.

    Side A is [0, N/2), side B is [N/2, N); port p of a side-A vertex points
    to the p-th side-B vertex and vice versa.
    """
    if N < 4 or N % 2:
        raise InvalidParameterError(f"bipartite graph needs even N >= 4 (got {N})")
    h = N // 2
    v = np.arange(N)[:, None]
    p = np.arange(h)[None, :]
    nb = np.where(v < h, h + p, p)
    rp = np.broadcast_to(v % h, (N, h))
    return RegularGraph(nb, rp, Family.COMPLETE_BIPARTITE, {"N": N})


def build_torus(D: int, L: int) -> RegularGraph:
    """
    D-dimensional periodic square lattice of side L.

    Vertex index is the mixed-radix number of its coordinates (axis 0 least
    significant). Ports 2i and 2i+1 step +1 and -1 along axis i.
    """
    if D < 1:
        raise InvalidParameterError(f"torus needs D >= 1 (got {D})")
    if L < 3:
        raise InvalidParameterError(f"torus needs L >= 3 (got {L})")
    N = L ** D
    idx = np.arange(N)
    nb = np.empty((N, 2 * D), dtype=np.int64)
    for i in range(D):
        stride = L ** i
        coord = (idx // stride) % L
        nb[:, 2 * i] = idx + (((coord + 1) % L) - coord) * stride
        nb[:, 2 * i + 1] = idx + (((coord - 1) % L) - coord) * stride
    rp = np.broadcast_to(np.arange(2 * D) ^ 1, (N, 2 * D))
    return RegularGraph(nb, rp, Family.TORUS, {"D": D, "L": L})


def from_adjacency(rows: Sequence[Sequence[int]]) -> RegularGraph:
    """Custom graph from per-vertex neighbor lists; ports are positional."""
    if not rows:
        raise InvalidFamilyError("empty adjacency list")
    degs = {len(r) for r in rows}
    if len(degs) != 1:
        raise InvalidFamilyError(f"graph is not regular (degrees {sorted(degs)})")
    nb = np.asarray(rows, dtype=np.int64)
    return _from_neighbors(nb, Family.CUSTOM, {"N": nb.shape[0]})


def read_adjacency(path: str | os.PathLike) -> RegularGraph:
    """
    Read the text adjacency format: a header line ``N d`` followed by N lines
    of d whitespace-separated neighbor indices.
    """
    with open(path) as fh:
        lines = [ln.split() for ln in fh if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines or len(lines[0]) != 2:
        raise InvalidParameterError(f"{path}: first line must be 'N d'")
    N, d = (int(x) for x in lines[0])
    rows = [[int(x) for x in ln] for ln in lines[1:]]
    if len(rows) != N:
        raise InvalidParameterError(f"{path}: expected {N} vertex lines, found {len(rows)}")
    for v, r in enumerate(rows):
        if len(r) != d:
            raise InvalidFamilyError(f"{path}: vertex {v} has degree {len(r)}, header says {d}")
    return from_adjacency(rows)


def write_adjacency(graph: RegularGraph, path: str | os.PathLike) -> None:
    with open(path, "w") as fh:
        fh.write(f"{graph.n_vertices} {graph.degree}\n")
        for row in graph.neighbor:
            fh.write(" ".join(map(str, row)) + "\n")


def antipodal_marks(graph: RegularGraph) -> MarkedSet:
    """All-zeros and all-ones strings of a hypercube."""
    if graph.family is not Family.HYPERCUBE:
        raise InvalidFamilyError(f"antipodal marks need a hypercube, got {graph.family.value}")
    return MarkedSet({0, graph.n_vertices - 1})


def first_vertex_mark(graph: RegularGraph) -> MarkedSet:
    return MarkedSet({0})


_BUILDERS = {
    Family.COMPLETE: lambda size, **kw: build_complete(size),
    Family.HYPERCUBE: lambda size, **kw: build_hypercube(size),
    Family.COMPLETE_BIPARTITE: lambda size, **kw: build_complete_bipartite(size),
    Family.TORUS: lambda size, dim=2, **kw: build_torus(dim, size),
}


def build_family(family: Family | str, size: int, **params) -> RegularGraph:
    """
    Build a family member from its size parameter.

    ``size`` is N for complete and bipartite graphs, the bit count n for the
    hypercube and the side L for the torus (dimension via ``dim``).
    """
    fam = Family(family)
    if fam not in _BUILDERS:
        raise InvalidFamilyError(f"no size-indexed constructor for {fam.value}")
    return _BUILDERS[fam](int(size), **params)


def arcs(graph: RegularGraph) -> Iterable[tuple[int, int]]:
    return itertools.product(range(graph.n_vertices), range(graph.degree))
