"""
Reduced ("subspace") description of walk search on symmetric graphs.

Vertices are typed by the coarsest equitable partition refining the
marked/unmarked coloring. For types x, y the basis vector ``|xy>`` is the
uniform superposition over arcs leaving x-vertices into y-vertices, and the
walk acts on these vectors through the counts ``|x|`` (vertices of type x) and
``|x->y|`` (ports of one x-vertex into y-vertices) alone::

    U0 |xy> = (2/d |x->y| - 1) |yx> + sum_{z ~ x, z != y} 2/d sqrt(|x->y| |x->z|) |zx>

With the oracle, columns whose source type is marked change sign.
"""

from __future__ import annotations

import string
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from numpy.typing import NDArray

from . import _backend
from .errors import ConsistencyError, DimensionError
from .graphs import MarkedSet, RegularGraph

__all__ = [
    "TypePartition",
    "ReducedBasis",
    "ReducedOperator",
    "Reduction",
    "compute_partition",
    "partition_from_labels",
    "reduced_basis",
    "initial_in_basis",
    "reduced_operator",
    "embed",
    "project",
]

UNITARY_TOL = 1e-10


def _type_name(i: int) -> str:
    return string.ascii_lowercase[i] if i < 26 else f"t{i}"


@dataclass(frozen=True, eq=False)
class TypePartition:
    """
    Equitable vertex typing of a graph with marked vertices.

    Type ids are canonical: marked types first, then breadth-first over the
    type graph, preferring the neighbor type with more ports into it.
    """

    graph: RegularGraph
    type_of: NDArray[np.int64]
    type_count: NDArray[np.int64]
    port_count: NDArray[np.int64]
    marked_types: frozenset[int]

    @property
    def n_types(self) -> int:
        return len(self.type_count)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(_type_name(i) for i in range(self.n_types))

    def doubling_assumptions(self) -> dict:
        """
        Whether every marked vertex has one type ``a`` whose neighbors all share
        one unmarked type ``b``.
        """
        marked = sorted(self.marked_types)
        nbr = sorted({int(y) for x in marked for y in np.flatnonzero(self.port_count[x])})
        holds = len(marked) == 1 and len(nbr) == 1 and nbr[0] not in self.marked_types
        return {
            "marked_types": [self.names[x] for x in marked],
            "marked_neighbor_types": [self.names[y] for y in nbr],
            "holds": holds,
        }

    def table(self, basis: "ReducedBasis") -> list[dict]:
        """Per-basis-vector counts: ``|x|``, ``|x->y|`` and their product."""
        rows = []
        for (x, y), name in zip(basis.pairs, basis.names):
            cx, pxy = int(self.type_count[x]), int(self.port_count[x, y])
            rows.append({"label": name, "x_count": cx, "x_to_y": pxy, "product": cx * pxy})
        return rows


def _refine(graph: RegularGraph, colors: NDArray[np.int64]) -> NDArray[np.int64]:
    # a neighbor-color histogram (width C) and the sorted neighbor colors
    # (width d) are equivalent signatures; use the narrower one
    N, d = graph.n_vertices, graph.degree
    nb = graph.neighbor
    rows = np.repeat(np.arange(N), d)
    while True:
        C = int(colors.max()) + 1
        if C <= d:
            hist = np.bincount(rows * C + colors[nb].ravel(), minlength=N * C).reshape(N, C)
        else:
            hist = np.sort(colors[nb], axis=1)
        sig = np.column_stack([colors, hist])
        _, new = np.unique(sig, axis=0, return_inverse=True)
        new = new.ravel().astype(np.int64)
        if int(new.max()) + 1 == C:
            return new
        colors = new


def _port_histogram(graph: RegularGraph, type_of: NDArray[np.int64], T: int) -> NDArray[np.int64]:
    N = graph.n_vertices
    rows = np.repeat(np.arange(N), graph.degree)
    return np.bincount(rows * T + type_of[graph.neighbor].ravel(), minlength=N * T).reshape(N, T)


def _canonical_order(pc: NDArray[np.int64], marked: list[int]) -> list[int]:
    T = pc.shape[0]
    order = list(marked)
    seen = set(order)
    i = 0
    while i < len(order):
        x = order[i]
        nxt = sorted((y for y in np.flatnonzero(pc[x]) if y not in seen), key=lambda y: (-pc[x, y], y))
        for y in nxt:
            seen.add(int(y))
            order.append(int(y))
        i += 1
    order += [x for x in range(T) if x not in seen]
    return order


def _finish(graph: RegularGraph, mask: NDArray[np.bool_], colors: NDArray[np.int64]) -> TypePartition:
    _, colors = np.unique(colors, return_inverse=True)
    colors = colors.ravel().astype(np.int64)
    T = int(colors.max()) + 1
    hist = _port_histogram(graph, colors, T)
    rep = np.zeros(T, dtype=np.int64)
    rep[colors[::-1]] = np.arange(graph.n_vertices)[::-1]
    if not np.array_equal(hist, hist[rep][colors]):
        raise ConsistencyError("partition is not equitable")
    counts = np.bincount(colors, minlength=T)
    marked_count = np.bincount(colors, weights=mask, minlength=T)
    if np.any((marked_count > 0) & (marked_count < counts)):
        raise ConsistencyError("a type mixes marked and unmarked vertices")
    is_marked = marked_count > 0
    pc = hist[rep]

    marked = [x for x in range(T) if is_marked[x]]
    order = _canonical_order(pc, marked)
    relabel = np.empty(T, dtype=np.int64)
    relabel[order] = np.arange(T)
    type_of = relabel[colors]
    perm = np.array(order)
    return TypePartition(
        graph=graph,
        type_of=type_of,
        type_count=counts[perm],
        port_count=pc[np.ix_(perm, perm)],
        marked_types=frozenset(int(relabel[x]) for x in marked),
    )


def compute_partition(graph: RegularGraph, marked: MarkedSet) -> TypePartition:
    """Coarsest equitable partition refining {marked, unmarked}, by color refinement."""
    marked.require_nonempty()
    mask = marked.mask(graph)
    colors = np.where(mask, 0, 1).astype(np.int64)
    if mask.all():
        colors[:] = 0
    return _finish(graph, mask, _refine(graph, colors))


def partition_from_labels(graph: RegularGraph, marked: MarkedSet, labels) -> TypePartition:
    """Wrap a user-supplied vertex typing; raises ConsistencyError unless equitable."""
    labels = np.asarray(labels)
    if labels.shape != (graph.n_vertices,):
        raise DimensionError(f"need one label per vertex ({graph.n_vertices}), got {labels.shape}")
    return _finish(graph, marked.mask(graph), labels)


@dataclass(frozen=True)
class ReducedBasis:
    pairs: tuple[tuple[int, int], ...]
    names: tuple[str, ...]

    @property
    def dimension(self) -> int:
        return len(self.pairs)

    def index(self, label) -> int:
        if isinstance(label, str):
            return self.names.index(label)
        return self.pairs.index(tuple(label))


def reduced_basis(partition: TypePartition) -> ReducedBasis:
    """All type pairs (x, y) with ``|x->y| > 0``, lexicographic; marked types sort first."""
    xs, ys = np.nonzero(partition.port_count)
    pairs = tuple(sorted((int(x), int(y)) for x, y in zip(xs, ys)))
    tn = partition.names
    return ReducedBasis(pairs, tuple(_pair_name(tn[x], tn[y]) for x, y in pairs))


def _pair_name(x: str, y: str) -> str:
    return x + y if len(x) == len(y) == 1 else f"{x}|{y}"


def initial_in_basis(partition: TypePartition, basis: ReducedBasis) -> NDArray[np.float64]:
    """Coordinates of the uniform arc superposition: ``sqrt(|x| |x->y| / (N d))``."""
    g = partition.graph
    Nd = g.n_vertices * g.degree
    prods = [int(partition.type_count[x]) * int(partition.port_count[x, y]) for x, y in basis.pairs]
    if sum(prods) != Nd:
        raise ConsistencyError(f"sum of |x||x->y| is {sum(prods)}, expected N*d = {Nd}")
    return np.sqrt(np.array(prods, dtype=float) / Nd)


@dataclass(eq=False)
class ReducedOperator:
    """Dense matrix of the walk restricted to a labeled basis."""

    matrix: NDArray[np.complex128]
    labels: tuple[str, ...]
    with_oracle: bool
    basis: ReducedBasis | None = None
    partition: TypePartition | None = field(default=None, repr=False)

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    def index(self, label: str) -> int:
        return self.labels.index(label)

    def column(self, label: str) -> dict[str, complex]:
        j = self.index(label)
        return {lab: complex(self.matrix[i, j]) for i, lab in enumerate(self.labels)
                if abs(self.matrix[i, j]) > 0}

    def unitarity_error(self) -> float:
        M = self.matrix
        return float(np.abs(M.conj().T @ M - np.eye(len(M))).max())

    def to_report(self) -> dict:
        rep = {"basis": list(self.labels), "with_oracle": self.with_oracle}
        if self.partition is not None and self.basis is not None:
            p = self.partition
            rep["n_vertices"] = p.graph.n_vertices
            rep["degree"] = p.graph.degree
            rep["types"] = {n: int(c) for n, c in zip(p.names, p.type_count)}
            rep["marked_types"] = [p.names[x] for x in sorted(p.marked_types)]
            rep["counts"] = p.table(self.basis)
        rep["matrix"] = [[[float(z.real), float(z.imag)] for z in row] for row in self.matrix]
        return rep


def _check_counts(partition: TypePartition) -> None:
    g = partition.graph
    pc, cnt = partition.port_count, partition.type_count
    if np.any(pc.sum(axis=1) != g.degree):
        raise ConsistencyError("port counts of some type do not sum to the degree")
    arcs = cnt[:, None] * pc
    if not np.array_equal(arcs, arcs.T):
        raise ConsistencyError("|x||x->y| != |y||y->x| for some pair")
    if int(cnt.sum()) != g.n_vertices:
        raise ConsistencyError("type counts do not sum to N")


def reduced_operator(partition: TypePartition, basis: ReducedBasis,
                     with_oracle: bool = True) -> ReducedOperator:
    """Walk (U, or U0 without oracle) on the arc-type basis, from counts alone."""
    _check_counts(partition)
    pc = partition.port_count
    d = partition.graph.degree
    pos = {pair: i for i, pair in enumerate(basis.pairs)}
    M = np.zeros((basis.dimension, basis.dimension))
    for j, (x, y) in enumerate(basis.pairs):
        M[pos[(y, x)], j] += 2.0 / d * pc[x, y] - 1.0
        for z in np.flatnonzero(pc[x]):
            if z != y:
                M[pos[(int(z), x)], j] += 2.0 / d * np.sqrt(pc[x, y] * pc[x, z])
        if with_oracle and x in partition.marked_types:
            M[:, j] = -M[:, j]
    op = ReducedOperator(M.astype(np.complex128), basis.names, with_oracle, basis, partition)
    err = op.unitarity_error()
    if err > UNITARY_TOL:
        raise ConsistencyError(f"reduced operator not unitary (error {err:.3e})")
    return op


def _arc_layout(partition: TypePartition, basis: ReducedBasis):
    g = partition.graph
    T = partition.n_types
    lookup = np.full((T, T), -1, dtype=np.int64)
    for i, (x, y) in enumerate(basis.pairs):
        lookup[x, y] = i
    tx = np.repeat(partition.type_of, g.degree)
    ty = partition.type_of[g.neighbor].ravel()
    idx = lookup[tx, ty]
    if np.any(idx < 0):
        raise DimensionError("basis does not cover every arc type pair")
    w = 1.0 / np.sqrt((partition.type_count[tx] * partition.port_count[tx, ty]).astype(float))
    return idx, w


def embed(basis: ReducedBasis, partition: TypePartition, coords) -> NDArray[np.complex128]:
    """Full-space state ``sum_i coords[i] |pair_i>``."""
    c = np.asarray(coords, dtype=np.complex128)
    if c.shape != (basis.dimension,):
        raise DimensionError(f"coords shape {c.shape}, basis dimension {basis.dimension}")
    idx, w = _arc_layout(partition, basis)
    return c[idx] * w


def project(basis: ReducedBasis, partition: TypePartition, state):
    """Coordinates ``<xy|state>`` and the norm of the part outside the subspace."""
    idx, w = _arc_layout(partition, basis)
    return _project(idx, w, basis.dimension, np.asarray(state, dtype=np.complex128))


def _project(idx, w, dim, s):
    if s.shape != idx.shape:
        raise DimensionError(f"state shape {s.shape}, expected {idx.shape}")
    return _backend.kernels.project(np.ascontiguousarray(s), idx, w, dim)


@dataclass(eq=False)
class Reduction:
    """Partition, basis and precomputed arc layout for one (graph, marked) instance."""

    graph: RegularGraph
    marked: MarkedSet
    partition: TypePartition
    basis: ReducedBasis
    _idx: NDArray[np.int64] = field(repr=False)
    _w: NDArray[np.float64] = field(repr=False)

    @classmethod
    def build(cls, graph: RegularGraph, marked: MarkedSet) -> "Reduction":
        part = compute_partition(graph, marked)
        basis = reduced_basis(part)
        idx, w = _arc_layout(part, basis)
        return cls(graph, marked, part, basis, idx, w)

    @property
    def dimension(self) -> int:
        return self.basis.dimension

    def operator(self, with_oracle: bool = True) -> ReducedOperator:
        return reduced_operator(self.partition, self.basis, with_oracle)

    def initial(self) -> NDArray[np.float64]:
        return initial_in_basis(self.partition, self.basis)

    def embed(self, coords) -> NDArray[np.complex128]:
        c = np.asarray(coords, dtype=np.complex128)
        if c.shape != (self.dimension,):
            raise DimensionError(f"coords shape {c.shape}, basis dimension {self.dimension}")
        return c[self._idx] * self._w

    def project(self, state):
        return _project(self._idx, self._w, self.dimension, np.asarray(state, dtype=np.complex128))

    def doubling_ratio(self) -> Fraction | None:
        """``(2/d) |b->a|`` when the single-neighbor-type assumption holds, else None."""
        p = self.partition
        if not p.doubling_assumptions()["holds"]:
            return None
        (a,) = p.marked_types
        (b,) = np.flatnonzero(p.port_count[a])
        return Fraction(2 * int(p.port_count[b, a]), self.graph.degree)
