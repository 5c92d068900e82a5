"""
Full-space coined walk: state vectors over arcs, the search step
``U = S (I x C0) (R_w x I)`` and the two measurement protocols.

States are plain ``complex128`` arrays of length ``N * d`` indexed by
``v * d + p``. The step never materializes an operator; it calls the kernel
backend chosen in :mod:`qwboost._backend`.
"""

from __future__ import annotations

import csv
import io
import os
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from numpy.typing import NDArray

from . import _backend
from .errors import DimensionError, InvalidParameterError
from .graphs import MarkedSet, RegularGraph

__all__ = [
    "MeasurementReport",
    "SimulationSeries",
    "initial_state",
    "basis_state",
    "oracle_signs",
    "apply_oracle",
    "apply_coin",
    "apply_shift",
    "step",
    "evolve",
    "position_distribution",
    "measure_boosted_success",
    "oracle_perturbation_norm",
    "simulate",
]

State = NDArray[np.complex128]


def _as_state(graph: RegularGraph, state) -> State:
    s = np.ascontiguousarray(state, dtype=np.complex128)
    if s.shape != (graph.n_arcs,):
        raise DimensionError(f"state has shape {s.shape}, graph needs ({graph.n_arcs},)")
    return s


def initial_state(graph: RegularGraph) -> State:
    """Uniform superposition over all arcs."""
    return np.full(graph.n_arcs, 1.0 / np.sqrt(graph.n_arcs), dtype=np.complex128)


def basis_state(graph: RegularGraph, v: int, p: int) -> State:
    s = np.zeros(graph.n_arcs, dtype=np.complex128)
    s[graph.arc(v, p)] = 1.0
    return s


def oracle_signs(graph: RegularGraph, marked: MarkedSet) -> NDArray[np.float64]:
    return np.where(marked.mask(graph), -1.0, 1.0)


def apply_oracle(graph: RegularGraph, marked: MarkedSet, state) -> State:
    return _backend.kernels.oracle(_as_state(graph, state), graph.degree, oracle_signs(graph, marked))


def apply_coin(graph: RegularGraph, state) -> State:
    return _backend.kernels.coin(_as_state(graph, state), graph.degree)


def apply_shift(graph: RegularGraph, state) -> State:
    return _backend.kernels.shift(_as_state(graph, state), graph.reverse_arc)


def step(graph: RegularGraph, marked: MarkedSet | None, state, with_oracle: bool = True) -> State:
    """One application of U (or U0 when ``with_oracle`` is false). Input is not modified."""
    s = _as_state(graph, state)
    sign = oracle_signs(graph, marked) if with_oracle and marked is not None else None
    return _backend.kernels.step(s, graph.degree, graph.reverse_arc, sign)


def evolve(graph: RegularGraph, marked: MarkedSet | None, state, t: int,
           with_oracle: bool = True) -> State:
    s = _as_state(graph, state)
    sign = oracle_signs(graph, marked) if with_oracle and marked is not None else None
    d, rev = graph.degree, graph.reverse_arc
    for _ in range(t):
        s = _backend.kernels.step(s, d, rev, sign)
    return s


def position_distribution(graph: RegularGraph, state) -> NDArray[np.float64]:
    """Probability of finding the walker at each vertex (coin traced out)."""
    s = _as_state(graph, state)
    return (np.abs(s) ** 2).reshape(-1, graph.degree).sum(axis=1)


@dataclass
class MeasurementReport:
    """
    Outcome statistics of the two measurement protocols.

    ``position_success`` is the probability that a position measurement lands
    on a marked vertex. ``boosted_success`` adds the probability of landing on
    an unmarked vertex with the coin pointing at a marked neighbor, which the
    follow-up coin measurement and oracle check then turn into a success.
    """

    position_success: float
    boosted_success: float
    per_vertex: NDArray[np.float64] = field(repr=False)


def _into_marked_arcs(graph: RegularGraph, mask: NDArray[np.bool_]) -> NDArray[np.bool_]:
    return (mask[graph.neighbor] & ~mask[:, None]).ravel()


def measure_boosted_success(graph: RegularGraph, marked: MarkedSet, state,
                            _arc_mask=None) -> MeasurementReport:
    marked.require_nonempty()
    s = _as_state(graph, state)
    mask = marked.mask(graph)
    prob = np.abs(s) ** 2
    per_vertex = prob.reshape(-1, graph.degree).sum(axis=1)
    pos = float(per_vertex[mask].sum())
    arc_mask = _into_marked_arcs(graph, mask) if _arc_mask is None else _arc_mask
    boosted = pos + float(prob[arc_mask].sum())
    return MeasurementReport(pos, boosted, per_vertex)


def oracle_perturbation_norm(graph: RegularGraph, marked: MarkedSet) -> float:
    """``||(U - U0) psi0||`` by direct evaluation of both steps."""
    psi0 = initial_state(graph)
    diff = step(graph, marked, psi0, True) - step(graph, marked, psi0, False)
    return float(np.linalg.norm(diff))


@dataclass
class SimulationSeries:
    """Per-step measurement record of a run starting at t = 0."""

    t: list[int] = field(default_factory=list)
    reports: list[MeasurementReport] = field(default_factory=list)
    basis_labels: list[str] | None = None
    basis_probs: list[NDArray[np.float64]] = field(default_factory=list)

    def append(self, t: int, report: MeasurementReport, probs=None) -> None:
        if self.t and t <= self.t[-1]:
            raise InvalidParameterError("time steps must be strictly increasing")
        self.t.append(t)
        self.reports.append(report)
        if probs is not None:
            self.basis_probs.append(np.asarray(probs, dtype=float))

    @property
    def position(self) -> NDArray[np.float64]:
        return np.array([r.position_success for r in self.reports])

    @property
    def boosted(self) -> NDArray[np.float64]:
        return np.array([r.boosted_success for r in self.reports])

    def basis_column(self, label: str) -> NDArray[np.float64]:
        if not self.basis_labels or label not in self.basis_labels:
            raise KeyError(f"basis label {label!r} not recorded")
        i = self.basis_labels.index(label)
        return np.array([p[i] for p in self.basis_probs])

    def to_csv(self, path: str | os.PathLike | None = None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        labels = self.basis_labels if self.basis_probs else []
        w.writerow(["t", "p_position", "p_boosted", *labels])
        for i, (t, r) in enumerate(zip(self.t, self.reports)):
            row = [t, f"{r.position_success:.12g}", f"{r.boosted_success:.12g}"]
            if labels:
                row += [f"{p:.12g}" for p in self.basis_probs[i]]
            w.writerow(row)
        text = buf.getvalue()
        if path is not None:
            with open(path, "w", newline="") as fh:
                fh.write(text)
        return text

    @classmethod
    def from_csv(cls, path: str | os.PathLike) -> "SimulationSeries":
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        header, body = rows[0], rows[1:]
        labels = header[3:] or None
        out = cls(basis_labels=labels)
        for row in body:
            rep = MeasurementReport(float(row[1]), float(row[2]), np.empty(0))
            probs = [float(x) for x in row[3:]] if labels else None
            out.append(int(row[0]), rep, probs)
        return out


def simulate(graph: RegularGraph, marked: MarkedSet, steps: int,
             record_basis: bool = False,
             callback: Callable[[int, State], None] | None = None) -> SimulationSeries:
    """
    Run ``steps`` applications of U from the uniform state, recording
    t = 0 .. steps. With ``record_basis`` the state is also projected onto the
    reduced arc-type basis of (graph, marked).
    """
    if steps < 1:
        raise InvalidParameterError(f"steps must be >= 1 (got {steps})")
    marked.require_nonempty()
    reducer = None
    series = SimulationSeries()
    if record_basis:
        from .quotient import Reduction

        reducer = Reduction.build(graph, marked)
        series.basis_labels = list(reducer.basis.names)

    mask = marked.mask(graph)
    arc_mask = _into_marked_arcs(graph, mask)
    sign = np.where(mask, -1.0, 1.0)
    d, rev = graph.degree, graph.reverse_arc
    s = initial_state(graph)
    for t in range(steps + 1):
        if t:
            s = _backend.kernels.step(s, d, rev, sign)
        rep = measure_boosted_success(graph, marked, s, _arc_mask=arc_mask)
        probs = None
        if reducer is not None:
            coords, _ = reducer.project(s)
            probs = np.abs(coords) ** 2
        series.append(t, rep, probs)
        if callback is not None:
            callback(t, s)
    return series
