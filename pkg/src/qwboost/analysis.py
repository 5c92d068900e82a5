"""
Analytical checks on reduced walk operators.

- doubling_condition: the ratio ``(2/d) |b->a|`` over a ladder of sizes
- spectrum: eigen-decomposition with the closed form for the complete graph
- plus_minus_basis / degenerate_perturbation: the 2x2 block that sets the
  eigenphase splitting sigma and the predicted runtime pi / (2 sigma)
- difference_bound_check: ``max_t |P_ab - P_ba|`` against ``1/sqrt(2N)``
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
import scipy.linalg
from numpy.typing import NDArray

from .errors import ConsistencyError, DegenerateSolverError, InvalidParameterError
from .graphs import Family, MarkedSet, RegularGraph, antipodal_marks, build_family
from .quotient import ReducedOperator, Reduction
from .walk import SimulationSeries

__all__ = [
    "Verdict",
    "DoublingEntry",
    "DoublingReport",
    "SpectralReport",
    "PerturbationResult",
    "marks_for",
    "doubling_entry",
    "doubling_condition",
    "spectrum",
    "complete_closed_form",
    "complete_large_n_operator",
    "plus_minus_basis",
    "degenerate_perturbation",
    "difference_bound_check",
    "auto_steps",
]

SPECTRAL_TOL = 1e-8
DIFF_SLACK = 0.01
RATIO_THRESHOLD = Fraction(1, 10)


class Verdict(str, enum.Enum):
    SATISFIED = "Satisfied"
    VIOLATED = "Violated"
    OUTSIDE_ASSUMPTIONS = "OutsideAssumptions"


def _frac(x: Fraction | None) -> str | None:
    return None if x is None else f"{x.numerator}/{x.denominator}"


def marks_for(graph: RegularGraph, marks: str | Sequence[int] = "single") -> MarkedSet:
    if isinstance(marks, str):
        if marks in ("single", "first"):
            return MarkedSet({0})
        if marks == "antipodal":
            return antipodal_marks(graph)
        raise InvalidParameterError(f"unknown mark specification {marks!r}")
    return MarkedSet(marks)


@dataclass
class DoublingEntry:
    size: int
    n_vertices: int
    degree: int
    b_to_a: int | None
    ratio: Fraction | None
    assumptions: dict

    def to_report(self) -> dict:
        return {
            "size": self.size,
            "N": self.n_vertices,
            "d": self.degree,
            "b_to_a": self.b_to_a,
            "ratio": _frac(self.ratio),
            "ratio_float": None if self.ratio is None else float(self.ratio),
            "assumptions_hold": self.assumptions["holds"],
            "marked_neighbor_types": self.assumptions["marked_neighbor_types"],
        }


@dataclass
class DoublingReport:
    family: str
    marks: str
    entries: list[DoublingEntry]
    verdict: Verdict
    low_confidence: bool

    @property
    def below_threshold(self) -> bool:
        """Largest-size ratio under ``RATIO_THRESHOLD``; informational only."""
        last = max(self.entries, key=lambda e: e.n_vertices).ratio
        return last is not None and last < RATIO_THRESHOLD

    @property
    def ratios(self) -> list[Fraction | None]:
        return [e.ratio for e in self.entries]

    def to_report(self) -> dict:
        return {
            "family": self.family,
            "marks": self.marks,
            "verdict": self.verdict.value,
            "low_confidence": self.low_confidence,
            "below_threshold": self.below_threshold,
            "entries": [e.to_report() for e in self.entries],
        }


def doubling_entry(graph: RegularGraph, marked: MarkedSet, size: int | None = None) -> DoublingEntry:
    red = Reduction.build(graph, marked)
    assume = red.partition.doubling_assumptions()
    ratio = red.doubling_ratio()
    b_to_a = None if ratio is None else int(ratio * graph.degree / 2)
    return DoublingEntry(size if size is not None else graph.n_vertices, graph.n_vertices,
                         graph.degree, b_to_a, ratio, assume)


def _verdict(entries: list[DoublingEntry]) -> Verdict:
    if any(e.ratio is None for e in entries):
        return Verdict.OUTSIDE_ASSUMPTIONS
    cs = [e.ratio for e in sorted(entries, key=lambda e: e.n_vertices)]
    if len(cs) > 1 and all(c == cs[0] for c in cs):
        return Verdict.VIOLATED
    if all(a > b for a, b in zip(cs, cs[1:])):
        return Verdict.SATISFIED
    return Verdict.VIOLATED


def doubling_condition(family: Family | str, sizes: Sequence[int],
                       marks: str | Sequence[int] = "single", **params) -> DoublingReport:
    """
    Evaluate ``(2/d) |b->a|`` for each size of a family.

    Satisfied: the ratio strictly decreases along the ladder (ordered by N).
    Violated: otherwise, in particular a constant ratio.
    OutsideAssumptions: some instance has several marked types or a marked type
    with more than one neighbor type.
    """
    if not sizes:
        raise InvalidParameterError("size ladder is empty")
    fam = Family(family)
    entries = []
    for size in sizes:
        g = build_family(fam, size, **params)
        entries.append(doubling_entry(g, marks_for(g, marks), size))
    return DoublingReport(fam.value, marks if isinstance(marks, str) else "explicit",
                          entries, _verdict(entries), len(sizes) < 2)


@dataclass
class SpectralReport:
    labels: tuple[str, ...]
    eigenvalues: NDArray[np.complex128]
    eigenphases: NDArray[np.float64]
    eigenvectors: NDArray[np.complex128] = field(repr=False)
    reconstruction_error: float
    closed_form: dict | None = None

    def to_report(self) -> dict:
        rep = {
            "basis": list(self.labels),
            "eigenphases": [float(x) for x in self.eigenphases],
            "eigenvalues": [[float(z.real), float(z.imag)] for z in self.eigenvalues],
            "reconstruction_error": self.reconstruction_error,
        }
        if self.closed_form is not None:
            rep["closed_form"] = {k: v for k, v in self.closed_form.items() if k != "eigenvectors"}
        return rep


def _phase(z) -> NDArray[np.float64]:
    ph = np.angle(z)
    # fold -pi onto pi so phases lie in (-pi, pi]
    return np.where(ph <= -np.pi + 1e-12, ph + 2 * np.pi, ph)


def _circ(a, b) -> float:
    return float(abs(np.angle(np.exp(1j * (a - b)))))


def complete_closed_form(N: int) -> dict:
    """Eigen-system of the complete-graph 3x3 search operator in closed form."""
    c = (N - 3) / (N - 1)
    s = 2 * np.sqrt(N - 2) / (N - 1)
    cphi = (1 + c) / 2
    sphi = np.sqrt((1 - c) * (3 + c)) / 2
    phi = float(np.arctan2(sphi, cphi))
    r1 = np.sqrt((1 - c) / (3 + c))
    r2 = np.sqrt((1 + c) / (3 + c))
    vecs = {
        "plus": np.array([r1 / 2 - 0.5j, r1 / 2 + 0.5j, r2]),
        "minus": np.array([r1 / 2 + 0.5j, r1 / 2 - 0.5j, r2]),
        "minus_one": np.array([-r2, -r2, r1], dtype=complex),
    }
    return {
        "N": N,
        "cos_theta": c,
        "sin_theta": float(s),
        "cos_phi": cphi,
        "sin_phi": float(sphi),
        "phi": phi,
        "expected_phases": [phi, -phi, float(np.pi)],
        "eigenvectors": vecs,
    }


def _is_complete_search(op: ReducedOperator) -> bool:
    p = op.partition
    return (p is not None and op.with_oracle and p.graph.family is Family.COMPLETE
            and tuple(op.labels) == ("ab", "ba", "bb") and len(p.marked_types) == 1)


def spectrum(op: ReducedOperator) -> SpectralReport:
    """
    Full eigen-decomposition of a small unitary matrix via the complex Schur
    form, which is diagonal with unitary Schur vectors for normal input.
    """
    M = np.asarray(op.matrix, dtype=np.complex128)
    err = op.unitarity_error()
    if err > SPECTRAL_TOL:
        raise ConsistencyError(f"operator not unitary (error {err:.3e})")
    T, Z = scipy.linalg.schur(M, output="complex")
    lam = np.diag(T).copy()
    ph = _phase(lam)
    order = np.argsort(ph, kind="stable")
    lam, ph, Z = lam[order], ph[order], Z[:, order]
    recon = float(np.abs(Z @ np.diag(lam) @ Z.conj().T - M).max())
    if recon > SPECTRAL_TOL:
        raise ConsistencyError(f"eigen-decomposition residual {recon:.3e}")
    rep = SpectralReport(tuple(op.labels), lam, ph, Z, recon)
    if _is_complete_search(op):
        cf = complete_closed_form(op.partition.graph.n_vertices)
        used = set()
        res = 0.0
        for want in cf["expected_phases"]:
            k = min((i for i in range(3) if i not in used), key=lambda i: _circ(ph[i], want))
            used.add(k)
            res = max(res, _circ(ph[k], want))
        cf["phase_residual"] = res
        cf["eigvec_residual"] = max(
            float(np.linalg.norm(M @ v - e * v))
            for v, e in zip(cf["eigenvectors"].values(),
                            [np.exp(1j * cf["phi"]), np.exp(-1j * cf["phi"]), -1.0]))
        rep.closed_form = cf
    return rep


def complete_large_n_operator(N: int) -> ReducedOperator:
    """Leading-order complete-graph search operator on (ab, ba, bb)."""
    e = 2 / np.sqrt(N)
    M = np.array([[0, -1, e], [-1, 0, 0], [0, e, 1]], dtype=np.complex128)
    return ReducedOperator(M, ("ab", "ba", "bb"), True)


def plus_minus_basis(op: ReducedOperator, ab_index: int, ba_index: int) -> ReducedOperator:
    """Rotate the (ab, ba) pair to ``|+-> = (|ab> +- |ba>)/sqrt 2``; returns ``T^-1 M T``."""
    n = op.dimension
    if ab_index == ba_index or not (0 <= ab_index < n and 0 <= ba_index < n):
        raise InvalidParameterError(f"invalid index pair ({ab_index}, {ba_index}) for dimension {n}")
    T = np.eye(n)
    h = 1 / np.sqrt(2)
    T[np.ix_([ab_index, ba_index], [ab_index, ba_index])] = [[h, h], [h, -h]]
    labels = list(op.labels)
    labels[ab_index], labels[ba_index] = "+", "-"
    # T is real symmetric and orthogonal, so T^-1 = T
    return ReducedOperator(T @ op.matrix @ T, tuple(labels), op.with_oracle, None, op.partition)


@dataclass
class PerturbationResult:
    """
    Solution of the 2x2 near-degenerate block.

    ``eigenvalues[0]`` is E+ (positive eigenphase); ``coefficients[k]`` holds
    the normalized block eigenvector for ``eigenvalues[k]``.
    """

    labels: tuple[str, str]
    block: NDArray[np.complex128]
    eigenvalues: tuple[complex, complex]
    coefficients: tuple[NDArray[np.complex128], NDArray[np.complex128]]
    sigma: float
    predicted_runtime: float

    @property
    def rounded_runtime(self) -> int:
        return int(round(self.predicted_runtime))

    def to_report(self) -> dict:
        return {
            "labels": list(self.labels),
            "block": [[[float(z.real), float(z.imag)] for z in row] for row in self.block],
            "eigenvalues": [[float(z.real), float(z.imag)] for z in self.eigenvalues],
            "coefficients": [[[float(z.real), float(z.imag)] for z in v] for v in self.coefficients],
            "sigma": self.sigma,
            "predicted_runtime": self.predicted_runtime,
            "rounded_runtime": self.rounded_runtime,
        }


def degenerate_perturbation(op_prime: ReducedOperator, degenerate_pair: tuple[int, int],
                            tol: float = 1e-12) -> PerturbationResult:
    """Exact eigen-solution of the block on two near-1 diagonal entries."""
    i, j = degenerate_pair
    M = op_prime.matrix
    n = len(M)
    if i == j or not (0 <= i < n and 0 <= j < n):
        raise InvalidParameterError(f"invalid degenerate pair {degenerate_pair}")
    B = M[np.ix_([i, j], [i, j])].astype(np.complex128)
    if abs(B[0, 0] - 1) > 0.2 or abs(B[1, 1] - 1) > 0.2:
        raise InvalidParameterError(f"diagonal entries {B[0, 0]:.4g}, {B[1, 1]:.4g} are not near 1")
    if abs(B[0, 1]) <= tol and abs(B[1, 0]) <= tol:
        raise DegenerateSolverError("block has no off-diagonal coupling")
    half = (B[0, 0] + B[1, 1]) / 2
    root = np.sqrt(half * half - (B[0, 0] * B[1, 1] - B[0, 1] * B[1, 0]))
    if abs(root) <= tol:
        raise DegenerateSolverError("block is defective (repeated eigenvalue)")
    evs = [half + root, half - root]
    vecs = []
    for E in evs:
        if abs(B[0, 1]) >= abs(B[1, 0]):
            v = np.array([B[0, 1], E - B[0, 0]])
        else:
            v = np.array([E - B[1, 1], B[1, 0]])
        vecs.append(v / np.linalg.norm(v))
    if np.angle(evs[1]) > np.angle(evs[0]):
        evs.reverse()
        vecs.reverse()
    sigma = float(abs(np.angle(evs[0])))
    if sigma <= tol:
        raise DegenerateSolverError("eigenphase splitting vanishes")
    return PerturbationResult(
        labels=(op_prime.labels[i], op_prime.labels[j]),
        block=B,
        eigenvalues=(complex(evs[0]), complex(evs[1])),
        coefficients=(vecs[0], vecs[1]),
        sigma=sigma,
        predicted_runtime=float(np.pi / (2 * sigma)),
    )


def difference_bound_check(series: SimulationSeries, N: int, slack: float = DIFF_SLACK):
    """``max_t |P_ab(t) - P_ba(t)|`` against ``1/sqrt(2N) + slack``."""
    try:
        ab = series.basis_column("ab")
        ba = series.basis_column("ba")
    except KeyError as exc:
        raise InvalidParameterError(str(exc)) from None
    max_diff = float(np.abs(ab - ba).max())
    bound = 1 / np.sqrt(2 * N)
    return max_diff, float(bound), max_diff <= bound + slack


def auto_steps(graph: RegularGraph, marked: MarkedSet) -> int:
    """
    ``round(pi sqrt(N) / (2 sqrt 2))`` when the single-neighbor-type
    assumption holds, else an error: the prediction is not available.
    """
    red = Reduction.build(graph, marked)
    if not red.partition.doubling_assumptions()["holds"]:
        raise InvalidParameterError("steps=auto needs marked vertices of one type with one neighbor type")
    return int(round(np.pi * np.sqrt(graph.n_vertices) / (2 * np.sqrt(2))))
