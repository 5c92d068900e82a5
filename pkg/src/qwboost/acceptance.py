"""
Desk-scale acceptance checks. Each check returns a :class:`CriterionResult`;
``run_all`` evaluates the whole list, as used by ``qwboost verify`` and the
acceptance test module.
"""

from __future__ import annotations

import functools
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from . import analysis, walk
from .graphs import (MarkedSet, antipodal_marks, build_complete, build_complete_bipartite,
                     build_hypercube, build_torus)
from .quotient import Reduction

MARK0 = MarkedSet({0})
T_STAR_1024 = int(round(np.pi * np.sqrt(1024) / (2 * np.sqrt(2))))  # 36


@dataclass
class CriterionResult:
    cid: int
    name: str
    passed: bool
    measured: dict = field(default_factory=dict)

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        vals = ", ".join(f"{k}={_fmt(v)}" for k, v in self.measured.items())
        return f"[{tag}] C{self.cid:02d} {self.name}: {vals}"


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


@functools.lru_cache(maxsize=None)
def complete_1024_run():
    g = build_complete(1024)
    t0 = time.perf_counter()
    series = walk.simulate(g, MARK0, 80, record_basis=True)
    return series, time.perf_counter() - t0


def c01_complete_peak() -> CriterionResult:
    series, elapsed = complete_1024_run()
    ab = series.basis_column("ab")[T_STAR_1024]
    ba = series.basis_column("ba")[T_STAR_1024]
    ok = 0.47 <= ab <= 0.53 and 0.47 <= ba <= 0.53 and elapsed < 10.0
    return CriterionResult(1, "complete-1024-peak", ok,
                           {"t": T_STAR_1024, "P_ab": ab, "P_ba": ba, "seconds": elapsed})


def c02_boosting() -> CriterionResult:
    series, _ = complete_1024_run()
    r = series.reports[T_STAR_1024]
    ok = r.boosted_success >= 0.95 and 0.47 <= r.position_success <= 0.53
    return CriterionResult(2, "boosting", ok,
                           {"position": r.position_success, "boosted": r.boosted_success})


def c03_difference_bound() -> CriterionResult:
    series, _ = complete_1024_run()
    max_diff, bound, ok = analysis.difference_bound_check(series, 1024)
    t_worst = int(np.argmax(np.abs(series.basis_column("ab") - series.basis_column("ba"))))
    return CriterionResult(3, "difference-bound", ok,
                           {"max_diff": max_diff, "limit": bound + analysis.DIFF_SLACK,
                            "at_t": t_worst})


def c04_hypercube() -> CriterionResult:
    g = build_hypercube(10)
    single = walk.simulate(g, MARK0, 80)
    pos = single.position[T_STAR_1024]
    boo = single.boosted[T_STAR_1024]
    anti = walk.simulate(g, antipodal_marks(g), 80)
    k = int(np.argmax(anti.boosted))
    ratio = anti.boosted[k] / anti.position[k]
    ok = 0.40 <= pos <= 0.60 and boo >= 2 * pos - 0.05 and ratio >= 1.8
    return CriterionResult(4, "hypercube-doubling", ok,
                           {"position": pos, "boosted": boo, "antipodal_peak_t": k,
                            "antipodal_ratio": ratio})


EQUIVALENCE_CASES = [
    ("complete", lambda: build_complete(8)),
    ("complete", lambda: build_complete(32)),
    ("hypercube", lambda: build_hypercube(3)),
    ("hypercube", lambda: build_hypercube(4)),
    ("bipartite", lambda: build_complete_bipartite(8)),
    ("bipartite", lambda: build_complete_bipartite(16)),
    ("torus", lambda: build_torus(2, 4)),
    ("torus", lambda: build_torus(2, 6)),
]


def equivalence_errors(graph, marked, with_oracle=True) -> tuple[float, float]:
    """Max coordinate error and max residual of embed -> step -> project per basis vector."""
    red = Reduction.build(graph, marked)
    M = red.operator(with_oracle).matrix
    coord_err = resid = 0.0
    for i in range(red.dimension):
        e = np.zeros(red.dimension)
        e[i] = 1.0
        out = walk.step(graph, marked, red.embed(e), with_oracle)
        coords, r = red.project(out)
        coord_err = max(coord_err, float(np.abs(coords - M[:, i]).max()))
        resid = max(resid, r)
    return coord_err, resid


def c05_equivalence() -> CriterionResult:
    worst_c = worst_r = 0.0
    for _, make in EQUIVALENCE_CASES:
        g = make()
        for oracle in (True, False):
            c, r = equivalence_errors(g, MARK0, oracle)
            worst_c, worst_r = max(worst_c, c), max(worst_r, r)
    ok = worst_c <= 1e-10 and worst_r <= 1e-10
    return CriterionResult(5, "reduced-full-equivalence", ok,
                           {"cases": len(EQUIVALENCE_CASES), "max_coord_err": worst_c,
                            "max_residual": worst_r})


def complete_golden(N: int) -> np.ndarray:
    c = (N - 3) / (N - 1)
    s = 2 * np.sqrt(N - 2) / (N - 1)
    return np.array([[0, -c, s], [-1, 0, 0], [0, s, c]])


def c06_golden() -> CriterionResult:
    errs = {}
    for N in (6, 64, 1024):
        op = Reduction.build(build_complete(N), MARK0).operator()
        errs[f"N{N}"] = float(np.abs(op.matrix - complete_golden(N)).max())
    return CriterionResult(6, "complete-operator-golden", max(errs.values()) <= 1e-12, errs)


def c07_spectrum() -> CriterionResult:
    res = {}
    for N in (16, 64, 256, 1024):
        rep = analysis.spectrum(Reduction.build(build_complete(N), MARK0).operator())
        res[f"N{N}"] = rep.closed_form["phase_residual"]
    return CriterionResult(7, "spectral-closed-form", max(res.values()) <= 1e-10, res)


def c08_perturbation() -> CriterionResult:
    N = 1024
    op = Reduction.build(build_complete(N), MARK0).operator()
    pm = analysis.plus_minus_basis(op, op.index("ab"), op.index("ba"))
    pr = analysis.degenerate_perturbation(pm, (pm.index("-"), pm.index("bb")))
    E = pr.eigenvalues[0]
    want = np.sqrt(2 / N)
    re_err = abs(E.real - 1)
    im_rel = abs(E.imag - want) / want
    series, _ = complete_1024_run()
    argmax = int(np.argmax(series.boosted))
    ok = (re_err <= 0.05 and im_rel <= 0.05 and abs(pr.eigenvalues[1] - E.conjugate()) < 1e-12
          and abs(pr.predicted_runtime - argmax) <= 1)
    return CriterionResult(8, "perturbation-prediction", ok,
                           {"E_plus": E, "im_rel_err": im_rel, "t_star": pr.predicted_runtime,
                            "argmax_boosted": argmax})


def c09_oracle_norm() -> CriterionResult:
    errs = {}
    for N in (4, 64, 1024):
        val = walk.oracle_perturbation_norm(build_complete(N), MARK0)
        errs[f"N{N}"] = abs(val - 2 / np.sqrt(N))
    return CriterionResult(9, "oracle-error-norm", max(errs.values()) <= 1e-12, errs)


DOUBLING_LADDERS = [
    # family, sizes, marks, params, ratio(size), verdict
    ("complete", [64, 256, 1024], "single", {}, lambda N: Fraction(2, N - 1), "Satisfied"),
    ("hypercube", [6, 8, 10], "single", {}, lambda n: Fraction(2, n), "Satisfied"),
    ("hypercube", [6, 8, 10], "antipodal", {}, lambda n: Fraction(2, n), "Satisfied"),
    ("bipartite", [16, 64, 256], "single", {}, lambda N: Fraction(4, N), "Satisfied"),
    ("torus", [8, 16, 32], "single", {"dim": 2}, lambda L: Fraction(1, 2), "Violated"),
    ("torus", [5, 7, 9], "single", {"dim": 3}, lambda L: Fraction(1, 3), "Violated"),
]


def c10_condition() -> CriterionResult:
    ok = True
    measured = {}
    for fam, sizes, marks, params, expect, verdict in DOUBLING_LADDERS:
        rep = analysis.doubling_condition(fam, sizes, marks=marks, **params)
        exact = all(e.ratio == expect(e.size) for e in rep.entries)
        good = exact and rep.verdict.value == verdict
        ok &= good
        key = fam + ("-anti" if marks == "antipodal" else "") + (f"-D{params['dim']}" if params else "")
        measured[key] = f"{','.join(str(r) for r in rep.ratios)}:{rep.verdict.value}"
    return CriterionResult(10, "condition-values", ok, measured)


def c11_lattice_expansion() -> CriterionResult:
    want = {"ab": -0.5, "cb": 1 / np.sqrt(2), "db": 0.5}
    err = 0.0
    # L = 4 is excluded: C4 x C4 is the 4-cube and types merge
    for L in (5, 8, 32):
        op = Reduction.build(build_torus(2, L), MARK0).operator()
        col = op.column("ba")
        keys = set(col) | set(want)
        err = max(err, max(abs(col.get(k, 0) - want.get(k, 0)) for k in keys))
    return CriterionResult(11, "lattice-ba-expansion", err <= 1e-12, {"max_err": err})


PROPERTY_GRAPHS = [
    lambda: build_complete(64),
    lambda: build_hypercube(6),
    lambda: build_complete_bipartite(32),
    lambda: build_torus(2, 8),
    lambda: build_torus(3, 4),
]


def _random_state(rng, n):
    z = rng.normal(size=n) + 1j * rng.normal(size=n)
    return z / np.linalg.norm(z)


def c12_properties() -> CriterionResult:
    t0 = time.perf_counter()
    rng = np.random.default_rng(20261015)
    drift = coin_err = u0_err = 0.0
    shift_exact = oracle_exact = counts_ok = dominance_ok = True
    for make in PROPERTY_GRAPHS:
        g = make()
        s = walk.evolve(g, MARK0, walk.initial_state(g), 1000)
        drift = max(drift, abs(np.linalg.norm(s) - 1))
        psi = _random_state(rng, g.n_arcs)
        coin_err = max(coin_err, float(np.abs(walk.apply_coin(g, walk.apply_coin(g, psi)) - psi).max()))
        shift_exact &= np.array_equal(walk.apply_shift(g, walk.apply_shift(g, psi)), psi)
        oracle_exact &= np.array_equal(walk.apply_oracle(g, MARK0, walk.apply_oracle(g, MARK0, psi)), psi)
        psi0 = walk.initial_state(g)
        u0_err = max(u0_err, float(np.abs(walk.step(g, MARK0, psi0, False) - psi0).max()))
        red = Reduction.build(g, MARK0)
        tab = red.partition.table(red.basis)
        counts_ok &= sum(r["product"] for r in tab) == g.n_arcs
        for _ in range(20):
            rep = walk.measure_boosted_success(g, MARK0, _random_state(rng, g.n_arcs))
            dominance_ok &= rep.boosted_success >= rep.position_success
    elapsed = time.perf_counter() - t0
    ok = (drift <= 1e-9 and coin_err <= 1e-12 and shift_exact and oracle_exact
          and u0_err <= 1e-12 and counts_ok and dominance_ok and elapsed < 60)
    return CriterionResult(12, "property-suite", ok,
                           {"drift_1000": drift, "coin_involution": coin_err,
                            "shift_exact": shift_exact, "oracle_exact": oracle_exact,
                            "U0_fix": u0_err, "count_identity": counts_ok,
                            "boosted_dominance": dominance_ok, "seconds": elapsed})


CRITERIA: list[Callable[[], CriterionResult]] = [
    c01_complete_peak, c02_boosting, c03_difference_bound, c04_hypercube, c05_equivalence, c06_golden,
    c07_spectrum, c08_perturbation, c09_oracle_norm, c10_condition, c11_lattice_expansion,
    c12_properties,
]


def run_all(echo: Callable[[str], None] | None = print) -> list[CriterionResult]:
    results = []
    for check in CRITERIA:
        res = check()
        if echo is not None:
            echo(res.line())
        results.append(res)
    return results
