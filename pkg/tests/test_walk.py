import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from oracles import dense_coin, dense_oracle, dense_search, dense_shift
from qwboost import walk
from qwboost.errors import DimensionError, InvalidParameterError
from qwboost.graphs import (MarkedSet, antipodal_marks, build_complete, build_complete_bipartite,
                            build_hypercube, build_torus)
from qwboost.quotient import Reduction

MARK0 = MarkedSet({0})

SMALL_GRAPHS = {
    "complete8": lambda: build_complete(8),
    "complete20": lambda: build_complete(20),
    "hypercube4": lambda: build_hypercube(4),
    "hypercube6": lambda: build_hypercube(6),
    "bipartite12": lambda: build_complete_bipartite(12),
    "torus2x5": lambda: build_torus(2, 5),
    "torus3x4": lambda: build_torus(3, 4),
}


def random_state(rng, n):
    z = rng.normal(size=n) + 1j * rng.normal(size=n)
    return z / np.linalg.norm(z)


def test_initial_state_values():
    assert np.allclose(walk.initial_state(build_complete(4)), 1 / np.sqrt(12), atol=0, rtol=1e-15)
    assert np.allclose(walk.initial_state(build_hypercube(2)), 1 / np.sqrt(8), atol=0, rtol=1e-15)
    psi = walk.initial_state(build_complete(1024))
    # exact value 1/sqrt(1047552) = 9.77040e-4
    assert psi[0].real == pytest.approx(1 / np.sqrt(1047552), rel=1e-14)
    assert psi[0].real == pytest.approx(9.7704e-4, rel=1e-4)
    assert np.linalg.norm(psi) == pytest.approx(1, abs=1e-12)


@pytest.mark.parametrize("name", SMALL_GRAPHS)
def test_u0_fixes_uniform(backend, name):
    g = SMALL_GRAPHS[name]()
    psi0 = walk.initial_state(g)
    assert np.abs(walk.step(g, MARK0, psi0, with_oracle=False) - psi0).max() <= 1e-12


def test_step_matches_dense_complete8(backend):
    g = build_complete(8)
    U = dense_search(g, MARK0)
    assert U.shape == (56, 56)
    s = walk.initial_state(g)
    ref = s.copy()
    for _ in range(3):
        s = walk.step(g, MARK0, s)
        ref = U @ ref
    assert np.abs(s - ref).max() <= 1e-12


@pytest.mark.parametrize("name", SMALL_GRAPHS)
@pytest.mark.parametrize("marks", ["single", "pair"])
def test_dense_oracle_equivalence(backend, name, marks):
    g = SMALL_GRAPHS[name]()
    assert g.n_arcs <= 2000
    marked = MARK0 if marks == "single" else MarkedSet({0, g.n_vertices - 1})
    U = dense_search(g, marked)
    s = random_state(np.random.default_rng(7), g.n_arcs)
    ref = s.copy()
    for _ in range(20):
        s = walk.step(g, marked, s)
        ref = U @ ref
        assert np.abs(s - ref).max() <= 1e-10


def test_substeps_match_dense(backend):
    g = build_torus(2, 5)
    rng = np.random.default_rng(1)
    s = random_state(rng, g.n_arcs)
    assert np.allclose(walk.apply_shift(g, s), dense_shift(g) @ s, atol=1e-15)
    assert np.allclose(walk.apply_coin(g, s), dense_coin(g) @ s, atol=1e-14)
    assert np.allclose(walk.apply_oracle(g, MARK0, s), dense_oracle(g, MARK0) @ s, atol=0)


def test_step_is_pure(backend):
    g = build_hypercube(3)
    s = random_state(np.random.default_rng(2), g.n_arcs)
    keep = s.copy()
    walk.step(g, MARK0, s)
    assert np.array_equal(s, keep)


def test_step_dimension_error():
    g = build_complete(5)
    with pytest.raises(DimensionError):
        walk.step(g, MARK0, np.ones(7))


@pytest.mark.parametrize("name", SMALL_GRAPHS)
def test_involutions(backend, name):
    g = SMALL_GRAPHS[name]()
    s = random_state(np.random.default_rng(3), g.n_arcs)
    assert np.abs(walk.apply_coin(g, walk.apply_coin(g, s)) - s).max() <= 1e-12
    assert np.array_equal(walk.apply_shift(g, walk.apply_shift(g, s)), s)
    assert np.array_equal(walk.apply_oracle(g, MARK0, walk.apply_oracle(g, MARK0, s)), s)


@pytest.mark.parametrize("name", SMALL_GRAPHS)
def test_unitarity_drift(backend, name):
    g = SMALL_GRAPHS[name]()
    s = random_state(np.random.default_rng(4), g.n_arcs)
    one = walk.step(g, MARK0, s)
    assert abs(np.linalg.norm(one) - 1) <= 1e-12
    s = walk.evolve(g, MARK0, s, 1000)
    assert abs(np.linalg.norm(s) - 1) <= 1e-9


def test_backends_agree():
    from qwboost import _backend, _kernels_py

    if "cython" not in _backend.available():
        pytest.skip("compiled kernel not built")
    from qwboost import _kernels

    g = build_hypercube(7)
    s = random_state(np.random.default_rng(5), g.n_arcs)
    sign = walk.oracle_signs(g, MARK0)
    a = _kernels.step(s, g.degree, g.reverse_arc, sign)
    b = _kernels_py.step(s, g.degree, g.reverse_arc, sign)
    assert np.abs(a - b).max() <= 1e-15
    red = Reduction.build(g, MARK0)
    ca, ra = _kernels.project(a, red._idx, red._w, red.dimension)
    cb, rb = _kernels_py.project(a, red._idx, red._w, red.dimension)
    assert np.abs(ca - cb).max() <= 1e-14 and abs(ra - rb) <= 1e-12


def test_compiled_step_is_deterministic():
    from qwboost import _backend

    if "cython" not in _backend.available():
        pytest.skip("compiled kernel not built")
    from qwboost import _kernels

    g = build_complete(64)
    s = random_state(np.random.default_rng(6), g.n_arcs)
    runs = [_kernels.step(s, g.degree, g.reverse_arc, walk.oracle_signs(g, MARK0)) for _ in range(3)]
    assert all(np.array_equal(runs[0], r) for r in runs[1:])


def test_position_distribution():
    g = build_torus(2, 5)
    p = walk.position_distribution(g, walk.initial_state(g))
    assert np.allclose(p, 1 / g.n_vertices, atol=1e-15)
    p = walk.position_distribution(g, walk.basis_state(g, 7, 2))
    assert p[7] == 1 and p.sum() == 1


def test_boosted_on_reduced_states():
    g = build_complete(12)
    red = Reduction.build(g, MARK0)
    ab = red.embed(np.eye(red.dimension)[red.basis.index("ab")])
    rep = walk.measure_boosted_success(g, MARK0, ab)
    assert rep.position_success == pytest.approx(1, abs=1e-12)
    assert rep.boosted_success == pytest.approx(1, abs=1e-12)

    g = build_hypercube(4)
    red = Reduction.build(g, MARK0)
    ba = red.embed(np.eye(red.dimension)[red.basis.index("ba")])
    rep = walk.measure_boosted_success(g, MARK0, ba)
    assert rep.position_success == 0
    assert rep.boosted_success == pytest.approx(1, abs=1e-12)
    assert rep.per_vertex.sum() == pytest.approx(1, abs=1e-12)


def test_boosted_matches_protocol_enumeration():
    """Explicit two-stage measurement: enumerate every (vertex, port) outcome."""
    g = build_torus(2, 5)
    marked = MarkedSet({0, 13})
    s = random_state(np.random.default_rng(8), g.n_arcs)
    expect = 0.0
    for v in range(g.n_vertices):
        for p in range(g.degree):
            prob = abs(s[v * g.degree + p]) ** 2
            if v in marked.vertices or g.neighbor[v, p] in marked.vertices:
                expect += prob
    rep = walk.measure_boosted_success(g, marked, s)
    assert rep.boosted_success == pytest.approx(expect, abs=1e-14)


def test_boosted_requires_marks():
    g = build_complete(5)
    with pytest.raises(InvalidParameterError):
        walk.measure_boosted_success(g, MarkedSet([]), walk.initial_state(g))


@settings(max_examples=50, deadline=None)
@given(arrays(np.float64, 2 * 48, elements=st.floats(-1, 1)), st.sets(st.integers(0, 15), min_size=1, max_size=4))
def test_boosted_dominates_position(raw, marks):
    g = build_hypercube(4)
    z = raw[:48] + 1j * raw[48:]
    n = np.linalg.norm(z)
    if n < 1e-6:
        return
    s = np.zeros(g.n_arcs, dtype=complex)
    s[:48] = z / n
    rep = walk.measure_boosted_success(g, MarkedSet(marks), s)
    assert rep.position_success <= rep.boosted_success <= 1 + 1e-12


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from(sorted(SMALL_GRAPHS)))
def test_step_norm_property(seed, name):
    g = SMALL_GRAPHS[name]()
    s = random_state(np.random.default_rng(seed), g.n_arcs)
    assert abs(np.linalg.norm(walk.step(g, MARK0, s)) - 1) <= 1e-12


def test_oracle_norm_values():
    assert walk.oracle_perturbation_norm(build_complete(1024), MARK0) == pytest.approx(0.0625, abs=1e-12)
    assert walk.oracle_perturbation_norm(build_complete(4), MARK0) == pytest.approx(1.0, abs=1e-12)


def test_oracle_norm_antipodal_dense():
    g = build_hypercube(4)
    marked = antipodal_marks(g)
    psi0 = walk.initial_state(g)
    dense = np.linalg.norm((dense_search(g, marked) - dense_search(g, marked, False)) @ psi0)
    got = walk.oracle_perturbation_norm(g, marked)
    assert got == pytest.approx(dense, abs=1e-12)
    # disjoint marks: sqrt(k) scaling, below the looser 2k/sqrt(N)
    assert got == pytest.approx(2 * np.sqrt(2) / 4, abs=1e-12)
    assert got < 2 * 2 / 4


def test_complete_1024_half_on_each_arc_type():
    g = build_complete(1024)
    series = walk.simulate(g, MARK0, 36, record_basis=True)
    ab, ba = series.basis_column("ab")[36], series.basis_column("ba")[36]
    assert ab == pytest.approx(0.5, abs=0.03) and ba == pytest.approx(0.5, abs=0.03)
    r = series.reports[36]
    assert r.position_success == pytest.approx(0.5, abs=0.03)
    assert r.boosted_success == pytest.approx(1.0, abs=0.05)
    assert r.per_vertex[0] == r.position_success


def test_simulate_rejects_zero_steps():
    with pytest.raises(InvalidParameterError):
        walk.simulate(build_complete(5), MARK0, 0)


def test_series_csv_roundtrip(tmp_path):
    g = build_complete(10)
    series = walk.simulate(g, MARK0, 6, record_basis=True)
    path = tmp_path / "run.csv"
    text = series.to_csv(path)
    lines = text.splitlines()
    assert lines[0] == "t,p_position,p_boosted,ab,ba,bb"
    assert len(lines) == 8
    back = walk.SimulationSeries.from_csv(path)
    assert back.t == list(range(7))
    assert np.allclose(back.boosted, series.boosted, rtol=1e-11, atol=0)
    assert np.allclose(back.basis_column("bb"), series.basis_column("bb"), rtol=1e-11, atol=1e-300)
    assert series.to_csv() == walk.simulate(g, MARK0, 6, record_basis=True).to_csv()
    for p in series.basis_probs:
        assert p.sum() <= 1 + 1e-9


def test_series_time_must_increase():
    s = walk.SimulationSeries()
    rep = walk.MeasurementReport(0, 0, np.zeros(1))
    s.append(0, rep)
    with pytest.raises(InvalidParameterError):
        s.append(0, rep)
