"""Deliberately broken walk variants must be caught by the acceptance checks."""

import types

import numpy as np
import pytest

from qwboost import _backend, _kernels_py, acceptance, quotient, walk


@pytest.fixture
def numpy_kernels():
    prev = _backend.kernels
    _backend.use("numpy")
    yield
    _backend.kernels = prev


def test_unmutated_checks_pass():
    assert acceptance.c05_equivalence().passed
    assert acceptance.c06_golden().passed


def test_missing_oracle_sign_in_reduction(monkeypatch):
    real = quotient.reduced_operator
    monkeypatch.setattr(quotient, "reduced_operator",
                        lambda part, basis, with_oracle=True: real(part, basis, False))
    assert not acceptance.c06_golden().passed


def test_missing_oracle_sign_in_walk(monkeypatch, numpy_kernels):
    monkeypatch.setattr(walk, "oracle_signs", lambda graph, marked: np.ones(graph.n_vertices))
    assert not acceptance.c05_equivalence().passed


def test_moving_shift_detected(monkeypatch, numpy_kernels):
    """Keep the port label when hopping instead of pointing back along the edge."""

    def moving_step(amps, d, rev, sign=None):
        a = _kernels_py.coin(amps if sign is None else _kernels_py.oracle(amps, d, sign), d)
        n = len(a) // d
        out = np.zeros_like(a)
        src = np.arange(len(a))
        # arc (v, p) -> (neighbor of v along p, p); rev tells us the neighbor
        dest = (rev // d) * d + src % d
        np.add.at(out, dest, a)
        assert n * d == len(a)
        return out

    fake = types.SimpleNamespace(**{k: getattr(_kernels_py, k) for k in ("oracle", "coin", "shift", "project")},
                                 step=moving_step, BACKEND="mutant")
    monkeypatch.setattr(_backend, "kernels", fake)
    assert not acceptance.c05_equivalence().passed
