"""Pure NumPy walk kernels. Same signatures as the compiled ``_kernels``."""

import numpy as np

BACKEND = "numpy"


def oracle(amps, d, sign):
    return (amps.reshape(-1, d) * sign[:, None]).ravel()


def coin(amps, d):
    a = amps.reshape(-1, d)
    return ((2.0 / d) * a.sum(axis=1, keepdims=True) - a).ravel()


def shift(amps, rev):
    return amps[rev]


def step(amps, d, rev, sign=None):
    a = amps.reshape(-1, d)
    if sign is not None:
        a = a * sign[:, None]
    c = (2.0 / d) * a.sum(axis=1, keepdims=True) - a
    return c.ravel()[rev]


def project(amps, idx, w, dim):
    ws = w * amps
    coords = (np.bincount(idx, weights=ws.real, minlength=dim)
              + 1j * np.bincount(idx, weights=ws.imag, minlength=dim))
    residual = float(np.linalg.norm(amps - coords[idx] * w))
    return coords, residual
