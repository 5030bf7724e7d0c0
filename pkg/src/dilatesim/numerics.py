"""Dense complex linear algebra shared by the rest of the package.

Matrix exponentials, midpoint-rule time-ordered propagators and diagonal
square roots.  Everything works on plain :class:`numpy.ndarray` objects.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.linalg

MAX_DIM = 4096
_STRUCTURE_TOL = 1e-12


def as_matrix(a) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-d array, got shape {a.shape}")
    return a


def _square(a) -> np.ndarray:
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    return a


def hermitian_defect(a) -> float:
    """Frobenius norm of ``A - A^dagger``."""
    a = _square(a)
    return float(np.linalg.norm(a - a.conj().T))


def skew_defect(a) -> float:
    """Frobenius norm of ``A + A^dagger``."""
    a = _square(a)
    return float(np.linalg.norm(a + a.conj().T))


def unitarity_defect(u) -> float:
    u = _square(u)
    return float(np.linalg.norm(u @ u.conj().T - np.eye(u.shape[0])))


def expm(a) -> np.ndarray:
    """Matrix exponential ``e^A``.

    Hermitian and skew-Hermitian inputs go through an eigendecomposition so
    that unitarity of ``e^A`` for skew-Hermitian ``A`` holds to round-off.
    Other inputs use scaling-and-squaring with a Pade approximant.
    """
    a = _square(a)
    n = a.shape[0]
    if n > MAX_DIM:
        raise ValueError(f"matrix dimension {n} exceeds cap {MAX_DIM}")
    if n == 0:
        return a.copy()
    scale = max(1.0, float(np.max(np.abs(a))))
    if skew_defect(a) <= _STRUCTURE_TOL * scale:
        # A = -iS with S Hermitian
        s = 0.5 * (1j * a + (1j * a).conj().T)
        w, v = np.linalg.eigh(s)
        return (v * np.exp(-1j * w)) @ v.conj().T
    if hermitian_defect(a) <= _STRUCTURE_TOL * scale:
        s = 0.5 * (a + a.conj().T)
        w, v = np.linalg.eigh(s)
        return (v * np.exp(w)) @ v.conj().T
    return scipy.linalg.expm(a)


@dataclass(frozen=True)
class TimeGrid:
    t0: float
    t1: float
    steps: int

    def __post_init__(self):
        if not self.t1 > self.t0:
            raise ValueError("TimeGrid needs t1 > t0")
        if int(self.steps) != self.steps or self.steps < 1:
            raise ValueError("TimeGrid needs a positive integer number of steps")

    @property
    def dt(self) -> float:
        return (self.t1 - self.t0) / self.steps

    def midpoints(self) -> np.ndarray:
        return self.t0 + (np.arange(self.steps) + 0.5) * self.dt


def time_ordered_propagator(gen: Callable[[float], np.ndarray], grid: TimeGrid) -> np.ndarray:
    """Approximate ``T exp(int_{t0}^{t1} gen(t) dt)`` by the exponential midpoint rule.

    The propagator is ``U_K ... U_2 U_1`` with ``U_k = expm(gen(t_k + dt/2) dt)``,
    later times multiplying on the left.  Second order in ``dt``.  Runs of
    identical generator values collapse into one matrix power.
    """
    dt = grid.dt
    u = None
    run_gen, run_len = None, 0

    def flush(u):
        if run_len == 0:
            return u
        factor = expm(run_gen * dt)
        return np.linalg.matrix_power(factor, run_len) @ u

    for t in grid.midpoints():
        g = _square(gen(float(t)))
        if u is None:
            u = np.eye(g.shape[0], dtype=complex)
        elif g.shape != u.shape:
            raise ValueError(
                f"generator changed dimension: {g.shape} at t={t}, expected {u.shape}"
            )
        if run_len and np.array_equal(g, run_gen):
            run_len += 1
            continue
        u = flush(u)
        run_gen, run_len = g, 1
    return flush(u)


def matrix_sqrt_diag(d, inverse: bool = False) -> np.ndarray:
    """``diag(sqrt(d))`` (or ``diag(1/sqrt(d))``) for a strictly positive real vector."""
    d = np.asarray(d)
    if np.iscomplexobj(d):
        if np.any(d.imag != 0):
            raise ValueError("diagonal entries must be real")
        d = d.real
    d = d.astype(float)
    if d.ndim != 1:
        raise ValueError("expected a vector of diagonal entries")
    if np.any(d <= 0):
        raise ValueError("diagonal entries must be strictly positive")
    s = np.sqrt(d)
    return np.diag(1.0 / s if inverse else s).astype(complex)
