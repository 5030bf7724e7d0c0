"""End-to-end dilation runs and the mid-index error study.

Problems are ``x' = A(t) x`` with ``A(t) = -i H + kappa(t) K``, ``H`` Hermitian and
``K`` Hermitian negative semidefinite.  The dilated generator is
``-i (I (x) H) + theta kappa(t) Fh (x) K``; its propagator is applied to
``|r_h> (x) |x0>`` and read out with ``<l_h|`` at a mid index.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import simpson

from . import dilation
from .numerics import TimeGrid, hermitian_defect, time_ordered_propagator

MAX_DILATED_DIM = 4096
SIMPSON_PANELS = 2**10


def constant(c: float) -> Callable[[float], float]:
    return lambda t: c


def linear(a: float, b: float) -> Callable[[float], float]:
    """``kappa(t) = a + b t``."""
    return lambda t: a + b * t


@dataclass(frozen=True)
class ProblemSpec:
    H: np.ndarray
    K: np.ndarray
    x0: np.ndarray
    T: float
    kappa: Callable[[float], float] = field(default=constant(1.0))

    def __post_init__(self):
        H = np.atleast_2d(np.asarray(self.H, dtype=complex))
        K = np.atleast_2d(np.asarray(self.K, dtype=complex))
        x0 = np.atleast_1d(np.asarray(self.x0, dtype=complex))
        object.__setattr__(self, "H", H)
        object.__setattr__(self, "K", K)
        object.__setattr__(self, "x0", x0)
        N = x0.size
        if H.shape != (N, N) or K.shape != (N, N):
            raise ValueError("H, K and x0 dimensions disagree")
        if hermitian_defect(H) > 1e-12 or hermitian_defect(K) > 1e-12:
            raise ValueError("H and K must be Hermitian")
        if np.linalg.eigvalsh(K).max() > 1e-12:
            raise ValueError("K must be negative semidefinite")
        if abs(np.linalg.norm(x0) - 1) > 1e-12:
            raise ValueError("x0 must be a unit vector")
        if self.T <= 0:
            raise ValueError("T must be positive")
        ts = np.linspace(0, self.T, 257)
        if min(self.kappa(float(t)) for t in ts) < 0:
            raise ValueError("kappa must be nonnegative")

    @property
    def N(self) -> int:
        return self.x0.size

    @property
    def K_max(self) -> float:
        ts = np.linspace(0, self.T, 257)
        k = max(abs(self.kappa(float(t))) for t in ts)
        return float(k * np.linalg.norm(self.K, 2))

    def A(self, t: float) -> np.ndarray:
        return -1j * self.H + self.kappa(t) * self.K


def scalar_problem(T: float, kappa=None) -> ProblemSpec:
    """``H = 0``, ``K = -1`` on a one-dimensional system."""
    return ProblemSpec(np.zeros((1, 1)), -np.ones((1, 1)), np.ones(1), T, kappa or constant(1.0))


# -- bounds -----------------------------------------------------------------


@dataclass(frozen=True)
class BoundInputs:
    beta: int
    M: int
    T: float
    K_max: float

    @property
    def theta(self) -> float:
        return dilation.theta_of(self.beta)

    @property
    def C_theta(self) -> float:
        return dilation.c_theta(self.beta)

    def hypothesis_violations(self) -> list[str]:
        out = []
        if not 0 < self.theta <= 2 / 7 + 1e-15:
            out.append(f"theta = {self.theta} outside (0, 2/7]")
        if self.beta < 3:
            out.append(f"beta = {self.beta} < 3")
        if not self.theta * self.K_max * self.T < 1 / (8 * math.e):
            out.append(f"theta K_max T = {self.theta * self.K_max * self.T} >= 1/(8e)")
        return out


def mismatch_bound(b: BoundInputs) -> float:
    """Boundary-mismatch term ``(2 + M (1 + C h^{3/2}) / (8e)) 2^{-M/4}``."""
    h = 1 / b.M
    return (2 + b.M * (1 + b.C_theta * h**1.5) / (8 * math.e)) * 2 ** (-b.M / 4)


def theorem_bound(b: BoundInputs) -> float:
    """``4^beta (C h^{3/2} + (2 + M (1 + C h^{3/2})/(8e)) 2^{-M/4})``."""
    for msg in b.hypothesis_violations():
        warnings.warn(f"bound hypothesis violated: {msg}", stacklevel=2)
    h = 1 / b.M
    return 4**b.beta * (b.C_theta * h**1.5 + mismatch_bound(b))


def default_steps(T: float, theta: float, K_max: float, M: int, H_norm: float) -> int:
    return max(64, math.ceil(16 * T * (theta * K_max * M + H_norm)))


# -- ancilla profiles ---------------------------------------------------------------


def decay_factor(kappa, T: float, panels: int = SIMPSON_PANELS) -> float:
    """``exp(-int_0^T kappa)`` by composite Simpson."""
    ts = np.linspace(0.0, T, panels + 1)
    ks = np.array([kappa(float(t)) for t in ts])
    if np.any(ks < 0):
        raise ValueError("kappa must be nonnegative")
    return float(np.exp(-simpson(ks, x=ts)))


def ideal_profile(beta: int, kappa, T: float, panels: int = SIMPSON_PANELS):
    """``(y(T), u)`` with ``u(p) = y(T) p^beta`` the exact ancilla solution."""
    y = decay_factor(kappa, T, panels)
    return y, (lambda p: y * np.asarray(p, dtype=float) ** beta)


def discrete_profile(beta: int, M: int, kappa, T: float, steps: int | None = None) -> np.ndarray:
    """``u^d(T)`` for ``u' = -theta kappa(t) Fh u``, ``u(0) = g``."""
    theta = dilation.theta_of(beta)
    Fh = dilation.build_fh(M)
    if steps is None:
        kmax = max(kappa(float(t)) for t in np.linspace(0, T, 257))
        steps = default_steps(T, theta, kmax, M, 0.0)
    U = time_ordered_propagator(lambda t: -theta * kappa(t) * Fh, TimeGrid(0.0, T, steps))
    return U @ dilation.profile(beta, M)


def boundary_forced_profile(
    beta: int, M: int, kappa, T: float, steps: int | None = None
) -> np.ndarray:
    """``u^ex(T)``: interior nodes driven by the exact boundary value ``y(t)``.

    With ``Fh = [[A, a], [-a^dag, 0]]`` the interior obeys
    ``u_I' = -theta kappa (A u_I + y a)`` and ``y' = -kappa y``; the pair is
    integrated as one linear system of size ``M + 1``.
    """
    theta = dilation.theta_of(beta)
    Fh = dilation.build_fh(M)
    gen = np.zeros((M + 1, M + 1), dtype=complex)
    gen[:M, :M] = -theta * Fh[:M, :M]
    gen[:M, M] = -theta * Fh[:M, M]
    gen[M, M] = -1.0
    if steps is None:
        kmax = max(kappa(float(t)) for t in np.linspace(0, T, 257))
        steps = default_steps(T, theta, kmax, M, 0.0)
    U = time_ordered_propagator(lambda t: kappa(t) * gen, TimeGrid(0.0, T, steps))
    return U @ dilation.profile(beta, M)


# -- end to end ------------------------------------------------------------------


def dilated_generator(spec: ProblemSpec, theta: float, Fh: np.ndarray):
    eye_a = np.eye(Fh.shape[0])
    IH = np.kron(eye_a, spec.H)
    FK = np.kron(theta * Fh, spec.K)
    return lambda t: -1j * IH + spec.kappa(t) * FK


def truth(spec: ProblemSpec, steps: int) -> np.ndarray:
    U = time_ordered_propagator(spec.A, TimeGrid(0.0, spec.T, steps))
    return U @ spec.x0


@dataclass(frozen=True)
class EndToEnd:
    approx: np.ndarray
    truth: np.ndarray
    error: float
    errors: dict[int, float]


def end_to_end(spec: ProblemSpec, beta: int, M: int, x: int | None = None, steps: int | None = None) -> EndToEnd:
    """Propagate ``|r_h> (x) |x0>`` under the dilated generator and read out at ``x``.

    ``errors`` holds the l2 error for every mid index; ``x`` (default ``M/2``)
    selects the headline ``approx`` and ``error``.
    """
    N = spec.N
    if (M + 1) * N > MAX_DILATED_DIM:
        raise ValueError(f"dilated dimension {(M + 1) * N} exceeds {MAX_DILATED_DIM}")
    b = BoundInputs(beta, M, spec.T, spec.K_max)
    for msg in b.hypothesis_violations():
        warnings.warn(f"bound hypothesis violated: {msg}", stacklevel=2)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        triple = dilation.build_triple(beta, M)
    if x is None:
        x = M // 2
    if x not in set(triple.mid_indices.tolist()):
        raise ValueError(f"x={x} is not a mid index for M={M}")
    theta = triple.theta
    Fh = dilation.build_fh(M)
    if steps is None:
        steps = default_steps(spec.T, theta, spec.K_max, M, float(np.linalg.norm(spec.H, 2)))
    U = time_ordered_propagator(dilated_generator(spec, theta, Fh), TimeGrid(0.0, spec.T, steps))
    psi = (U @ np.kron(triple.r, spec.x0)).reshape(M + 1, N)
    ref = truth(spec, steps)
    errors = {
        int(j): float(np.linalg.norm(ref - triple.evaluate(psi, int(j)))) for j in triple.mid_indices
    }
    return EndToEnd(triple.evaluate(psi, x), ref, errors[x], errors)


@dataclass(frozen=True)
class ScalingRow:
    M: int
    measured_error: float
    bound_value: float
    slope_estimate: float


def loglog_slope(Ms, errs) -> float:
    return float(np.polyfit(np.log(np.asarray(Ms, float)), np.log(np.asarray(errs, float)), 1)[0])


def scaling_sweep(spec: ProblemSpec, beta: int, M_list, window: int = 4) -> list[ScalingRow]:
    """Worst mid-index error and bound per ``M``.

    ``slope_estimate`` on each row is the least-squares log-log slope over
    that row and up to ``window - 1`` preceding rows (NaN on the first row),
    so the last row carries the slope over the largest ``window`` values.
    """
    Ms = [int(M) for M in M_list]
    if Ms != sorted(Ms) or any(M & (M - 1) for M in Ms):
        raise ValueError("M_list must be ascending powers of two")
    measured = []
    bounds = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for M in Ms:
            run = end_to_end(spec, beta, M)
            measured.append(max(run.errors.values()))
            bounds.append(theorem_bound(BoundInputs(beta, M, spec.T, spec.K_max)))
    rows = []
    for i, M in enumerate(Ms):
        lo = max(0, i - window + 1)
        slope = loglog_slope(Ms[lo : i + 1], measured[lo : i + 1]) if i > lo else float("nan")
        rows.append(ScalingRow(M, measured[i], bounds[i], slope))
    return rows
