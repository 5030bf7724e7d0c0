"""Discrete dilation triple for the generator ``F = p d/dp + 1/2`` on ``[0, 1]``.

The chain of operators is

* ``D``, ``Hnorm``: second-order summation-by-parts first derivative and norm,
* ``Gh = (P D + D P) / 2`` with ``P = diag(p_j)``,
* ``GhTilde = Gh - Hnorm^{-1} e_M e_M^T / 2`` (boundary penalty, H-skew everywhere),
* ``FhTilde = Hnorm^{1/2} GhTilde Hnorm^{-1/2}`` (skew-Hermitian in l2),
* ``Fh``: the simplified tridiagonal stencil used on hardware.

The ancilla state ``r_j = (j/M)^beta / C`` and the evaluation functional
``l_h = C (M/x)^beta <x|`` complete the triple.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np


def _check_grid(M: int) -> None:
    if int(M) != M or M < 2:
        raise ValueError(f"need an integer M >= 2, got {M}")


def build_sbp(M: int) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(D, Hnorm)`` for ``M`` intervals of width ``h = 1/M``."""
    _check_grid(M)
    h = 1.0 / M
    D = np.zeros((M + 1, M + 1))
    D[0, 0], D[0, 1] = -1.0, 1.0
    D[M, M - 1], D[M, M] = -1.0, 1.0
    idx = np.arange(1, M)
    D[idx, idx - 1] = -0.5
    D[idx, idx + 1] = 0.5
    D /= h
    w = np.full(M + 1, h)
    w[0] = w[M] = h / 2
    return D.astype(complex), np.diag(w).astype(complex)


def boundary_matrix(M: int) -> np.ndarray:
    B = np.zeros((M + 1, M + 1), dtype=complex)
    B[0, 0], B[M, M] = -1.0, 1.0
    return B


def grid_matrix(M: int) -> np.ndarray:
    """``P = diag(0, h, 2h, ..., 1)``."""
    return np.diag(np.arange(M + 1) / M).astype(complex)


def sbp_residual(D: np.ndarray, Hnorm: np.ndarray) -> float:
    """Max-abs entry of ``Hnorm D + D^T Hnorm - B``."""
    M = D.shape[0] - 1
    w = np.diag(Hnorm)
    lhs = w[:, None] * D + D.T * w[None, :]
    return float(np.max(np.abs(lhs - boundary_matrix(M))))


def h_skew_defect(G: np.ndarray, Hnorm: np.ndarray) -> float:
    """Max-abs entry of ``Hnorm G + G^dagger Hnorm``."""
    w = np.diag(Hnorm)
    return float(np.max(np.abs(w[:, None] * G + G.conj().T * w[None, :])))


def build_gh(D: np.ndarray, Hnorm: np.ndarray, M: int) -> np.ndarray:
    if D.shape != (M + 1, M + 1) or Hnorm.shape != (M + 1, M + 1):
        raise ValueError("D and Hnorm must be (M+1) x (M+1)")
    # (P D + D P)_ij = D_ij (p_i + p_j); summing indices first keeps entries exact
    j = np.arange(M + 1)
    return 0.5 * D * (j[:, None] + j[None, :]) / M


def build_gh_tilde(Gh: np.ndarray, Hnorm: np.ndarray, M: int) -> np.ndarray:
    if Gh.shape != (M + 1, M + 1):
        raise ValueError("Gh must be (M+1) x (M+1)")
    out = np.array(Gh, dtype=complex)
    out[M, M] -= 0.5 / Hnorm[M, M]
    return out


def build_fh_tilde(GhTilde: np.ndarray, Hnorm: np.ndarray) -> np.ndarray:
    w = np.diag(Hnorm).real
    if np.any(w <= 0):
        raise ValueError("Hnorm must have a positive diagonal")
    # (H^{1/2} G H^{-1/2})_ij = G_ij sqrt(w_i / w_j); the ratio form keeps mirrored
    # corner entries exact negatives of each other
    return GhTilde * np.sqrt(w[:, None] / w[None, :])


def build_fh(M: int) -> np.ndarray:
    """Tridiagonal skew-symmetric stencil with superdiagonal ``(2j+1)/4``."""
    _check_grid(M)
    return fh_stencil(M)


def fh_stencil(M: int) -> np.ndarray:
    """Same stencil as :func:`build_fh` without the ``M >= 2`` grid check."""
    F = np.zeros((M + 1, M + 1), dtype=complex)
    j = np.arange(M)
    F[j, j + 1] = (2 * j + 1) / 4
    F[j + 1, j] = -(2 * j + 1) / 4
    return F


def corner_mask(M: int) -> np.ndarray:
    """Boolean mask of the two 2x2 corner blocks."""
    mask = np.zeros((M + 1, M + 1), dtype=bool)
    mask[:2, :2] = True
    mask[M - 1 :, M - 1 :] = True
    return mask


@dataclass(frozen=True)
class DilationOperators:
    M: int
    h: float
    D: np.ndarray
    Hnorm: np.ndarray
    P: np.ndarray
    Gh: np.ndarray
    GhTilde: np.ndarray
    FhTilde: np.ndarray
    Fh: np.ndarray

    @property
    def delta(self) -> np.ndarray:
        """``Fh - FhTilde``; nonzero only on the two 2x2 corners."""
        return self.Fh - self.FhTilde

    @classmethod
    def build(cls, M: int) -> "DilationOperators":
        D, Hnorm = build_sbp(M)
        Gh = build_gh(D, Hnorm, M)
        GhTilde = build_gh_tilde(Gh, Hnorm, M)
        return cls(
            M=M,
            h=1.0 / M,
            D=D,
            Hnorm=Hnorm,
            P=grid_matrix(M),
            Gh=Gh,
            GhTilde=GhTilde,
            FhTilde=build_fh_tilde(GhTilde, Hnorm),
            Fh=build_fh(M),
        )


def theta_of(beta: int) -> float:
    return 2.0 / (2 * beta + 1)


def c_theta(beta: int) -> float:
    """Interior consistency constant ``theta/12 * beta (beta-1) (2 beta - 1)``."""
    return theta_of(beta) / 12 * beta * (beta - 1) * (2 * beta - 1)


def profile(beta: int, M: int) -> np.ndarray:
    """Un-normalized ``g_j = (j/M)^beta`` with ``0^0 = 1``."""
    p = np.arange(M + 1) / M
    g = p**beta
    if beta == 0:
        g[:] = 1.0
    return g


def mid_indices(M: int) -> np.ndarray:
    return np.arange(math.ceil(M / 4), math.floor(3 * M / 4) + 1)


@dataclass(frozen=True)
class AncillaTriple:
    beta: int
    theta: float
    M: int
    r: np.ndarray
    C: float
    mid_indices: np.ndarray

    def weight(self, x: int) -> float:
        """Coefficient ``C (M/x)^beta`` of the evaluation functional at ``x``."""
        if x not in set(self.mid_indices.tolist()):
            raise ValueError(f"x={x} is not a mid index for M={self.M}")
        return self.C * (self.M / x) ** self.beta

    def evaluate(self, v: np.ndarray, x: int):
        """Apply ``<l_h|`` at mid index ``x`` to an ancilla vector (or to the
        first axis of an ancilla-major array)."""
        return self.weight(x) * np.asarray(v)[x]


def build_triple(beta: int, M: int) -> AncillaTriple:
    if int(beta) != beta or beta < 0:
        raise ValueError(f"beta must be a nonnegative integer, got {beta}")
    _check_grid(M)
    if (M + 1) & M:
        warnings.warn(
            f"M+1={M + 1} is not a power of two; triple is usable numerically "
            "but has no qubit register layout",
            stacklevel=2,
        )
    g = profile(beta, M)
    C = float(np.linalg.norm(g))
    return AncillaTriple(
        beta=int(beta),
        theta=theta_of(beta),
        M=M,
        r=(g / C).astype(complex),
        C=C,
        mid_indices=mid_indices(M),
    )


def moment_defect(Fh: np.ndarray, triple: AncillaTriple, k: int, x: int | None = None) -> float:
    """``|<l_h|(theta Fh)^k|r_h> - 1|`` evaluated at mid index ``x`` (default ``M/2``).

    Computed in exact rational arithmetic on the band of indices that can
    reach ``x`` in ``k`` steps.  Floating-point powers are useless here: each
    application cancels terms of size ``M`` against each other and loses
    roughly ``log10(theta M / 2)`` digits.  ``Fh`` must be real (its float
    entries are taken as exact binary fractions).  Powers beyond the
    finite-propagation window ``k <= M/4`` are computed but raise a warning,
    since boundary effects reach the mid indices there.
    """
    M = triple.M
    if k < 0:
        raise ValueError("k must be nonnegative")
    if k > M / 4:
        warnings.warn(f"k={k} lies outside the window k <= M/4 = {M / 4}", stacklevel=2)
    if x is None:
        x = M // 2
    A = np.asarray(Fh)
    if A.shape != (M + 1, M + 1):
        raise ValueError("Fh must be (M+1) x (M+1)")
    if np.iscomplexobj(A):
        if np.any(A.imag != 0):
            raise ValueError("Fh must be real")
        A = A.real
    rows, cols = np.nonzero(A)
    bw = int(np.abs(rows - cols).max()) if rows.size else 0
    entries: dict[int, list] = {}
    for i, j in zip(rows.tolist(), cols.tolist()):
        entries.setdefault(i, []).append((j, Fraction(float(A[i, j]))))
    theta = Fraction(2, 2 * triple.beta + 1)

    def window(radius):
        return range(max(0, x - radius), min(M, x + radius) + 1)

    v = {j: Fraction(j, M) ** triple.beta for j in window(k * bw)}
    for s in range(1, k + 1):
        v = {
            i: theta * sum((a * v[j] for j, a in entries.get(i, ())), Fraction(0))
            for i in window((k - s) * bw)
        }
    value = Fraction(M, x) ** triple.beta * v[x]
    return float(abs(value - 1))


def interior_defect(beta: int, M: int) -> float:
    """``max_{1<=i<=M-1} theta |(Fh g)_i - (F g)(p_i)|`` for ``g = p^beta``."""
    theta = theta_of(beta)
    g = profile(beta, M)
    # tridiagonal action without forming Fh
    j = np.arange(1, M)
    fg = ((2 * j + 1) * g[j + 1] - (2 * j - 1) * g[j - 1]) / 4
    exact = (beta + 0.5) * g[j]
    return float(theta * np.max(np.abs(fg - exact)))


def finite_propagation_check(Fh: np.ndarray, k: int) -> tuple[float, float]:
    """Return ``(max |(Fh^k)_ij| over |i-j| > k, max |(Fh^k)_ij|)``."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    n = Fh.shape[0]
    Fk = np.linalg.matrix_power(Fh, k) if k else np.eye(n, dtype=complex)
    i, j = np.indices(Fk.shape)
    outside = np.abs(Fk[np.abs(i - j) > k])
    return float(outside.max() if outside.size else 0.0), float(np.abs(Fk).max())
