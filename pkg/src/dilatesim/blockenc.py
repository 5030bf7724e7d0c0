"""Block encodings of the dilation operators and their LCU assembly.

A :class:`BlockEncoding` is a circuit whose top-left block, after projecting
the ancilla qubits onto ``|0>``, equals ``target / alpha`` up to ``epsilon``.
The data register is every non-ancilla qubit in ascending order, so the
block is indexed little-endian over those qubits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import dilation
from .circuits import Circuit, apply_circuit, mottonen_prep, qft


@dataclass(frozen=True)
class BlockEncoding:
    circuit: Circuit
    alpha: float
    ancillas: tuple[int, ...]
    epsilon: float = 0.0

    def __post_init__(self):
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")
        anc = tuple(int(q) for q in self.ancillas)
        if len(set(anc)) != len(anc) or any(not 0 <= q < self.circuit.width for q in anc):
            raise ValueError("ancillas must be distinct qubits of the circuit")
        object.__setattr__(self, "ancillas", anc)

    @property
    def data_qubits(self) -> tuple[int, ...]:
        anc = set(self.ancillas)
        return tuple(q for q in range(self.circuit.width) if q not in anc)

    @property
    def num_ancillas(self) -> int:
        return len(self.ancillas)


def _data_indices(be: BlockEncoding) -> np.ndarray:
    data = be.data_qubits
    k = np.arange(2 ** len(data))
    full = np.zeros_like(k)
    for pos, q in enumerate(data):
        full |= ((k >> pos) & 1) << q
    return full


def extract_block(be: BlockEncoding) -> np.ndarray:
    """``(<0|_anc (x) I) U (|0>_anc (x) I)`` over the data register."""
    if set(be.ancillas) & set(be.data_qubits):
        raise ValueError("ancilla and data registers overlap")
    cols = _data_indices(be)
    n = be.circuit.width
    inputs = np.zeros((2**n, cols.size), dtype=complex)
    inputs[cols, np.arange(cols.size)] = 1.0
    out = apply_circuit(be.circuit, inputs)
    return out[cols, :]


def block_defect(be: BlockEncoding, target: np.ndarray) -> float:
    """Spectral-norm distance between the extracted block and ``target / alpha``."""
    diff = extract_block(be) - np.asarray(target) / be.alpha
    return float(np.linalg.norm(diff, 2))


# -- LCU of diagonal operators ----------------------------------------------


def num_index_qubits(m: int) -> int:
    """``a = ceil(log2(m + 1))`` qubits index the ``m + 1`` LCU terms."""
    return max(1, math.ceil(math.log2(m + 1)))


def _pauli_z_lcu(m: int, weights: np.ndarray, label: str) -> Circuit:
    """``Prep^dag . Select . Prep`` with ``Select = |0><0| (x) I + sum_k |k+1><k+1| (x) (-Z_k)``.

    Data qubits are ``0..m-1``; the index register sits above them.
    """
    a = num_index_qubits(m)
    c = Circuit(0)
    data = c.add_register("data", m)
    anc = c.add_register(label, a)
    amps = np.zeros(2**a)
    amps[: m + 1] = np.sqrt(weights)
    amps /= np.linalg.norm(amps)
    prep = mottonen_prep(amps)
    c.compose(prep, anc)
    for k in range(m):
        j = k + 1
        state = [(j >> b) & 1 for b in range(a)]
        # X Z X = -Z on the branch; X is harmless off-branch since X X = I
        c.x(data[k])
        c.mcz(anc, data[k], state)
        c.x(data[k])
    c.compose(prep.inverse(), anc)
    return c


def init_weights(m: int) -> np.ndarray:
    M = 2**m - 1
    return np.array([0.5] + [2**k / (2 * M) for k in range(m)])


def d_weights(m: int, theta: float) -> np.ndarray:
    M = 2**m - 1
    alpha = theta * (2 * M + 1)
    return np.array([theta * (M + 1) / alpha] + [theta * 2**k / alpha for k in range(m)])


def build_u_init(m: int) -> BlockEncoding:
    """``(1, a, 0)`` encoding of ``diag(i/M)`` with ``M = 2^m - 1``."""
    if m < 1:
        raise ValueError("m must be at least 1")
    c = _pauli_z_lcu(m, init_weights(m), "anc_init")
    return BlockEncoding(c, 1.0, tuple(c.register("anc_init")))


def alpha_d(m: int, theta: float) -> float:
    return theta * (2 * (2**m - 1) + 1)


def build_u_d(m: int, theta: float) -> BlockEncoding:
    """``(theta (2M+1), a, 0)`` encoding of ``D = theta diag(1, 3, ..., 2M+1)``."""
    if m < 1:
        raise ValueError("m must be at least 1")
    if not 0 < theta <= 2 / 7 + 1e-15:
        raise ValueError("theta must lie in (0, 2/7]")
    c = _pauli_z_lcu(m, d_weights(m, theta), "anc_d")
    return BlockEncoding(c, alpha_d(m, theta), tuple(c.register("anc_d")))


def d_matrix(m: int, theta: float) -> np.ndarray:
    M = 2**m - 1
    return np.diag(theta * (2 * np.arange(M + 1) + 1)).astype(complex)


def shift_matrix(m: int) -> np.ndarray:
    """``R = sum_{i<M} |i><i+1|`` on ``2^m`` levels."""
    return np.eye(2**m, k=1, dtype=complex)


def build_u_r(m: int) -> BlockEncoding:
    """``(1, 1, 0)`` encoding of the shift ``R`` through a QFT adder on ``m+1`` qubits.

    ``QFT^dag . diag(w^-k) . QFT`` maps ``|i> -> |i-1 mod 2^{m+1}>``; with the
    top qubit as ancilla the projected block is ``R``.  The QFT carries no
    SWAPs, so phase ``-pi/2^{m-p}`` for Fourier bit ``p`` lands on qubit
    ``m - p``.  The RZ layer differs from ``diag(w^-k)`` by a global phase,
    recorded on the circuit.
    """
    if m < 1:
        raise ValueError("m must be at least 1")
    n = m + 1
    c = Circuit(0)
    data = c.add_register("data", m)
    anc = c.add_register("anc_r", 1)
    wires = data + anc
    f = qft(n)
    c.compose(f, wires)
    total = 0.0
    for q in range(n):
        angle = -math.pi / 2**q
        c.rz(angle, wires[q])
        total += angle
    c.global_phase += total / 2
    c.compose(f.inverse(), wires)
    return BlockEncoding(c, 1.0, tuple(anc))


def alpha_theta_f(m: int, theta: float) -> float:
    return alpha_d(m, theta) / 2


def build_u_theta_f(m: int, theta: float) -> BlockEncoding:
    """``(theta (2M+1)/2, 2a+3, 0)`` encoding of ``theta Fh`` via ``(D R - R^dag D)/4``.

    One Hadamard-prepared control selects ``U_D U_R`` (open) or ``U_R^dag U_D``
    (closed); a Z on the control supplies the minus sign.  The used
    ancillas of the first branch are swapped into a spare copy before the
    second branch runs.
    """
    ud = build_u_d(m, theta)
    ur = build_u_r(m)
    a = num_index_qubits(m)
    c = Circuit(0)
    data = c.add_register("data", m)
    r1 = c.add_register("anc_r", 1)
    d1 = c.add_register("anc_d", a)
    r2 = c.add_register("anc_r_spare", 1)
    d2 = c.add_register("anc_d_spare", a)
    ctl = c.add_register("lcu", 1)[0]

    ur_wires = data + r1
    ud_wires = data + d1
    c.h(ctl).z(ctl)
    c.compose(ur.circuit.controlled(m + 1, 0), ur_wires + [ctl])
    c.compose(ud.circuit.controlled(m + a, 0), ud_wires + [ctl])
    for p, q in zip(r1 + d1, r2 + d2):
        c.swap(p, q)
    c.compose(ud.circuit.controlled(m + a, 1), ud_wires + [ctl])
    c.compose(ur.circuit.inverse().controlled(m + 1, 1), ur_wires + [ctl])
    c.h(ctl)
    ancillas = tuple(q for q in range(c.width) if q not in data)
    return BlockEncoding(c, alpha_theta_f(m, theta), ancillas)


# -- composition ---------------------------------------------------------------


def from_matrix(T, alpha: float | None = None, label: str = "T") -> BlockEncoding:
    """Exact encoding of a dense operator ``T`` (test stand-in for application encodings).

    If ``T/alpha`` is unitary it is used directly with no ancilla; otherwise
    the standard one-ancilla unitary dilation of the contraction ``A = T/alpha``
    is used.  ``alpha`` defaults to the spectral norm (1 for ``T = 0``).
    """
    T = np.asarray(T, dtype=complex)
    n_dim = T.shape[0]
    n = n_dim.bit_length() - 1
    if T.shape != (n_dim, n_dim) or 2**n != n_dim:
        raise ValueError("T must be a square matrix of power-of-two size")
    if alpha is None:
        alpha = float(np.linalg.norm(T, 2)) or 1.0
    A = T / alpha
    if np.linalg.norm(A, 2) > 1 + 1e-12:
        raise ValueError("alpha is smaller than the spectral norm of T")
    eye = np.eye(n_dim)
    c = Circuit(0)
    data = c.add_register("data", n)
    if np.allclose(A @ A.conj().T, eye, atol=1e-13):
        c.unitary(A, data, label)
        return BlockEncoding(c, alpha, ())
    anc = c.add_register("anc_" + label, 1)
    left = _psd_sqrt(eye - A @ A.conj().T)
    right = _psd_sqrt(eye - A.conj().T @ A)
    # anc is the most significant qubit: rows/cols [anc=0 block; anc=1 block]
    U = np.block([[A, left], [right, -A.conj().T]])
    c.unitary(U, data + anc, label)
    return BlockEncoding(c, alpha, tuple(anc))


def _psd_sqrt(a: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(0.5 * (a + a.conj().T))
    return (v * np.sqrt(np.clip(w, 0, None))) @ v.conj().T


def identity_encoding(n: int) -> BlockEncoding:
    c = Circuit(n)
    c.registers["data"] = (0, n)
    return BlockEncoding(c, 1.0, ())


def _place(c: Circuit, be: BlockEncoding, data_wires, anc_wires) -> list[int]:
    """Qubit map sending ``be``'s data and ancilla qubits onto the given wires."""
    mapping = [0] * be.circuit.width
    for q, w in zip(be.data_qubits, data_wires):
        mapping[q] = w
    for q, w in zip(be.ancillas, anc_wires):
        mapping[q] = w
    return mapping


def tensor_be(a: BlockEncoding, b: BlockEncoding) -> BlockEncoding:
    """Encoding of ``A (x) B``; ``a`` occupies the more significant data qubits."""
    c = Circuit(0)
    nb, na = len(b.data_qubits), len(a.data_qubits)
    data_b = c.add_register("data_b", nb)
    data_a = c.add_register("data_a", na)
    anc_a = c.add_register("anc_a", a.num_ancillas)
    anc_b = c.add_register("anc_b", b.num_ancillas)
    c.compose(a.circuit, _place(c, a, data_a, anc_a))
    c.compose(b.circuit, _place(c, b, data_b, anc_b))
    eps = a.epsilon + b.epsilon + a.epsilon * b.epsilon
    return BlockEncoding(c, a.alpha * b.alpha, tuple(anc_a + anc_b), eps)


@dataclass(frozen=True)
class TotalEncoding:
    encoding: BlockEncoding
    prep_angle: float
    alpha_h: float
    alpha_fk: float


def combine_total(beH: BlockEncoding, beK: BlockEncoding, beF: BlockEncoding) -> TotalEncoding:
    """Encoding of ``I (x) H + i theta Fh (x) K`` by a two-term LCU.

    A single RY on a fresh control mixes the branches with weights
    ``alpha_H`` and ``alpha_F alpha_K``; an S gate on the control supplies
    the factor ``i``.  Data order is (dilation register, system register),
    the dilation register being the more significant one.
    """
    n_sys = len(beH.data_qubits)
    if len(beK.data_qubits) != n_sys:
        raise ValueError("H and K encodings act on system registers of different width")
    fk = tensor_be(beF, beK)
    m = len(beF.data_qubits)
    c = Circuit(0)
    sys_wires = c.add_register("system", n_sys)
    anc_wires = c.add_register("ancilla", m)
    ctl = c.add_register("prep_tot", 1)[0]
    anc_h = c.add_register("anc_h", beH.num_ancillas)
    anc_fk = c.add_register("anc_fk", fk.num_ancillas)

    alpha_h, alpha_fk = beH.alpha, fk.alpha
    angle = 2 * math.atan(math.sqrt(alpha_fk / alpha_h))

    h_map = _place(c, beH, sys_wires, anc_h)
    fk_map = _place(c, fk, sys_wires + anc_wires, anc_fk)
    c.ry(angle, ctl).s(ctl)
    c.compose(beH.circuit.controlled(beH.circuit.width, 0), h_map + [ctl])
    c.compose(fk.circuit.controlled(fk.circuit.width, 1), fk_map + [ctl])
    c.ry(-angle, ctl)

    alpha = alpha_h + alpha_fk
    eps = (alpha_h * beH.epsilon + alpha_fk * fk.epsilon) / alpha
    ancillas = tuple([ctl] + anc_h + anc_fk)
    return TotalEncoding(BlockEncoding(c, alpha, ancillas, eps), angle, alpha_h, alpha_fk)


def total_target(H: np.ndarray, K: np.ndarray, theta_fh: np.ndarray) -> np.ndarray:
    return np.kron(np.eye(theta_fh.shape[0]), H) + 1j * np.kron(theta_fh, K)


def theta_fh_matrix(m: int, theta: float) -> np.ndarray:
    return theta * dilation.fh_stencil(2**m - 1)
