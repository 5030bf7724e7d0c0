"""Monomial QSVT on the ``diag(i/M)`` encoding, ancilla-state preparation and
amplitude amplification.

The sequence uses one signal qubit in the Hadamard basis.  Each round applies
the signal unitary (``U`` and ``U^dag`` alternately), then ``C_Pi NOT``,
``RZ(2 phi_j)``, ``C_Pi NOT`` on the signal, where ``C_Pi NOT`` is an
open-controlled X from the encoding ancillas.  The first round uses the last
tabulated phase.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import dilation
from .blockenc import BlockEncoding, build_u_init, extract_block
from .circuits import Circuit, apply_circuit, basis_state, count_resources, unitary_of

# phases phi_1..phi_beta for f(x) = x^beta, as tabulated
_PHASE_TABLE = {
    3: (-1.945530537814129, -2.1688268601597227, -2.1688268601597227),
    4: (-0.17915969502442763, -1.9634951462137356, -2.1770342706081474, -1.9634951462137356),
    5: (
        1.4843149138525842,
        -1.8078352881528696,
        -2.0759142978060185,
        -2.0759142978060185,
        -1.8078352881528696,
    ),
    6: (
        3.099514146455192,
        -1.7077184397821685,
        -1.9424558926637125,
        -2.0823497396925856,
        -1.9424558926637125,
        -1.7077184397821685,
    ),
    7: (
        -1.5913870208780079,
        -1.648016853210964,
        -1.8228649318945727,
        -2.0166094870933566,
        -2.0166094870933566,
        -1.8228649318945727,
        -1.648016853210964,
    ),
}


@dataclass(frozen=True)
class QsvtPhases:
    beta: int
    phases: tuple[float, ...]

    def __post_init__(self):
        if len(self.phases) != self.beta:
            raise ValueError("need exactly beta phases")


def load_phases(beta: int) -> QsvtPhases:
    if beta not in _PHASE_TABLE:
        raise ValueError(
            f"no tabulated phases for beta={beta}; only beta in 3..7 is supported at "
            "the circuit level (no phase solver is shipped). The numeric dilation "
            "pipeline accepts any integer beta >= 0."
        )
    return QsvtPhases(beta, _PHASE_TABLE[beta])


def qsvt_sequence(be: BlockEncoding, phases: QsvtPhases) -> Circuit:
    """Interleave ``be`` with projector-controlled signal rotations.

    The result keeps ``be``'s qubit numbering and adds a ``signal`` qubit on
    top.  Projecting the encoding ancillas and the signal onto ``|0>`` gives
    ``p(A)`` for the block ``A`` of ``be``.
    """
    if abs(be.alpha - 1.0) > 1e-12:
        raise ValueError("QSVT needs an alpha = 1 encoding; rescale first")
    inner = be.circuit
    c = Circuit(inner.width, registers=dict(inner.registers))
    sig = c.add_register("signal", 1)[0]
    anc = list(be.ancillas)
    closed = [0] * len(anc)
    fwd, bwd = inner, inner.inverse()
    wires = list(range(inner.width))
    c.h(sig)
    for j, phi in enumerate(reversed(phases.phases)):
        c.compose(fwd if j % 2 == 0 else bwd, wires)
        c.mcx(anc, sig, closed)
        c.rz(2 * phi, sig)
        c.mcx(anc, sig, closed)
    c.h(sig)
    return c


def qsvt_encoding(be: BlockEncoding, phases: QsvtPhases) -> BlockEncoding:
    c = qsvt_sequence(be, phases)
    return BlockEncoding(c, 1.0, tuple(be.ancillas) + tuple(c.register("signal")))


def scalar_encoding(x: float) -> BlockEncoding:
    """One-qubit reflection ``[[x, s], [s, -x]]`` encoding the scalar ``x``."""
    if not -1 <= x <= 1:
        raise ValueError("x must lie in [-1, 1]")
    s = math.sqrt(1 - x * x)
    c = Circuit(0)
    anc = c.add_register("anc", 1)
    c.unitary(np.array([[x, s], [s, -x]]), anc, "Ux")
    return BlockEncoding(c, 1.0, tuple(anc))


def qsvt_polynomial(phases: QsvtPhases, xs) -> np.ndarray:
    """``p_Phi(x)`` obtained by simulating the sequence on scalar encodings."""
    return np.array(
        [extract_block(qsvt_encoding(scalar_encoding(float(x)), phases))[0, 0] for x in xs]
    )


# -- preparation of |r_h> -------------------------------------------------------


def prep_circuit(m: int, beta: int) -> Circuit:
    """``H^{(x) m}`` on the data register followed by the monomial QSVT on ``U_init``."""
    be = build_u_init(m)
    c = Circuit(be.circuit.width, registers=dict(be.circuit.registers))
    for q in c.register("data"):
        c.h(q)
    seq = qsvt_sequence(be, load_phases(beta))
    c.add_register("signal", 1)
    c.compose(seq)
    return c


@dataclass(frozen=True)
class PrepResult:
    postselected_state: np.ndarray
    fidelity: float
    success_probability: float
    iterates: int = 0
    amplified_probability: float | None = None
    amplified_fidelity: float | None = None
    gate_counts: dict = field(default_factory=dict)


def iterate_count(p: float) -> int:
    """Nearest-integer Grover schedule ``max(0, round(pi / (4 asin sqrt p) - 1/2))``."""
    if not 0 < p <= 1:
        raise ValueError("success probability must lie in (0, 1]")
    return max(0, round(math.pi / (4 * math.asin(math.sqrt(p))) - 0.5))


def prepare_rh(m: int, beta: int, amplify: str | None = None) -> PrepResult:
    """Simulate the preparation circuit and postselect all ancillas on ``|0>``.

    ``amplify`` is ``None``, ``"standard"`` (plain Grover iterates, nearest-integer
    schedule) or ``"exact"`` (one extra qubit lowers the initial amplitude so an
    integer number of iterates reaches probability one).
    """
    if m < 2:
        raise ValueError("m must be at least 2")
    M = 2**m - 1
    c = prep_circuit(m, beta)
    out = apply_circuit(c, basis_state(c.width)[:, None])[:, 0]
    good = out[: 2**m]  # encoding ancillas and signal all zero
    p = float(np.vdot(good, good).real)
    state = good / math.sqrt(p)
    r = dilation.profile(beta, M)
    r = r / np.linalg.norm(r)
    fidelity = float(abs(np.vdot(r, state)) ** 2)
    counts = count_resources(c).counts

    if amplify is None:
        return PrepResult(state, fidelity, p, gate_counts=counts)
    A = unitary_of(c)
    if amplify == "standard":
        k = iterate_count(p)
        prob, final = _amplify(A, 2**m, k)
    elif amplify == "exact":
        k, prob, final = _amplify_exact(A, 2**m, p)
    else:
        raise ValueError(f"unknown amplification mode {amplify!r}")
    fid = float(abs(np.vdot(r, final / np.linalg.norm(final))) ** 2)
    return PrepResult(state, fidelity, p, k, prob, fid, counts)


def _good_reflection(dim: int, n_good: int) -> np.ndarray:
    d = np.ones(dim)
    d[:n_good] = -1
    return np.diag(d).astype(complex)


def zero_reflection(dim: int) -> np.ndarray:
    d = np.ones(dim)
    d[0] = -1
    return np.diag(d).astype(complex)


def _amplify(A: np.ndarray, n_good: int, k: int):
    Q = grover_iterate(A, _good_reflection(A.shape[0], n_good), zero_reflection(A.shape[0]))
    psi = A[:, 0]
    for _ in range(k):
        psi = Q @ psi
    good = psi[:n_good]
    return float(np.vdot(good, good).real), good


def _amplify_exact(A: np.ndarray, n_good: int, p: float):
    """Lower the good amplitude to ``sin(pi / (2(2k+1)))`` then run ``k`` iterates."""
    theta = math.asin(math.sqrt(p))
    k = max(0, math.ceil(math.pi / (4 * theta) - 0.5))
    target = math.pi / (2 * (2 * k + 1))
    gamma = math.acos(min(1.0, math.sin(target) / math.sqrt(p)))
    ry = np.array([[math.cos(gamma), -math.sin(gamma)], [math.sin(gamma), math.cos(gamma)]])
    # extra qubit is the most significant; good states need it in |0>
    A2 = np.kron(ry, A)
    prob, good = _amplify(A2, n_good, k)
    return k, prob, good


# -- reflections ----------------------------------------------------------------


def reflections(m: int) -> tuple[Circuit, Circuit]:
    """``S_chi`` (phase flip when the two top bits differ) and ``S_0 = I - 2|0><0|``."""
    if m < 3:
        raise ValueError("m must be at least 3")
    s_chi = Circuit(m)
    s_chi.registers["ancilla"] = (0, m)
    s_chi.z(m - 1).z(m - 2)

    s0 = Circuit(m)
    s0.registers["ancilla"] = (0, m)
    for q in range(m):
        s0.x(q)
    s0.h(0)
    s0.mcx(list(range(m - 1, 0, -1)), 0)
    s0.h(0)
    for q in range(m):
        s0.x(q)
    return s_chi, s0


def grover_iterate(A, S_chi, S_0) -> np.ndarray:
    """``Q = -A S_0 A^dag S_chi``; circuits are converted to dense unitaries."""
    A, S_chi, S_0 = (unitary_of(x) if isinstance(x, Circuit) else np.asarray(x) for x in (A, S_chi, S_0))
    if np.linalg.norm(A @ A.conj().T - np.eye(A.shape[0])) > 1e-10:
        raise ValueError("A must be unitary")
    return -A @ S_0 @ A.conj().T @ S_chi
