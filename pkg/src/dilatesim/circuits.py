"""Small gate-model circuit layer with a dense statevector simulator.

Qubit ``q`` is bit ``q`` of the computational index (little-endian).  Every
gate is a base matrix on its targets plus an optional list of controls, each
with a polarity (``1`` closed, ``0`` open).  Controlled variants keep their
base kind, so a CNOT is an ``X`` with one control and a Toffoli an ``X`` with
two; :attr:`Gate.name` recovers the conventional label.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field, replace

import numpy as np

MAX_UNITARY_WIDTH = 14

_SQ2 = 1 / math.sqrt(2)
_FIXED = {
    "H": np.array([[_SQ2, _SQ2], [_SQ2, -_SQ2]], dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
    "S": np.array([[1, 0], [0, 1j]], dtype=complex),
    "SDG": np.array([[1, 0], [0, -1j]], dtype=complex),
    "SWAP": np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex),
}
_ROTATIONS = ("RY", "RZ", "P")
_KINDS = set(_FIXED) | set(_ROTATIONS) | {"U"}
_SELF_INVERSE = {"H", "X", "Z", "SWAP"}


def _rotation(kind: str, angle: float) -> np.ndarray:
    c, s = math.cos(angle / 2), math.sin(angle / 2)
    if kind == "RY":
        return np.array([[c, -s], [s, c]], dtype=complex)
    if kind == "RZ":
        return np.diag([np.exp(-0.5j * angle), np.exp(0.5j * angle)])
    return np.diag([1.0, np.exp(1j * angle)])


@dataclass(frozen=True)
class Gate:
    kind: str
    targets: tuple[int, ...]
    controls: tuple[int, ...] = ()
    ctrl_state: tuple[int, ...] = ()
    angle: float | None = None
    matrix: np.ndarray | None = field(default=None, compare=False, repr=False)
    label: str = ""

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
        object.__setattr__(self, "controls", tuple(int(c) for c in self.controls))
        state = tuple(int(s) for s in self.ctrl_state) or (1,) * len(self.controls)
        object.__setattr__(self, "ctrl_state", state)
        if len(state) != len(self.controls) or any(s not in (0, 1) for s in state):
            raise ValueError("ctrl_state must give a 0/1 polarity per control")
        wires = self.targets + self.controls
        if len(set(wires)) != len(wires):
            raise ValueError(f"targets and controls overlap in {self.kind} gate")
        if self.kind in _ROTATIONS:
            if self.angle is None or not math.isfinite(self.angle):
                raise ValueError(f"{self.kind} needs a finite angle")
        n_t = 2 if self.kind == "SWAP" else 1
        if self.kind == "U":
            if self.matrix is None or self.matrix.shape != (2 ** len(self.targets),) * 2:
                raise ValueError("U gate matrix does not match its target count")
        elif len(self.targets) != n_t:
            raise ValueError(f"{self.kind} acts on {n_t} target(s)")

    @property
    def name(self) -> str:
        k = len(self.controls)
        if self.kind == "X":
            return ("X", "CNOT", "TOFFOLI")[k] if k < 3 else "MCX"
        if self.kind == "P" and k == 1:
            return "CPHASE"
        if self.kind == "U" and self.label:
            base = f"U[{self.label}]"
        else:
            base = self.kind
        return "C" * k + ("-" if k else "") + base

    def base_matrix(self) -> np.ndarray:
        if self.kind in _FIXED:
            return _FIXED[self.kind]
        if self.kind in _ROTATIONS:
            return _rotation(self.kind, self.angle)
        return np.asarray(self.matrix, dtype=complex)

    def inverse(self) -> "Gate":
        if self.kind in _SELF_INVERSE:
            return self
        if self.kind == "S":
            return replace(self, kind="SDG")
        if self.kind == "SDG":
            return replace(self, kind="S")
        if self.kind in _ROTATIONS:
            return replace(self, angle=-self.angle)
        return replace(self, matrix=np.asarray(self.matrix).conj().T, label=_dagger(self.label))

    def with_control(self, qubit: int, state: int = 1) -> "Gate":
        return replace(
            self, controls=self.controls + (qubit,), ctrl_state=self.ctrl_state + (state,)
        )

    def remap(self, mapping) -> "Gate":
        return replace(
            self,
            targets=tuple(mapping[t] for t in self.targets),
            controls=tuple(mapping[c] for c in self.controls),
        )


def _dagger(label: str) -> str:
    if not label:
        return label
    return label[:-1] if label.endswith("'") else label + "'"


@dataclass
class Circuit:
    """Ordered gate list over ``width`` qubits with named registers.

    Builder methods return ``self`` so calls chain.  ``global_phase`` is an
    explicit scalar phase ``e^{i phi}`` folded into every execution path.
    """

    width: int
    gates: list[Gate] = field(default_factory=list)
    registers: dict[str, tuple[int, int]] = field(default_factory=dict)
    global_phase: float = 0.0

    def __post_init__(self):
        if self.width < 0:
            raise ValueError("width must be nonnegative")

    # -- registers -----------------------------------------------------
    def add_register(self, name: str, size: int) -> list[int]:
        """Claim ``size`` fresh qubits at the top of the circuit."""
        if name in self.registers:
            raise ValueError(f"register {name!r} already exists")
        start = self.width
        self.width += size
        self.registers[name] = (start, size)
        return list(range(start, start + size))

    def register(self, name: str) -> list[int]:
        start, size = self.registers[name]
        return list(range(start, start + size))

    def _check_registers(self):
        used: set[int] = set()
        for name, (start, size) in self.registers.items():
            span = set(range(start, start + size))
            if start < 0 or start + size > self.width:
                raise ValueError(f"register {name!r} lies outside the circuit")
            if span & used:
                raise ValueError(f"register {name!r} overlaps another register")
            used |= span

    # -- building --------------------------------------------------------
    def append(self, gate: Gate) -> "Circuit":
        for q in gate.targets + gate.controls:
            if not 0 <= q < self.width:
                raise ValueError(f"qubit {q} outside circuit of width {self.width}")
        self.gates.append(gate)
        return self

    def _ctl(self, kind, targets, controls=(), ctrl_state=(), angle=None):
        return self.append(Gate(kind, tuple(targets), tuple(controls), tuple(ctrl_state), angle))

    def h(self, q):
        return self._ctl("H", (q,))

    def x(self, q):
        return self._ctl("X", (q,))

    def z(self, q):
        return self._ctl("Z", (q,))

    def s(self, q):
        return self._ctl("S", (q,))

    def ry(self, angle, q):
        return self._ctl("RY", (q,), angle=float(angle))

    def rz(self, angle, q):
        return self._ctl("RZ", (q,), angle=float(angle))

    def phase(self, angle, q):
        return self._ctl("P", (q,), angle=float(angle))

    def cphase(self, angle, control, target):
        return self._ctl("P", (target,), (control,), angle=float(angle))

    def cnot(self, control, target):
        return self._ctl("X", (target,), (control,))

    def toffoli(self, c1, c2, target):
        return self._ctl("X", (target,), (c1, c2))

    def mcx(self, controls, target, ctrl_state=()):
        return self._ctl("X", (target,), controls, ctrl_state)

    def mcz(self, controls, target, ctrl_state=()):
        """Multi-controlled Z written as ``H . MCX . H`` on the target."""
        self.h(target)
        self.mcx(controls, target, ctrl_state)
        return self.h(target)

    def swap(self, q1, q2):
        return self._ctl("SWAP", (q1, q2))

    def unitary(self, matrix, targets, label: str = ""):
        m = np.asarray(matrix, dtype=complex)
        return self.append(Gate("U", tuple(targets), matrix=m, label=label))

    def compose(self, other: "Circuit", qubits=None) -> "Circuit":
        """Append ``other`` with its qubit ``i`` placed on ``qubits[i]``."""
        if qubits is None:
            qubits = list(range(other.width))
        if len(qubits) != other.width:
            raise ValueError("qubit map length must equal the composed circuit width")
        for g in other.gates:
            self.append(g.remap(qubits))
        self.global_phase += other.global_phase
        return self

    # -- derived circuits ----------------------------------------------
    def inverse(self) -> "Circuit":
        return Circuit(
            self.width,
            [g.inverse() for g in reversed(self.gates)],
            dict(self.registers),
            -self.global_phase,
        )

    def controlled(self, control: int, state: int = 1) -> "Circuit":
        """Add ``control`` (with polarity ``state``) to every gate.

        The global phase turns into a phase gate on the control line.
        """
        if any(control in g.targets + g.controls for g in self.gates):
            raise ValueError(f"control qubit {control} is already used by the circuit")
        out = Circuit(max(self.width, control + 1), registers=dict(self.registers))
        for g in self.gates:
            out.append(g.with_control(control, state))
        phi = math.remainder(self.global_phase, 2 * math.pi)
        if phi != 0.0:
            if state == 1:
                out.phase(phi, control)
            else:
                out.x(control).phase(phi, control).x(control)
        return out

    def __len__(self):
        return len(self.gates)


# -- execution ------------------------------------------------------------


def _apply_gate(psi: np.ndarray, gate: Gate, n: int) -> np.ndarray:
    """Apply ``gate`` to ``psi`` of shape ``[2]*n + [batch]`` in place."""
    idx: list = [slice(None)] * (n + 1)
    for c, s in zip(gate.controls, gate.ctrl_state):
        idx[n - 1 - c] = s
    idx = tuple(idx)
    sub = psi[idx]
    removed = sorted(n - 1 - c for c in gate.controls)
    axes = []
    for t in reversed(gate.targets):  # most significant target first
        a = n - 1 - t
        axes.append(a - sum(1 for r in removed if r < a))
    k = len(axes)
    moved = np.moveaxis(sub, axes, range(k))
    shape = moved.shape
    out = gate.base_matrix() @ moved.reshape(2**k, -1)
    psi[idx] = np.moveaxis(out.reshape(shape), range(k), axes)
    return psi


def apply_circuit(c: Circuit, states: np.ndarray) -> np.ndarray:
    """Run ``c`` on the columns of ``states`` (shape ``(2^width, batch)``)."""
    n = c.width
    states = np.asarray(states, dtype=complex)
    if states.ndim != 2 or states.shape[0] != 2**n:
        raise ValueError(f"expected a (2^{n}, batch) array, got {states.shape}")
    psi = states.reshape([2] * n + [states.shape[1]]).copy()
    for g in c.gates:
        _apply_gate(psi, g, n)
    out = psi.reshape(2**n, -1)
    if c.global_phase:
        out = out * np.exp(1j * c.global_phase)
    return out


def simulate(c: Circuit, state: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    state = np.asarray(state, dtype=complex)
    if state.shape != (2**c.width,):
        raise ValueError(f"state must have length 2^{c.width}")
    if abs(np.linalg.norm(state) - 1.0) > tol:
        raise ValueError("input state is not normalized")
    return apply_circuit(c, state[:, None])[:, 0]


def basis_state(width: int, index: int = 0) -> np.ndarray:
    v = np.zeros(2**width, dtype=complex)
    v[index] = 1.0
    return v


def unitary_of(c: Circuit) -> np.ndarray:
    if c.width > MAX_UNITARY_WIDTH:
        raise ValueError(f"width {c.width} exceeds unitary cap {MAX_UNITARY_WIDTH}")
    return apply_circuit(c, np.eye(2**c.width, dtype=complex))


# -- resources --------------------------------------------------------------


@dataclass(frozen=True)
class ResourceCount:
    counts: dict[str, int]
    mcx_sizes: dict[int, int]
    toffoli_equivalent: int

    def __getitem__(self, name: str) -> int:
        return self.counts.get(name, 0)

    def rows(self) -> list[tuple[str, int]]:
        return sorted(self.counts.items())


def count_resources(c: Circuit) -> ResourceCount:
    """Tally gates by name; MCX with ``k >= 3`` controls costs ``2k - 3`` Toffolis."""
    counts = Counter(g.name for g in c.gates)
    sizes = Counter(len(g.controls) for g in c.gates if g.name == "MCX")
    toff = counts.get("TOFFOLI", 0) + sum((2 * k - 3) * n for k, n in sizes.items())
    return ResourceCount(dict(counts), dict(sizes), toff)


# -- standard building blocks -------------------------------------------


def _gray(i: int) -> int:
    return i ^ (i >> 1)


def mottonen_prep(amplitudes) -> Circuit:
    """Prepare ``sum_j amplitudes[j] |j>`` from ``|0...0>`` with RY and CNOT only.

    Uniformly controlled RY rotations in Gray-code order; exactly
    ``2^a - 1`` RY and ``2^a - 2`` CNOT for ``2^a`` amplitudes.
    """
    amp = np.asarray(amplitudes, dtype=float)
    n_amp = amp.size
    a = n_amp.bit_length() - 1
    if n_amp < 2 or 2**a != n_amp:
        raise ValueError("need 2^a amplitudes with a >= 1")
    if np.any(amp < 0):
        raise ValueError("amplitudes must be real and nonnegative")
    if abs(np.linalg.norm(amp) - 1.0) > 1e-10:
        raise ValueError("amplitudes must have unit norm")

    c = Circuit(a)
    c.registers["prep"] = (0, a)
    # level k rotates qubit t = a-1-k, controlled on the k qubits above it
    for k in range(a):
        t = a - 1 - k
        blocks = amp.reshape(2**k, 2, 2**t)  # (higher bits, bit t, lower bits)
        n0 = np.linalg.norm(blocks[:, 0, :], axis=1)
        n1 = np.linalg.norm(blocks[:, 1, :], axis=1)
        alpha = 2 * np.arctan2(n1, n0)
        if k == 0:
            c.ry(alpha[0], t)
            continue
        size = 2**k
        signs = np.array(
            [[(-1) ** bin(_gray(i) & cv).count("1") for i in range(size)] for cv in range(size)]
        )
        thetas = signs.T @ alpha / size
        for i in range(size):
            c.ry(thetas[i], t)
            flip = _gray(i) ^ _gray((i + 1) % size)
            bit = flip.bit_length() - 1
            c.cnot(t + 1 + bit, t)
    return c


def qft(n: int, swaps: bool = False) -> Circuit:
    """Textbook QFT on ``n`` qubits: ``n`` Hadamards and ``n(n-1)/2`` CPHASE.

    Without ``swaps`` the output index is bit-reversed; callers that know
    this relabel the Fourier register instead of paying for SWAPs.
    """
    if n < 1:
        raise ValueError("QFT needs at least one qubit")
    c = Circuit(n)
    c.registers["qft"] = (0, n)
    for j in range(n - 1, -1, -1):
        c.h(j)
        for k in range(j - 1, -1, -1):
            c.cphase(math.pi / 2 ** (j - k), k, j)
    if swaps:
        for q in range(n // 2):
            c.swap(q, n - 1 - q)
    return c


def dft_matrix(N: int) -> np.ndarray:
    j = np.arange(N)
    return np.exp(2j * np.pi * np.outer(j, j) / N) / math.sqrt(N)
