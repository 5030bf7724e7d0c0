import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dilatesim import blockenc, circuit_io
from dilatesim.circuits import (
    Circuit,
    Gate,
    basis_state,
    count_resources,
    dft_matrix,
    mottonen_prep,
    qft,
    simulate,
    unitary_of,
)
from dilatesim.numerics import unitarity_defect
from dilatesim.qsvt import reflections


def random_state(rng, n):
    v = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    return v / np.linalg.norm(v)


@st.composite
def circuits(draw, max_width=5, max_gates=25):
    n = draw(st.integers(1, max_width))
    c = Circuit(n)
    for _ in range(draw(st.integers(0, max_gates))):
        kind = draw(st.sampled_from(["H", "X", "Z", "S", "SDG", "RY", "RZ", "P", "SWAP"]))
        n_t = 2 if kind == "SWAP" else 1
        if n_t > n:
            continue
        wires = draw(st.permutations(range(n)))
        k = draw(st.integers(0, n - n_t))
        targets = tuple(wires[:n_t])
        controls = tuple(wires[n_t : n_t + k])
        states = tuple(draw(st.lists(st.integers(0, 1), min_size=k, max_size=k)))
        angle = draw(st.floats(-7, 7)) if kind in ("RY", "RZ", "P") else None
        c.append(Gate(kind, targets, controls, states, angle))
    c.global_phase = draw(st.floats(-4, 4))
    return c


# -- gates and simulation ------------------------------------------------------------


def test_gate_validation():
    with pytest.raises(ValueError):
        Gate("X", (0,), (0,))
    with pytest.raises(ValueError):
        Gate("RY", (0,))
    with pytest.raises(ValueError):
        Gate("RZ", (0,), angle=math.inf)
    with pytest.raises(ValueError):
        Gate("FOO", (0,))
    with pytest.raises(ValueError):
        Gate("SWAP", (0,))
    with pytest.raises(ValueError):
        Circuit(2).x(2)


def test_gate_names():
    assert Gate("X", (0,), (1,)).name == "CNOT"
    assert Gate("X", (0,), (1, 2)).name == "TOFFOLI"
    assert Gate("X", (0,), (1, 2, 3)).name == "MCX"
    assert Gate("P", (0,), (1,), angle=0.1).name == "CPHASE"
    assert Gate("RY", (0,), (1, 2), angle=0.1).name == "CC-RY"


def test_empty_circuit_identity():
    v = random_state(np.random.default_rng(0), 3)
    assert np.array_equal(simulate(Circuit(3), v), v)


def test_single_h():
    out = simulate(Circuit(1).h(0), basis_state(1))
    assert np.allclose(out, [1 / math.sqrt(2)] * 2, atol=1e-15)


def test_cnot_permutation():
    U = unitary_of(Circuit(2).cnot(0, 1))
    # little-endian: control qubit 0 is the low bit
    P = np.zeros((4, 4))
    for i in range(4):
        j = i ^ 2 if i & 1 else i
        P[j, i] = 1
    assert np.array_equal(U, P)


def test_z_gate():
    assert np.array_equal(unitary_of(Circuit(1).z(0)), np.diag([1, -1]))


def test_open_control():
    U = unitary_of(Circuit(2).mcx([1], 0, [0]))
    # flips qubit 0 when qubit 1 is |0>
    assert np.array_equal(U[:, 0], basis_state(2, 1))
    assert np.array_equal(U[:, 2], basis_state(2, 2))


def test_simulate_errors():
    c = Circuit(2)
    with pytest.raises(ValueError):
        simulate(c, np.ones(3))
    with pytest.raises(ValueError):
        simulate(c, np.ones(4))
    with pytest.raises(ValueError):
        unitary_of(Circuit(15))


@settings(max_examples=60, deadline=None)
@given(circuits(), st.integers(0, 2**32 - 1))
def test_simulate_matches_unitary(c, seed):
    rng = np.random.default_rng(seed)
    U = unitary_of(c)
    assert unitarity_defect(U) <= 1e-11
    for _ in range(3):
        v = random_state(rng, c.width)
        assert np.linalg.norm(simulate(c, v) - U @ v) <= 1e-10


@settings(max_examples=40, deadline=None)
@given(circuits())
def test_inverse(c):
    U = unitary_of(c)
    assert np.allclose(unitary_of(c.inverse()), U.conj().T, atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(circuits(max_width=4), st.integers(0, 1))
def test_controlled_circuit(c, state):
    U = unitary_of(c)
    cc = c.controlled(c.width, state)
    V = unitary_of(cc)
    d = 2**c.width
    on, off = (slice(d, 2 * d), slice(0, d)) if state else (slice(0, d), slice(d, 2 * d))
    assert np.allclose(V[on, on], U, atol=1e-12)
    assert np.allclose(V[off, off], np.eye(d), atol=1e-12)


def test_compose_and_registers():
    c = Circuit(0)
    a = c.add_register("a", 2)
    b = c.add_register("b", 1)
    assert (a, b) == ([0, 1], [2])
    with pytest.raises(ValueError):
        c.add_register("a", 1)
    c.compose(Circuit(2).cnot(0, 1), [2, 0])
    assert c.gates[0].controls == (2,) and c.gates[0].targets == (0,)


# -- Mottonen preparation ------------------------------------------------------------


def test_mottonen_a1():
    w0, w1 = 0.3, 0.7
    c = mottonen_prep([math.sqrt(w0), math.sqrt(w1)])
    assert len(c.gates) == 1 and c.gates[0].kind == "RY"
    assert c.gates[0].angle == pytest.approx(2 * math.atan2(math.sqrt(w1), math.sqrt(w0)))


def test_mottonen_uniform():
    out = simulate(mottonen_prep([0.5] * 4), basis_state(2))
    assert np.abs(out - 0.5).max() <= 1e-12


def test_mottonen_fig1_weights():
    # a = 3 index register of the H_init decomposition (m = 7)
    w = blockenc.init_weights(7)
    c = mottonen_prep(np.sqrt(w))
    rc = count_resources(c)
    assert (rc["CNOT"], rc["RY"]) == (6, 7)
    assert np.abs(simulate(c, basis_state(3)) - np.sqrt(w)).max() <= 1e-10


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_mottonen_count_law_and_amplitudes(a, seed):
    rng = np.random.default_rng(seed)
    amp = rng.random(2**a)
    amp[rng.random(2**a) < 0.3] = 0.0
    if not amp.any():
        amp[0] = 1.0
    amp /= np.linalg.norm(amp)
    c = mottonen_prep(amp)
    rc = count_resources(c)
    assert rc["RY"] == 2**a - 1 and rc["CNOT"] == 2**a - 2
    assert set(rc.counts) <= {"RY", "CNOT"}
    assert np.abs(simulate(c, basis_state(a)) - amp).max() <= 1e-12


def test_mottonen_errors():
    with pytest.raises(ValueError):
        mottonen_prep([0.6, -0.8])
    with pytest.raises(ValueError):
        mottonen_prep([1.0, 1.0])
    with pytest.raises(ValueError):
        mottonen_prep([1.0, 0.0, 0.0])


# -- QFT ------------------------------------------------------------------------


def test_qft_one_qubit():
    c = qft(1)
    assert [g.kind for g in c.gates] == ["H"]


@pytest.mark.parametrize("n", range(1, 7))
def test_qft_count_law(n):
    rc = count_resources(qft(n))
    m = n - 1
    assert rc["CPHASE"] == m * (m + 1) // 2 and rc["H"] == m + 1
    assert sum(rc.counts.values()) == m * (m + 1) // 2 + m + 1


def test_qft_dft8():
    U = unitary_of(qft(3, swaps=True))
    assert np.abs(U - dft_matrix(8)).max() <= 1e-12


@pytest.mark.parametrize("n", [2, 3, 4])
def test_qft_no_swaps_is_bit_reversed(n):
    N = 2**n
    rev = [int(format(i, f"0{n}b")[::-1], 2) for i in range(N)]
    U = unitary_of(qft(n))
    assert np.abs(U[rev, :] - dft_matrix(N)).max() <= 1e-12


# -- resources ----------------------------------------------------------------------


def test_empty_resources():
    rc = count_resources(Circuit(3))
    assert rc.counts == {} and rc.toffoli_equivalent == 0


@pytest.mark.parametrize("m", range(2, 9))
def test_select_init_toffoli_law(m):
    be = blockenc.build_u_init(m)
    a = blockenc.num_index_qubits(m)
    assert count_resources(be.circuit).toffoli_equivalent == m * (2 * a - 3)


def test_select_init_m7():
    assert count_resources(blockenc.build_u_init(7).circuit).toffoli_equivalent == 21


@pytest.mark.parametrize("m", [3, 4, 5, 6])
def test_s0_toffoli_count(m):
    _, s0 = reflections(m)
    assert count_resources(s0).toffoli_equivalent == 2 * m - 5


def test_toffoli_equivalent_rule():
    c = Circuit(6).toffoli(0, 1, 2).mcx([0, 1, 2, 3], 4).mcx([0, 1, 2, 3, 4], 5)
    rc = count_resources(c)
    assert rc.mcx_sizes == {4: 1, 5: 1}
    assert rc.toffoli_equivalent == 1 + 5 + 7


# -- text export -------------------------------------------------------------------


@settings(max_examples=40, deadline=None)
@given(circuits())
def test_text_round_trip(c):
    text = circuit_io.to_text(c)
    back = circuit_io.from_text(text)
    assert circuit_io.to_text(back) == text
    assert np.array_equal(unitary_of(back), unitary_of(c))


def test_text_unitary_gate_round_trip():
    be = blockenc.from_matrix(np.array([[0.3, 0.1], [0.1, -0.2]]), label="K")
    back = circuit_io.from_text(circuit_io.to_text(be.circuit))
    assert np.array_equal(unitary_of(back), unitary_of(be.circuit))


def test_text_grammar_sample():
    text = """
    # comment
    QUBITS 3
    REG data 0 2
    GPHASE 0.5
    H -> 0
    RY 1.25 ~2 -> 1
    X 0,1 -> 2
    SWAP -> 0,1
    """
    c = circuit_io.from_text(text)
    assert c.global_phase == 0.5
    assert c.gates[1] == Gate("RY", (1,), (2,), (0,), 1.25)
    assert c.gates[2].name == "TOFFOLI"
    assert c.registers == {"data": (0, 2)}
    assert circuit_io.gate_line(c.gates[1]) == "RY 1.25 ~2 -> 1"


@pytest.mark.parametrize(
    "bad", ["H -> 0", "QUBITS 1\nRY -> 0", "QUBITS 2\nX 1 -> ~0", "QUBITS 1\nFOO -> 0"]
)
def test_text_errors(bad):
    with pytest.raises(ValueError):
        circuit_io.from_text(bad)


@settings(max_examples=30, deadline=None)
@given(circuits(max_width=5, max_gates=12))
def test_expand_open_controls(c):
    e = circuit_io.expand_open_controls(c)
    assert all(s == 1 for g in e.gates for s in g.ctrl_state)
    assert np.allclose(unitary_of(e), unitary_of(c), atol=1e-12)


def _assert_expansion_equivalent(c):
    e = circuit_io.expand_mcx(c)
    assert all(len(g.controls) <= 2 and (len(g.controls) < 2 or g.kind == "X") for g in e.gates)
    d = 2**c.width
    Ue = unitary_of(e)
    # ancillas start and end clean
    assert np.allclose(Ue[:d, :d], unitary_of(c), atol=1e-12)
    return e


@settings(max_examples=30, deadline=None)
@given(circuits(max_width=5, max_gates=10))
def test_expand_mcx_random(c):
    _assert_expansion_equivalent(c)


@pytest.mark.parametrize("k", [3, 4, 5, 6])
def test_vchain_toffoli_count(k):
    c = Circuit(k + 1).mcx(list(range(1, k + 1)), 0)
    e = _assert_expansion_equivalent(c)
    rc = count_resources(e)
    assert rc["TOFFOLI"] == 2 * k - 3 == count_resources(c).toffoli_equivalent
    assert e.width - c.width == k - 2


def test_resources_csv():
    rc = count_resources(Circuit(4).h(0).mcx([0, 1, 2], 3))
    assert circuit_io.resources_csv(rc) == "gate,count\nH,1\nMCX,1\ntoffoli_equivalent,3\n"


def test_matrix_csv_round_trip():
    a = np.array([[0, 1 + 2j], [-0.25, 0]])
    text = circuit_io.matrix_csv(a)
    assert text.splitlines()[0] == "row,col,re,im"
    assert np.array_equal(circuit_io.read_matrix_csv(text, a.shape), a)
