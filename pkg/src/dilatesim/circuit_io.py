"""Plain-text circuit format and CSV resource tables.

Grammar, one statement per line (``#`` starts a comment)::

    QUBITS <n>
    REG <name> <start> <size>
    GPHASE <angle>
    <NAME> [<angle>] [<controls>] -> <targets>

``NAME`` is a base gate kind (``H X Z S SDG RY RZ P SWAP``) or
``U[label]{re,im;re,im;...}`` with the row-major matrix inline.  Rotations
(``RY RZ P``) carry exactly one angle in radians.  ``controls`` and
``targets`` are comma-separated qubit indices; a control written ``~q`` is
open (fires on ``|0>``).  Angles are printed with ``repr`` so a round trip is
bit-exact.
"""

from __future__ import annotations

import csv
import io
import re

import numpy as np

from .circuits import Circuit, Gate, ResourceCount

_ROT = {"RY", "RZ", "P"}
_U_RE = re.compile(r"^U\[(?P<label>[^\]]*)\]\{(?P<body>[^}]*)\}$")


def _fmt_qubits(qs, states=None) -> str:
    states = states or (1,) * len(qs)
    return ",".join(("" if s else "~") + str(q) for q, s in zip(qs, states))


def _fmt_matrix(m: np.ndarray) -> str:
    flat = np.asarray(m, dtype=complex).ravel()
    return ";".join(f"{float(z.real)!r},{float(z.imag)!r}" for z in flat)


def gate_line(g: Gate) -> str:
    if g.kind == "U":
        head = f"U[{g.label}]{{{_fmt_matrix(g.matrix)}}}"
    else:
        head = g.kind
    parts = [head]
    if g.kind in _ROT:
        parts.append(repr(float(g.angle)))
    if g.controls:
        parts.append(_fmt_qubits(g.controls, g.ctrl_state))
    parts.append("->")
    parts.append(_fmt_qubits(g.targets))
    return " ".join(parts)


def to_text(c: Circuit) -> str:
    lines = [f"QUBITS {c.width}"]
    for name, (start, size) in c.registers.items():
        lines.append(f"REG {name} {start} {size}")
    if c.global_phase:
        lines.append(f"GPHASE {float(c.global_phase)!r}")
    lines.extend(gate_line(g) for g in c.gates)
    return "\n".join(lines) + "\n"


def _parse_qubits(text: str):
    qs, states = [], []
    for tok in text.split(","):
        tok = tok.strip()
        open_ = tok.startswith("~")
        qs.append(int(tok[1:] if open_ else tok))
        states.append(0 if open_ else 1)
    return tuple(qs), tuple(states)


def from_text(text: str) -> Circuit:
    c = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            head, *rest = line.split()
            if head == "QUBITS":
                c = Circuit(int(rest[0]))
                continue
            if c is None:
                raise ValueError("QUBITS must come first")
            if head == "REG":
                c.registers[rest[0]] = (int(rest[1]), int(rest[2]))
                continue
            if head == "GPHASE":
                c.global_phase += float(rest[0])
                continue
            arrow = rest.index("->")
            lhs, targets = rest[:arrow], rest[arrow + 1 :]
            if len(targets) != 1:
                raise ValueError("expected one comma-separated target list")
            angle = matrix = None
            label = ""
            if head in _ROT:
                angle, lhs = float(lhs[0]), lhs[1:]
            m = _U_RE.match(head)
            if m:
                label = m["label"]
                vals = [complex(float(a), float(b)) for a, b in
                        (p.split(",") for p in m["body"].split(";"))]
                dim = int(round(len(vals) ** 0.5))
                matrix = np.array(vals).reshape(dim, dim)
                head = "U"
            if len(lhs) > 1:
                raise ValueError("expected at most one control list")
            controls, states = _parse_qubits(lhs[0]) if lhs else ((), ())
            tq, tstates = _parse_qubits(targets[0])
            if 0 in tstates:
                raise ValueError("targets cannot be open")
            c.append(Gate(head, tq, controls, states, angle, matrix, label))
        except (ValueError, IndexError) as exc:
            raise ValueError(f"line {lineno}: {exc}: {raw!r}") from None
    if c is None:
        raise ValueError("empty circuit text")
    c._check_registers()
    return c


# -- export-time rewrites --------------------------------------------------------


def expand_open_controls(c: Circuit) -> Circuit:
    """Replace every open control by an X-conjugated closed one."""
    out = Circuit(c.width, registers=dict(c.registers), global_phase=c.global_phase)
    for g in c.gates:
        flips = [q for q, s in zip(g.controls, g.ctrl_state) if s == 0]
        for q in flips:
            out.x(q)
        out.append(Gate(g.kind, g.targets, g.controls, (), g.angle, g.matrix, g.label))
        for q in flips:
            out.x(q)
    return out


def expand_mcx(c: Circuit) -> Circuit:
    """Lower gates with many controls to Toffolis plus singly-controlled gates.

    Open controls are X-conjugated first.  An X with ``k >= 3`` controls
    becomes the standard V-chain: ``2k - 3`` Toffolis over ``k - 2`` clean
    ancillas.  Any other gate with ``k >= 2`` controls gets its controls'
    conjunction computed into ``k - 1`` clean ancillas, applied with a single
    control and uncomputed.  Ancillas form a new top register ``mcx_anc``
    that starts and ends in ``|0>``.
    """
    src = expand_open_controls(c)
    need = 0
    for g in src.gates:
        k = len(g.controls)
        if g.kind == "X" and k >= 3:
            need = max(need, k - 2)
        elif g.kind != "X" and k >= 2:
            need = max(need, k - 1)
    out = Circuit(src.width, registers=dict(src.registers), global_phase=src.global_phase)
    anc = out.add_register("mcx_anc", need) if need else []
    for g in src.gates:
        k = len(g.controls)
        ctl = list(g.controls)
        if g.kind == "X" and k >= 3:
            t = g.targets[0]
            ladder = [(ctl[0], ctl[1], anc[0])]
            ladder += [(ctl[i + 1], anc[i - 1], anc[i]) for i in range(1, k - 2)]
            for a, b, q in ladder:
                out.toffoli(a, b, q)
            out.toffoli(ctl[-1], anc[k - 3], t)
            for a, b, q in reversed(ladder):
                out.toffoli(a, b, q)
        elif g.kind != "X" and k >= 2:
            ladder = [(ctl[0], ctl[1], anc[0])]
            ladder += [(ctl[i + 1], anc[i - 1], anc[i]) for i in range(1, k - 1)]
            for a, b, q in ladder:
                out.toffoli(a, b, q)
            out.append(Gate(g.kind, g.targets, (anc[k - 2],), (), g.angle, g.matrix, g.label))
            for a, b, q in reversed(ladder):
                out.toffoli(a, b, q)
        else:
            out.append(g)
    return out


def export_text(c: Circuit, expand_open: bool = False, decompose: bool = False) -> str:
    if decompose:
        c = expand_mcx(c)
    elif expand_open:
        c = expand_open_controls(c)
    return to_text(c)


def resources_csv(rc: ResourceCount) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["gate", "count"])
    for name, n in rc.rows():
        w.writerow([name, n])
    w.writerow(["toffoli_equivalent", rc.toffoli_equivalent])
    return buf.getvalue()


def matrix_csv(a: np.ndarray, tol: float = 0.0) -> str:
    """Sparse ``row,col,re,im`` listing of the entries with ``|a_ij| > tol``."""
    a = np.asarray(a, dtype=complex)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["row", "col", "re", "im"])
    for i, j in zip(*np.nonzero(np.abs(a) > tol)):
        z = a[i, j]
        w.writerow([int(i), int(j), repr(float(z.real)), repr(float(z.imag))])
    return buf.getvalue()


def read_matrix_csv(text: str, shape) -> np.ndarray:
    out = np.zeros(shape, dtype=complex)
    for row in csv.DictReader(io.StringIO(text)):
        out[int(row["row"]), int(row["col"])] = complex(float(row["re"]), float(row["im"]))
    return out
