"""Flat ``key = value`` problem files.

Example::

    # scalar decay
    N = 1
    H = 0
    K = -1
    kappa = const:1
    T = 0.05
    x0 = 1
    beta = 3
    M = 64

``H`` and ``K`` are row-major lists of N*N complex numbers (``1``, ``-0.5``,
``2+1j``), separated by commas or whitespace; ``x0`` lists N entries.
``kappa`` is ``const:c`` or ``linear:a,b`` for ``a + b t``.  ``H`` and
``K`` default to zero, ``kappa`` to ``const:1``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .experiments import ProblemSpec, constant, linear

_KEYS = {"N", "H", "K", "kappa", "T", "x0", "beta", "M"}


@dataclass(frozen=True)
class RunConfig:
    spec: ProblemSpec
    beta: int | None
    M: int | None
    kappa_text: str


def _complex_list(text: str) -> list[complex]:
    toks = [t for t in re.split(r"[,\s]+", text.strip()) if t]
    return [complex(t) for t in toks]


def parse_kappa(text: str):
    kind, _, args = text.partition(":")
    vals = [float(v) for v in args.split(",") if v.strip()]
    if kind == "const" and len(vals) == 1:
        return constant(vals[0])
    if kind == "linear" and len(vals) == 2:
        return linear(*vals)
    raise ValueError(f"kappa must be const:c or linear:a,b, got {text!r}")


def parse_config(text: str) -> RunConfig:
    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep or key not in _KEYS:
            raise ValueError(f"line {lineno}: expected one of {sorted(_KEYS)} = value")
        raw[key] = value.strip()
    for key in ("N", "T", "x0"):
        if key not in raw:
            raise ValueError(f"missing required key {key!r}")
    N = int(raw["N"])

    def matrix(key):
        if key not in raw:
            return np.zeros((N, N))
        vals = _complex_list(raw[key])
        if len(vals) != N * N:
            raise ValueError(f"{key} needs {N * N} entries, got {len(vals)}")
        return np.array(vals).reshape(N, N)

    x0 = np.array(_complex_list(raw["x0"]))
    if x0.size != N:
        raise ValueError(f"x0 needs {N} entries, got {x0.size}")
    kappa_text = raw.get("kappa", "const:1")
    spec = ProblemSpec(matrix("H"), matrix("K"), x0, float(raw["T"]), parse_kappa(kappa_text))
    beta = int(raw["beta"]) if "beta" in raw else None
    M = int(raw["M"]) if "M" in raw else None
    return RunConfig(spec, beta, M, kappa_text)


def load_config(path) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())
