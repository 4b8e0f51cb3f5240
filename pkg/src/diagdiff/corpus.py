"""
Named example diagrams and random generators for the test corpus.

``python -m diagdiff.corpus DIR`` writes every named diagram to ``DIR`` as
JSON.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import numpy as np

from diagdiff.autodiff import dense, nn_layer
from diagdiff.cqmap import double_diagram
from diagdiff.diagrams import Diagram, Green, Id, Measure, Swap, Ty, ZSpider, diagram_to_json
from diagdiff.rigs import PhaseExpr, Polynomial
from diagdiff.zx import (
    H, SWAP, Z, bell_state, cnot, ket0, pauli_zx_gadget, rx, rz, theta, x)


def measure_all(n: int) -> Diagram:
    out = Id(Ty())
    for _ in range(n):
        out = out @ Diagram.from_box(Measure())
    return out


def kets(n: int) -> Diagram:
    out = Id(Ty())
    for _ in range(n):
        out = out @ ket0()
    return out


def measured(circuit: Diagram) -> Diagram:
    """Prepare |0..0>, run the unitary ``circuit``, double it and measure every qubit."""
    n = len(circuit.dom)
    return double_diagram(kets(n) >> circuit) >> measure_all(n)


def rz_rx_cnot() -> Diagram:
    return (rz(theta(0)) @ rx(theta(1))) >> cnot() >> (rx(theta(2)) @ rz(theta(3)))


def sigmoid_network(circuit: Diagram | None = None, hidden: int = 3,
                    outputs: int = 2) -> tuple[Diagram, int]:
    """
    Two sigmoid layers on the measurement outcomes of ``circuit`` (by default
    the measured rz-rx-cnot circuit).  Weights and biases take the parameter
    indices after the circuit's own; returns the network and the parameter count.
    """
    circuit = measured(rz_rx_cnot()) if circuit is None else circuit
    first = max(circuit.params(), default=-1) + 1
    hid, out = Ty(f"r{hidden}"), Ty(f"r{outputs}")
    w1, first = dense("W1", circuit.cod, hid, first)
    b1, first = dense("b1", Ty(), hid, first)
    w2, first = dense("W2", hid, out, first)
    b2, first = dense("b2", Ty(), out, first)
    return nn_layer(nn_layer(circuit, w1, b1, "sigmoid"), w2, b2, "sigmoid"), first


def named() -> dict[str, Diagram]:
    t = theta(0)
    return {
        "identity": Id(x @ x),
        "empty": Id(Ty()),
        "hbox": H(),
        "swap": SWAP(),
        "spider": Z(1, 1, t),
        "bell": bell_state(),
        "rzrx": rz(t) @ rx(t),
        "pauli-gadget": pauli_zx_gadget(t),
        "doubled-rz": double_diagram(rz(t)),
        "rz-rx-cnot": rz_rx_cnot(),
        "rz-rx-cnot-measure": measured(rz_rx_cnot()),
    }


def write_corpus(directory) -> list[Path]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for name, d in named().items():
        path = directory / f"{name}.json"
        path.write_text(json.dumps(diagram_to_json(d), indent=2, sort_keys=True) + "\n")
        paths.append(path)
    return paths


# Random generators ---------------------------------------------------------------

_COEFFS = (-2.0, -1.0, -0.5, 0.5, 1.0, 2.0)


def random_phase(rng: np.random.Generator, n_params: int, max_terms: int = 2) -> PhaseExpr:
    """An affine phase with a random constant and up to ``max_terms`` parameters."""
    constant = float(rng.uniform(-np.pi, np.pi))
    if n_params == 0:
        return PhaseExpr(constant)
    k = int(rng.integers(0, min(max_terms, n_params) + 1))
    indices = rng.choice(n_params, size=k, replace=False)
    return PhaseExpr(constant, {int(i): float(rng.choice(_COEFFS)) for i in indices})


def random_spider(rng: np.random.Generator, max_legs: int = 3, n_params: int = 2) -> ZSpider:
    m, n = (int(v) for v in rng.integers(0, max_legs + 1, size=2))
    return ZSpider(m, n, random_phase(rng, n_params))


def random_zx(rng: np.random.Generator, width: int = 1, n_layers: int = 4, n_params: int = 2,
              max_width: int = 3, green: bool = True) -> Diagram:
    """
    A random ZX diagram on ``width`` input wires, never wider than
    ``max_width``.  Layers are spiders (which may copy or merge wires),
    Hadamards, swaps and algebraic green boxes.
    """
    d = Id(Ty(*["x"] * width))
    for _ in range(n_layers):
        w = len(d.cod)
        options = ["spider"] + (["h"] if w else []) + (["swap"] if w >= 2 else [])
        if green and w:
            options.append("green")
        kind = options[int(rng.integers(len(options)))]
        if kind == "spider":
            m = int(rng.integers(0, min(w, 2) + 1))
            n = int(rng.integers(0, min(max_width - w + m, 2) + 1))
            box = ZSpider(m, n, random_phase(rng, n_params))
        elif kind == "h":
            box = H().boxes[0]
        elif kind == "swap":
            box = Swap()
        else:
            box = Green(1, 1, random_label(rng, n_params))
        offset = int(rng.integers(0, w - len(box.dom) + 1))
        d = d >> (Id(d.cod[:offset]) @ Diagram.from_box(box) @ Id(d.cod[offset + len(box.dom):]))
    return d


def random_label(rng: np.random.Generator, n_params: int) -> Polynomial:
    """A polynomial label ``c0 + c1·θ_i`` or ``c·θ_i·θ_j``."""
    if n_params == 0:
        return Polynomial.const(complex(rng.normal(), rng.normal()))
    i, j = (int(v) for v in rng.integers(0, n_params, size=2))
    if rng.random() < 0.5:
        return Polynomial.const(float(rng.normal())) + Polynomial.var(i) * float(rng.normal())
    return Polynomial.var(i) * Polynomial.var(j) * float(rng.normal())


def random_unitary(rng: np.random.Generator, n_qubits: int, n_gates: int,
                   n_params: int) -> Diagram:
    """A random circuit of rotations, Hadamards and CNOTs; always unitary."""
    d = Id(Ty(*["x"] * n_qubits))
    for _ in range(n_gates):
        kinds = ["rz", "rx", "h"] + (["cnot"] if n_qubits >= 2 else [])
        kind = kinds[int(rng.integers(len(kinds)))]
        if kind == "cnot":
            gate = cnot()
        elif kind == "h":
            gate = H()
        else:
            phase = random_phase(rng, n_params, 1)
            gate = rz(phase) if kind == "rz" else rx(phase)
        offset = int(rng.integers(0, n_qubits - len(gate.dom) + 1))
        d = d >> (Id(d.cod[:offset]) @ gate @ Id(d.cod[offset + len(gate.dom):]))
    return d


def measured_corpus(seed: int = 7, size: int = 12) -> dict[str, Diagram]:
    """Doubled circuits ending in measurements: the named one plus random ones."""
    rng = np.random.default_rng(seed)
    out = {"rz-rx-cnot-measure": measured(rz_rx_cnot())}
    while len(out) < size:
        n = 1 + len(out) % 3
        circuit = random_unitary(rng, n, 4 + n, 4)
        if circuit.params():
            out[f"random-{len(out)}"] = measured(circuit)
    return out


if __name__ == "__main__":
    for p in write_corpus(sys.argv[1] if len(sys.argv) > 1 else "corpus"):
        print(p)
