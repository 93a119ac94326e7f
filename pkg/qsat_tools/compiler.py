"""
qsat-tools
Copyright (c) 2026 qsat-tools contributors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
"""

"""Circuit to instance compilation and history states

Qudit layout of a compiled instance, for a circuit with q data qubits, p
witness or pair qubits and L gates:

  0 .. q+p-1          logical qudits, one per circuit qubit
  q+p .. q+2p-1       witness (WitnessedSLCT) or aux (ClassicalSLCT) qudits,
                      the j-th paired with logical q+j
  q+2p .. q+2p+L      clock qudits c_0 .. c_L
  q+2p+L+1, +2        LCT endpoints e_0 and e_1
"""

import json
import itertools
from collections import namedtuple

import numpy as np

from .clauses import basis_index
from .deciders import basis_state, simulate
from .model import Variant, Gate, Clause, Instance, LOCAL_DIMENSION
from .oracle import SparseState

import logging
logger = logging.getLogger("qsattools.compiler")
logger.addHandler(logging.NullHandler())
del logging


class CircuitError(ValueError):
    """The circuit document is malformed or cannot be compiled"""


class GateSetMismatch(CircuitError):
    """A gate of the circuit is outside the gate set of its kind or target"""


class CircuitKind(object):
    QUANTUM = 'Quantum'
    CLASSICAL = 'Classical'

    GATES = {QUANTUM: Gate.QUANTUM, CLASSICAL: Gate.CLASSICAL}


class HistoryKind(object):
    FULL = 'Full'
    PRIVILEGED = 'Privileged'
    TRUNCATED = 'Truncated'


class Circuit(namedtuple('Circuit', ['kind', 'q', 'p', 'ans', 'gates'])):
    """! A circuit over q data qubits and p witness or pair qubits

    @details `gates` is a tuple of (gate, targets) pairs, targets indexing the
    q+p qubits. `ans` is the qubit read out at the end.
    """
    __slots__ = ()

    def __new__(cls, kind, q, p, ans, gates):
        gates = tuple((g, tuple(t)) for g, t in gates)
        return super(Circuit, cls).__new__(cls, kind, q, p, ans, gates)

    @property
    def width(self):
        return self.q + self.p

    @property
    def length(self):
        return len(self.gates)

    def to_dict(self):
        return {
            'kind': self.kind,
            'q': self.q,
            'p': self.p,
            'ans': self.ans,
            'gates': [{'gate': g, 'targets': list(t)} for g, t in self.gates],
        }


def validate_circuit(circuit):
    """! Check gate names, operand counts and targets
    @return The same circuit
    """
    if circuit.kind not in CircuitKind.GATES:
        raise CircuitError("Unknown circuit kind %r" % (circuit.kind,))
    if circuit.q < 0 or circuit.p < 0 or circuit.width == 0:
        raise CircuitError("A circuit needs at least one qubit")
    if not 0 <= circuit.ans < circuit.width:
        raise CircuitError("ans %d outside 0..%d" % (circuit.ans, circuit.width - 1))
    for n, (gate, targets) in enumerate(circuit.gates):
        if gate not in Gate.ARITY:
            raise CircuitError("gate %d: unknown gate %r" % (n, gate))
        if gate not in CircuitKind.GATES[circuit.kind]:
            raise GateSetMismatch("gate %d: %s is not a %s gate" % (n, gate, circuit.kind))
        if len(targets) != Gate.ARITY[gate]:
            raise CircuitError("gate %d: %s takes %d targets" % (n, gate, Gate.ARITY[gate]))
        if len(set(targets)) != len(targets):
            raise CircuitError("gate %d: repeated target" % n)
        for t in targets:
            if not 0 <= t < circuit.width:
                raise CircuitError("gate %d: target %d outside 0..%d"
                                   % (n, t, circuit.width - 1))
    return circuit


def circuit_from_dict(doc):
    if not isinstance(doc, dict):
        raise CircuitError("Circuit must be a JSON object")
    try:
        gates = [(g['gate'], [int(t) for t in g['targets']]) for g in doc.get('gates', [])]
        circuit = Circuit(doc['kind'], int(doc['q']), int(doc.get('p', 0)),
                          int(doc['ans']), gates)
    except (KeyError, TypeError) as e:
        raise CircuitError("Malformed circuit: %s" % str(e))
    return validate_circuit(circuit)


def parse_circuit(text):
    """! Parse and validate a circuit JSON document"""
    try:
        doc = json.loads(text)
    except ValueError as e:
        raise CircuitError("Invalid JSON: %s" % str(e))
    return circuit_from_dict(doc)


def serialize_circuit(circuit):
    return json.dumps(circuit.to_dict(), indent=4, sort_keys=True)


class Layout(namedtuple('Layout', ['q', 'p', 'length', 'variant'])):
    """Qudit ids of a compiled instance"""
    __slots__ = ()

    def logical(self, i):
        return i

    def partner(self, j):
        """Witness or aux qudit paired with logical q+j"""
        return self.q + self.p + j

    def clock(self, t):
        return self.q + 2 * self.p + t

    @property
    def endpoints(self):
        last = self.clock(self.length)
        return last + 1, last + 2

    @property
    def num_qudits(self):
        extra = 2 if self.variant == Variant.LCT else 0
        return self.q + 2 * self.p + self.length + 1 + extra


def _check_target(circuit, target):
    if target not in Variant.QUDIT:
        raise CircuitError("Circuits compile to qudit variants, not %r" % (target,))
    expected = CircuitKind.CLASSICAL if target == Variant.CLASSICAL_SLCT else CircuitKind.QUANTUM
    if circuit.kind != expected:
        raise GateSetMismatch("%s circuits do not compile to %s" % (circuit.kind, target))
    if circuit.p and target not in (Variant.WITNESSED_SLCT, Variant.CLASSICAL_SLCT):
        raise CircuitError("%s has no witness or pair qudits for p=%d" % (target, circuit.p))


def compile_circuit(circuit, target):
    """! Compile a circuit into an instance of the target variant

    @return Instance whose clauses are the Init clauses, the InitCopy or
    InitPair clauses, one Prop per gate and the Out clause, in that order
    """
    validate_circuit(circuit)
    _check_target(circuit, target)
    layout = Layout(circuit.q, circuit.p, circuit.length, target)
    c0 = layout.clock(0)
    e0, e1 = layout.endpoints if target == Variant.LCT else (None, None)

    clauses = [Clause.init(layout.logical(i), c0, endpoint=e0) for i in range(circuit.q)]
    for j in range(circuit.p):
        logical = layout.logical(circuit.q + j)
        if target == Variant.WITNESSED_SLCT:
            clauses.append(Clause.init_copy(logical, layout.partner(j), c0))
        else:
            clauses.append(Clause.init_pair(logical, layout.partner(j), c0))
    for t, (gate, targets) in enumerate(circuit.gates, 1):
        clauses.append(Clause.prop(gate, [layout.logical(x) for x in targets],
                                   layout.clock(t - 1), layout.clock(t)))
    clauses.append(Clause.out(layout.logical(circuit.ans), layout.clock(circuit.length),
                              endpoint=e1))
    logger.debug("compiled %d gates into %d %s clauses", circuit.length, len(clauses), target)
    return Instance(target, layout.num_qudits, clauses)


def _initial_configurations(circuit, target, witness):
    """(partner bits, amplitude) of the witness or pair register"""
    if circuit.p == 0:
        return [((), 1.0)]
    if target == Variant.WITNESSED_SLCT:
        if witness is None or len(witness) != circuit.p:
            raise CircuitError("History states of QCMA circuits need a %d-bit witness" % circuit.p)
        return [(tuple(int(b) for b in witness), 1.0)]
    amplitude = 2.0 ** (-0.5 * circuit.p)
    return [(bits, amplitude) for bits in itertools.product((0, 1), repeat=circuit.p)]


def history_state(circuit, target, kind=HistoryKind.FULL, truncate_at=None, witness=None):
    """! History state of a circuit over the qudits of its compiled instance

    @param kind Full and Privileged superpose all L+1 clock states, Truncated
    stops at `truncate_at` and leaves the later clocks ready
    @param witness Witness bits, WitnessedSLCT only
    @return Normalized SparseState
    """
    validate_circuit(circuit)
    _check_target(circuit, target)
    if kind not in (HistoryKind.FULL, HistoryKind.PRIVILEGED, HistoryKind.TRUNCATED):
        raise CircuitError("Unknown history state kind %r" % (kind,))
    last = circuit.length
    if kind == HistoryKind.TRUNCATED:
        if truncate_at is None or not 0 <= truncate_at < circuit.length:
            raise CircuitError("Truncated history states need 0 <= T < L")
        last = truncate_at
    if witness is not None and target != Variant.WITNESSED_SLCT:
        raise CircuitError("Only WitnessedSLCT history states take a witness")

    layout = Layout(circuit.q, circuit.p, circuit.length, target)
    d = LOCAL_DIMENSION[target]
    dims = [d] * layout.num_qudits
    lct = target == Variant.LCT
    links = circuit.length + 2 if lct else 0
    bell = [(bits, 2.0 ** (-0.5 * links)) for bits in itertools.product((0, 1), repeat=links)]
    norm = 1.0 / np.sqrt(last + 1)

    mapping = {}
    for partner_bits, partner_amp in _initial_configurations(circuit, target, witness):
        state = basis_state([0] * circuit.q + list(partner_bits))
        for t in range(last + 1):
            if t > 0:
                state = simulate([circuit.gates[t - 1]], state)
            for index in np.flatnonzero(np.abs(state) > 1e-15):
                data = [int(b) for b in format(index, '0%db' % circuit.width)]
                for links_bits, bell_amp in bell:
                    digits = [0] * layout.num_qudits
                    for i, bit in enumerate(data):
                        digits[layout.logical(i)] = basis_index(target, str(bit))
                    for j, bit in enumerate(partner_bits):
                        digits[layout.partner(j)] = basis_index(target, 'w%d' % bit)
                    for s in range(circuit.length + 1):
                        label = 'd' if s < t else ('a' if s == t else 'r')
                        if lct:
                            label += '%d%d' % (links_bits[s], links_bits[s + 1])
                        digits[layout.clock(s)] = basis_index(target, label)
                    if lct:
                        e0, e1 = layout.endpoints
                        digits[e0] = basis_index(target, 'e%d' % links_bits[0])
                        digits[e1] = basis_index(target, 'e%d' % links_bits[-1])
                    key = tuple(digits)
                    mapping[key] = mapping.get(key, 0) + norm * partner_amp * bell_amp * state[index]
    return SparseState.from_mapping(dims, mapping)


def x_equivalent(qubit):
    """! Gates over {H, HT} whose product is exactly X on a qubit

    @details H followed by HT applies H T H, so four rounds apply
    H T^4 H = H Z H = X.
    """
    return [(Gate.H, (qubit,)), (Gate.HT, (qubit,))] * 4


def accepts_with_certainty(circuit, tolerance=1e-9):
    """! True when ans reads 1 with probability 1 for every pair-bit assignment"""
    for bits in itertools.product((0, 1), repeat=circuit.p):
        final = simulate(circuit.gates, basis_state([0] * circuit.q + list(bits)))
        tensor = final.reshape((2,) * circuit.width)
        zero = np.take(tensor, 0, axis=circuit.ans)
        if np.vdot(zero, zero).real > tolerance:
            return False
    return True


def random_yes_circuit(rng, q, length):
    """! Random quantum circuit whose ans qubit ends in |1> with certainty

    @param rng numpy Generator
    @param q Data qubits; ans is the last one
    @param length Gate count, at least the 8 gates of the X-equivalent sequence
    """
    flip = x_equivalent(q - 1)
    if length < len(flip):
        raise CircuitError("Yes circuits need at least %d gates" % len(flip))
    others = list(range(q - 1))
    if length > len(flip) and not others:
        raise CircuitError("A single-qubit yes circuit has exactly %d gates" % len(flip))
    fillers = []
    for _ in range(length - len(flip)):
        choices = [Gate.H, Gate.HT] + ([Gate.HHCNOT] if len(others) >= 2 else [])
        gate = choices[int(rng.integers(len(choices)))]
        targets = rng.choice(others, size=Gate.ARITY[gate], replace=False)
        fillers.append((gate, tuple(int(t) for t in targets)))
    slots = sorted(int(x) for x in rng.choice(length, size=len(fillers), replace=False))
    gates, fill, flips = [], iter(fillers), iter(flip)
    for position in range(length):
        gates.append(next(fill) if position in slots else next(flips))
    return Circuit(CircuitKind.QUANTUM, q, 0, q - 1, gates)
