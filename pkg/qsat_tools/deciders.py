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

"""Subroutines deciding the chains the analyzer could not settle

Quantum chains are simulated on a statevector over their logical qubits,
ClassicalSLCT chains on bit strings. Every check is sampled with its exact
outcome probability and the run restarts from the initial state after each
passed check, with the checked clause removed.
"""

import itertools
from collections import namedtuple

import numpy as np

from .analyzer import Decision as Verdict, analyze, witness_bits
from .clauses import gate_matrix
from .model import Variant, ClauseType, Gate
from .settings import DEFAULT_SETTINGS

import logging
logger = logging.getLogger("qsattools.deciders")
logger.addHandler(logging.NullHandler())
del logging


class TargetOutOfRange(ValueError):
    """A gate targets a qubit outside the register"""


class Decision(namedtuple('Decision', ['accept', 'trace', 'repetitions', 'verdict', 'witness'])):
    """! Outcome of the decision procedure

    @details `trace` lists every performed check as a dict with its task,
    repetition, kind, clauses, probability and outcome. A rejection always
    comes with at least one failed check.
    """
    __slots__ = ()

    def to_dict(self):
        result = {
            'accept': self.accept,
            'trace': list(self.trace),
            'repetitions': self.repetitions,
            'verdict': self.verdict,
        }
        if self.witness is not None:
            result['witness'] = ''.join(str(b) for b in self.witness)
        return result


def basis_state(bits):
    """! Computational basis statevector, bit 0 being the most significant"""
    state = np.zeros(2 ** len(bits), dtype=complex)
    state[int(''.join(str(int(b)) for b in bits) or '0', 2)] = 1.0
    return state


def _num_qubits(state):
    n = int(state.size).bit_length() - 1
    if 2 ** n != state.size:
        raise TargetOutOfRange("State size %d is not a power of two" % state.size)
    return n


def apply_gate(state, gate, targets):
    """! Apply one gate to a statevector
    @param targets Register positions, in gate operand order
    """
    n = _num_qubits(state)
    targets = list(targets)
    if len(targets) != Gate.ARITY[gate]:
        raise TargetOutOfRange("Gate %s takes %d targets, got %r"
                               % (gate, Gate.ARITY[gate], targets))
    for t in targets:
        if t < 0 or t >= n:
            raise TargetOutOfRange("Target %d outside 0..%d" % (t, n - 1))
    if len(set(targets)) != len(targets):
        raise TargetOutOfRange("Repeated target in %r" % (targets,))
    k = len(targets)
    tensor = np.moveaxis(state.reshape((2,) * n), targets, list(range(k)))
    out = gate_matrix(gate).dot(tensor.reshape(2 ** k, -1)).reshape(tensor.shape)
    return np.moveaxis(out, list(range(k)), targets).reshape(-1)


def simulate(gates, init):
    """! Evolve a statevector through a gate list

    @param gates Sequence of (gate, targets)
    @param init Initial statevector
    @return Final statevector; the input is left untouched
    """
    state = np.array(init, dtype=complex).reshape(-1)
    for gate, targets in gates:
        state = apply_gate(state, gate, targets)
    return state


def _floor(probability, floor):
    probability = min(max(float(probability), 0.0), 1.0)
    return 0.0 if probability < floor else probability


def simprop_outcome_prob(phi, u0, uj):
    """! Probability that checking two simultaneous propagations fails

    @param phi Data register state before the step
    @param u0 (gate, targets) of the propagation actually applied
    @param uj (gate, targets) of the propagation being checked
    @return 1/2 - 1/2 Re <phi| uj^dagger u0 |phi>
    """
    first = apply_gate(phi, u0[0], u0[1])
    other = apply_gate(phi, uj[0], uj[1])
    return min(max(0.5 - 0.5 * float(np.vdot(other, first).real), 0.0), 1.0)


_HADAMARD = gate_matrix(Gate.H)


def circuit_c_probability(phi, u0, uj):
    """! Ancilla reading 1 in the controlled-swap test of two propagations

    @details The ancilla is put in |+>, controls u0 on |0> and uj on |1>, and
    is measured in the Hadamard basis.
    """
    phi = np.asarray(phi, dtype=complex).reshape(-1)
    register = np.tensordot(_HADAMARD, np.array([phi, np.zeros_like(phi)]), axes=(1, 0))
    register = np.array([apply_gate(register[0], u0[0], u0[1]),
                         apply_gate(register[1], uj[0], uj[1])])
    register = np.tensordot(_HADAMARD, register, axes=(1, 0))
    return float(np.vdot(register[1], register[1]).real)


def classical_step(bits, gate, targets):
    """! Apply a reversible classical gate to a bit list, returning a new list"""
    targets = list(targets)
    for t in targets:
        if t < 0 or t >= len(bits):
            raise TargetOutOfRange("Target %d outside 0..%d" % (t, len(bits) - 1))
    index = int(''.join(str(bits[t]) for t in targets), 2)
    image = int(np.argmax(np.abs(gate_matrix(gate)[:, index])))
    result = list(bits)
    for pos, t in enumerate(targets):
        result[t] = (image >> (len(targets) - 1 - pos)) & 1
    return result


class _Register(object):
    """Maps the logicals of a chain onto register positions"""

    def __init__(self, tacc, bits=None):
        self.tacc = tacc
        self.logicals = tacc.logicals
        self.position = dict((q, i) for i, q in enumerate(self.logicals))
        self.initial = dict()
        self.pairs = []
        for i in tacc.inits:
            clause = tacc.clauses[i]
            if clause.kind == ClauseType.INIT:
                self.initial.setdefault(clause.logical, 0)
            elif clause.kind == ClauseType.INIT_COPY:
                self.initial[clause.logical] = bits[clause.witness]
            else:
                self.initial.setdefault(clause.logical, None)
                if clause.logical not in self.pairs:
                    self.pairs.append(clause.logical)

    def gate(self, index):
        clause = self.tacc.clauses[index]
        return clause.gate, [self.position[q] for q in clause.logicals]

    def initialized(self, logical):
        return logical in self.initial

    def start(self, sample=None):
        """Initial bits; pair logicals take the sampled values in order"""
        values = dict(zip(self.pairs, sample or ()))
        return [values.get(q, self.initial.get(q) or 0) for q in self.logicals]


def _check(task, rep, kind, clauses, probability, failed):
    return {
        'task': task,
        'rep': rep,
        'check': kind,
        'clauses': list(clauses),
        'probability': probability,
        'outcome': 'fail' if failed else 'pass',
    }


def run_quantum_task(tacc, witness, rng, task=0, rep=0, floor=None):
    """! One run of the quantum subroutine on a chain

    @param witness {witness qudit: bit} for WitnessedSLCT, else None or {}
    @param rng numpy Generator
    @return (accept, trace)
    """
    floor = DEFAULT_SETTINGS['probability_floor'] if floor is None else floor
    register = _Register(tacc, witness or {})
    steps = [list(s) for s in tacc.steps]
    outs = list(tacc.outs)
    initial = basis_state(register.start())
    trace = []
    while True:
        phi = initial
        checked = False
        for step in steps:
            if len(step) > 1:
                u0, uj = register.gate(step[0]), register.gate(step[1])
                p = _floor(simprop_outcome_prob(phi, u0, uj), floor)
                failed = bool(rng.random() < p)
                trace.append(_check(task, rep, 'simprop', (step[0], step[1]), p, failed))
                if failed:
                    return False, trace
                del step[1]
                checked = True
                break
            phi = apply_gate(phi, *register.gate(step[0]))
        if checked:
            continue
        if not outs:
            return True, trace
        index = outs.pop(0)
        logical = tacc.clauses[index].logical
        if not register.initialized(logical):
            trace.append(_check(task, rep, 'out', (index,), 0.0, False))
            continue
        pos = register.position[logical]
        tensor = phi.reshape((2,) * len(register.logicals))
        zero = np.take(tensor, 0, axis=pos)
        p = _floor(np.vdot(zero, zero).real, floor)
        failed = bool(rng.random() < p)
        trace.append(_check(task, rep, 'out', (index,), p, failed))
        if failed:
            return False, trace


def run_classical_task(tacc, rng, task=0, rep=0):
    """! One run of the randomized subroutine on a ClassicalSLCT chain

    @return (accept, trace)
    """
    register = _Register(tacc)
    steps = [list(s) for s in tacc.steps]
    trace = []

    def sample():
        return [int(b) for b in rng.integers(0, 2, size=len(register.pairs))]

    while True:
        bits = register.start(sample())
        checked = False
        for step in steps:
            if len(step) > 1:
                first = classical_step(bits, *register.gate(step[0]))
                other = classical_step(bits, *register.gate(step[1]))
                heads = bool(rng.integers(0, 2))
                failed = first != other and heads
                trace.append(_check(task, rep, 'compare', (step[0], step[1]),
                                    0.5 if first != other else 0.0, failed))
                if failed:
                    return False, trace
                del step[1]
                checked = True
                break
            bits = classical_step(bits, *register.gate(step[0]))
        if checked:
            continue
        for index in tacc.outs:
            logical = tacc.clauses[index].logical
            if not register.initialized(logical):
                continue
            if bits[register.position[logical]] == 0:
                trace.append(_check(task, rep, 'out', (index,), 1.0, True))
                return False, trace
        if tacc.outs:
            trace.append(_check(task, rep, 'out', tacc.outs, 0.0, False))
        return True, trace


def decide(inst, witness=None, reps=None, seed=None, floor=None):
    """! Decide an instance with the hybrid procedure

    @param witness Classical witness for WitnessedSLCT; searched when omitted
    @param reps Runs per chain, all of which must accept
    @param seed Master seed; chain k uses the k-th spawned sub-stream
    @return Decision
    """
    reps = DEFAULT_SETTINGS['reps'] if reps is None else reps
    seed = DEFAULT_SETTINGS['seed'] if seed is None else seed
    if reps < 1:
        raise ValueError("reps must be at least 1, got %d" % reps)
    if inst.variant == Variant.QUBIT:
        from .qubitize import dequbitize
        inst = dequbitize(inst)
    if inst.variant == Variant.WITNESSED_SLCT and witness is None:
        return search_witness(inst, reps=reps, seed=seed, floor=floor)

    verdict = analyze(inst, witness)
    bits, chosen = {}, None
    if verdict.decision != Verdict.UNSAT:
        bits = witness_bits(inst, witness)
    if inst.variant == Variant.WITNESSED_SLCT:
        chosen = tuple(bits[q] for q in sorted(bits)) if bits else tuple(
            witness.values() if isinstance(witness, dict) else witness)
    if verdict.decision == Verdict.UNSAT:
        trace = [{'check': 'structure', 'rule': verdict.rule,
                  'evidence': list(verdict.evidence), 'outcome': 'fail'}]
        return Decision(False, trace, 0, verdict.to_dict(), chosen)
    if verdict.decision == Verdict.TRIVIALLY_SAT:
        return Decision(True, [], 0, verdict.to_dict(), chosen)

    streams = np.random.SeedSequence(seed).spawn(len(verdict.tasks))
    trace = []
    accept = True
    for n, (tacc, stream) in enumerate(zip(verdict.tasks, streams)):
        rng = np.random.default_rng(stream)
        for rep in range(reps):
            if tacc.variant == Variant.CLASSICAL_SLCT:
                ok, checks = run_classical_task(tacc, rng, task=n, rep=rep)
            else:
                ok, checks = run_quantum_task(tacc, bits, rng, task=n, rep=rep, floor=floor)
            trace.extend(checks)
            if not ok:
                logger.debug("chain %d rejected in run %d", n, rep)
                accept = False
                break
        if not accept:
            break
    return Decision(accept, trace, reps, verdict.to_dict(), chosen)


def search_witness(inst, reps=None, seed=None, limit=2 ** 10, floor=None):
    """! First accepted classical witness in lexicographic order

    @return Decision of the first accepted witness, or of the last one tried
    """
    count = len(set(c.witness for c in inst.clauses if c.kind == ClauseType.INIT_COPY))
    last = None
    for n, candidate in enumerate(itertools.product((0, 1), repeat=count)):
        if n >= limit:
            logger.debug("witness search stopped after %d candidates", limit)
            break
        last = decide(inst, list(candidate), reps=reps, seed=seed, floor=floor)
        if last.accept:
            return last
    return last
