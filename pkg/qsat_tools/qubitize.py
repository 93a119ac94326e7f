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

"""Qudit to qubit reduction and back

A d-qudit becomes m four-level qudits, each a (data, entanglement) qubit pair,
and every four-level qudit becomes four qubits through the psi basis of
H_4to2. The m data qubits carry the qudit in their first d basis states (T1
removes the rest) and the m entanglement qubits are pinned to one GHZ-like
state by T2. Qudit i maps to the qubit block [x*i, ..., x*i + x-1] with
x = 4m; m = ceil(log2 d) with padding 'p' and the next power of two with 'p2'.
"""

import itertools
from collections import namedtuple
from fractions import Fraction

import numpy as np

from .clauses import (build_projector, embed_operator, DimensionBudgetExceeded,
                      DimensionMismatch)
from .model import (Variant, ClauseType, Clause, Instance, LOCAL_DIMENSION,
                    canonical_unsat)

import logging
logger = logging.getLogger("qsattools.qubitize")
logger.addHandler(logging.NullHandler())
del logging


PADDINGS = ('p', 'p2')

QUBIT_TERM_LIMIT = 2 ** 10


def expansion_factor(d, padding='p'):
    """! Qubits per qudit
    @param padding 'p' for 4 ceil(log2 d), 'p2' for the power-of-two variant
    """
    if padding not in PADDINGS:
        raise ValueError("Unknown padding %r" % (padding,))
    n = max(1, (d - 1).bit_length())
    if padding == 'p2':
        n = 1 << (n - 1).bit_length()
    return 4 * n


# rows: psi_1 .. psi_4; entries: (basis state, amplitude before the common 1/2)
_PSI_TABLE = (
    (('0000', Fraction(3, 5)), ('0001', Fraction(-4, 5)), ('0100', 1), ('1010', 1),
     ('1100', Fraction(8, 17)), ('1111', Fraction(15, 17))),
    (('0000', Fraction(4, 5)), ('0001', Fraction(3, 5)), ('0110', -1), ('1001', 1),
     ('1101', Fraction(20, 29)), ('1110', Fraction(21, 29))),
    (('0010', Fraction(5, 13)), ('0011', Fraction(12, 13)), ('0111', -1), ('1000', 1),
     ('1101', Fraction(-21, 29)), ('1110', Fraction(20, 29))),
    (('0010', Fraction(-12, 13)), ('0011', Fraction(5, 13)), ('0101', -1), ('1011', 1),
     ('1100', Fraction(-15, 17)), ('1111', Fraction(8, 17))),
)


def psi_basis():
    """! 16 x 4 matrix whose columns are psi_1 .. psi_4"""
    result = np.zeros((16, 4), dtype=complex)
    for column, row in enumerate(_PSI_TABLE):
        for label, amplitude in row:
            result[int(label, 2), column] = float(Fraction(amplitude) / 2)
    return result


def h4to2():
    """! 1 - sum |psi_i><psi_i| on four qubits"""
    psi = psi_basis()
    return np.eye(16, dtype=complex) - psi.dot(psi.conj().T)


def _rx(angle):
    c, s = np.cos(angle / 2), np.sin(angle / 2)
    return np.array([[c, -1j * s], [-1j * s, c]])


def t2_nullstate(n):
    """! [1 (x) R_X(theta) (x) ... (x) R_X((n-1) theta)] (|0..0> + |1..1>)/sqrt 2, theta = pi/2n"""
    if n < 1:
        raise ValueError("T2 needs at least one qubit")
    state = np.zeros(2 ** n, dtype=complex)
    state[0] = state[-1] = 1.0 / np.sqrt(2.0)
    theta = np.pi / (2 * n)
    rotation = np.ones((1, 1), dtype=complex)
    for k in range(n):
        rotation = np.kron(rotation, _rx(k * theta))
    return rotation.dot(state)


def t2(n):
    """! Projector whose kernel is the T2 null state"""
    g = t2_nullstate(n)
    return np.eye(2 ** n, dtype=complex) - np.outer(g, g.conj())


def t1(d, n):
    """! Diagonal projector on n data qubits removing basis states >= d"""
    if d > 2 ** n:
        raise DimensionMismatch("%d levels do not fit in %d qubits" % (d, n))
    diagonal = np.zeros(2 ** n, dtype=complex)
    diagonal[d:] = 1.0
    return np.diag(diagonal)


def _group_order(operator, groups):
    """Reorder (data..., ent...) factors into (data_0, ent_0, data_1, ent_1, ...)"""
    order = []
    for g in range(groups):
        order.extend([g, groups + g])
    n = 2 * groups
    tensor = operator.reshape((2,) * (2 * n))
    tensor = tensor.transpose(order + [n + i for i in order])
    return tensor.reshape(4 ** groups, 4 ** groups)


def _encode(inner, groups):
    """V inner V^dagger over the psi basis of every group of four qubits"""
    psi = psi_basis()
    isometry = np.ones((1, 1), dtype=complex)
    for _ in range(groups):
        isometry = np.kron(isometry, psi)
    return isometry.dot(inner).dot(isometry.conj().T)


def _check_qubits(count):
    if 2 ** count > QUBIT_TERM_LIMIT:
        raise DimensionBudgetExceeded("A term on %d qubits exceeds the dense limit %d"
                                      % (count, QUBIT_TERM_LIMIT))


def encode_operator(h, d, k, padding='p', gadgets=True):
    """! Qubit operator H' of a k-local qudit operator

    @param h d^k square operator, or None for the gadget part only
    @param gadgets Add T1 and T2 on every block and H_4to2 on every group
    @return Dense operator on k blocks of expansion_factor(d, padding) qubits
    """
    m = expansion_factor(d, padding) // 4
    groups = k * m
    _check_qubits(4 * groups)
    dims = [2] * (2 * groups)
    inner = np.zeros((4 ** groups, 4 ** groups), dtype=complex)
    if h is not None:
        h = np.asarray(h)
        if h.shape != (d ** k, d ** k):
            raise DimensionMismatch("Operator of shape %r is not %d-local on %d levels"
                                    % (h.shape, k, d))
        pad = np.ones((1, 1))
        for _ in range(k):
            pad = np.kron(pad, np.eye(2 ** m, d))
        inner += embed_operator(pad.dot(h).dot(pad.T), list(range(groups)), dims)
    if gadgets:
        for b in range(k):
            data = list(range(b * m, (b + 1) * m))
            ent = [groups + q for q in data]
            inner += embed_operator(t1(d, m), data, dims)
            inner += embed_operator(t2(m), ent, dims)
    result = _encode(_group_order(inner, groups), groups)
    if gadgets:
        qubits = [2] * (4 * groups)
        gadget = h4to2()
        for g in range(groups):
            result += embed_operator(gadget, list(range(4 * g, 4 * g + 4)), qubits)
    return result


def _block(qudit, width):
    return tuple(range(width * qudit, width * (qudit + 1)))


def qubitize_instance(inst, padding='p'):
    """! Map a qudit instance to qubits

    @details Data clauses keep their type and act on the blocks of their
    qudits; the T1, T2 and H_4to2 gadget clauses follow, one of each per used
    block.
    """
    if inst.variant not in Variant.QUDIT:
        raise ValueError("Only qudit instances can be qubitized, got %s" % inst.variant)
    width = expansion_factor(LOCAL_DIMENSION[inst.variant], padding)
    clauses = []
    used = []
    for clause in inst.clauses:
        blocks = [_block(q, width) for q in clause.qudits]
        clauses.append(clause.with_qudits([b[0] for b in blocks], blocks=blocks))
        for q in clause.qudits:
            if q not in used:
                used.append(q)
    used.sort()
    for kind in (ClauseType.T1, ClauseType.T2, ClauseType.H4TO2):
        clauses.extend(Clause.gadget(kind, _block(q, width)) for q in used)
    logger.debug("qubitized %d clauses into blocks of %d qubits", len(inst.clauses), width)
    return Instance(Variant.QUBIT, width * inst.num_qudits, clauses,
                    source_variant=inst.variant, padding=padding)


def clause_locality(clause):
    """! Number of qubits a qubit clause acts on"""
    return sum(len(b) for b in clause.blocks)


Consistency = namedtuple('Consistency', ['consistent', 'blocks', 'evidence'])


def check_consistency(inst):
    """! Check that blocks are pairwise identical or disjoint

    @return Consistency with the distinct blocks on success, or the offending
    qubit and blocks as evidence
    """
    owner = {}
    blocks = []
    for index, clause in enumerate(inst.clauses):
        if clause.blocks is None:
            return Consistency(False, (), ('clause', index, 'no blocks'))
        firsts = tuple(b[0] for b in clause.blocks)
        if not clause.is_gadget and tuple(clause.qudits) != firsts:
            return Consistency(False, (), ('clause', index, 'qudits do not match blocks'))
        for block in clause.blocks:
            if block in blocks:
                continue
            if len(set(block)) != len(block):
                return Consistency(False, (), ('block', block))
            for position, qubit in enumerate(block):
                if qubit in owner and owner[qubit] != (block, position):
                    return Consistency(False, (), ('qubit', qubit, owner[qubit][0], block))
                owner[qubit] = (block, position)
            blocks.append(block)
    return Consistency(True, tuple(sorted(blocks)), ())


def dequbitize(inst):
    """! Map a qubit instance back to its qudit variant

    @details Every block becomes the qudit numbered by its first qubit and
    gadget clauses are dropped; untouched qubits stay unused qudits. An
    inconsistent instance maps to the canonical unsatisfiable instance.
    """
    if inst.variant != Variant.QUBIT:
        return inst
    check = check_consistency(inst)
    if not check.consistent:
        logger.debug("inconsistent qubit blocks: %r", check.evidence)
        return canonical_unsat(inst.source_variant)
    clauses = [c.with_qudits([b[0] for b in c.blocks])
               for c in inst.clauses if not c.is_gadget]
    return Instance(inst.source_variant, inst.num_qudits, clauses)


def encoded_terms(inst):
    """! (sites, dense operator) of every clause of a qubit instance"""
    d = LOCAL_DIMENSION[inst.source_variant]
    result = []
    for clause in inst.clauses:
        sites = tuple(q for b in clause.blocks for q in b)
        k = len(clause.blocks)
        if clause.kind == ClauseType.H4TO2:
            for g in range(len(sites) // 4):
                result.append((sites[4 * g:4 * g + 4], h4to2()))
            continue
        _check_qubits(len(sites))
        m = len(clause.blocks[0]) // 4
        if clause.kind in (ClauseType.T1, ClauseType.T2):
            dims = [2] * (2 * m)
            inner = (embed_operator(t1(d, m), list(range(m)), dims)
                     if clause.kind == ClauseType.T1
                     else embed_operator(t2(m), list(range(m, 2 * m)), dims))
            result.append((sites, _encode(_group_order(inner, m), m)))
            continue
        qudit = clause.with_qudits(range(k))
        h = build_projector(qudit, inst.source_variant)
        result.append((sites, encode_operator(h, d, k, inst.padding, gadgets=False)))
    return result


def qubit_hamiltonian(inst):
    """! LocalHamiltonian of a qubit instance, within the dense term limit"""
    from .oracle import LocalHamiltonian, LocalTerm
    terms = [LocalTerm(sites, matrix, None) for sites, matrix in encoded_terms(inst)]
    return LocalHamiltonian([2] * inst.num_qudits, terms)


class GadgetScan(namedtuple('GadgetScan', ['placements', 'zero_placements', 'delta',
                                           'delta_placement'])):
    __slots__ = ()

    def to_dict(self):
        return {
            'placements': self.placements,
            'zero_placements': [list(p) for p in self.zero_placements],
            'delta': self.delta,
            'delta_placement': list(self.delta_placement),
        }


def uniqueness_scan(tolerance=1e-9, database=None):
    """! Ground energies of two H_4to2 copies on seven qubits

    @details The first copy sits on qubits 0..3, the second on every ordered
    choice of four distinct qubits. Records the smallest nonzero ground
    energy (delta) in `database` when one is given.
    @return GadgetScan
    """
    gadget = h4to2()
    dims = [2] * 7
    first = embed_operator(gadget, [0, 1, 2, 3], dims)
    zero, delta, where, count = [], None, (), 0
    for placement in itertools.permutations(range(7), 4):
        count += 1
        total = first + embed_operator(gadget, list(placement), dims)
        lowest = float(np.linalg.eigvalsh(total)[0])
        if lowest < tolerance:
            zero.append(placement)
        elif delta is None or lowest < delta:
            delta, where = lowest, placement
    scan = GadgetScan(count, tuple(zero), delta, where)
    logger.debug("uniqueness scan: %d placements, delta %r at %r", count, delta, where)
    if database is not None:
        database.add('gadgets', 'h4to2', scan.to_dict(), permanent=True)
    return scan
