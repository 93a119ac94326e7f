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

"""Direct product and direct sum of instances

Both sides are padded to a common qudit count n. In a product every combined
qudit is the pair (left qudit, right qudit) and a clause acts as H (x) I. In a
sum the combined local basis is the left basis followed by the right one; a
left clause acts as H on its all-left coordinates, as 0 on its all-right
coordinates and as the identity on the mixed ones, so its kernel is
ker(H) (+) (right space)^k on every uniform sector.
"""

import json
from collections import namedtuple

import networkx as nx
import numpy as np
from scipy import sparse

from .clauses import embed_operator, DimensionBudgetExceeded, DENSE_LOCAL_LIMIT
from .model import Instance, instance_from_dict, InstanceError, MalformedJson
from .oracle import LocalHamiltonian, LocalTerm

import logging
logger = logging.getLogger("qsattools.combinators")
logger.addHandler(logging.NullHandler())
del logging


class NotAProduct(ValueError):
    """Projections only exist for direct products"""


class Op(object):
    PRODUCT = 'product'
    SUM = 'sum'


class Side(object):
    LEFT = 'left'
    RIGHT = 'right'


LiftedClause = namedtuple('LiftedClause', ['side', 'index', 'clause'])


class ComboInstance(namedtuple('ComboInstance', ['op', 'left', 'right'])):
    """! Symbolic product or sum of two instances

    @details Clauses stay attached to their side and are turned into matrices
    only by local_hamiltonian() and lifted_operator().
    """
    __slots__ = ()

    @property
    def num_qudits(self):
        return max(self.left.num_qudits, self.right.num_qudits)

    @property
    def local_dimension(self):
        d1, d2 = self.left.local_dimension, self.right.local_dimension
        return d1 * d2 if self.op == Op.PRODUCT else d1 + d2

    @property
    def clauses(self):
        return ([LiftedClause(Side.LEFT, i, c) for i, c in enumerate(self.left.clauses)]
                + [LiftedClause(Side.RIGHT, i, c) for i, c in enumerate(self.right.clauses)])

    def _side_terms(self):
        return (LocalHamiltonian.from_instance(self.left).terms,
                LocalHamiltonian.from_instance(self.right).terms)

    def local_hamiltonian(self):
        """! LocalHamiltonian for the oracle

        @details Products keep the left factors on sites 0..n-1 and the right
        factors on n..2n-1; sums use one site per combined qudit.
        """
        n = self.num_qudits
        d1, d2 = self.left.local_dimension, self.right.local_dimension
        left, right = self._side_terms()
        if self.op == Op.PRODUCT:
            shifted = [LocalTerm(tuple(s + n for s in t.sites), t.matrix, t.allowed)
                       for t in right]
            return LocalHamiltonian([d1] * n + [d2] * n, list(left) + shifted)
        terms = [LocalTerm(t.sites, _sum_lift(t, d1, d2, Side.LEFT), None) for t in left]
        terms += [LocalTerm(t.sites, _sum_lift(t, d2, d1, Side.RIGHT), None) for t in right]
        return LocalHamiltonian([d1 + d2] * n, terms)

    def lifted_operator(self, position):
        """! Dense lifted operator of the position-th clause on its combined qudits"""
        lifted = self.clauses[position]
        left, right = self._side_terms()
        term = (left if lifted.side == Side.LEFT else right)[lifted.index]
        d1, d2 = self.left.local_dimension, self.right.local_dimension
        k = len(term.sites)
        size = self.local_dimension ** k
        if size > DENSE_LOCAL_LIMIT:
            raise DimensionBudgetExceeded("Lifted operator of size %d exceeds %d"
                                          % (size, DENSE_LOCAL_LIMIT))
        if self.op == Op.SUM:
            own, other = (d1, d2) if lifted.side == Side.LEFT else (d2, d1)
            return _sum_lift(term, own, other, lifted.side).toarray()
        local = _full_local(term, d1 if lifted.side == Side.LEFT else d2).toarray()
        factors = [d1, d2] * k
        offset = 0 if lifted.side == Side.LEFT else 1
        return embed_operator(local, [2 * i + offset for i in range(k)], factors)

    def to_dict(self):
        return {'op': self.op, 'left': self.left.to_dict(), 'right': self.right.to_dict()}


def _full_local(term, d):
    """Sparse matrix of a term on the full local space of its sites"""
    k = len(term.sites)
    matrix = sparse.csr_matrix(term.matrix)
    if term.allowed is None:
        return matrix
    grid = np.array(np.meshgrid(*term.allowed, indexing='ij')).reshape(k, -1)
    flat = np.ravel_multi_index(grid, (d,) * k)
    size = d ** k
    outside = np.setdiff1d(np.arange(size), flat)
    coo = matrix.tocoo()
    rows = np.concatenate([flat[coo.row], outside])
    cols = np.concatenate([flat[coo.col], outside])
    data = np.concatenate([coo.data, np.ones(len(outside))])
    return sparse.csr_matrix((data, (rows, cols)), shape=(size, size))


def _sum_lift(term, own, other, side):
    """H on the all-own coordinates, 0 on all-other, identity on mixed ones"""
    k = len(term.sites)
    total = own + other
    digits = np.indices((total,) * k).reshape(k, -1)
    base = 0 if side == Side.LEFT else other
    in_own = (digits >= base) & (digits < base + own)
    mixed = np.flatnonzero(in_own.any(axis=0) & ~in_own.all(axis=0))

    local = _full_local(term, own).tocoo()
    own_digits = np.array(np.unravel_index(np.arange(own ** k), (own,) * k)) + base
    own_flat = np.ravel_multi_index(own_digits, (total,) * k)
    rows = np.concatenate([own_flat[local.row], mixed])
    cols = np.concatenate([own_flat[local.col], mixed])
    data = np.concatenate([local.data, np.ones(len(mixed))])
    return sparse.csr_matrix((data, (rows, cols)), shape=(total ** k, total ** k))


def _padded(inst, n):
    if inst.num_qudits == n:
        return inst
    return Instance(inst.variant, n, inst.clauses, inst.source_variant, inst.padding)


def direct_product(a, b):
    """! Direct product: every clause lifted as H (x) I"""
    n = max(a.num_qudits, b.num_qudits)
    return ComboInstance(Op.PRODUCT, _padded(a, n), _padded(b, n))


def direct_sum(a, b):
    """! Direct sum: every clause lifted as H (+) 0 with mixed sectors penalized"""
    n = max(a.num_qudits, b.num_qudits)
    return ComboInstance(Op.SUM, _padded(a, n), _padded(b, n))


def project(combo, side):
    """! Side of a direct product, padded to the combined qudit count"""
    if combo.op != Op.PRODUCT:
        raise NotAProduct("Only direct products have projections")
    if side == Side.LEFT:
        return combo.left
    if side == Side.RIGHT:
        return combo.right
    raise ValueError("Unknown side %r" % (side,))


def combo_from_dict(doc):
    if not isinstance(doc, dict) or doc.get('op') not in (Op.PRODUCT, Op.SUM):
        raise MalformedJson("Combination needs 'op' product or sum")
    for key in ('left', 'right'):
        if key not in doc:
            raise MalformedJson("Combination is missing '%s'" % key)
    left, right = instance_from_dict(doc['left']), instance_from_dict(doc['right'])
    if doc['op'] == Op.PRODUCT:
        return direct_product(left, right)
    return direct_sum(left, right)


def parse_combo(text):
    try:
        doc = json.loads(text)
    except ValueError as e:
        raise MalformedJson("Invalid JSON: %s" % str(e))
    return combo_from_dict(doc)


def combine(op, a, b):
    """! Product or sum by name"""
    if op == Op.PRODUCT:
        return direct_product(a, b)
    if op == Op.SUM:
        return direct_sum(a, b)
    raise InstanceError("Unknown combination %r" % (op,))


def _sites(inst, clause):
    if clause.blocks is not None:
        return [q for block in clause.blocks for q in block]
    return list(clause.qudits)


def connected_components(combo):
    """! Groups of combined qudits joined by clauses of either side"""
    graph = nx.Graph()
    graph.add_nodes_from(range(combo.num_qudits))
    for inst in (combo.left, combo.right):
        for clause in inst.clauses:
            sites = _sites(inst, clause)
            graph.add_edges_from(zip(sites, sites[1:]))
    return [sorted(c) for c in sorted(nx.connected_components(graph), key=min)]


def _restricted(inst, qudits):
    members = set(qudits)
    return Instance(inst.variant, inst.num_qudits,
                    [c for c in inst.clauses if members.issuperset(_sites(inst, c))],
                    inst.source_variant, inst.padding)


ComboDecision = namedtuple('ComboDecision', ['accept', 'parts'])


def decide_combo(combo, reps=None, seed=None):
    """! Decide a combination from decisions on its sides

    @details Products accept iff both sides do. Sums accept iff on every
    connected component one of the sides accepts its restriction.
    @return ComboDecision whose parts list the per-side decisions
    """
    from .deciders import decide

    if combo.op == Op.PRODUCT:
        parts = []
        for side, inst in ((Side.LEFT, combo.left), (Side.RIGHT, combo.right)):
            decision = decide(inst, reps=reps, seed=seed)
            parts.append({'side': side, 'accept': decision.accept})
            if not decision.accept:
                return ComboDecision(False, parts)
        return ComboDecision(True, parts)

    parts = []
    accept = True
    for qudits in connected_components(combo):
        left = _restricted(combo.left, qudits)
        right = _restricted(combo.right, qudits)
        if not left.clauses or not right.clauses:
            ok = True
        else:
            ok = (decide(left, reps=reps, seed=seed).accept
                  or decide(right, reps=reps, seed=seed).accept)
        parts.append({'qudits': qudits, 'accept': ok})
        logger.debug("sum component %r accepts: %s", qudits, ok)
        accept = accept and ok
    return ComboDecision(accept, parts)
