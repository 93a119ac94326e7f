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

"""Instances, clauses, qudit roles and clock components"""

import json
from collections import namedtuple, defaultdict

import networkx as nx

import logging
logger = logging.getLogger("qsattools.model")
logger.addHandler(logging.NullHandler())
del logging


class InstanceError(ValueError):
    """Base class of every instance validation failure"""


class MalformedJson(InstanceError):
    """The document is not JSON or does not follow the instance schema"""


class IndexOutOfRange(InstanceError):
    """A clause references a qudit outside 0..num_qudits-1"""


class GateVariantMismatch(InstanceError):
    """A quantum gate in a classical instance or the other way around"""


class InvalidClause(InstanceError):
    """A clause is well formed JSON but is not allowed in its instance"""


class Variant(object):
    LCT = 'LCT'
    SLCT = 'SLCT'
    WITNESSED_SLCT = 'WitnessedSLCT'
    CLASSICAL_SLCT = 'ClassicalSLCT'
    QUBIT = 'Qubit'

    ALL = (LCT, SLCT, WITNESSED_SLCT, CLASSICAL_SLCT, QUBIT)
    QUDIT = (LCT, SLCT, WITNESSED_SLCT, CLASSICAL_SLCT)


LOCAL_DIMENSION = {
    Variant.LCT: 17,
    Variant.SLCT: 6,
    Variant.WITNESSED_SLCT: 8,
    Variant.CLASSICAL_SLCT: 8,
    Variant.QUBIT: 2,
}


class Gate(object):
    H = 'H'
    HT = 'HT'
    HHCNOT = 'HHCNOT'
    X = 'X'
    XXXTOFFOLI = 'XXXTOFFOLI'

    ARITY = {H: 1, HT: 1, HHCNOT: 2, X: 1, XXXTOFFOLI: 3}
    QUANTUM = (H, HT, HHCNOT)
    CLASSICAL = (X, XXXTOFFOLI)


def gate_set(variant):
    """! Gates allowed in propagation clauses of a qudit variant"""
    if variant == Variant.CLASSICAL_SLCT:
        return Gate.CLASSICAL
    return Gate.QUANTUM


class Role(object):
    LOGICAL = 'Logical'
    CLOCK = 'Clock'
    ENDPOINT = 'Endpoint'
    WITNESS = 'Witness'
    AUX = 'Aux'
    UNUSED = 'Unused'


class ClauseType(object):
    INIT = 'init'
    INIT_COPY = 'init_copy'
    INIT_PAIR = 'init_pair'
    PROP = 'prop'
    OUT = 'out'
    T1 = 't1'
    T2 = 't2'
    H4TO2 = 'h4to2'

    INITS = (INIT, INIT_COPY, INIT_PAIR)
    DATA = (INIT, INIT_COPY, INIT_PAIR, PROP, OUT)
    GADGETS = (T1, T2, H4TO2)


_ClauseBase = namedtuple('_ClauseBase', ['kind', 'logicals', 'clocks', 'gate',
                                         'endpoint', 'witness', 'aux', 'blocks'])


class Clause(_ClauseBase):
    """! One projector of an instance

    @details `logicals` holds one qudit for Init-like and Out clauses and the
    gate operands, in gate order, for Prop clauses. `clocks` holds one clock
    qudit, or (predecessor, successor) for Prop clauses. `blocks` is only set
    in qubitized instances and lists the qubit block of every local site.
    """
    __slots__ = ()

    def __new__(cls, kind, logicals=(), clocks=(), gate=None, endpoint=None,
                witness=None, aux=None, blocks=None):
        if blocks is not None:
            blocks = tuple(tuple(b) for b in blocks)
        return super(Clause, cls).__new__(cls, kind, tuple(logicals), tuple(clocks),
                                          gate, endpoint, witness, aux, blocks)

    @classmethod
    def init(cls, logical, clock, endpoint=None):
        return cls(ClauseType.INIT, (logical,), (clock,), endpoint=endpoint)

    @classmethod
    def init_copy(cls, logical, witness, clock):
        return cls(ClauseType.INIT_COPY, (logical,), (clock,), witness=witness)

    @classmethod
    def init_pair(cls, logical, aux, clock):
        return cls(ClauseType.INIT_PAIR, (logical,), (clock,), aux=aux)

    @classmethod
    def prop(cls, gate, logicals, clock_pred, clock_succ):
        return cls(ClauseType.PROP, logicals, (clock_pred, clock_succ), gate=gate)

    @classmethod
    def out(cls, logical, clock, endpoint=None):
        return cls(ClauseType.OUT, (logical,), (clock,), endpoint=endpoint)

    @classmethod
    def gadget(cls, kind, block):
        return cls(kind, blocks=(block,))

    @property
    def logical(self):
        return self.logicals[0]

    @property
    def clock(self):
        return self.clocks[0]

    @property
    def clock_pred(self):
        return self.clocks[0]

    @property
    def clock_succ(self):
        return self.clocks[-1]

    @property
    def is_init(self):
        return self.kind in ClauseType.INITS

    @property
    def is_gadget(self):
        return self.kind in ClauseType.GADGETS

    @property
    def qudits(self):
        """! Local qudit order used by every operator built for this clause"""
        if self.kind in ClauseType.GADGETS:
            return (self.blocks[0][0],)
        if self.kind == ClauseType.PROP:
            return self.logicals + self.clocks
        if self.kind == ClauseType.INIT_COPY:
            return (self.logical, self.witness, self.clock)
        if self.kind == ClauseType.INIT_PAIR:
            return (self.logical, self.aux, self.clock)
        tail = () if self.endpoint is None else (self.endpoint,)
        return (self.logical, self.clock) + tail

    @property
    def roles(self):
        """! Role of every local qudit, parallel to `qudits`"""
        if self.kind in ClauseType.GADGETS:
            return (None,)
        if self.kind == ClauseType.PROP:
            return (Role.LOGICAL,) * len(self.logicals) + (Role.CLOCK, Role.CLOCK)
        if self.kind == ClauseType.INIT_COPY:
            return (Role.LOGICAL, Role.WITNESS, Role.CLOCK)
        if self.kind == ClauseType.INIT_PAIR:
            return (Role.LOGICAL, Role.AUX, Role.CLOCK)
        tail = () if self.endpoint is None else (Role.ENDPOINT,)
        return (Role.LOGICAL, Role.CLOCK) + tail

    def with_qudits(self, qudits, blocks=None):
        """! Same clause with its local qudits replaced position by position"""
        qudits = tuple(qudits)
        if self.kind in ClauseType.GADGETS:
            return Clause(self.kind, blocks=blocks)
        if self.kind == ClauseType.PROP:
            m = len(self.logicals)
            return Clause(self.kind, qudits[:m], qudits[m:], gate=self.gate, blocks=blocks)
        if self.kind == ClauseType.INIT_COPY:
            return Clause(self.kind, qudits[:1], qudits[2:], witness=qudits[1], blocks=blocks)
        if self.kind == ClauseType.INIT_PAIR:
            return Clause(self.kind, qudits[:1], qudits[2:], aux=qudits[1], blocks=blocks)
        endpoint = qudits[2] if len(qudits) > 2 else None
        return Clause(self.kind, qudits[:1], qudits[1:2], endpoint=endpoint, blocks=blocks)

    def to_dict(self):
        result = {'type': self.kind}
        if self.kind == ClauseType.PROP:
            result.update(gate=self.gate, logicals=list(self.logicals),
                          clock_pred=self.clock_pred, clock_succ=self.clock_succ)
        elif self.kind in ClauseType.DATA:
            result.update(logical=self.logical, clock=self.clock)
            for key in ('endpoint', 'witness', 'aux'):
                if getattr(self, key) is not None:
                    result[key] = getattr(self, key)
        if self.blocks is not None:
            result['blocks'] = [list(b) for b in self.blocks]
        return result


_InstanceBase = namedtuple('_InstanceBase', ['variant', 'num_qudits', 'clauses',
                                             'source_variant', 'padding'])


class Instance(_InstanceBase):
    """! A QSAT instance: variant, qudit count and an ordered clause list

    @details Qubit instances additionally remember the qudit variant they were
    produced from and the block padding scheme.
    """
    __slots__ = ()

    def __new__(cls, variant, num_qudits, clauses=(), source_variant=None, padding=None):
        return super(Instance, cls).__new__(cls, variant, num_qudits, tuple(clauses),
                                            source_variant, padding)

    @property
    def local_dimension(self):
        return LOCAL_DIMENSION[self.variant]

    @property
    def dimension(self):
        return self.local_dimension ** self.num_qudits

    def to_dict(self):
        result = {
            'variant': self.variant,
            'num_qudits': self.num_qudits,
            'clauses': [c.to_dict() for c in self.clauses],
        }
        if self.variant == Variant.QUBIT:
            result['source_variant'] = self.source_variant
            result['padding'] = self.padding
        return result


def _int_field(doc, key, required=True):
    value = doc.get(key)
    if value is None:
        if required:
            raise MalformedJson("Clause %r is missing '%s'" % (doc, key))
        return None
    if isinstance(value, bool) or not isinstance(value, int):
        raise MalformedJson("Field '%s' must be an integer, got %r" % (key, value))
    return value


def clause_from_dict(doc):
    """! Build a Clause from its JSON object"""
    if not isinstance(doc, dict) or 'type' not in doc:
        raise MalformedJson("Clause must be an object with a 'type': %r" % (doc,))
    kind = doc['type']
    blocks = doc.get('blocks')
    if blocks is not None:
        if not isinstance(blocks, list) or not all(isinstance(b, list) for b in blocks):
            raise MalformedJson("Field 'blocks' must be a list of lists")
        for block in blocks:
            for q in block:
                if isinstance(q, bool) or not isinstance(q, int):
                    raise MalformedJson("Block entries must be integers, got %r" % (q,))
    if kind in ClauseType.GADGETS:
        if not blocks or len(blocks) != 1:
            raise MalformedJson("Gadget clause needs exactly one block")
        return Clause.gadget(kind, blocks[0])
    if kind == ClauseType.PROP:
        logicals = doc.get('logicals')
        if not isinstance(logicals, list):
            raise MalformedJson("Prop clause needs a 'logicals' list")
        for q in logicals:
            if isinstance(q, bool) or not isinstance(q, int):
                raise MalformedJson("Logical qudits must be integers, got %r" % (q,))
        gate = doc.get('gate')
        if not isinstance(gate, str):
            raise MalformedJson("Prop clause needs a 'gate' name")
        return Clause(kind, logicals,
                      (_int_field(doc, 'clock_pred'), _int_field(doc, 'clock_succ')),
                      gate=gate, blocks=blocks)
    if kind in ClauseType.DATA:
        return Clause(kind, (_int_field(doc, 'logical'),), (_int_field(doc, 'clock'),),
                      endpoint=_int_field(doc, 'endpoint', required=False),
                      witness=_int_field(doc, 'witness', required=kind == ClauseType.INIT_COPY),
                      aux=_int_field(doc, 'aux', required=kind == ClauseType.INIT_PAIR),
                      blocks=blocks)
    raise InvalidClause("Unknown clause type: %r" % (kind,))


def instance_from_dict(doc):
    """! Build and validate an Instance from its JSON object"""
    if not isinstance(doc, dict):
        raise MalformedJson("Instance must be a JSON object")
    for key in ('variant', 'num_qudits', 'clauses'):
        if key not in doc:
            raise MalformedJson("Instance is missing '%s'" % key)
    if doc['variant'] not in Variant.ALL:
        raise MalformedJson("Unknown variant: %r" % (doc['variant'],))
    num_qudits = _int_field(doc, 'num_qudits')
    if num_qudits < 0:
        raise MalformedJson("num_qudits must not be negative")
    if not isinstance(doc['clauses'], list):
        raise MalformedJson("'clauses' must be a list")
    inst = Instance(doc['variant'], num_qudits,
                    [clause_from_dict(c) for c in doc['clauses']],
                    source_variant=doc.get('source_variant'),
                    padding=doc.get('padding'))
    return validate_instance(inst)


def parse_instance(text):
    """! Parse a JSON document into a validated Instance
    @param text JSON text
    @return Instance
    @details Raises MalformedJson, IndexOutOfRange, GateVariantMismatch or InvalidClause
    """
    try:
        doc = json.loads(text)
    except ValueError as e:
        raise MalformedJson("Invalid JSON: %s" % str(e))
    return instance_from_dict(doc)


def serialize(inst):
    """! JSON text of an instance; parse_instance(serialize(x)) == x"""
    return json.dumps(inst.to_dict(), indent=4, sort_keys=True)


def _validate_clause(clause, variant, num_qudits, index):
    where = "clause %d" % index
    if clause.kind in ClauseType.GADGETS:
        raise InvalidClause("%s: gadget clauses only appear in Qubit instances" % where)
    if clause.kind == ClauseType.INIT_COPY and variant != Variant.WITNESSED_SLCT:
        raise InvalidClause("%s: init_copy is only allowed in WitnessedSLCT" % where)
    if clause.kind == ClauseType.INIT_PAIR and variant != Variant.CLASSICAL_SLCT:
        raise InvalidClause("%s: init_pair is only allowed in ClassicalSLCT" % where)
    if clause.witness is not None and clause.kind != ClauseType.INIT_COPY:
        raise InvalidClause("%s: only init_copy clauses carry a witness" % where)
    if clause.aux is not None and clause.kind != ClauseType.INIT_PAIR:
        raise InvalidClause("%s: only init_pair clauses carry an aux qudit" % where)
    if clause.endpoint is not None and clause.kind not in (ClauseType.INIT, ClauseType.OUT):
        raise InvalidClause("%s: only init and out clauses carry an endpoint" % where)
    if clause.kind in (ClauseType.INIT, ClauseType.OUT):
        if variant == Variant.LCT and clause.endpoint is None:
            raise InvalidClause("%s: LCT %s clauses need an endpoint" % (where, clause.kind))
        if variant != Variant.LCT and clause.endpoint is not None:
            raise InvalidClause("%s: endpoints only exist in LCT" % where)
    if clause.kind == ClauseType.PROP:
        if clause.gate not in Gate.ARITY:
            raise InvalidClause("%s: unknown gate %r" % (where, clause.gate))
        if clause.gate not in gate_set(variant):
            raise GateVariantMismatch("%s: gate %s is not allowed in %s"
                                      % (where, clause.gate, variant))
        if len(clause.logicals) != Gate.ARITY[clause.gate]:
            raise InvalidClause("%s: gate %s acts on %d qudits, got %d"
                                % (where, clause.gate, Gate.ARITY[clause.gate],
                                   len(clause.logicals)))
    for q in clause.qudits:
        if q < 0 or q >= num_qudits:
            raise IndexOutOfRange("%s: qudit %d outside 0..%d" % (where, q, num_qudits - 1))
    if len(set(clause.qudits)) != len(clause.qudits):
        raise InvalidClause("%s: repeated qudit in %r" % (where, clause.qudits))


def validate_instance(inst):
    """! Check every clause of an instance against its variant
    @return The same instance
    """
    if inst.variant not in Variant.ALL:
        raise MalformedJson("Unknown variant: %r" % (inst.variant,))
    if inst.variant != Variant.QUBIT:
        for index, clause in enumerate(inst.clauses):
            if clause.blocks is not None:
                raise InvalidClause("clause %d: blocks only appear in Qubit instances" % index)
            _validate_clause(clause, inst.variant, inst.num_qudits, index)
        return inst

    from .qubitize import expansion_factor
    if inst.source_variant not in Variant.QUDIT:
        raise MalformedJson("Qubit instance needs a qudit 'source_variant'")
    if inst.padding not in ('p', 'p2'):
        raise MalformedJson("Qubit instance needs 'padding' p or p2")
    width = expansion_factor(LOCAL_DIMENSION[inst.source_variant], inst.padding)
    for index, clause in enumerate(inst.clauses):
        if clause.blocks is None:
            raise InvalidClause("clause %d: Qubit clauses need blocks" % index)
        for block in clause.blocks:
            if len(block) != width:
                raise InvalidClause("clause %d: block %r is not %d qubits wide"
                                    % (index, block, width))
            for q in block:
                if q < 0 or q >= inst.num_qudits:
                    raise IndexOutOfRange("clause %d: qubit %d outside 0..%d"
                                          % (index, q, inst.num_qudits - 1))
        if clause.kind not in ClauseType.GADGETS:
            if len(clause.blocks) != len(clause.qudits):
                raise InvalidClause("clause %d: one block per local qudit expected" % index)
            _validate_clause(clause, inst.source_variant, inst.num_qudits, index)
    return inst


RoleConflict = namedtuple('RoleConflict', ['qudit', 'roles'])


class RoleMap(dict):
    """Qudit index to role; every qudit of the instance is present"""

    def qudits(self, role):
        return sorted(q for q, r in self.items() if r == role)


def qudit_roles(inst):
    """! Every role each qudit is used in, in clause order"""
    seen = defaultdict(list)
    for clause in inst.clauses:
        for qudit, role in zip(clause.qudits, clause.roles):
            if role is not None and role not in seen[qudit]:
                seen[qudit].append(role)
    return seen


def assign_roles(inst):
    """! Assign a single role to every qudit

    @return RoleMap, or RoleConflict naming the first qudit (in clause order)
    used in two or more roles
    """
    seen = qudit_roles(inst)
    for clause in inst.clauses:
        for qudit in clause.qudits:
            if len(seen[qudit]) > 1:
                return RoleConflict(qudit, tuple(sorted(seen[qudit])))
    roles = RoleMap((q, Role.UNUSED) for q in range(inst.num_qudits))
    for qudit, found in seen.items():
        roles[qudit] = found[0]
    return roles


ClockComponent = namedtuple('ClockComponent', ['clocks', 'endpoints', 'clauses',
                                               'logicals', 'witnesses', 'auxes'])


def components(inst, roles):
    """! Split the clock qudits into connected clock components

    @param inst Instance
    @param roles RoleMap of the instance
    @return list of ClockComponent sorted by their smallest clock qudit

    @details Clock qudits are joined by Prop clauses and, for LCT, by Init and
    Out clauses sharing an endpoint qudit.
    """
    graph = nx.Graph()
    graph.add_nodes_from(roles.qudits(Role.CLOCK))
    for clause in inst.clauses:
        if clause.kind == ClauseType.PROP:
            graph.add_edge(clause.clock_pred, clause.clock_succ)
        elif clause.endpoint is not None:
            graph.add_edge(clause.clock, clause.endpoint)

    result = []
    for nodes in nx.connected_components(graph):
        clocks = sorted(q for q in nodes if roles[q] == Role.CLOCK)
        if not clocks:
            continue
        members = set(clocks)
        indices = tuple(i for i, c in enumerate(inst.clauses)
                        if c.kind in ClauseType.DATA and c.clock in members)
        attached = [inst.clauses[i] for i in indices]
        result.append(ClockComponent(
            clocks=tuple(clocks),
            endpoints=tuple(sorted(q for q in nodes if roles[q] == Role.ENDPOINT)),
            clauses=indices,
            logicals=tuple(sorted(set(q for c in attached for q in c.logicals))),
            witnesses=tuple(sorted(set(c.witness for c in attached if c.witness is not None))),
            auxes=tuple(sorted(set(c.aux for c in attached if c.aux is not None)))))
    result.sort(key=lambda comp: comp.clocks[0])
    logger.debug("found %d clock components", len(result))
    return result


_DOT_COLORS = {
    Role.LOGICAL: 'lightblue',
    Role.CLOCK: 'lightgoldenrod',
    Role.ENDPOINT: 'lightpink',
    Role.WITNESS: 'palegreen',
    Role.AUX: 'palegreen',
    Role.UNUSED: 'white',
}

_DOT_PREFIX = {
    Role.LOGICAL: 'l',
    Role.CLOCK: 'c',
    Role.ENDPOINT: 'e',
    Role.WITNESS: 'w',
    Role.AUX: 'x',
    Role.UNUSED: 'u',
}


def export_dot(inst):
    """! Graphviz rendering of an instance

    @details Qudits are nodes colored by role (red on a role conflict), Prop
    clauses are directed edges pred -> succ labelled with their gate and
    every other clause is an undirected dashed edge from its clock qudit.
    """
    seen = qudit_roles(inst)
    lines = ['digraph qsat {', '    node [style=filled];']
    for q in range(inst.num_qudits):
        found = seen.get(q, [Role.UNUSED])
        if len(found) > 1:
            label, color = 'q%d' % q, 'red'
        else:
            label, color = '%s%d' % (_DOT_PREFIX[found[0]], q), _DOT_COLORS[found[0]]
        lines.append('    %d [label="%s", fillcolor="%s"];' % (q, label, color))
    for index, clause in enumerate(inst.clauses):
        if clause.kind == ClauseType.PROP:
            lines.append('    %d -> %d [label="%s %s (%d)"];'
                         % (clause.clock_pred, clause.clock_succ, clause.gate,
                            ','.join(str(l) for l in clause.logicals), index))
        elif clause.kind in ClauseType.DATA:
            for other in clause.qudits:
                if other != clause.clock:
                    lines.append('    %d -> %d [dir=none, style=dashed, label="%s (%d)"];'
                                 % (clause.clock, other, clause.kind, index))
    lines.append('}')
    return '\n'.join(lines) + '\n'


def canonical_unsat(variant):
    """! Fixed unsatisfiable instance: two Init clauses with swapped roles"""
    if variant == Variant.LCT:
        return Instance(variant, 4, [Clause.init(0, 1, endpoint=2),
                                     Clause.init(1, 0, endpoint=3)])
    return Instance(variant, 2, [Clause.init(0, 1), Clause.init(1, 0)])
