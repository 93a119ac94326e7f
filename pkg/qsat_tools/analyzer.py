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

"""Classical part of the hybrid decision procedure

The analyzer rejects instances whose clause arrangement alone makes them
unsatisfiable, drops the sub-instances that are trivially satisfiable and
extracts the truly active clock chains (TACCs) left for the quantum or
randomized subroutines.
"""

from collections import namedtuple, defaultdict

from .model import (Variant, Role, ClauseType, RoleConflict, assign_roles,
                    components)

import logging
logger = logging.getLogger("qsattools.analyzer")
logger.addHandler(logging.NullHandler())
del logging


class WitnessError(ValueError):
    """The classical witness does not fit the instance"""


class WitnessMissing(WitnessError):
    pass


class WitnessLengthMismatch(WitnessError):
    pass


class UnexpectedWitness(WitnessError):
    pass


class Rule(object):
    """Names of the structural rejection rules, in the order they are applied"""
    SINGLE_TYPE_QUDITS = 'single-type-qudits'
    CLOCK_TWO_NEIGHBOR_MAXIMUM = 'clock-two-neighbor-maximum'
    UNIQUE_DIRECTION_OF_CLOCK_CHAIN = 'unique-direction-of-clock-chain'
    UNIQUE_CLOCK_QUDIT = 'unique-clock-qudit'
    UNIQUE_ENDPOINT_QUDIT = 'unique-endpoint-qudit'
    EQUAL_WITNESSES = 'equal-witnesses'
    INIT_WITH_ONE_WITNESS = 'init-with-one-witness'
    MIXED_INIT_AND_PAIR_INIT = 'mixed-init-and-pair-init'
    PAIR_INIT_MONOGAMY = 'pair-init-monogamy'
    INIT_PROPS_POINT_OUTWARD = 'init-props-point-outward'
    ONE_WELL_DEFINED_PROP_MAXIMUM = 'one-well-defined-prop-maximum'
    NO_FORKS_IN_TACC = 'no-forks-in-tacc'
    UNIQUE_DIRECTION_OF_TACC = 'unique-direction-of-tacc'
    NEIGHBORING_CLAUSES_OF_TACC = 'neighboring-clauses-of-tacc'
    NEIGHBORING_CLAUSES_OF_ACTIVE_DOT = 'neighboring-clauses-of-active-dot'
    NO_PROP_ON_SHARED_QUDIT = 'no-prop-on-shared-qudit'
    NO_INIT_AND_OUT_ON_SHARED_QUDIT = 'no-init-and-out-on-shared-qudit'


class Decision(object):
    UNSAT = 'unsat'
    TRIVIALLY_SAT = 'trivially_sat'
    NEEDS_SUBROUTINE = 'needs_subroutine'


class StructuralVerdict(namedtuple('StructuralVerdict', ['decision', 'rule', 'evidence', 'tasks'])):
    __slots__ = ()

    @classmethod
    def unsat(cls, rule, evidence):
        logger.debug("rejecting by %s: %r", rule, evidence)
        return cls(Decision.UNSAT, rule, tuple(evidence), ())

    @classmethod
    def trivially_sat(cls):
        return cls(Decision.TRIVIALLY_SAT, None, (), ())

    @classmethod
    def needs_subroutine(cls, tasks):
        return cls(Decision.NEEDS_SUBROUTINE, None, (), tuple(tasks))

    def to_dict(self):
        return {
            'decision': self.decision,
            'rule': self.rule,
            'evidence': list(self.evidence),
            'tasks': [t.to_dict() for t in self.tasks],
        }


class Tacc(namedtuple('Tacc', ['variant', 'clocks', 'steps', 'inits', 'outs',
                               'truncated', 'clauses'])):
    """! A truly active clock chain

    @details `clocks` runs c_0..c_T, `steps[t]` lists the indices of the Prop
    clauses from c_t to c_{t+1}, `inits` the Init-like clauses on c_0 and
    `outs` the Out clauses on c_T. `clauses` maps every referenced clause
    index to its Clause. A truncated chain ends at an artificial stop.
    """
    __slots__ = ()

    @property
    def length(self):
        return len(self.clocks) - 1

    @property
    def simultaneous(self):
        return any(len(step) > 1 for step in self.steps)

    @property
    def indices(self):
        return tuple(self.inits) + tuple(i for step in self.steps for i in step) + tuple(self.outs)

    @property
    def logicals(self):
        return tuple(sorted(set(q for i in self.indices for q in self.clauses[i].logicals)))

    @property
    def q(self):
        """Logicals initialized by plain Init clauses"""
        return len(set(self.clauses[i].logical for i in self.inits
                       if self.clauses[i].kind == ClauseType.INIT))

    @property
    def p(self):
        """Logicals initialized from a witness or an aux qudit"""
        return len(set(self.clauses[i].logical for i in self.inits
                       if self.clauses[i].kind != ClauseType.INIT))

    def to_dict(self):
        return {
            'clocks': list(self.clocks),
            'steps': [list(s) for s in self.steps],
            'inits': list(self.inits),
            'outs': list(self.outs),
            'truncated': self.truncated,
            'length': self.length,
            'logicals': list(self.logicals),
        }


def witness_bits(inst, witness, roles=None):
    """! Normalize a classical witness to {witness qudit: bit}

    @param witness Bit string ('0101'), sequence of bits over the witness
    qudits in ascending order, or a mapping qudit -> bit
    """
    if inst.variant != Variant.WITNESSED_SLCT:
        if witness is not None:
            raise UnexpectedWitness("Only WitnessedSLCT instances take a witness")
        return {}
    if witness is None:
        raise WitnessMissing("WitnessedSLCT instances need a witness")
    if roles is None:
        roles = assign_roles(inst)
    qudits = sorted(set(c.witness for c in inst.clauses if c.kind == ClauseType.INIT_COPY))
    if isinstance(witness, dict):
        bits = dict((int(k), int(v)) for k, v in witness.items())
        if sorted(bits) != qudits:
            raise WitnessLengthMismatch("Witness covers qudits %r, expected %r"
                                        % (sorted(bits), qudits))
    else:
        values = [int(b) for b in witness]
        if len(values) != len(qudits):
            raise WitnessLengthMismatch("Witness has %d bits for %d witness qudits"
                                        % (len(values), len(qudits)))
        bits = dict(zip(qudits, values))
    for qudit, bit in bits.items():
        if bit not in (0, 1):
            raise WitnessError("Witness bit of qudit %d must be 0 or 1" % qudit)
    return bits


def _undefined_props(clauses, indices):
    initialized = set(clauses[i].logical for i in indices if clauses[i].is_init)
    return set(i for i in indices if clauses[i].kind == ClauseType.PROP
               and any(q not in initialized for q in clauses[i].logicals))


def mark_undefined(inst):
    """! Indices of Prop clauses touching a logical no Init-like clause initializes"""
    return _undefined_props(inst.clauses, range(len(inst.clauses)))


class _Component(object):
    """Adjacency of one clock component"""

    def __init__(self, inst, component):
        self.clauses = inst.clauses
        self.component = component
        self.props = [i for i in component.clauses if self.clauses[i].kind == ClauseType.PROP]
        self.inits_at = {}
        self.outs_at = {}
        self.neighbors = defaultdict(set)
        self.successors = defaultdict(set)
        self.predecessors = defaultdict(set)
        for i in component.clauses:
            clause = self.clauses[i]
            if clause.is_init:
                self.inits_at.setdefault(clause.clock, []).append(i)
            elif clause.kind == ClauseType.OUT:
                self.outs_at.setdefault(clause.clock, []).append(i)
        for i in self.props:
            pred, succ = self.clauses[i].clock_pred, self.clauses[i].clock_succ
            self.neighbors[pred].add(succ)
            self.neighbors[succ].add(pred)
            self.successors[pred].add(succ)
            self.predecessors[succ].add(pred)

    @property
    def has_acc(self):
        return bool(self.inits_at) and bool(self.outs_at)

    def props_on(self, clock):
        return [i for i in self.props if clock in self.clauses[i].clocks]

    def props_between(self, a, b):
        return sorted(i for i in self.props if set(self.clauses[i].clocks) == set((a, b)))


def _monogamy_rules(comp):
    """Structural rules forced by the endpoint and CA/CB Bell pairs"""
    clauses = comp.clauses
    endpoint_links = defaultdict(set)
    endpoint_kinds = defaultdict(lambda: defaultdict(set))
    ca_partners = defaultdict(set)
    cb_partners = defaultdict(set)
    for clock in comp.component.clocks:
        for i in comp.inits_at.get(clock, []) + comp.outs_at.get(clock, []):
            endpoint = clauses[i].endpoint
            endpoint_links[endpoint].add(clock)
            endpoint_kinds[endpoint][clock].add(clauses[i].kind)
            if clauses[i].is_init:
                ca_partners[clock].add(endpoint)
            else:
                cb_partners[clock].add(endpoint)
        for other in comp.predecessors[clock]:
            ca_partners[clock].add(other)
        for other in comp.successors[clock]:
            cb_partners[clock].add(other)

    for clock in comp.component.clocks:
        linked = comp.neighbors[clock] | set(
            clauses[i].endpoint for i in comp.inits_at.get(clock, []) + comp.outs_at.get(clock, []))
        if len(linked) > 2:
            return StructuralVerdict.unsat(Rule.CLOCK_TWO_NEIGHBOR_MAXIMUM,
                                           [clock] + sorted(linked))
    for clock in comp.component.clocks:
        if len(comp.successors[clock]) > 1:
            return StructuralVerdict.unsat(Rule.UNIQUE_DIRECTION_OF_CLOCK_CHAIN,
                                           [clock] + sorted(comp.successors[clock]))
        if len(comp.predecessors[clock]) > 1:
            return StructuralVerdict.unsat(Rule.UNIQUE_DIRECTION_OF_CLOCK_CHAIN,
                                           [clock] + sorted(comp.predecessors[clock]))
    for endpoint in sorted(endpoint_links):
        if len(endpoint_links[endpoint]) > 1:
            return StructuralVerdict.unsat(Rule.UNIQUE_CLOCK_QUDIT,
                                           [endpoint] + sorted(endpoint_links[endpoint]))
        for clock, kinds in endpoint_kinds[endpoint].items():
            if ClauseType.OUT in kinds and len(kinds) > 1:
                return StructuralVerdict.unsat(Rule.UNIQUE_CLOCK_QUDIT, [endpoint, clock])
    for clock in comp.component.clocks:
        for partners in (ca_partners[clock], cb_partners[clock]):
            if len(partners) > 1:
                return StructuralVerdict.unsat(Rule.UNIQUE_ENDPOINT_QUDIT,
                                               [clock] + sorted(partners))
    return None


def _witness_rules(inst, kept, bits):
    linked = defaultdict(set)
    plain = set()
    for i in kept:
        clause = inst.clauses[i]
        if clause.kind == ClauseType.INIT_COPY:
            linked[clause.logical].add(clause.witness)
        elif clause.kind == ClauseType.INIT:
            plain.add(clause.logical)
    for logical in sorted(linked):
        values = set(bits[w] for w in linked[logical])
        if len(values) > 1:
            return StructuralVerdict.unsat(Rule.EQUAL_WITNESSES,
                                           [logical] + sorted(linked[logical]))
    for logical in sorted(plain.intersection(linked)):
        ones = sorted(w for w in linked[logical] if bits[w] == 1)
        if ones:
            return StructuralVerdict.unsat(Rule.INIT_WITH_ONE_WITNESS, [logical] + ones)
    return None


def _pair_rules(inst, kept):
    auxes = defaultdict(set)
    logicals = defaultdict(set)
    plain = set()
    for i in kept:
        clause = inst.clauses[i]
        if clause.kind == ClauseType.INIT_PAIR:
            auxes[clause.logical].add(clause.aux)
            logicals[clause.aux].add(clause.logical)
        elif clause.kind == ClauseType.INIT:
            plain.add(clause.logical)
    mixed = sorted(plain.intersection(auxes))
    if mixed:
        return StructuralVerdict.unsat(Rule.MIXED_INIT_AND_PAIR_INIT, [mixed[0]])
    for logical in sorted(auxes):
        if len(auxes[logical]) > 1:
            return StructuralVerdict.unsat(Rule.PAIR_INIT_MONOGAMY,
                                           [logical] + sorted(auxes[logical]))
    for aux in sorted(logicals):
        if len(logicals[aux]) > 1:
            return StructuralVerdict.unsat(Rule.PAIR_INIT_MONOGAMY,
                                           [aux] + sorted(logicals[aux]))
    return None


def _walk_component(inst, comp, undefined):
    """Chain walk over one clock component; returns (verdict or None, taccs)"""
    clauses = inst.clauses

    def defined(i):
        return i not in undefined

    stops = set(clauses[i].clock_pred for i in comp.props if i in undefined)
    stops.update(comp.outs_at)
    init_clocks = sorted(comp.inits_at)

    for c0 in init_clocks:
        if c0 in stops:
            continue
        touching = comp.props_on(c0)
        inward = [i for i in touching if clauses[i].clock_succ == c0]
        if inward:
            return StructuralVerdict.unsat(Rule.INIT_PROPS_POINT_OUTWARD,
                                           [c0, clauses[inward[0]].clock_pred]), []
        if any(defined(i) for i in touching) and len(comp.neighbors[c0]) > 1:
            return StructuralVerdict.unsat(Rule.ONE_WELL_DEFINED_PROP_MAXIMUM,
                                           [c0] + sorted(comp.neighbors[c0])), []

    taccs = []
    for c0 in init_clocks:
        if c0 in stops:
            continue
        if not any(defined(i) for i in comp.props_on(c0)):
            continue
        chain = [c0]
        steps = []
        prev, cur = c0, next(iter(comp.neighbors[c0]))
        steps.append(tuple(comp.props_between(c0, cur)))
        truncated = True
        while True:
            if cur in chain:
                return StructuralVerdict.unsat(Rule.UNIQUE_DIRECTION_OF_TACC, chain + [cur]), []
            chain.append(cur)
            if cur in stops:
                link = set(comp.props_between(prev, cur))
                for i in comp.props_on(cur):
                    if i in link:
                        continue
                    if clauses[i].clock_succ == cur or defined(i):
                        other = [c for c in clauses[i].clocks if c != cur][0]
                        return StructuralVerdict.unsat(Rule.NEIGHBORING_CLAUSES_OF_TACC,
                                                       [cur, other]), []
                truncated = cur not in comp.outs_at
                break
            if len(comp.neighbors[cur]) > 2:
                return StructuralVerdict.unsat(Rule.NO_FORKS_IN_TACC,
                                               [cur] + sorted(comp.neighbors[cur])), []
            ahead = sorted(comp.neighbors[cur] - set([prev]))
            if not ahead:
                logger.debug("chain from %d ends at %d without a stop", c0, cur)
                break
            nxt = ahead[0]
            between = comp.props_between(cur, nxt)
            if any(clauses[i].clock_succ == cur for i in between):
                return StructuralVerdict.unsat(Rule.UNIQUE_DIRECTION_OF_TACC, [cur, nxt]), []
            steps.append(tuple(between))
            prev, cur = cur, nxt
        end = chain[-1]
        outs = tuple(comp.outs_at.get(end, [])) if not truncated else ()
        taccs.append(_make_tacc(inst, chain, steps, comp.inits_at.get(c0, []), outs, truncated))

    for c0 in init_clocks:
        if c0 not in stops:
            continue
        for i in comp.props_on(c0):
            if clauses[i].clock_succ == c0 or defined(i):
                other = [c for c in clauses[i].clocks if c != c0][0]
                return StructuralVerdict.unsat(Rule.NEIGHBORING_CLAUSES_OF_ACTIVE_DOT,
                                               [c0, other]), []
        outs = tuple(comp.outs_at.get(c0, []))
        taccs.append(_make_tacc(inst, [c0], [], comp.inits_at.get(c0, []), outs, not outs))
    return None, taccs


def _make_tacc(inst, chain, steps, inits, outs, truncated):
    indices = set(inits) | set(outs) | set(i for step in steps for i in step)
    return Tacc(inst.variant, tuple(chain), tuple(tuple(sorted(s)) for s in steps),
                tuple(sorted(inits)), tuple(sorted(outs)), truncated,
                dict((i, inst.clauses[i]) for i in indices))


def _shared_rules(taccs):
    owners = defaultdict(set)
    for n, tacc in enumerate(taccs):
        for q in tacc.logicals:
            owners[q].add(n)
    for q in sorted(owners):
        if len(owners[q]) < 2:
            continue
        kinds = set()
        for n in owners[q]:
            tacc = taccs[n]
            for i in tacc.indices:
                clause = tacc.clauses[i]
                if q in clause.logicals:
                    kinds.add('init' if clause.is_init else clause.kind)
        if ClauseType.PROP in kinds:
            return StructuralVerdict.unsat(Rule.NO_PROP_ON_SHARED_QUDIT, [q])
        if 'init' in kinds and ClauseType.OUT in kinds:
            return StructuralVerdict.unsat(Rule.NO_INIT_AND_OUT_ON_SHARED_QUDIT, [q])
    return None


def analyze(inst, witness=None):
    """! Structural verdict of an instance

    @param inst Instance of any variant; Qubit instances are mapped back first
    @param witness Classical witness, required exactly for WitnessedSLCT
    @return StructuralVerdict
    """
    if inst.variant == Variant.QUBIT:
        from .qubitize import dequbitize
        return analyze(dequbitize(inst), witness)
    if inst.variant != Variant.WITNESSED_SLCT and witness is not None:
        raise UnexpectedWitness("Only WitnessedSLCT instances take a witness")
    if inst.variant == Variant.WITNESSED_SLCT and witness is None:
        raise WitnessMissing("WitnessedSLCT instances need a witness")

    roles = assign_roles(inst)
    if isinstance(roles, RoleConflict):
        return StructuralVerdict.unsat(Rule.SINGLE_TYPE_QUDITS, [roles.qudit])
    bits = witness_bits(inst, witness, roles)

    comps = [_Component(inst, c) for c in components(inst, roles)]
    if inst.variant == Variant.LCT:
        for comp in comps:
            verdict = _monogamy_rules(comp)
            if verdict is not None:
                return verdict

    kept = []
    for comp in comps:
        if comp.has_acc:
            kept.append(comp)
        else:
            logger.debug("ignoring clock component %r: no active clock chain",
                         comp.component.clocks)
    kept_indices = sorted(i for comp in kept for i in comp.component.clauses)

    if inst.variant == Variant.WITNESSED_SLCT:
        verdict = _witness_rules(inst, kept_indices, bits)
        if verdict is not None:
            return verdict
    if inst.variant == Variant.CLASSICAL_SLCT:
        verdict = _pair_rules(inst, kept_indices)
        if verdict is not None:
            return verdict

    undefined = _undefined_props(inst.clauses, kept_indices)
    taccs = []
    for comp in kept:
        verdict, found = _walk_component(inst, comp, undefined)
        if verdict is not None:
            return verdict
        taccs.extend(found)

    verdict = _shared_rules(taccs)
    if verdict is not None:
        return verdict

    tasks = []
    for tacc in taccs:
        if tacc.truncated and not tacc.simultaneous:
            logger.debug("ignoring truncated chain %r", tacc.clocks)
            continue
        tasks.append(tacc)
    if not tasks:
        return StructuralVerdict.trivially_sat()
    logger.debug("%d chains need a subroutine", len(tasks))
    return StructuralVerdict.needs_subroutine(tasks)


def extract_tacc(inst, component, undefined=None):
    """! TACCs of one clock component that passed the rejection rules

    @param undefined Prop clause indices treated as undefined; computed over
    the whole instance when omitted
    @return list of Tacc, empty when the component is rejected
    """
    if undefined is None:
        undefined = mark_undefined(inst)
    verdict, taccs = _walk_component(inst, _Component(inst, component), undefined)
    if verdict is not None:
        return []
    return taccs
