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

"""Clause operators, gates and local bases

Every clause operator commutes with the role projectors of its qudits and is
at least 1 outside of them, so operators are assembled on the product of the
role subspaces first. The full local-space matrix is that block plus the role
penalties and is only materialized for small clauses.

Local bases:
  SLCT (6): 0, 1, ? logical; r, a, d clock
  WitnessedSLCT / ClassicalSLCT (8): 0, 1, ? logical; 0, 1 witness or aux; r, a, d clock
  LCT (17): 0, 1, ? logical; 0, 1 endpoint; (r, a, d) x CA x CB clock
"""

from functools import lru_cache

import numpy as np

from .model import Variant, Role, ClauseType, Gate, LOCAL_DIMENSION, gate_set

import logging
logger = logging.getLogger("qsattools.clauses")
logger.addHandler(logging.NullHandler())
del logging


class DimensionMismatch(ValueError):
    """An operator or state does not fit the local space it is used on"""


class DimensionBudgetExceeded(ValueError):
    """A dense representation would exceed the configured dimension budget"""


DENSE_LOCAL_LIMIT = 4096
NULLSPACE_LOCAL_LIMIT = 17 ** 3
NULL_TOLERANCE = 1e-9

CLOCK_STATES = 'rad'

_SQRT1_2 = 1.0 / np.sqrt(2.0)
_H = _SQRT1_2 * np.array([[1, 1], [1, -1]], dtype=complex)
_T = np.diag([1.0, np.exp(0.25j * np.pi)])
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_CNOT = np.eye(4, dtype=complex)[[0, 1, 3, 2]]
_TOFFOLI = np.eye(8, dtype=complex)[[0, 1, 2, 3, 4, 5, 7, 6]]
_PHI_PLUS = _SQRT1_2 * np.array([1, 0, 0, 1], dtype=complex)


def gate_matrix(gate):
    """! Unitary of a gate, qubit 0 being the most significant
    @param gate Gate name
    @return 2^arity square complex matrix; HT is the matrix product H.T
    """
    if gate == Gate.H:
        return _H.copy()
    if gate == Gate.HT:
        return _H.dot(_T)
    if gate == Gate.HHCNOT:
        return np.kron(_H, _H).dot(_CNOT)
    if gate == Gate.X:
        return _X.copy()
    if gate == Gate.XXXTOFFOLI:
        return np.kron(np.kron(_X, _X), _X).dot(_TOFFOLI)
    raise ValueError("Unknown gate: %r" % (gate,))


def embed_operator(matrix, targets, dims):
    """! Lift an operator on some tensor factors to the whole product space

    @param matrix Operator on the factors listed in `targets`, in that order
    @param targets Factor positions the operator acts on
    @param dims Dimensions of all factors
    @return Dense matrix of size prod(dims)
    """
    targets = list(targets)
    rest = [i for i in range(len(dims)) if i not in targets]
    order = targets + rest
    rest_dim = int(np.prod([dims[i] for i in rest])) if rest else 1
    full = np.kron(matrix, np.eye(rest_dim))
    shape = [dims[i] for i in order]
    full = full.reshape(shape + shape)
    inverse = list(np.argsort(order))
    n = len(dims)
    full = full.transpose(inverse + [n + i for i in inverse])
    total = int(np.prod(dims)) if dims else 1
    return full.reshape(total, total)


_ROLE_INDICES = {
    Variant.SLCT: {
        Role.LOGICAL: (0, 1, 2),
        Role.CLOCK: (3, 4, 5),
    },
    Variant.WITNESSED_SLCT: {
        Role.LOGICAL: (0, 1, 2),
        Role.WITNESS: (3, 4),
        Role.CLOCK: (5, 6, 7),
    },
    Variant.CLASSICAL_SLCT: {
        Role.LOGICAL: (0, 1, 2),
        Role.AUX: (3, 4),
        Role.CLOCK: (5, 6, 7),
    },
    Variant.LCT: {
        Role.LOGICAL: (0, 1, 2),
        Role.ENDPOINT: (3, 4),
        Role.CLOCK: tuple(range(5, 17)),
    },
}


def local_dimension(variant):
    if variant not in _ROLE_INDICES:
        raise DimensionMismatch("No qudit local basis for variant %r" % (variant,))
    return LOCAL_DIMENSION[variant]


def role_indices(variant, role):
    """! Local basis indices spanning a role subspace"""
    try:
        return _ROLE_INDICES[variant][role]
    except KeyError:
        raise DimensionMismatch("Role %s does not exist in %s" % (role, variant))


def role_projector(variant, role):
    """! Zero-padded projector onto a role subspace (Pi_L, Pi_C, ...)"""
    d = local_dimension(variant)
    result = np.zeros((d, d), dtype=complex)
    for i in role_indices(variant, role):
        result[i, i] = 1.0
    return result


def basis_index(variant, label):
    """! Local basis index of a labelled state

    @param label '0', '1', '?' for logical states; 'w0', 'w1' for witness or
    aux states; 'e0', 'e1' for LCT endpoint states; 'r', 'a', 'd' for
    clock states, or for LCT a label like 'a01' giving the CA and CB bits
    """
    if label in ('0', '1', '?'):
        return '01?'.index(label)
    if label in ('w0', 'w1') and variant in (Variant.WITNESSED_SLCT, Variant.CLASSICAL_SLCT):
        return 3 + int(label[1])
    if label in ('e0', 'e1') and variant == Variant.LCT:
        return 3 + int(label[1])
    if label and label[0] in CLOCK_STATES:
        state = CLOCK_STATES.index(label[0])
        base = role_indices(variant, Role.CLOCK)[0]
        if variant == Variant.LCT:
            ca, cb = (int(label[1]), int(label[2])) if len(label) == 3 else (0, 0)
            return base + 4 * state + 2 * ca + cb
        if len(label) == 1:
            return base + state
    raise DimensionMismatch("Unknown basis label %r for %s" % (label, variant))


def basis_vector(variant, label):
    result = np.zeros(local_dimension(variant), dtype=complex)
    result[basis_index(variant, label)] = 1.0
    return result


def _role_factors(variant, role):
    if role == Role.CLOCK:
        return [3, 2, 2] if variant == Variant.LCT else [3]
    if role == Role.LOGICAL:
        return [3]
    return [2]


def _ket(dim, index):
    result = np.zeros(dim, dtype=complex)
    result[index] = 1.0
    return result


def _proj(dim, *indices):
    result = np.zeros((dim, dim), dtype=complex)
    for i in indices:
        result[i, i] = 1.0
    return result


_R, _A, _D = (_proj(3, i) for i in range(3))
_ZERO, _UNDEFINED = _proj(3, 0), _proj(3, 2)
_I3 = np.eye(3)


class _RoleSpace(object):
    """Product of the role subspaces of a clause's local qudits"""

    def __init__(self, variant, roles):
        self.dims = []
        self.sites = []
        for role in roles:
            start = len(self.dims)
            self.dims.extend(_role_factors(variant, role))
            self.sites.append(list(range(start, len(self.dims))))

    @property
    def dim(self):
        return int(np.prod(self.dims))

    def on(self, matrix, factors):
        return embed_operator(matrix, factors, self.dims)

    def state(self, site):
        return self.sites[site][0]

    def ca(self, site):
        return self.sites[site][1]

    def cb(self, site):
        return self.sites[site][2]


def _defined_isometry(arity):
    """3^m x 2^m map of qubit basis states onto the defined logical states"""
    single = np.eye(3, 2, dtype=complex)
    result = np.ones((1, 1), dtype=complex)
    for _ in range(arity):
        result = np.kron(result, single)
    return result


def _work_term(gate):
    """Pi_work,U restricted to the defined logical states, on (logicals, pred, succ)"""
    arity = Gate.ARITY[gate]
    iso = _defined_isometry(arity)
    padded = iso.dot(gate_matrix(gate)).dot(iso.conj().T)
    eye = np.eye(3 ** arity)
    ar = np.outer(np.kron(_ket(3, 1), _ket(3, 0)), np.kron(_ket(3, 1), _ket(3, 0)))
    da = np.outer(np.kron(_ket(3, 2), _ket(3, 1)), np.kron(_ket(3, 2), _ket(3, 1)))
    da_ar = np.outer(np.kron(_ket(3, 2), _ket(3, 1)), np.kron(_ket(3, 1), _ket(3, 0)))
    work = 0.5 * (np.kron(eye, ar) + np.kron(eye, da)
                  - np.kron(padded, da_ar) - np.kron(padded.conj().T, da_ar.conj().T))
    return work, iso.dot(iso.conj().T)


_CLOCK_DEFINED = np.kron(_R, _I3 - _R) + np.kron(_A, _I3 - _R) + np.kron(_D, _R)
_CLOCK_UNDEFINED = np.kron(_R, _I3 - _R) + np.kron(_A, _I3 - _R) + np.kron(_D, _I3)
_BELL_PENALTY = np.eye(4) - np.outer(_PHI_PLUS, _PHI_PLUS.conj())


@lru_cache(maxsize=None)
def _semidefinite_block(variant, kind, gate):
    """O-operator of a clause shape on its role subspaces"""
    if kind == ClauseType.PROP:
        arity = Gate.ARITY[gate]
        roles = (Role.LOGICAL,) * arity + (Role.CLOCK, Role.CLOCK)
    elif kind == ClauseType.INIT_COPY:
        roles = (Role.LOGICAL, Role.WITNESS, Role.CLOCK)
    elif kind == ClauseType.INIT_PAIR:
        roles = (Role.LOGICAL, Role.AUX, Role.CLOCK)
    else:
        roles = (Role.LOGICAL, Role.CLOCK)
        if variant == Variant.LCT:
            roles += (Role.ENDPOINT,)
    space = _RoleSpace(variant, roles)
    lct = variant == Variant.LCT

    if kind == ClauseType.INIT:
        clock = space.state(1)
        result = space.on(_R, [clock]) + space.on(np.kron(_I3 - _ZERO, _A), [0, clock])
        if lct:
            result += space.on(_BELL_PENALTY, [space.ca(1), space.sites[2][0]])
    elif kind == ClauseType.OUT:
        clock = space.state(1)
        result = space.on(_D, [clock]) + space.on(np.kron(_ZERO, _A), [0, clock])
        if lct:
            result += space.on(_BELL_PENALTY, [space.cb(1), space.sites[2][0]])
    elif kind in (ClauseType.INIT_COPY, ClauseType.INIT_PAIR):
        clock = space.state(2)
        if kind == ClauseType.INIT_COPY:
            pair = np.eye(6) - _proj(6, 0, 3)
        else:
            phi = np.zeros(6, dtype=complex)
            phi[0] = phi[3] = _SQRT1_2
            pair = np.eye(6) - np.outer(phi, phi.conj())
        result = (space.on(_R, [clock])
                  + space.on(np.kron(_UNDEFINED, _A), [0, clock])
                  + space.on(np.kron(pair, _A), [0, 1, clock]))
    elif kind == ClauseType.PROP:
        arity = Gate.ARITY[gate]
        work, defined = _work_term(gate)
        eye_data = np.eye(3 ** arity)
        eye_clock = np.eye(9)
        block = ((work + np.kron(eye_data, _CLOCK_DEFINED)).dot(np.kron(defined, eye_clock))
                 + np.kron(eye_data, _CLOCK_UNDEFINED).dot(np.kron(eye_data - defined, eye_clock)))
        pred, succ = space.state(arity), space.state(arity + 1)
        result = space.on(block, list(range(arity)) + [pred, succ])
        if lct:
            result += space.on(_BELL_PENALTY, [space.cb(arity), space.ca(arity + 1)])
    else:
        raise DimensionMismatch("No qudit operator for clause type %r" % (kind,))

    result = 0.5 * (result + result.conj().T)
    result.flags.writeable = False
    return result


@lru_cache(maxsize=None)
def _nullspace_block(variant, kind, gate):
    values, vectors = np.linalg.eigh(_semidefinite_block(variant, kind, gate))
    result = np.ascontiguousarray(vectors[:, values < NULL_TOLERANCE])
    result.flags.writeable = False
    return result


def _check_clause(clause, variant):
    if variant not in _ROLE_INDICES:
        raise DimensionMismatch("Clause operators need a qudit variant, got %r" % (variant,))
    if clause.kind not in ClauseType.DATA:
        raise DimensionMismatch("%s clauses have no %s operator" % (clause.kind, variant))
    if clause.kind == ClauseType.INIT_COPY and variant != Variant.WITNESSED_SLCT:
        raise DimensionMismatch("init_copy needs the WitnessedSLCT basis")
    if clause.kind == ClauseType.INIT_PAIR and variant != Variant.CLASSICAL_SLCT:
        raise DimensionMismatch("init_pair needs the ClassicalSLCT basis")
    if clause.kind in (ClauseType.INIT, ClauseType.OUT):
        if (clause.endpoint is not None) != (variant == Variant.LCT):
            raise DimensionMismatch("Endpoint presence does not match the %s basis" % variant)
    if clause.kind == ClauseType.PROP and clause.gate not in gate_set(variant):
        raise DimensionMismatch("Gate %s does not act on the %s basis" % (clause.gate, variant))


def clause_support(clause, variant):
    """! Per-site local basis indices of the role subspaces a clause lives on"""
    _check_clause(clause, variant)
    return tuple(np.array(role_indices(variant, role)) for role in clause.roles)


def _flat_support(clause, variant):
    support = clause_support(clause, variant)
    d = local_dimension(variant)
    grid = np.array(np.meshgrid(*support, indexing='ij')).reshape(len(support), -1)
    return np.ravel_multi_index(grid, (d,) * len(support))


def _check_budget(clause, variant, limit):
    size = local_dimension(variant) ** len(clause.qudits)
    if size > limit:
        raise DimensionBudgetExceeded(
            "A %d-local %s clause spans %d local dimensions (limit %d); use restricted=True"
            % (len(clause.qudits), variant, size, limit))
    return size


def _role_penalties(clause, variant):
    d = local_dimension(variant)
    k = len(clause.qudits)
    result = np.zeros((d ** k, d ** k), dtype=complex)
    for site, role in enumerate(clause.roles):
        penalty = np.eye(d) - role_projector(variant, role)
        result += embed_operator(penalty, [site], [d] * k)
    return result


def build_semidefinite(clause, variant, restricted=False):
    """! O-operator of a clause

    @param clause Data clause (init, init_copy, init_pair, prop or out)
    @param variant Qudit variant giving the local basis
    @param restricted Return only the block on the role subspaces
    @return Hermitian positive semidefinite matrix on the clause's local qudits
    """
    _check_clause(clause, variant)
    block = _semidefinite_block(variant, clause.kind, clause.gate)
    if restricted:
        return np.array(block)
    size = _check_budget(clause, variant, DENSE_LOCAL_LIMIT)
    flat = _flat_support(clause, variant)
    result = _role_penalties(clause, variant)
    result[np.ix_(flat, flat)] += block
    logger.debug("built %s operator of size %d", clause.kind, size)
    return result


def clause_nullspace(clause, variant, restricted=False):
    """! Orthonormal basis of the kernel of a clause's O-operator

    @return Matrix whose columns are the kernel vectors
    """
    _check_clause(clause, variant)
    kernel = _nullspace_block(variant, clause.kind, clause.gate)
    if restricted:
        return np.array(kernel)
    size = _check_budget(clause, variant, NULLSPACE_LOCAL_LIMIT)
    result = np.zeros((size, kernel.shape[1]), dtype=complex)
    result[_flat_support(clause, variant)] = kernel
    return result


def build_projector(clause, variant, restricted=False):
    """! Orthogonal projector onto the complement of a clause's kernel"""
    kernel = clause_nullspace(clause, variant, restricted=True)
    block = np.eye(kernel.shape[0]) - kernel.dot(kernel.conj().T)
    if restricted:
        return block
    _check_budget(clause, variant, DENSE_LOCAL_LIMIT)
    d = local_dimension(variant)
    size = d ** len(clause.qudits)
    flat = _flat_support(clause, variant)
    result = np.eye(size, dtype=complex)
    result[np.ix_(flat, flat)] = block
    return result


def reference_projectors(variant):
    """! Named sub-projectors the clause operators are assembled from

    @details Single-site projectors are zero-padded to the variant's local
    space. Two-site clock projectors act on the clock states of a
    (predecessor, successor) pair and the work projectors on
    (logicals, predecessor state, successor state); both carry the identity
    on CA and CB for LCT, so they are given on the 3-state clock factor.
    """
    d = local_dimension(variant)
    clock = role_indices(variant, Role.CLOCK)
    result = {
        'logical': role_projector(variant, Role.LOGICAL),
        'clock': role_projector(variant, Role.CLOCK),
        'defined': np.zeros((d, d), dtype=complex),
        'undefined': np.zeros((d, d), dtype=complex),
        'zero': np.zeros((d, d), dtype=complex),
        'clock_defined': np.array(_CLOCK_DEFINED, dtype=complex),
        'clock_undefined': np.array(_CLOCK_UNDEFINED, dtype=complex),
    }
    result['defined'][0, 0] = result['defined'][1, 1] = 1.0
    result['undefined'][2, 2] = 1.0
    result['zero'][0, 0] = 1.0
    stride = len(clock) // 3
    for name, state in (('ready', 0), ('active', 1), ('dead', 2)):
        matrix = np.zeros((d, d), dtype=complex)
        for i in clock[state * stride:(state + 1) * stride]:
            matrix[i, i] = 1.0
        result[name] = matrix
    result['start'] = result['ready']
    result['stop'] = result['dead']
    if variant == Variant.LCT:
        result['endpoint'] = role_projector(variant, Role.ENDPOINT)
        result['bell'] = np.outer(_PHI_PLUS, _PHI_PLUS.conj())
    elif variant == Variant.WITNESSED_SLCT:
        result['witness'] = role_projector(variant, Role.WITNESS)
    elif variant == Variant.CLASSICAL_SLCT:
        result['aux'] = role_projector(variant, Role.AUX)
    for gate in gate_set(variant):
        work, defined = _work_term(gate)
        result['work_%s' % gate] = work.dot(np.kron(defined, np.eye(9)))
    return result
