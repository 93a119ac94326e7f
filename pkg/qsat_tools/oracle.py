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

"""Brute-force ground truth for frustration-freeness and spectra

A LocalHamiltonian is a list of LocalTerm on sites of given dimensions. A term
with `allowed` coordinate sets acts as `matrix` on the product of those
coordinates and as the identity everywhere else; a term without them acts as
`matrix` on the full local space of its sites. Clause projectors are of the
first kind, which lets the oracle shrink every site to the coordinates all its
terms allow before doing any linear algebra.
"""

from collections import namedtuple

import networkx as nx
import numpy as np
from scipy import sparse
from scipy.sparse.linalg import LinearOperator, eigsh, ArpackNoConvergence

from .clauses import (build_projector, clause_support, local_dimension,
                      DimensionMismatch, DimensionBudgetExceeded)
from .model import Instance, Variant
from .settings import DEFAULT_SETTINGS

import logging
logger = logging.getLogger("qsattools.oracle")
logger.addHandler(logging.NullHandler())
del logging


class NoConvergence(ValueError):
    """The iterative eigensolver did not converge"""

    def __init__(self, iterations):
        super(NoConvergence, self).__init__(
            "Lanczos did not converge within %d iterations" % iterations)
        self.iterations = iterations


MAX_ITERATIVE_EIGENVALUES = 24


LocalTerm = namedtuple('LocalTerm', ['sites', 'matrix', 'allowed'])


class LocalHamiltonian(object):
    """Sum of local terms over sites of possibly different dimensions"""

    def __init__(self, dims, terms=()):
        self.dims = tuple(int(d) for d in dims)
        self.terms = tuple(terms)
        for term in self.terms:
            for site in term.sites:
                if site < 0 or site >= len(self.dims):
                    raise DimensionMismatch("Term site %d outside 0..%d"
                                            % (site, len(self.dims) - 1))

    @property
    def dimension(self):
        result = 1
        for d in self.dims:
            result *= d
        return result

    @classmethod
    def from_instance(cls, inst):
        """! Clause projectors of a qudit instance as role-restricted terms"""
        if inst.variant == Variant.QUBIT:
            from .qubitize import qubit_hamiltonian
            return qubit_hamiltonian(inst)
        d = local_dimension(inst.variant)
        terms = [LocalTerm(clause.qudits,
                           build_projector(clause, inst.variant, restricted=True),
                           clause_support(clause, inst.variant))
                 for clause in inst.clauses]
        return cls([d] * inst.num_qudits, terms)


def as_local_hamiltonian(obj):
    """! Accept an Instance, a LocalHamiltonian or anything with local_hamiltonian()"""
    if isinstance(obj, LocalHamiltonian):
        return obj
    if isinstance(obj, Instance):
        return LocalHamiltonian.from_instance(obj)
    if hasattr(obj, 'local_hamiltonian'):
        return obj.local_hamiltonian()
    raise TypeError("Cannot build a Hamiltonian from %r" % (obj,))


class SparseState(namedtuple('SparseState', ['dims', 'digits', 'amplitudes'])):
    """! State given by its nonzero computational basis coordinates

    @details `digits` is an integer array with one row per basis state and one
    column per site, `amplitudes` the matching complex amplitudes.
    """
    __slots__ = ()

    @classmethod
    def from_mapping(cls, dims, mapping):
        """! Build from {digit tuple: amplitude}, merging repeated coordinates"""
        dims = tuple(dims)
        merged = {}
        for digits, amplitude in mapping.items():
            key = tuple(int(x) for x in digits)
            if len(key) != len(dims):
                raise DimensionMismatch("Basis state %r does not have %d sites" % (key, len(dims)))
            merged[key] = merged.get(key, 0) + amplitude
        keys = sorted(k for k, v in merged.items() if v != 0)
        digits = np.array(keys, dtype=np.int64).reshape(len(keys), len(dims))
        amplitudes = np.array([merged[k] for k in keys], dtype=complex)
        return cls(dims, digits, amplitudes)

    def norm(self):
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self):
        return SparseState(self.dims, self.digits, self.amplitudes / self.norm())

    def to_dense(self, limit=None):
        size = int(np.prod(self.dims)) if self.dims else 1
        if limit is not None and size > limit:
            raise DimensionBudgetExceeded("Dense state of size %d exceeds %d" % (size, limit))
        result = np.zeros(size, dtype=complex)
        if len(self.amplitudes):
            flat = np.ravel_multi_index(self.digits.T, self.dims)
            np.add.at(result, flat, self.amplitudes)
        return result


class SpectralReport(namedtuple('SpectralReport', ['dimension', 'nullspace_dim',
                                                   'min_eigenvalue', 'gap', 'method',
                                                   'restricted', 'exact'])):
    """! Result of an oracle run

    @details `gap` is the smallest nonzero eigenvalue when the null space is
    nontrivial. Eigenvalues computed on role subspaces are exact below 1 and
    reported as 1.0 above it, with `exact` set to False.
    """
    __slots__ = ()

    def to_dict(self):
        return dict(self._asdict())


def _apply_local(matrix, sites, dims, block):
    """Apply a term given on the listed sites to a block of column vectors"""
    m = block.shape[1]
    k = len(sites)
    tensor = block.reshape(tuple(dims) + (m,))
    tensor = np.moveaxis(tensor, list(sites), list(range(k)))
    local = tuple(dims[s] for s in sites)
    rest = tensor.shape[k:]
    out = matrix.dot(tensor.reshape(int(np.prod(local)), -1))
    out = np.asarray(out).reshape(local + rest)
    out = np.moveaxis(out, list(range(k)), list(sites))
    return out.reshape(block.shape)


def _apply_full(term, dims, block):
    """Apply a term on the unrestricted space, identity outside its allowed coordinates"""
    if term.allowed is None:
        return _apply_local(term.matrix, term.sites, dims, block)
    m = block.shape[1]
    tensor = block.reshape(tuple(dims) + (m,))
    index = [np.arange(d) for d in dims] + [np.arange(m)]
    for site, coords in zip(term.sites, term.allowed):
        index[site] = np.asarray(coords)
    mesh = np.ix_(*index)
    region = tensor[mesh]
    region_dims = region.shape[:-1]
    moved = _apply_local(term.matrix, term.sites, region_dims, region.reshape(-1, m))
    out = tensor.copy()
    out[mesh] = moved.reshape(region.shape)
    return out.reshape(block.shape)


def _positions(coords, values):
    coords = np.asarray(coords)
    order = np.argsort(coords)
    return order[np.searchsorted(coords[order], values)]


def _compress(matrix, positions, local):
    grid = np.array(np.meshgrid(*positions, indexing='ij')).reshape(len(positions), -1)
    flat = np.ravel_multi_index(grid, local)
    if sparse.issparse(matrix):
        return matrix.tocsr()[flat][:, flat]
    return np.asarray(matrix)[np.ix_(flat, flat)]


class _Problem(object):
    """A connected group of sites with the terms acting on them"""

    def __init__(self, dims, terms):
        self.dims = tuple(dims)
        self.terms = list(terms)
        keep = [None] * len(self.dims)
        for term in self.terms:
            if term.allowed is None:
                continue
            for site, coords in zip(term.sites, term.allowed):
                coords = set(int(c) for c in coords)
                keep[site] = coords if keep[site] is None else keep[site] & coords
        self.restricted_sites = set(i for i, k in enumerate(keep) if k is not None)
        self.keep = [np.arange(d) if k is None else np.array(sorted(k), dtype=np.int64)
                     for d, k in zip(self.dims, keep)]
        self.restricted_dims = tuple(len(k) for k in self.keep)
        # eigenvalues on the restricted space are exact below 1 only when no
        # generic term mixes coordinates across a restricted site's boundary
        self.spectrum_exact = not any(
            term.allowed is None and self.restricted_sites.intersection(term.sites)
            for term in self.terms)
        self._compressed = None

    @property
    def dimension(self):
        return int(np.prod(self.dims)) if self.dims else 1

    @property
    def restricted_dimension(self):
        return int(np.prod(self.restricted_dims)) if self.restricted_dims else 1

    def compressed_terms(self):
        if self._compressed is None:
            self._compressed = []
            for term in self.terms:
                if term.allowed is None:
                    own = [np.arange(self.dims[s]) for s in term.sites]
                else:
                    own = [np.asarray(c) for c in term.allowed]
                positions = [_positions(o, self.keep[s]) for o, s in zip(own, term.sites)]
                matrix = _compress(term.matrix, positions, tuple(len(o) for o in own))
                self._compressed.append(LocalTerm(term.sites, matrix, None))
        return self._compressed


def _split(ham):
    """Connected components of the interaction graph, plus the untouched sites"""
    graph = nx.Graph()
    graph.add_nodes_from(range(len(ham.dims)))
    for term in ham.terms:
        for a, b in zip(term.sites, term.sites[1:]):
            graph.add_edge(a, b)
    touched = set(s for term in ham.terms for s in term.sites)
    problems = []
    free = 1
    for nodes in sorted(nx.connected_components(graph), key=min):
        sites = sorted(nodes)
        if not touched.intersection(sites):
            for s in sites:
                free *= ham.dims[s]
            continue
        local = dict((s, i) for i, s in enumerate(sites))
        terms = [LocalTerm(tuple(local[s] for s in term.sites), term.matrix, term.allowed)
                 for term in ham.terms if term.sites and term.sites[0] in local]
        problems.append(_Problem([ham.dims[s] for s in sites], terms))
    return problems, free


def _kernel_sweep(problem, budget, tolerance):
    """Dimension of the common kernel, adding sites one by one"""
    if 0 in problem.restricted_dims:
        return 0
    size = problem.restricted_dimension
    if size > budget:
        raise DimensionBudgetExceeded(
            "Restricted dimension %d exceeds the budget %d" % (size, budget))
    terms = problem.compressed_terms()
    ending = {}
    for term in terms:
        ending.setdefault(max(term.sites), []).append(term)
    basis = np.ones((1, 1), dtype=complex)
    dims = []
    for site, d in enumerate(problem.restricted_dims):
        basis = np.kron(basis, np.eye(d))
        dims.append(d)
        for term in ending.get(site, []):
            image = _apply_local(term.matrix, term.sites, dims, basis)
            if np.max(np.abs(image), initial=0.0) < tolerance:
                continue
            _, values, vh = np.linalg.svd(image, full_matrices=False)
            basis = basis.dot(vh[values < tolerance].conj().T)
            if basis.shape[1] == 0:
                return 0
    return basis.shape[1]


def _dense_matrix(dims, terms, apply):
    size = int(np.prod(dims)) if dims else 1
    eye = np.eye(size, dtype=complex)
    result = np.zeros((size, size), dtype=complex)
    for term in terms:
        result += apply(term, dims, eye)
    return 0.5 * (result + result.conj().T)


def _operator(dims, terms, apply):
    size = int(np.prod(dims)) if dims else 1

    def matvec(vector):
        block = np.asarray(vector, dtype=complex).reshape(size, 1)
        result = np.zeros_like(block)
        for term in terms:
            result += apply(term, dims, block)
        return result.reshape(-1)

    return LinearOperator((size, size), matvec=matvec, rmatvec=matvec, dtype=complex)


def _apply_compressed(term, dims, block):
    return _apply_local(term.matrix, term.sites, dims, block)


def _lowest_eigenvalues(dims, terms, apply, count, dense_budget):
    """Lowest eigenvalues, dense or by Lanczos; returns (values, method)"""
    size = int(np.prod(dims)) if dims else 1
    if size <= dense_budget:
        return np.linalg.eigvalsh(_dense_matrix(dims, terms, apply)), 'dense'
    count = max(1, min(count, size - 2))
    maxiter = 50 * size
    try:
        values = eigsh(_operator(dims, terms, apply), k=count, which='SA',
                       tol=1e-10, maxiter=maxiter, return_eigenvectors=False)
    except ArpackNoConvergence:
        raise NoConvergence(maxiter)
    return np.sort(values.real), 'iterative'


def _problem_spectrum(problem, nullity, settings):
    """(min eigenvalue, gap, method, restricted, exact) of one component"""
    dense_budget = settings['dense_budget']
    iterative_budget = settings['iterative_budget']
    zero = settings['zero_tolerance']
    count = nullity + 1 if nullity + 1 <= MAX_ITERATIVE_EIGENVALUES else 1

    use_restricted = problem.spectrum_exact and problem.dimension > dense_budget
    if use_restricted and problem.restricted_dimension == 0:
        return 1.0, None, 'dense', True, False
    if use_restricted:
        if problem.restricted_dimension > iterative_budget:
            raise DimensionBudgetExceeded("Restricted dimension %d exceeds the budget %d"
                                          % (problem.restricted_dimension, iterative_budget))
        dims, terms, apply = problem.restricted_dims, problem.compressed_terms(), _apply_compressed
    else:
        if problem.dimension > iterative_budget:
            raise DimensionBudgetExceeded("Dimension %d exceeds the budget %d"
                                          % (problem.dimension, iterative_budget))
        dims, terms, apply = problem.dims, problem.terms, _apply_full
    values, method = _lowest_eigenvalues(dims, terms, apply, count, dense_budget)
    logger.debug("%s eigensolve on dimension %d (restricted=%s)",
                 method, int(np.prod(dims)) if dims else 1, use_restricted)

    lowest = max(float(values[0]), 0.0)
    nonzero = [float(v) for v in values if v > zero]
    gap = nonzero[0] if nonzero and lowest <= zero else None
    exact = True
    if use_restricted:
        if lowest >= 1.0:
            lowest, exact = 1.0, False
        if gap is not None and gap >= 1.0:
            gap, exact = 1.0, False
        if (gap is None and lowest <= zero and len(values) == int(np.prod(dims))
                and problem.restricted_dimension < problem.dimension):
            gap, exact = 1.0, False
    if gap is None and lowest <= zero and method == 'iterative':
        logger.debug("gap not resolved by %d Lanczos eigenvalues", len(values))
    return lowest, gap, method, use_restricted, exact


def _settings(overrides):
    result = dict(DEFAULT_SETTINGS)
    result.update(dict((k, v) for k, v in overrides.items() if v is not None))
    return result


def nullspace_dim(obj, **settings):
    """! Dimension of the common kernel of all terms

    @param obj Instance, combinator instance or LocalHamiltonian
    @param settings Optional overrides of iterative_budget and kernel_tolerance
    @return Count of linearly independent frustration-free states
    """
    settings = _settings(settings)
    ham = as_local_hamiltonian(obj)
    problems, free = _split(ham)
    result = free
    for problem in problems:
        result *= _kernel_sweep(problem, settings['iterative_budget'],
                                settings['kernel_tolerance'])
        if result == 0:
            break
    return result


def spectral_report(obj, **settings):
    """! Null space dimension, smallest eigenvalue and gap of an instance

    @param settings Optional overrides of dense_budget, iterative_budget,
    kernel_tolerance and zero_tolerance
    @return SpectralReport
    """
    settings = _settings(settings)
    ham = as_local_hamiltonian(obj)
    problems, free = _split(ham)
    nullities = [_kernel_sweep(p, settings['iterative_budget'], settings['kernel_tolerance'])
                 for p in problems]
    nullity = free
    for n in nullities:
        nullity *= n

    lowest, gaps, methods, restricted, exact = 0.0, [], set(), False, True
    for problem, n in zip(problems, nullities):
        value, gap, method, used_restricted, was_exact = _problem_spectrum(problem, n, settings)
        lowest += value
        if gap is not None:
            gaps.append(gap)
        methods.add(method)
        restricted = restricted or used_restricted
        exact = exact and was_exact
    gap = min(gaps) if nullity > 0 and gaps else None
    method = 'iterative' if 'iterative' in methods else 'dense'
    return SpectralReport(ham.dimension, nullity, lowest, gap, method, restricted, exact)


def min_eigenvalue(obj, **settings):
    """! Smallest eigenvalue of the summed Hamiltonian"""
    return spectral_report(obj, **settings).min_eigenvalue


def full_hamiltonian(obj, **settings):
    """! The summed Hamiltonian on the whole product space

    @return Dense matrix within dense_budget, else a scipy LinearOperator
    within iterative_budget
    """
    settings = _settings(settings)
    ham = as_local_hamiltonian(obj)
    size = ham.dimension
    if size <= settings['dense_budget']:
        return _dense_matrix(ham.dims, ham.terms, _apply_full)
    if size <= settings['iterative_budget']:
        return _operator(ham.dims, ham.terms, _apply_full)
    raise DimensionBudgetExceeded("Dimension %d exceeds the budget %d"
                                  % (size, settings['iterative_budget']))


def _term_expectation_dense(term, dims, tensor):
    k = len(term.sites)
    if term.allowed is None:
        region = tensor
    else:
        index = [np.arange(d) for d in dims]
        for site, coords in zip(term.sites, term.allowed):
            index[site] = np.asarray(coords)
        region = tensor[np.ix_(*index)]
    moved = np.moveaxis(region, list(term.sites), list(range(k)))
    local = int(np.prod(moved.shape[:k]))
    flat = moved.reshape(local, -1)
    inside = float(np.real(np.vdot(flat, np.asarray(term.matrix.dot(flat)))))
    if term.allowed is None:
        return inside
    return float(np.vdot(tensor, tensor).real) - float(np.vdot(region, region).real) + inside


def _term_expectation_sparse(term, state):
    digits, amplitudes = state.digits, state.amplitudes
    total = float(np.vdot(amplitudes, amplitudes).real)
    coords = term.allowed
    if coords is None:
        coords = [np.arange(state.dims[s]) for s in term.sites]
    mask = np.ones(len(amplitudes), dtype=bool)
    for site, c in zip(term.sites, coords):
        mask &= np.isin(digits[:, site], c)
    selected = digits[mask]
    amps = amplitudes[mask]
    inside_norm = float(np.vdot(amps, amps).real)
    if len(amps) == 0:
        return total if term.allowed is not None else 0.0
    positions = [_positions(c, selected[:, s]) for c, s in zip(coords, term.sites)]
    local = np.ravel_multi_index(positions, [len(c) for c in coords])
    rest = [i for i in range(len(state.dims)) if i not in term.sites]
    if rest:
        _, group = np.unique(selected[:, rest], axis=0, return_inverse=True)
        group = np.asarray(group).reshape(-1)
    else:
        group = np.zeros(len(amps), dtype=np.int64)
    size = int(np.prod([len(c) for c in coords]))
    grouped = sparse.coo_matrix((amps, (group, local)),
                                shape=(int(group.max()) + 1, size)).tocsr()
    image = grouped.dot(term.matrix.T)
    if sparse.issparse(image):
        image = image.toarray()
    inside = float(np.real(grouped.conj().multiply(image).sum()))
    if term.allowed is None:
        return inside
    return total - inside_norm + inside


def term_residuals(obj, psi):
    """! Expectation value of every term in a state
    @param psi Dense vector over the whole product space, or SparseState
    """
    ham = as_local_hamiltonian(obj)
    if isinstance(psi, SparseState):
        if tuple(psi.dims) != ham.dims:
            raise DimensionMismatch("State dims %r do not match %r" % (psi.dims, ham.dims))
        return [_term_expectation_sparse(term, psi) for term in ham.terms]
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    if psi.size != ham.dimension:
        raise DimensionMismatch("State of size %d on a space of dimension %d"
                                % (psi.size, ham.dimension))
    tensor = psi.reshape(ham.dims)
    return [_term_expectation_dense(term, ham.dims, tensor) for term in ham.terms]


def residual(obj, psi):
    """! Sum over clauses of <psi|Pi_i|psi>"""
    return float(sum(term_residuals(obj, psi)))
