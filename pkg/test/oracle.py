#!/usr/bin/env python
"""
qsat-tools
Copyright (c) 2026 qsat-tools contributors

Licensed under the Apache License, Version 2.0 (the 'License');
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an 'AS IS' BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
"""

import unittest

import numpy as np
from mock import patch
from scipy.sparse.linalg import ArpackNoConvergence

from qsat_tools.oracle import (LocalHamiltonian, LocalTerm, SparseState, SpectralReport,
                               NoConvergence, nullspace_dim, spectral_report, min_eigenvalue,
                               full_hamiltonian, term_residuals, residual)
from qsat_tools.clauses import (build_projector, embed_operator, DimensionMismatch,
                                DimensionBudgetExceeded)
from qsat_tools.compiler import (Circuit, CircuitKind, compile_circuit, history_state,
                                 x_equivalent)
from qsat_tools.model import Instance, Clause, Gate, Variant, canonical_unsat


def classical(gates, ans=0):
    circuit = Circuit(CircuitKind.CLASSICAL, 1, 0, ans, [(g, (0,)) for g in gates])
    return circuit, compile_circuit(circuit, Variant.CLASSICAL_SLCT)


class NullspaceTestCase(unittest.TestCase):
    """ Frustration-freeness of small instances
    """

    def test_empty_instance(self):
        inst = Instance(Variant.SLCT, 1)
        self.assertEqual(nullspace_dim(inst), 6)
        report = spectral_report(inst)
        self.assertEqual(report.dimension, 6)
        self.assertEqual(report.nullspace_dim, 6)
        self.assertEqual(report.min_eigenvalue, 0.0)
        self.assertEqual(residual(inst, np.ones(6) / np.sqrt(6)), 0.0)

    def test_untouched_qudits_multiply(self):
        inst = Instance(Variant.SLCT, 3, [Clause.init(0, 1)])
        self.assertEqual(nullspace_dim(inst), 4 * 6)

    def test_canonical_unsat(self):
        for variant in (Variant.SLCT, Variant.CLASSICAL_SLCT):
            inst = canonical_unsat(variant)
            self.assertEqual(nullspace_dim(inst), 0)
            self.assertGreater(min_eigenvalue(inst), 1e-6)

    def test_compiled_yes_instance(self):
        circuit, inst = classical([Gate.X])
        self.assertEqual(inst.dimension, 512)
        report = spectral_report(inst)
        self.assertGreaterEqual(report.nullspace_dim, 1)
        self.assertAlmostEqual(report.min_eigenvalue, 0.0, places=8)
        self.assertAlmostEqual(residual(inst, history_state(circuit, Variant.CLASSICAL_SLCT)),
                               0.0, places=9)

    def test_compiled_no_instance(self):
        _, inst = classical([Gate.X, Gate.X])
        self.assertEqual(nullspace_dim(inst), 0)

    def test_x_equivalent_instance(self):
        circuit = Circuit(CircuitKind.QUANTUM, 1, 0, 0, x_equivalent(0))
        inst = compile_circuit(circuit, Variant.SLCT)
        self.assertGreaterEqual(nullspace_dim(inst, iterative_budget=10 ** 5), 1)

    def test_clause_order_invariance(self):
        _, inst = classical([Gate.X])
        shuffled = Instance(inst.variant, inst.num_qudits, reversed(inst.clauses))
        self.assertEqual(nullspace_dim(inst), nullspace_dim(shuffled))
        self.assertAlmostEqual(min_eigenvalue(inst), min_eigenvalue(shuffled))

    def test_generic_terms(self):
        ham = LocalHamiltonian([2, 2], [LocalTerm((0, 1), np.diag([0, 0, 0, 1.0]), None)])
        report = spectral_report(ham)
        self.assertEqual(report.nullspace_dim, 3)
        self.assertAlmostEqual(report.gap, 1.0)
        self.assertTrue(report.exact)

    def test_term_outside_sites(self):
        with self.assertRaises(DimensionMismatch):
            LocalHamiltonian([2], [LocalTerm((1,), np.eye(2), None)])

    def test_not_a_hamiltonian(self):
        with self.assertRaises(TypeError):
            nullspace_dim('SLCT')


class HamiltonianTestCase(unittest.TestCase):

    def test_single_init(self):
        projector = build_projector(Clause.init(0, 1), Variant.SLCT)
        inst = Instance(Variant.SLCT, 2, [Clause.init(0, 1)])
        self.assertTrue(np.allclose(full_hamiltonian(inst), projector))
        swapped = Instance(Variant.SLCT, 2, [Clause.init(1, 0)])
        self.assertTrue(np.allclose(full_hamiltonian(swapped),
                                    embed_operator(projector, [1, 0], [6, 6])))

    def test_operator_above_dense_budget(self):
        _, inst = classical([Gate.X])
        op = full_hamiltonian(inst, dense_budget=16)
        dense = full_hamiltonian(inst)
        v = np.random.RandomState(7).randn(512)
        self.assertTrue(np.allclose(op.matvec(v), dense.dot(v)))

    def test_budget_exceeded(self):
        with self.assertRaises(DimensionBudgetExceeded):
            full_hamiltonian(Instance(Variant.SLCT, 6))
        _, inst = classical([Gate.X, Gate.X])
        with self.assertRaises(DimensionBudgetExceeded):
            nullspace_dim(inst, iterative_budget=10)


class ResidualTestCase(unittest.TestCase):
    """ Expectation values of clause projectors
    """

    def test_half_propagated(self):
        # |0>|a r> sees only half of the propagation kernel
        _, inst = classical([Gate.X])
        state = SparseState.from_mapping([8, 8, 8], {(0, 6, 5): 1.0})
        self.assertAlmostEqual(residual(inst, state), 0.5)
        self.assertAlmostEqual(residual(inst, state.to_dense()), 0.5)
        self.assertEqual(len(term_residuals(inst, state)), 3)

    def test_outside_roles(self):
        # a clock state on the logical qudit lies outside the Init role subspace
        inst = Instance(Variant.SLCT, 2, [Clause.init(0, 1)])
        state = SparseState.from_mapping([6, 6], {(5, 5): 1.0})
        self.assertAlmostEqual(residual(inst, state), 1.0)

    def test_dims_mismatch(self):
        _, inst = classical([Gate.X])
        with self.assertRaises(DimensionMismatch):
            residual(inst, SparseState.from_mapping([8, 8], {(0, 0): 1.0}))
        with self.assertRaises(DimensionMismatch):
            residual(inst, np.ones(8))


class EigensolverTestCase(unittest.TestCase):
    """ Restricted dense and Lanczos paths agree
    """

    def test_dense_and_iterative_agree(self):
        _, inst = classical([Gate.X, Gate.X])
        dense = spectral_report(inst, dense_budget=100)
        iterative = spectral_report(inst, dense_budget=16)
        self.assertEqual(dense.method, 'dense')
        self.assertEqual(iterative.method, 'iterative')
        self.assertTrue(dense.restricted)
        self.assertEqual(dense.nullspace_dim, 0)
        self.assertGreater(dense.min_eigenvalue, 1e-4)
        self.assertAlmostEqual(dense.min_eigenvalue, iterative.min_eigenvalue, places=6)

    def test_compiled_no_instances_gapped(self):
        no_circuits = [
            classical([Gate.X, Gate.X])[0],
            classical([Gate.X, Gate.X, Gate.X, Gate.X])[0],
            Circuit(CircuitKind.QUANTUM, 1, 0, 0, [(Gate.H, (0,))]),
            Circuit(CircuitKind.QUANTUM, 1, 0, 0, [(Gate.H, (0,)), (Gate.H, (0,))]),
            Circuit(CircuitKind.QUANTUM, 1, 0, 0, [(Gate.H, (0,)), (Gate.HT, (0,))]),
            Circuit(CircuitKind.QUANTUM, 1, 0, 0, [(Gate.HT, (0,)), (Gate.H, (0,)),
                                                   (Gate.HT, (0,)), (Gate.H, (0,))]),
        ]
        for circuit in no_circuits:
            target = (Variant.CLASSICAL_SLCT if circuit.kind == CircuitKind.CLASSICAL
                      else Variant.SLCT)
            report = spectral_report(compile_circuit(circuit, target))
            self.assertEqual(report.nullspace_dim, 0, circuit)
            self.assertGreater(report.min_eigenvalue, 1e-4, circuit)

    def test_no_convergence(self):
        _, inst = classical([Gate.X])
        with patch('qsat_tools.oracle.eigsh') as _eigsh:
            _eigsh.side_effect = ArpackNoConvergence('x', [], [])
            with self.assertRaises(NoConvergence):
                spectral_report(inst, dense_budget=16)

    def test_report_dict(self):
        report = spectral_report(Instance(Variant.SLCT, 1))
        self.assertEqual(SpectralReport(**report.to_dict()), report)


if __name__ == '__main__':
    unittest.main()
