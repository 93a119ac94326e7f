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

from qsat_tools.clauses import (gate_matrix, embed_operator, basis_index, basis_vector,
                                role_projector, build_semidefinite, clause_nullspace,
                                build_projector, reference_projectors, DimensionMismatch,
                                DimensionBudgetExceeded)
from qsat_tools.model import Clause, Gate, Role, Variant

SQRT1_2 = 1.0 / np.sqrt(2.0)

ROLES = {
    Variant.SLCT: (Role.LOGICAL, Role.CLOCK),
    Variant.WITNESSED_SLCT: (Role.LOGICAL, Role.WITNESS, Role.CLOCK),
    Variant.CLASSICAL_SLCT: (Role.LOGICAL, Role.AUX, Role.CLOCK),
    Variant.LCT: (Role.LOGICAL, Role.ENDPOINT, Role.CLOCK),
}


def vector(size, entries):
    result = np.zeros(size, dtype=complex)
    for index, value in entries.items():
        result[index] = value
    return result


class GateTestCase(unittest.TestCase):
    """ Gate unitaries
    """

    def test_unitary(self):
        for gate in Gate.ARITY:
            u = gate_matrix(gate)
            self.assertEqual(u.shape, (2 ** Gate.ARITY[gate],) * 2)
            self.assertTrue(np.allclose(u.dot(u.conj().T), np.eye(u.shape[0])))

    def test_hadamard(self):
        self.assertTrue(np.allclose(gate_matrix(Gate.H), SQRT1_2 * np.array([[1, 1], [1, -1]])))

    def test_ht_is_h_then_t_product(self):
        t = np.diag([1, np.exp(0.25j * np.pi)])
        self.assertTrue(np.allclose(gate_matrix(Gate.HT), gate_matrix(Gate.H).dot(t)))

    def test_hhcnot_on_zero(self):
        out = gate_matrix(Gate.HHCNOT).dot(vector(4, {0: 1}))
        self.assertTrue(np.allclose(out, 0.5 * np.ones(4)))

    def test_classical_gates(self):
        x = gate_matrix(Gate.X)
        self.assertTrue(np.allclose(x.dot(x), np.eye(2)))
        out = gate_matrix(Gate.XXXTOFFOLI).dot(vector(8, {6: 1}))
        self.assertTrue(np.allclose(out, vector(8, {0: 1})))

    def test_unknown_gate(self):
        with self.assertRaises(ValueError):
            gate_matrix('CZ')


class EmbedTestCase(unittest.TestCase):

    def test_reversed_targets(self):
        a = np.arange(4.0).reshape(2, 2)
        b = np.eye(3)
        self.assertTrue(np.allclose(embed_operator(np.kron(a, b), [1, 0], [3, 2]),
                                    np.kron(b, a)))


class BasisTestCase(unittest.TestCase):

    def test_labels(self):
        self.assertEqual(basis_index(Variant.SLCT, '?'), 2)
        self.assertEqual(basis_index(Variant.SLCT, 'd'), 5)
        self.assertEqual(basis_index(Variant.WITNESSED_SLCT, 'w1'), 4)
        self.assertEqual(basis_index(Variant.CLASSICAL_SLCT, 'r'), 5)
        self.assertEqual(basis_index(Variant.LCT, 'e1'), 4)
        self.assertEqual(basis_index(Variant.LCT, 'a01'), 10)
        self.assertEqual(basis_index(Variant.LCT, 'd11'), 16)

    def test_basis_vector(self):
        v = basis_vector(Variant.LCT, 'r')
        self.assertEqual(v.shape, (17,))
        self.assertEqual(int(np.argmax(np.abs(v))), 5)
        self.assertAlmostEqual(np.linalg.norm(v), 1.0)

    def test_bad_labels(self):
        with self.assertRaises(DimensionMismatch):
            basis_index(Variant.SLCT, 'w0')
        with self.assertRaises(DimensionMismatch):
            basis_index(Variant.SLCT, 'a01')

    def test_role_projectors_partition(self):
        for variant, roles in ROLES.items():
            total = sum(role_projector(variant, role) for role in roles)
            self.assertTrue(np.allclose(total, np.eye(total.shape[0])), variant)

    def test_missing_role(self):
        with self.assertRaises(DimensionMismatch):
            role_projector(Variant.SLCT, Role.ENDPOINT)


class ProjectorTestCase(unittest.TestCase):
    """ Clause operators are orthogonal projectors with the expected kernels
    """

    def in_kernel(self, clause, variant, v):
        p = build_projector(clause, variant)
        return np.linalg.norm(p.dot(v)) < 1e-9

    def test_projector_properties(self):
        cases = [
            (Clause.init(0, 1), Variant.SLCT, False),
            (Clause.out(0, 1), Variant.CLASSICAL_SLCT, False),
            (Clause.prop(Gate.HT, [0], 1, 2), Variant.SLCT, False),
            (Clause.init_copy(0, 1, 2), Variant.WITNESSED_SLCT, False),
            (Clause.prop(Gate.HHCNOT, [0, 1], 2, 3), Variant.LCT, True),
            (Clause.prop(Gate.XXXTOFFOLI, [0, 1, 2], 3, 4), Variant.CLASSICAL_SLCT, True),
        ]
        for clause, variant, restricted in cases:
            p = build_projector(clause, variant, restricted=restricted)
            self.assertTrue(np.allclose(p.dot(p), p))
            self.assertTrue(np.allclose(p, p.conj().T))
            o = build_semidefinite(clause, variant, restricted=restricted)
            self.assertGreater(np.linalg.eigvalsh(o).min(), -1e-9)

    def test_kernel_orthonormal(self):
        for clause, variant in ((Clause.prop(Gate.H, [0], 1, 2), Variant.SLCT),
                                (Clause.init_pair(0, 1, 2), Variant.CLASSICAL_SLCT)):
            k = clause_nullspace(clause, variant)
            self.assertTrue(np.allclose(k.conj().T.dot(k), np.eye(k.shape[1])))
            p = build_projector(clause, variant)
            self.assertTrue(np.allclose(p.dot(k), 0))

    def test_slct_init(self):
        clause = Clause.init(0, 1)
        self.assertEqual(clause_nullspace(clause, Variant.SLCT).shape, (36, 4))
        for index in (5, 11, 17, 4):
            self.assertTrue(self.in_kernel(clause, Variant.SLCT, vector(36, {index: 1})))
        # |1>|a> and |0>|r>
        for index in (10, 3):
            self.assertFalse(self.in_kernel(clause, Variant.SLCT, vector(36, {index: 1})))

    def test_slct_prop(self):
        clause = Clause.prop(Gate.H, [0], 1, 2)
        self.assertEqual(clause_nullspace(clause, Variant.SLCT).shape[1], 8)
        # |0>|rr>, |?>|rr>, |?>|ar>
        for index in (21, 93, 99):
            self.assertTrue(self.in_kernel(clause, Variant.SLCT, vector(216, {index: 1})))
        # |0>|ar> + H|0>|da>
        work = vector(216, {27: SQRT1_2, 34: 0.5, 70: 0.5})
        self.assertTrue(self.in_kernel(clause, Variant.SLCT, work))
        # |?>|dd> and a lone |0>|ar>
        for index in (107, 27):
            self.assertFalse(self.in_kernel(clause, Variant.SLCT, vector(216, {index: 1})))

    def test_slct_out(self):
        clause = Clause.out(0, 1)
        self.assertEqual(clause_nullspace(clause, Variant.SLCT).shape[1], 5)
        self.assertTrue(self.in_kernel(clause, Variant.SLCT, vector(36, {10: 1})))
        self.assertFalse(self.in_kernel(clause, Variant.SLCT, vector(36, {4: 1})))
        self.assertFalse(self.in_kernel(clause, Variant.SLCT, vector(36, {5: 1})))

    def test_init_pair(self):
        clause = Clause.init_pair(0, 1, 2)
        bell = vector(512, {30: SQRT1_2, 102: SQRT1_2})
        self.assertTrue(self.in_kernel(clause, Variant.CLASSICAL_SLCT, bell))
        self.assertFalse(self.in_kernel(clause, Variant.CLASSICAL_SLCT, vector(512, {30: 1})))

    def test_init_copy(self):
        clause = Clause.init_copy(0, 1, 2)
        # |0>|w0>|a> and |1>|w1>|a>
        for index in (30, 102):
            self.assertTrue(self.in_kernel(clause, Variant.WITNESSED_SLCT,
                                           vector(512, {index: 1})))
        # |1>|w0>|a>
        self.assertFalse(self.in_kernel(clause, Variant.WITNESSED_SLCT, vector(512, {94: 1})))

    def test_lct_init_restricted(self):
        clause = Clause.init(0, 1, endpoint=2)
        p = build_projector(clause, Variant.LCT, restricted=True)
        self.assertEqual(p.shape, (72, 72))
        bell = vector(72, {8: SQRT1_2, 13: SQRT1_2})
        self.assertLess(np.linalg.norm(p.dot(bell)), 1e-9)
        self.assertGreater(np.linalg.norm(p.dot(vector(72, {8: 1}))), 0.1)

    def test_budget(self):
        clause = Clause.prop(Gate.HHCNOT, [0, 1], 2, 3)
        with self.assertRaises(DimensionBudgetExceeded):
            build_semidefinite(clause, Variant.LCT)
        self.assertEqual(build_semidefinite(clause, Variant.LCT, restricted=True).shape,
                         (1296, 1296))

    def test_dimension_mismatch(self):
        with self.assertRaises(DimensionMismatch):
            build_projector(Clause.init(0, 1), Variant.QUBIT)
        with self.assertRaises(DimensionMismatch):
            build_projector(Clause.init(0, 1), Variant.LCT)
        with self.assertRaises(DimensionMismatch):
            build_projector(Clause.prop(Gate.X, [0], 1, 2), Variant.SLCT)


class ReferenceProjectorTestCase(unittest.TestCase):

    @staticmethod
    def in_ring(value):
        """4 value = a + i b + sqrt2 c + i sqrt2 d for small integers"""
        for part in (4 * value.real, 4 * value.imag):
            if not any(abs(part - c * np.sqrt(2) - round(part - c * np.sqrt(2))) < 1e-9
                       for c in range(-8, 9)):
                return False
        return True

    def test_entries(self):
        for variant in (Variant.SLCT, Variant.CLASSICAL_SLCT, Variant.LCT):
            for name, matrix in reference_projectors(variant).items():
                self.assertTrue(all(self.in_ring(z) for z in np.ravel(matrix)),
                                "%s %s" % (variant, name))

    def test_single_site_projectors(self):
        refs = reference_projectors(Variant.LCT)
        self.assertTrue(np.allclose(refs['ready'] + refs['active'] + refs['dead'],
                                    refs['clock']))
        self.assertTrue(np.allclose(refs['defined'] + refs['undefined'], refs['logical']))
        self.assertEqual(int(np.trace(refs['active']).real), 4)
        self.assertIn('bell', refs)
        self.assertIn('aux', reference_projectors(Variant.CLASSICAL_SLCT))
        self.assertIn('work_XXXTOFFOLI', reference_projectors(Variant.CLASSICAL_SLCT))


if __name__ == '__main__':
    unittest.main()
