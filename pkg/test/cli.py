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
import json
import os
import shutil
import tempfile
from argparse import Namespace
from io import StringIO

from mock import patch

from qsat_tools.main import qsat_main, oracle_command, EXIT_ACCEPT, EXIT_REJECT, EXIT_ERROR
from qsat_tools.settings import DEFAULT_SETTINGS
from qsat_tools.combinators import direct_product
from qsat_tools.compiler import (Circuit, CircuitKind, compile_circuit, serialize_circuit,
                                 x_equivalent)
from qsat_tools.model import (Instance, Clause, Variant, canonical_unsat, parse_instance,
                              serialize)


class CliTestCase(unittest.TestCase):
    """ Command line entry point
    """

    def setUp(self):
        self.tmp = tempfile.mkdtemp()
        circuit = Circuit(CircuitKind.QUANTUM, 1, 0, 0, x_equivalent(0))
        self.yes = compile_circuit(circuit, Variant.SLCT)
        self.circuit = self.write('circuit.json', serialize_circuit(circuit))
        self.yes_file = self.write('yes.json', serialize(self.yes))
        self.unsat_file = self.write('unsat.json', serialize(canonical_unsat(Variant.SLCT)))
        self.sat = Instance(Variant.SLCT, 2, [Clause.init(0, 1)])
        self.sat_file = self.write('sat.json', serialize(self.sat))

    def tearDown(self):
        shutil.rmtree(self.tmp)

    def write(self, name, text):
        path = os.path.join(self.tmp, name)
        with open(path, 'w') as f:
            f.write(text)
        return path

    def run_main(self, *argv):
        with patch('sys.stdout', new_callable=StringIO) as out:
            with self.assertRaises(SystemExit) as cm:
                qsat_main(['--skip-settings'] + list(argv))
        return cm.exception.code, out.getvalue()

    def test_decide_accept(self):
        code, out = self.run_main('decide', '--instance', self.yes_file)
        self.assertEqual(code, EXIT_ACCEPT)
        result = json.loads(out)
        self.assertTrue(result['accept'])
        self.assertEqual(result['repetitions'], 32)

    def test_decide_reps(self):
        code, out = self.run_main('decide', '--instance', self.yes_file, '--reps', '3')
        self.assertEqual(code, EXIT_ACCEPT)
        self.assertEqual(json.loads(out)['repetitions'], 3)

    def test_decide_reject(self):
        code, out = self.run_main('decide', '--instance', self.unsat_file)
        self.assertEqual(code, EXIT_REJECT)
        result = json.loads(out)
        self.assertFalse(result['accept'])
        self.assertEqual(result['verdict']['rule'], 'single-type-qudits')

    def test_decide_table(self):
        code, out = self.run_main('decide', '--instance', self.yes_file, '--table')
        self.assertEqual(code, EXIT_ACCEPT)
        self.assertIn('decision', out)
        self.assertIn('pass', out)

    def test_decide_combination(self):
        combo = self.write('combo.json', json.dumps(direct_product(self.yes, self.sat).to_dict()))
        code, out = self.run_main('decide', '--instance', combo)
        self.assertEqual(code, EXIT_ACCEPT)
        self.assertEqual(len(json.loads(out)['parts']), 2)

    def test_analyze(self):
        code, out = self.run_main('analyze', '--instance', self.unsat_file)
        self.assertEqual(code, EXIT_REJECT)
        self.assertEqual(json.loads(out)['decision'], 'unsat')
        code, out = self.run_main('analyze', '--instance', self.yes_file)
        self.assertEqual(code, EXIT_ACCEPT)
        self.assertEqual(len(json.loads(out)['tasks']), 1)

    def test_compile(self):
        code, out = self.run_main('compile', '--circuit', self.circuit, '--target', 'SLCT')
        self.assertEqual(code, 0)
        self.assertEqual(parse_instance(out), self.yes)

    def test_oracle_no_cache(self):
        empty = self.write('empty.json', serialize(Instance(Variant.SLCT, 2)))
        code, out = self.run_main('oracle', '--instance', empty, '--no-cache')
        self.assertEqual(code, EXIT_ACCEPT)
        self.assertEqual(json.loads(out)['nullspace_dim'], 36)
        code, out = self.run_main('oracle', '--instance', self.unsat_file, '--no-cache',
                                  '--table')
        self.assertEqual(code, EXIT_REJECT)
        self.assertIn('nullspace_dim', out)

    def test_oracle_stores_report(self):
        with patch('qsat_tools.main.ReportDatabase') as _db:
            _db.return_value.get.return_value = None
            code, out = self.run_main('oracle', '--instance', self.sat_file)
            self.assertEqual(code, EXIT_ACCEPT)
            section, key, report = _db.return_value.add.call_args[0]
            self.assertEqual(section, 'oracle')
            self.assertTrue(key.endswith(
                '@dense_budget=4096,iterative_budget=16384,kernel_tolerance=1e-08,zero_tolerance=1e-07'))
            self.assertEqual(report['nullspace_dim'], 4)
            self.assertEqual(_db.return_value.add.call_args[1], {'permanent': True})

    def test_oracle_key_follows_tolerances(self):
        args = Namespace(instance=self.sat_file, no_cache=False, table=False)
        keys = []
        for zero_tolerance in (1e-7, 1e-5):
            settings = dict(DEFAULT_SETTINGS, zero_tolerance=zero_tolerance)
            with patch('qsat_tools.main.ReportDatabase') as _db, \
                    patch('sys.stdout', new_callable=StringIO):
                _db.return_value.get.return_value = None
                self.assertEqual(oracle_command(args, settings), EXIT_ACCEPT)
                keys.append(_db.return_value.get.call_args[0][0])
                self.assertEqual(_db.return_value.add.call_args[0][1], keys[-1])
        self.assertNotEqual(keys[0], keys[1])
        self.assertTrue(keys[1].endswith('zero_tolerance=1e-05'))
        self.assertEqual(keys[0].split('@')[0], keys[1].split('@')[0])

    def test_oracle_uses_stored_report(self):
        stored = {'dimension': 36, 'nullspace_dim': 7, 'min_eigenvalue': 0.0, 'gap': None,
                  'method': 'dense', 'restricted': False, 'exact': True}
        with patch('qsat_tools.main.ReportDatabase') as _db:
            _db.return_value.get.return_value = stored
            code, out = self.run_main('oracle', '--instance', self.sat_file)
            self.assertEqual(code, EXIT_ACCEPT)
            self.assertEqual(json.loads(out), stored)
            self.assertFalse(_db.return_value.add.called)

    def test_combine(self):
        code, out = self.run_main('combine', '--op', 'sum', '--left', self.sat_file,
                                  '--right', self.unsat_file)
        self.assertEqual(code, 0)
        result = json.loads(out)
        self.assertEqual(result['op'], 'sum')
        self.assertEqual(parse_instance(json.dumps(result['left'])), self.sat)

    def test_qubitize_and_back(self):
        code, out = self.run_main('qubitize', '--instance', self.sat_file, '--padding', 'p2')
        self.assertEqual(code, 0)
        qubits = parse_instance(out)
        self.assertEqual(qubits.variant, Variant.QUBIT)
        self.assertEqual(qubits.num_qudits, 32)
        code, out = self.run_main('qubitize', '--instance', self.write('q.json', out),
                                  '--reverse')
        self.assertEqual(code, 0)
        self.assertEqual(parse_instance(out).clauses, (Clause.init(0, 16),))

    def test_export_dot(self):
        code, out = self.run_main('export-dot', '--instance', self.unsat_file)
        self.assertEqual(code, 0)
        self.assertTrue(out.startswith('digraph qsat {'))
        self.assertIn('red', out)

    def test_bad_input(self):
        broken = self.write('broken.json', '{"variant": ')
        code, _ = self.run_main('decide', '--instance', broken)
        self.assertEqual(code, EXIT_ERROR)
        code, _ = self.run_main('decide', '--instance', os.path.join(self.tmp, 'missing.json'))
        self.assertEqual(code, EXIT_ERROR)
        code, _ = self.run_main('compile', '--circuit', self.yes_file, '--target', 'SLCT')
        self.assertEqual(code, EXIT_ERROR)

    def test_no_command(self):
        with patch('sys.stderr', new_callable=StringIO):
            with self.assertRaises(SystemExit) as cm:
                qsat_main(['--skip-settings'])
        self.assertEqual(cm.exception.code, 2)


if __name__ == '__main__':
    unittest.main()
