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
import os
import tempfile
import json
from mock import patch

from qsat_tools.settings import read_settings, load_settings, DEFAULT_SETTINGS


class SettingsTestCase(unittest.TestCase):
    """ Settings file handling and override layering
    """

    def setUp(self):
        self.path = os.path.join(tempfile.mkdtemp(), 'qsattools.json')

    def write(self, content):
        with open(self.path, 'w') as f:
            f.write(content)

    def test_missing_file(self):
        self.assertEqual(read_settings(self.path), {})
        self.assertEqual(load_settings(path=self.path), DEFAULT_SETTINGS)

    def test_file_overrides_defaults(self):
        self.write(json.dumps({'reps': 8, 'padding': 'p2'}))
        settings = load_settings(path=self.path)
        self.assertEqual(settings['reps'], 8)
        self.assertEqual(settings['padding'], 'p2')
        self.assertEqual(settings['seed'], DEFAULT_SETTINGS['seed'])

    def test_explicit_overrides_win(self):
        self.write(json.dumps({'reps': 8, 'seed': 3}))
        settings = load_settings(path=self.path, reps=2, seed=None)
        self.assertEqual(settings['reps'], 2)
        self.assertEqual(settings['seed'], 3)

    def test_skip_file(self):
        self.write(json.dumps({'reps': 8}))
        self.assertEqual(load_settings(skip_file=True, path=self.path)['reps'],
                         DEFAULT_SETTINGS['reps'])

    def test_broken_json(self):
        self.write('{"reps": ')
        with patch('qsat_tools.settings.logger') as _logger:
            self.assertEqual(read_settings(self.path), {})
            self.assertTrue(_logger.exception.called)

    def test_not_an_object(self):
        self.write('[1, 2, 3]')
        with patch('qsat_tools.settings.logger') as _logger:
            self.assertEqual(read_settings(self.path), {})
            self.assertTrue(_logger.warning.called)

    def test_unknown_key_ignored(self):
        self.write(json.dumps({'colour': 'blue'}))
        with patch('qsat_tools.settings.logger') as _logger:
            settings = load_settings(path=self.path)
            self.assertNotIn('colour', settings)
            self.assertTrue(_logger.warning.called)

    def test_defaults_not_mutated(self):
        load_settings(skip_file=True, reps=1)
        self.assertEqual(DEFAULT_SETTINGS['reps'], 32)


if __name__ == '__main__':
    unittest.main()
