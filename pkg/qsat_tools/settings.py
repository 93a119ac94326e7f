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

"""Run-time settings shared by the solver, the oracle and the command line"""

import json
import os
from copy import copy
from io import open

import logging
qsattools_root_logger = logging.getLogger("qsattools")
qsattools_root_logger.setLevel(logging.WARNING)

logger = logging.getLogger("qsattools.settings")
logger.addHandler(logging.NullHandler())
del logging

SETTINGS_FILE_NAME = 'qsattools.json'

DEFAULT_SETTINGS = {
    'seed': 0,
    'reps': 32,
    'dense_budget': 4096,
    'iterative_budget': 16384,
    'kernel_tolerance': 1e-8,
    'zero_tolerance': 1e-7,
    'probability_floor': 1e-12,
    'padding': 'p',
    'cache_reports': True,
}


def read_settings(path=SETTINGS_FILE_NAME):
    """! Load settings overrides from a local file
    @param path Location of the settings file, `./qsattools.json` by default
    @return Dictionary of overrides, empty when the file is absent or broken
    """
    if os.path.isfile(path):
        logger.debug("reading settings file %s", path)
        try:
            with open(path, "r", encoding="utf-8") as f:
                data = json.load(f)
        except IOError as e:
            logger.exception(e)
            return {}
        except ValueError as e:
            logger.exception(e)
            return {}
        if not isinstance(data, dict):
            logger.warning("Ignoring settings file %s: not a JSON object", path)
            return {}
        return data
    return {}


def load_settings(skip_file=False, path=SETTINGS_FILE_NAME, **overrides):
    """! Merge defaults, the local settings file and explicit overrides

    @param skip_file Do not read the settings file
    @param path Location of the settings file
    @param overrides Explicit values (for example from command line flags); None values are ignored
    @return Complete settings dictionary
    """
    result = copy(DEFAULT_SETTINGS)
    layers = [] if skip_file else [read_settings(path)]
    layers.append(dict((k, v) for k, v in overrides.items() if v is not None))
    for layer in layers:
        for key, value in layer.items():
            if key not in DEFAULT_SETTINGS:
                logger.warning("Ignoring unknown setting '%s'", key)
                continue
            result[key] = value
    return result
