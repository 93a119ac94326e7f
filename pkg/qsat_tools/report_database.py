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

"""Functions that manage the store of computed reports"""

import hashlib
import json
import re
from collections import OrderedDict
from copy import deepcopy
from io import open
from os import makedirs
from os.path import join, dirname
from appdirs import user_data_dir
from fasteners import InterProcessLock

try:
    unicode
except NameError:
    unicode = str


import logging
logger = logging.getLogger("qsattools.report_database")
logger.addHandler(logging.NullHandler())
del logging

LOCAL_REPORT_DATABASE = join(user_data_dir("qsattools"), "reports.json")

DEFAULT_REPORT_DB = {
    u'oracle': {},
    u'gadgets': {},
}

SECTIONS = tuple(DEFAULT_REPORT_DB)


def instance_key(obj, **params):
    """! Store key of an instance or combination

    @details sha256 of the canonical JSON serialization, suffixed with the
    budgets and tolerances the report was computed under
    """
    text = json.dumps(obj.to_dict(), indent=4, sort_keys=True)
    key = hashlib.sha256(text.encode('utf-8')).hexdigest()
    if params:
        key += '@' + ','.join('%s=%s' % (k, params[k]) for k in sorted(params))
    return key


def _overwrite_or_open(db, primary):
    try:
        with open(db, encoding="utf-8") as db_in:
            loaded = json.load(db_in)
        if not isinstance(loaded, dict):
            raise ValueError("Report database is not a JSON object")
        return loaded
    except (IOError, ValueError) as exc:
        if primary:
            logger.warning(
                "Error loading database %s: %s; Recreating", db, str(exc))
            try:
                makedirs(dirname(db))
            except OSError:
                pass
            try:
                with open(db, "w", encoding="utf-8") as out:
                    out.write(unicode(json.dumps(DEFAULT_REPORT_DB)))
            except IOError:
                pass
            return deepcopy(DEFAULT_REPORT_DB)
        else:
            return {}


class ReportDatabase(object):
    """Represents a union of multiple report database files.
    Handles inter-process synchronization of database files.
    """

    key_patterns = {
        'oracle': re.compile(r'^[0-9a-f]{64}(@[0-9A-Za-z_=,.\-]+)?$'),
        'gadgets': re.compile(r'^[0-9A-Za-z_]+$'),
    }

    def __init__(self, database_files, primary_database=None):
        """Construct a ReportDatabase from a series of report database files"""
        self._prim_db = primary_database
        if not self._prim_db and len(database_files) == 1:
            self._prim_db = database_files[0]
        self._dbs = OrderedDict()
        for db in database_files:
            new_db = _overwrite_or_open(db, db == self._prim_db)
            for section in SECTIONS:
                new_db.setdefault(section, {})
            self._dbs[db] = new_db

    def items(self, section='oracle'):
        seen = set()
        for db in self._dbs.values():
            for key, value in db.get(section, {}).items():
                if key not in seen:
                    seen.add(key)
                    yield key, value

    def get(self, key, default=None, section='oracle'):
        """Standard lookup function. Works exactly like a dict"""
        for db in self._dbs.values():
            answer = db.get(section, {}).get(key)
            if answer is not None:
                return answer
        return default

    def _update_db(self):
        if self._prim_db:
            lock = InterProcessLock("%s.lock" % self._prim_db)
            acquired = lock.acquire(blocking=False)
            if not acquired:
                logger.debug("Waiting 60 seconds for file lock")
                acquired = lock.acquire(blocking=True, timeout=60)
            if acquired:
                try:
                    with open(self._prim_db, "w", encoding="utf-8") as out:
                        out.write(unicode(
                            json.dumps(self._dbs[self._prim_db], sort_keys=True)))
                    return True
                finally:
                    lock.release()
            else:
                logger.error("Could not update report database: "
                             "Lock acquire failed after 60 seconds")
                return False
        else:
            logger.error("Can't update report database: "
                         "destination database is ambiguous")
            return False

    def _check_key(self, section, key):
        if section not in self.key_patterns:
            raise ValueError("Unknown report section: %s" % section)
        if not isinstance(key, (str, unicode)) or not self.key_patterns[section].match(key):
            raise ValueError("Invalid %s report key: %r" % (section, key))

    def add(self, section, key, report, permanent=False):
        """Add a report, writing the primary database file when permanent
        @return False when the file could not be written
        """
        self._check_key(section, key)
        target = self._dbs[self._prim_db] if self._prim_db else next(iter(self._dbs.values()))
        target.setdefault(section, {})[key] = report
        if permanent:
            return self._update_db()
        return True

    def remove(self, key, section='oracle', permanent=False):
        """Remove a report from every database; '*' clears the section of the
        primary database
        @return The removed report, or None
        """
        logger.debug("Trying remove of %s", key)
        removed = None
        if key == '*' and self._prim_db:
            self._dbs[self._prim_db][section] = {}
        for db in self._dbs.values():
            if key in db.get(section, {}):
                removed = db[section].pop(key)
        if permanent and (removed is not None or key == '*'):
            self._update_db()
        return removed
