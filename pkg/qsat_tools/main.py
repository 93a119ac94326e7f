#!/usr/bin/env python

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

import sys
import json
import argparse
from io import open

from .settings import load_settings
from .model import parse_instance, serialize, export_dot, Variant
from .analyzer import analyze
from .deciders import decide
from .compiler import parse_circuit, compile_circuit
from .combinators import parse_combo, combine, decide_combo, Op
from .qubitize import qubitize_instance, dequbitize, uniqueness_scan
from .oracle import spectral_report, SpectralReport
from .report_database import ReportDatabase, LOCAL_REPORT_DATABASE, instance_key

import logging
logger = logging.getLogger("qsattools.main")
logger.addHandler(logging.NullHandler())
del logging

EXIT_ACCEPT = 0
EXIT_REJECT = 1
EXIT_ERROR = 2


def get_version():
    """! Get qsat-tools Python module version string """
    import pkg_resources  # part of setuptools
    return pkg_resources.require("qsat-tools")[0].version


def _read(path):
    with open(path, encoding="utf-8") as f:
        return f.read()


def load_problem(path):
    """! Instance or combination stored in a JSON file"""
    text = _read(path)
    try:
        doc = json.loads(text)
    except ValueError:
        doc = None
    if isinstance(doc, dict) and 'op' in doc:
        return parse_combo(text)
    return parse_instance(text)


def print_json(obj):
    print(json.dumps(obj, indent=4, sort_keys=True))


def print_rows(columns, rows):
    from prettytable import PrettyTable
    pt = PrettyTable(columns)
    pt.align = 'l'
    for row in rows:
        pt.add_row(row)
    print(pt.get_string())


def print_version(args, settings):
    print(get_version())


def decide_command(args, settings):
    problem = load_problem(args.instance)
    if hasattr(problem, 'op'):
        result = decide_combo(problem, reps=settings['reps'], seed=settings['seed'])
        if args.table:
            print_rows(['part', 'accept'],
                       [[p.get('side', p.get('qudits')), p['accept']] for p in result.parts])
        else:
            print_json({'accept': result.accept, 'parts': result.parts})
        return EXIT_ACCEPT if result.accept else EXIT_REJECT

    decision = decide(problem, witness=args.witness, reps=settings['reps'],
                      seed=settings['seed'], floor=settings['probability_floor'])
    if args.table:
        verdict = decision.verdict
        print_rows(['decision', 'rule', 'evidence', 'tasks'],
                   [[verdict['decision'], verdict['rule'] or '',
                     ' '.join(str(e) for e in verdict['evidence']), len(verdict['tasks'])]])
        if decision.trace:
            print_rows(['task', 'rep', 'check', 'clauses', 'probability', 'outcome'],
                       [[c.get('task', ''), c.get('rep', ''), c['check'],
                         ' '.join(str(i) for i in c.get('clauses', ())),
                         c.get('probability', ''), c['outcome']] for c in decision.trace])
    else:
        print_json(decision.to_dict())
    return EXIT_ACCEPT if decision.accept else EXIT_REJECT


def analyze_command(args, settings):
    verdict = analyze(load_problem(args.instance), args.witness)
    print_json(verdict.to_dict())
    return EXIT_REJECT if verdict.decision == 'unsat' else EXIT_ACCEPT


def compile_command(args, settings):
    circuit = parse_circuit(_read(args.circuit))
    print(serialize(compile_circuit(circuit, args.target)))


def _report_database(settings, args):
    if args.no_cache or not settings['cache_reports']:
        return None
    return ReportDatabase([LOCAL_REPORT_DATABASE])


def oracle_command(args, settings):
    problem = load_problem(args.instance)
    # the stored report is only valid under the same budgets and tolerances
    params = dict((name, settings[name]) for name in
                  ('dense_budget', 'iterative_budget', 'kernel_tolerance', 'zero_tolerance'))
    db = _report_database(settings, args)
    key = instance_key(problem, **params)
    cached = db.get(key) if db is not None else None
    if cached is not None:
        logger.debug("using stored report %s", key)
        report = SpectralReport(**cached)
    else:
        report = spectral_report(problem, **params)
        if db is not None:
            db.add('oracle', key, report.to_dict(), permanent=True)
    if args.table:
        print_rows(['field', 'value'], sorted(report.to_dict().items()))
    else:
        print_json(report.to_dict())
    return EXIT_ACCEPT if report.nullspace_dim > 0 else EXIT_REJECT


def combine_command(args, settings):
    left = parse_instance(_read(args.left))
    right = parse_instance(_read(args.right))
    print_json(combine(args.op, left, right).to_dict())


def qubitize_command(args, settings):
    inst = parse_instance(_read(args.instance))
    if args.reverse:
        print(serialize(dequbitize(inst)))
    else:
        print(serialize(qubitize_instance(inst, args.padding or settings['padding'])))


def export_dot_command(args, settings):
    print(export_dot(parse_instance(_read(args.instance))), end='')


def gadget_scan_command(args, settings):
    db = _report_database(settings, args)
    scan = uniqueness_scan(database=db)
    print_json(scan.to_dict())
    return EXIT_ACCEPT if len(scan.zero_placements) == 1 else EXIT_REJECT


def parse_cli(to_parse):
    """! Parse the command line

    @return Return a namespace that contains:
     * command - python function to run
     * skip_settings - bool indicating to skip the local settings file
     * debug - turn on debug logging
    """
    parser = argparse.ArgumentParser(prog='qsat')
    parser.set_defaults(command=None)
    parser.add_argument(
        '--skip-settings', dest='skip_settings', default=False,
        action="store_true",
        help='skip parsing and interpretation of the settings file,'
        ' `./qsattools.json`')
    parser.add_argument(
        '-d', '--debug', dest='debug', default=False, action="store_true",
        help='outputs extra debug information')
    parser.add_argument(
        '--version', dest='command', action='store_const', const=print_version,
        help='print package version and exit')

    commands = parser.add_subparsers(title='sub commands', dest='subcommand')

    def with_table(sub):
        sub.add_argument('--table', default=False, action='store_true',
                         help='print a table instead of JSON')

    sub = commands.add_parser('decide', help='decide an instance or combination')
    sub.set_defaults(command=decide_command)
    sub.add_argument('--instance', required=True, metavar='FILE')
    sub.add_argument('--witness', metavar='BITS',
                     help='classical witness for WitnessedSLCT, searched when omitted')
    sub.add_argument('--seed', type=int)
    sub.add_argument('--reps', type=int)
    with_table(sub)

    sub = commands.add_parser('analyze', help='print the structural verdict of an instance')
    sub.set_defaults(command=analyze_command)
    sub.add_argument('--instance', required=True, metavar='FILE')
    sub.add_argument('--witness', metavar='BITS')

    sub = commands.add_parser('compile', help='compile a circuit into an instance')
    sub.set_defaults(command=compile_command)
    sub.add_argument('--circuit', required=True, metavar='FILE')
    sub.add_argument('--target', required=True, choices=Variant.QUDIT)

    sub = commands.add_parser('oracle', help='spectral report of an instance or combination')
    sub.set_defaults(command=oracle_command)
    sub.add_argument('--instance', required=True, metavar='FILE')
    sub.add_argument('--budget', dest='dense_budget', type=int,
                     help='largest dimension solved densely')
    sub.add_argument('--iterative-budget', dest='iterative_budget', type=int,
                     help='largest dimension solved by Lanczos')
    sub.add_argument('--no-cache', dest='no_cache', default=False, action='store_true',
                     help='neither read nor store reports')
    with_table(sub)

    sub = commands.add_parser('combine', help='direct product or sum of two instances')
    sub.set_defaults(command=combine_command)
    sub.add_argument('--op', required=True, choices=(Op.PRODUCT, Op.SUM))
    sub.add_argument('--left', required=True, metavar='FILE')
    sub.add_argument('--right', required=True, metavar='FILE')

    sub = commands.add_parser('qubitize', help='map an instance to qubits or back')
    sub.set_defaults(command=qubitize_command)
    sub.add_argument('--instance', required=True, metavar='FILE')
    sub.add_argument('--padding', choices=('p', 'p2'))
    sub.add_argument('--reverse', default=False, action='store_true',
                     help='map a Qubit instance back to its qudit variant')

    sub = commands.add_parser('export-dot', help='Graphviz rendering of an instance')
    sub.set_defaults(command=export_dot_command)
    sub.add_argument('--instance', required=True, metavar='FILE')

    sub = commands.add_parser('gadget-scan', help='run the two-copy H_4to2 placement scan')
    sub.set_defaults(command=gadget_scan_command)
    sub.add_argument('--no-cache', dest='no_cache', default=False, action='store_true',
                     help='do not record the result')

    args = parser.parse_args(to_parse)
    if args.command is None:
        parser.error('a sub command is required')
    return args


def start_logging():
    try:
        import colorlog
        colorlog.basicConfig(
            format='%(log_color)s%(levelname)s%(reset)s:%(name)s:%(message)s')
    except ImportError:
        import logging
        logging.basicConfig()
        del logging


def _settings(args):
    overrides = dict((key, getattr(args, key, None))
                     for key in ('seed', 'reps', 'dense_budget', 'iterative_budget'))
    return load_settings(skip_file=args.skip_settings, **overrides)


def qsat_main(argv=None):
    """! Function used to drive CLI (command line interface) application
    @return Function exits with 0 on accept or success, 1 on reject, 2 on bad input
    """
    start_logging()

    args = parse_cli(sys.argv[1:] if argv is None else argv)

    import logging
    root_logger = logging.getLogger("qsattools")
    if args.debug:
        root_logger.setLevel(logging.DEBUG)
    else:
        root_logger.setLevel(logging.INFO)
    del logging

    settings = _settings(args)
    logger.debug("settings: %r", settings)

    try:
        ret_code = args.command(args, settings)
    except (ValueError, IOError) as e:
        logger.error("%s", e)
        ret_code = EXIT_ERROR
    if not ret_code:
        ret_code = 0

    logger.debug("Return code: %d", ret_code)

    sys.exit(ret_code)
