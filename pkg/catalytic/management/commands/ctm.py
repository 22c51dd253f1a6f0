import logging
from pathlib import Path

from django.core.management.base import BaseCommand, CommandError
from rest_framework.exceptions import ValidationError

from catalytic import ecc, oracle, reports, serializers
from catalytic.bits import check_bits
from catalytic.coins import parse_coins, seeded_bits, take
from catalytic.compressor import GENERAL, POLYTIME, Compressor, StructuredTape, load_params
from catalytic.confgraph import build_explicit_graph
from catalytic.conf import lab_settings
from catalytic.exceptions import CatalyticError
from catalytic.hashprg import gamma_recurrence, pairwise_independence_audit, random_prg
from catalytic.machine import check_input, load_machine, render_machine, validate
from catalytic.simulator import (
    default_horizon, run, tau_rows, verify_avg_r, verify_avg_tau, verify_bp_delta_eps,
    verify_r_delta_eps,
)
from catalytic.suite import run_suite


def rational(text):
    try:
        return serializers.parse_rational(text)
    except ValidationError as exc:
        raise CommandError(f'{text!r}: {exc.detail[0]}', returncode=2)


class Command(BaseCommand):
    help = 'Catalytic machine lab: simulate, traverse, compress and verify small machines'

    def add_arguments(self, parser):
        subparsers = parser.add_subparsers(dest='action', required=True)

        def machine_command(name, help_text):
            sub = subparsers.add_parser(name, help=help_text)
            sub.add_argument('machine', help='Path to a .ctm file or bundled:<name>')
            sub.add_argument('--input', default='1', help='Input bitstring')
            self.add_common(sub)
            return sub

        validate_parser = machine_command('validate', 'Check a machine definition and compute d_M')
        validate_parser.add_argument('--inputs', nargs='*', help='Inputs used for d_M')

        run_parser = machine_command('run', 'Run one path, or tabulate every tau exactly')
        run_parser.add_argument('--tau', default='all', help='Catalytic contents or "all"')
        run_parser.add_argument('--coins', default='seeded:0', help='hex, bits:<01..> or seeded:N')
        run_parser.add_argument('--expected', type=int, choices=(0, 1), default=1)

        graph_parser = machine_command('graph', 'Build an explicit configuration graph')
        graph_parser.add_argument('--tau', help='Restrict to configurations reachable from start_tau')
        graph_parser.add_argument('--layered', type=int, help='Number of levels below the top')

        oracle_parser = machine_command('oracle', 'Exact reach probabilities and tau^beta graphs')
        oracle_parser.add_argument('--tau', required=True)
        oracle_parser.add_argument('--beta', default='1/2')

        prg_parser = subparsers.add_parser('prg', help='Hash family audits and PRG error recurrence')
        prg_parser.add_argument('prg_action', choices=('audit', 'recurrence'))
        prg_parser.add_argument('machine', nargs='?')
        prg_parser.add_argument('--input', default='1')
        prg_parser.add_argument('--tau')
        prg_parser.add_argument('--m', type=int, default=3)
        prg_parser.add_argument('--l', type=int, default=8)
        prg_parser.add_argument('--threshold', default='1/8')
        prg_parser.add_argument('--alpha')
        self.add_common(prg_parser)

        ecc_parser = subparsers.add_parser('ecc', help='BCH audit, encode, decode and wrap')
        ecc_parser.add_argument('ecc_action', choices=('audit', 'encode', 'decode', 'wrap'))
        ecc_parser.add_argument('word', nargs='?', help='Message, codeword or machine for wrap')
        ecc_parser.add_argument('--c', type=int)
        ecc_parser.add_argument('--e', type=int, default=1)
        ecc_parser.add_argument('--input', default='1')
        ecc_parser.add_argument('--delta', default='1')
        ecc_parser.add_argument('--no-cross-check', action='store_true')
        self.add_common(ecc_parser)

        compress_parser = machine_command('compress', 'Run F on a structured tape, or R on a compressed one')
        compress_parser.add_argument('--tape', help='Tape file; a seeded random tape otherwise')
        compress_parser.add_argument('--tau', help='Catalytic contents of the random tape')
        compress_parser.add_argument('--mode', choices=(GENERAL, POLYTIME), default=GENERAL)
        compress_parser.add_argument('--restore', action='store_true', help='Apply R instead of F')

        verify_parser = machine_command('verify-class', 'Exact class membership check over every tau')
        verify_parser.add_argument('--class', dest='klass', required=True,
                                   choices=('bp', 'avg-r', 'avg-tau', 'r'))
        verify_parser.add_argument('--expected', type=int, choices=(0, 1), default=1)
        verify_parser.add_argument('--no-input', help='No-instance for --class r')
        verify_parser.add_argument('--delta', default='1/2')
        verify_parser.add_argument('--eps', default='1/4')
        verify_parser.add_argument('--e', default='1')
        verify_parser.add_argument('--rows', action='store_true', help='Print one row per tau')

        suite_parser = subparsers.add_parser('suite', help='Run the end-to-end checks')
        suite_parser.add_argument('--only', nargs='*')
        suite_parser.add_argument('--pdf', help='Also write a PDF summary here')
        self.add_common(suite_parser)

    def add_common(self, parser):
        parser.add_argument('--horizon', type=int)
        parser.add_argument('--params', help='preset:desk, preset:paper or a JSON file')
        parser.add_argument('--seed', type=int, default=0)
        parser.add_argument('--out', help='Directory for data files')
        parser.add_argument('--jobs', type=int)
        parser.add_argument('--format', choices=reports.FORMATS)

    def handle(self, *args, **options):
        if options['verbosity'] >= 2:
            level = logging.DEBUG if options['verbosity'] >= 3 else logging.INFO
            logging.getLogger('catalytic').setLevel(level)
        self.fmt = options.get('format') or lab_settings.REPORT_FORMAT
        self.out = Path(options['out']) if options.get('out') else None
        action = options['action'].replace('-', '_')
        try:
            getattr(self, f'handle_{action}')(options)
        except CatalyticError as exc:
            raise CommandError(f'{type(exc).__name__}: {exc}', returncode=exc.exit_code)

    # Output helpers

    def emit(self, title, data, rows=None):
        self.stdout.write(reports.render(title, data, self.fmt, rows), ending='')

    def write_file(self, name, text):
        if self.out is None:
            return
        self.out.mkdir(parents=True, exist_ok=True)
        (self.out / name).write_text(text, encoding='utf-8')
        self.stdout.write(self.style.SUCCESS(f'wrote {self.out / name}'))

    def fail_unless(self, passed, what):
        if not passed:
            raise CommandError(f'{what} failed.', returncode=1)

    def load(self, options):
        machine = load_machine(options['machine'])
        check_input(options['input'])
        return machine

    # Subcommands

    def handle_validate(self, options):
        machine = load_machine(options['machine'])
        report = validate(machine, options.get('inputs') or None)
        self.emit(f'validate {machine.name}', serializers.ValidationReportSerializer(report).data)
        self.fail_unless(report.ok, 'Validation')

    def handle_run(self, options):
        machine = self.load(options)
        x = options['input']
        if options['tau'] != 'all':
            tau = check_bits(options['tau'], machine.c, 'tau')
            outcome = run(machine, x, tau, parse_coins(options['coins']), options['horizon'])
            self.emit(f'run {machine.name} x={x} tau={tau}',
                      serializers.RunOutcomeSerializer(outcome).data)
            return
        horizon, rows = tau_rows(machine, x, options['expected'], options['horizon'], options['jobs'])
        data = serializers.TauRowSerializer(rows, many=True).data
        self.emit(f'run {machine.name} x={x} every tau', {'horizon': horizon, 'settings': len(rows)}, data)
        self.write_file(f'{machine.name}-rows.tsv', reports.render_tsv(data))

    def handle_graph(self, options):
        machine = self.load(options)
        tau = options.get('tau')
        if tau is not None:
            check_bits(tau, machine.c, 'tau')
        graph = build_explicit_graph(machine, options['input'], options.get('layered'), tau)
        stats = serializers.GraphStatsSerializer(graph.stats()).data
        self.emit(f'graph {machine.name} x={options["input"]}', stats)
        self.write_file(f'{machine.name}-edges.txt', ''.join(line + '\n' for line in graph.edge_lines()))
        self.write_file(f'{machine.name}-stats.txt', reports.render('graph stats', stats))

    def handle_oracle(self, options):
        machine = self.load(options)
        x, tau = options['input'], check_bits(options['tau'], machine.c, 'tau')
        beta = rational(options['beta'])
        horizon = options['horizon'] or default_horizon(machine, len(x))
        table = oracle.reach_probabilities(machine, x, tau, horizon)
        graph = oracle.tau_beta_graph(machine, x, tau, beta, horizon, table)
        data = {
            'tau': tau,
            'beta': f'{beta.numerator}/{beta.denominator}',
            'horizon': horizon,
            'tau_beta_nodes': len(oracle.tau_beta_nodes(machine, x, tau, beta, horizon, table)),
            'graph_vertices': len(graph.vertices),
            'bottom_edges': graph.bottom_edges,
            'exit_probability': str(oracle.exit_probability(graph)) if graph.vertices else '-',
            'average_size': str(oracle.avg_tau_beta_size(machine, x, beta, horizon)),
            'average_bound': str(oracle.avg_size_bound(machine, beta)),
        }
        self.emit(f'oracle {machine.name} x={x}', data)
        self.write_file(f'{machine.name}-{tau}-reach.csv',
                        ''.join(line + '\n' for line in table.export_lines()))

    def handle_prg(self, options):
        if options['prg_action'] == 'audit':
            report = pairwise_independence_audit(options['m'])
            self.emit(f'pairwise independence m={options["m"]}', {
                'family_size': report.family_size,
                'constraints': report.constraints,
                'failures': report.failures,
                'holds': report.holds,
            })
            self.fail_unless(report.holds, 'Pairwise independence audit')
            return
        if not options.get('machine'):
            raise CommandError('prg recurrence needs a machine.', returncode=2)
        machine = load_machine(options['machine'])
        x = check_input(options['input'])
        tau = check_bits(options.get('tau') or '0' * machine.c, machine.c, 'tau')
        prg = random_prg(options['m'], options['l'], options['seed'])
        alpha = rational(options['alpha']) if options.get('alpha') else None
        rows = gamma_recurrence(machine, x, tau, prg, rational(options['threshold']), alpha)
        data = [{
            'i': row.i,
            'good': row.good,
            'gamma_acc': str(row.gamma_acc),
            'gamma_rej': str(row.gamma_rej),
            'next_acc': str(row.next_acc),
            'next_rej': str(row.next_rej),
            'bound': str(row.bound),
            'holds': row.holds,
        } for row in rows]
        self.emit(f'gamma recurrence {machine.name} m={prg.m} l={prg.l}',
                  {'seed': options['seed'], 'levels': len(rows)}, data)
        self.write_file(f'{machine.name}-gamma.tsv', reports.render_tsv(data))
        self.fail_unless(all(row.holds for row in rows), 'Gamma recurrence')

    def handle_ecc(self, options):
        action, e = options['ecc_action'], options['e']
        if action == 'wrap':
            machine = load_machine(options['word'] or '')
            x = check_input(options['input'])
            wrapped = ecc.lossless_wrapper(machine, x, rational(options['delta']), options['horizon'])
            _, rows = tau_rows(wrapped, x, horizon=options['horizon'], jobs=options['jobs'])
            resets = min(row.reset for row in rows)
            self.emit(f'ecc wrap {machine.name}', {
                'wrapped': wrapped.name,
                's': wrapped.s,
                'states': len(wrapped.states),
                'worst_reset': str(resets),
            })
            self.write_file(f'{wrapped.name}.ctm', render_machine(wrapped))
            return
        if action == 'audit':
            if options['c'] is None:
                raise CommandError('ecc audit needs --c.', returncode=2)
            audit = ecc.ecc_audit(options['c'], e, cross_check=not options['no_cross_check'])
            self.emit(f'ecc audit c={options["c"]} e={e}', serializers.EccAuditSerializer(audit).data)
            self.fail_unless(audit.passed, 'BCH audit')
            return
        word = check_bits(options['word'] or '', name='word')
        if action == 'encode':
            self.stdout.write(ecc.enc_bch(word, e))
        else:
            self.stdout.write(ecc.dec_bch(word, e, c=options['c']))

    def handle_compress(self, options):
        machine = self.load(options)
        params = load_params(options.get('params'), machine)
        compressor = Compressor(machine, options['input'], params)
        if options.get('tape'):
            tape = StructuredTape.parse(Path(options['tape']).read_text(encoding='utf-8'))
        else:
            prg = random_prg(params.m, params.l, options['seed'])
            stream = seeded_bits(options['seed'] + 1)
            tau = options.get('tau') or ''.join(map(str, take(stream, machine.c)))
            tar = ''.join(map(str, take(stream, 3 * params.m)))
            tape = StructuredTape.build(check_bits(tau, machine.c, 'tau'), prg, tar)
        if options['restore']:
            restored = compressor.r_subroutine(tape)
            self.emit(f'restore {machine.name}', {'tag': tape.tar[:2], 'tau': restored.tau})
            self.write_file('restored.tape', restored.render())
            return
        outcome = compressor.f_subroutine(tape, options['mode'])
        data = serializers.CompressionOutcomeSerializer(outcome).data
        self.emit(f'compress {machine.name} x={options["input"]} mode={options["mode"]}', data)
        if outcome.result == 'compressed':
            self.write_file('compressed.tape', outcome.tape.render())

    def handle_verify_class(self, options):
        machine = self.load(options)
        x, klass = options['input'], options['klass']
        horizon, jobs = options['horizon'], options['jobs']
        delta, eps = rational(options['delta']), rational(options['eps'])
        if klass == 'r':
            if not options.get('no_input'):
                raise CommandError('--class r needs --no-input.', returncode=2)
            report = verify_r_delta_eps(machine, x, check_input(options['no_input']), delta, eps,
                                        horizon, jobs)
            self.emit(f'verify r {machine.name}', serializers.OneSidedReportSerializer(report).data)
            self.fail_unless(report.satisfied, 'Class check')
            return
        if klass == 'bp':
            report = verify_bp_delta_eps(machine, x, options['expected'], delta, eps, horizon, jobs)
        elif klass == 'avg-r':
            report = verify_avg_r(machine, x, rational(options['e']), horizon, options['expected'], jobs)
        else:
            report = verify_avg_tau(machine, x, rational(options['e']), horizon, options['expected'], jobs)
        rows = serializers.TauRowSerializer(report.rows, many=True).data
        self.emit(f'verify {klass} {machine.name} x={x}',
                  serializers.ClassReportSerializer(report).data,
                  rows if options['rows'] else None)
        self.write_file(f'{machine.name}-{klass}.tsv', reports.render_tsv(rows))
        self.fail_unless(report.satisfied, 'Class check')

    def handle_suite(self, options):
        results = serializers.SuiteResultSerializer(run_suite(options.get('only')), many=True).data
        passed = sum(1 for result in results if result['passed'])
        self.emit('suite', {'checks': len(results), 'passed': passed}, results)
        if options.get('pdf'):
            Path(options['pdf']).write_bytes(reports.suite_pdf(results))
            self.stdout.write(self.style.SUCCESS(f'wrote {options["pdf"]}'))
        self.fail_unless(passed == len(results), 'Suite')
