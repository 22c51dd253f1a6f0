from django.test import SimpleTestCase

from catalytic.exceptions import HeadOutOfBounds, ParseError, StepOnHalted
from catalytic.machine import (
    HaltKind, bundled_machine_names, canonical_parse, canonical_serialize, halt_configuration,
    is_canonical_halt, load_machine, parse_machine, parse_u, predecessors, render_machine,
    serial_widths, start_configuration, step, successors, universe, universe_size, validate,
)

HEADER = """\
states=start,acc,rej
start=start
accept=acc
reject=rej
s=3
c=1
randomized=false
"""


class ParseTests(SimpleTestCase):

    def test_bundled_machines(self):
        self.assertEqual(bundled_machine_names(), [
            'accept_once', 'bp_pair', 'coinflip', 'long_chain',
            'one_flip', 'one_sided', 'tape_zeroer', 'zptau_half',
        ])
        machine = load_machine('bundled:accept_once')
        self.assertEqual((machine.s, machine.c), (3, 1))
        self.assertTrue(machine.is_deterministic)
        self.assertFalse(load_machine('bundled:coinflip').is_deterministic)

    def test_render_parses_back(self):
        for name in bundled_machine_names():
            with self.subTest(name=name):
                machine = load_machine(f'bundled:{name}')
                again = parse_machine(render_machine(machine), name)
                self.assertEqual(again.transitions, machine.transitions)
                self.assertEqual(again.states, machine.states)
                self.assertEqual(again.dontknow, machine.dontknow)

    def test_write_symbols(self):
        machine = parse_machine(HEADER + 'start * * * * -> acc 1 ! S S S\n')
        t = machine.transitions[('start', 0, 0, 1, 0)]
        self.assertEqual((t.work_write, t.cat_write), (1, 0))

    def test_malformed_files(self):
        bad = {
            'missing header': 'states=start,acc,rej\nstart=start\n',
            'bad randomized': HEADER.replace('randomized=false', 'randomized=maybe'),
            'bad move': HEADER + 'start * * * * -> acc * * X S S\n',
            'duplicate row': HEADER + 'start * * * * -> acc * * S S S\nstart 1 * * * -> rej * * S S S\n',
            'halting start': HEADER.replace('start=start', 'start=acc'),
            'undeclared state': HEADER + 'start * * * * -> nowhere * * S S S\n',
            'short work tape': HEADER.replace('s=3', 's=2'),
        }
        for label, text in bad.items():
            with self.subTest(label), self.assertRaises(ParseError):
                parse_machine(text)

    def test_unknown_bundled_machine(self):
        with self.assertRaises(ParseError):
            load_machine('bundled:no_such_machine')


class StepTests(SimpleTestCase):

    def setUp(self):
        self.machine = load_machine('bundled:accept_once')

    def test_halts_are_canonical(self):
        conf = step(self.machine, '1', start_configuration(self.machine, '1'))
        self.assertEqual(conf, halt_configuration(self.machine, HaltKind.ACCEPT, '1'))
        self.assertEqual(conf.work, '111')
        self.assertTrue(is_canonical_halt(self.machine, conf))

    def test_step_on_halted(self):
        with self.assertRaises(StepOnHalted):
            step(self.machine, '1', halt_configuration(self.machine, HaltKind.ACCEPT, '0'))

    def test_head_out_of_bounds(self):
        machine = parse_machine(HEADER + 'start * * * * -> acc * * L S S\n')
        with self.assertRaises(HeadOutOfBounds):
            step(machine, '1', start_configuration(machine, '0'))
        self.assertEqual(successors(machine, '1', start_configuration(machine, '0')), [])

    def test_predecessors_invert_successors(self):
        for name in ('accept_once', 'one_flip', 'bp_pair'):
            machine = load_machine(f'bundled:{name}')
            for conf in universe(machine, 1):
                for coin, nxt in successors(machine, '1', conf):
                    with self.subTest(name=name, conf=str(conf), coin=coin):
                        self.assertIn((coin, conf), predecessors(machine, '1', nxt))


class SerializationTests(SimpleTestCase):

    def test_widths(self):
        self.assertEqual(serial_widths(load_machine('bundled:accept_once'), 0).u, 7)
        self.assertEqual(serial_widths(load_machine('bundled:long_chain'), 0).u, 8)

    def test_universe_size(self):
        machine = load_machine('bundled:accept_once')
        self.assertEqual(universe_size(machine, 0), 52)
        self.assertEqual(len(list(universe(machine, 0))), 52)

    def test_canonical_round_trip(self):
        machine = load_machine('bundled:long_chain')
        for conf in universe(machine, 1):
            self.assertEqual(canonical_parse(machine, 1, canonical_serialize(machine, 1, conf)), conf)

    def test_parse_u_rejects_unused_codes(self):
        machine = load_machine('bundled:accept_once')
        with self.assertRaises(ParseError):
            parse_u(machine, 0, '1100000', '0')


class ValidateTests(SimpleTestCase):

    def test_bundled_machines_validate(self):
        for name in bundled_machine_names():
            with self.subTest(name=name):
                report = validate(load_machine(f'bundled:{name}'))
                self.assertTrue(report.ok)
                self.assertIsNotNone(report.d_M)

    def test_accounting(self):
        report = validate(load_machine('bundled:accept_once'))
        self.assertEqual(report.s_accounting, 12)
        self.assertTrue(report.deterministic)

    def test_missing_rows(self):
        machine = parse_machine(HEADER + 'start 1 * * * -> acc * * S S S\n')
        report = validate(machine)
        self.assertEqual(len(report.missing_rows), 8)
        self.assertFalse(report.ok)

    def test_bound_violations(self):
        machine = parse_machine(HEADER + 'start * * * * -> acc * * L S S\n')
        report = validate(machine)
        self.assertTrue(report.bound_violations)
        self.assertFalse(report.ok)

    def test_dontknow_machines_must_not_err(self):
        machine = parse_machine(
            HEADER.replace('states=start,acc,rej', 'states=start,acc,rej,dk') + 'dontknow=dk\n'
            'start * * 1 * -> acc * * S S S\n'
            'start * * 0 * -> rej * * S S S\n'
        )
        report = validate(machine)
        self.assertEqual(report.answer_conflicts, ['0', '1'])
        self.assertFalse(report.ok)
        report = validate(load_machine('bundled:zptau_half'))
        self.assertEqual(report.answer_conflicts, [])
        self.assertTrue(report.ok)
