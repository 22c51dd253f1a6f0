from fractions import Fraction

from django.test import SimpleTestCase, override_settings

from catalytic.exceptions import CoinsExhausted, HorizonExceeded, NotDeterministic
from catalytic.machine import HaltKind, load_machine
from catalytic.simulator import (
    default_horizon, hamming, measure_one_sided, run, tau_rows, verify_avg_r, verify_avg_tau,
    verify_bp_delta_eps, verify_r_delta_eps,
)


class RunTests(SimpleTestCase):

    def test_deterministic_run(self):
        outcome = run(load_machine('bundled:long_chain'), '0', '1')
        self.assertEqual(outcome.halt, HaltKind.REJECT)
        self.assertEqual((outcome.final_cat, outcome.steps, outcome.coins_consumed), ('1', 3, 0))

    def test_coins_are_consumed_in_order(self):
        machine = load_machine('bundled:coinflip')
        self.assertEqual(run(machine, '1', '00', [1]).final_cat, '10')
        self.assertEqual(run(machine, '1', '00', [0]).final_cat, '00')
        with self.assertRaises(CoinsExhausted):
            run(machine, '1', '00', [])

    def test_horizon(self):
        with self.assertRaises(HorizonExceeded):
            run(load_machine('bundled:long_chain'), '1', '0', horizon=2)

    @override_settings(CATALAB={'HORIZON_FACTOR': 2})
    def test_default_horizon_follows_settings(self):
        machine = load_machine('bundled:accept_once')
        self.assertEqual(default_horizon(machine, 0), 104)

    def test_hamming(self):
        self.assertEqual(hamming('0110', '1100'), 2)


class ClassTests(SimpleTestCase):

    def test_coinflip_rows(self):
        horizon, rows = tau_rows(load_machine('bundled:coinflip'), '1')
        self.assertEqual(len(rows), 4)
        for row in rows:
            self.assertEqual(row.success, 1)
            self.assertEqual(row.reset, Fraction(1, 2))
            self.assertEqual(row.expected_errors, Fraction(1, 2))

    def test_bp_pair(self):
        report = verify_bp_delta_eps(load_machine('bundled:bp_pair'), '1', 1,
                                     Fraction(1, 4), Fraction(1, 4))
        self.assertEqual(report.success_probability, Fraction(3, 4))
        self.assertEqual(report.reset_probability, Fraction(3, 4))
        self.assertTrue(report.satisfied)
        strict = verify_bp_delta_eps(load_machine('bundled:bp_pair'), '1', 1,
                                     Fraction(1, 8), Fraction(1, 4))
        self.assertFalse(strict.satisfied)

    def test_avg_tau(self):
        report = verify_avg_tau(load_machine('bundled:one_flip'), '1', 1)
        self.assertEqual(report.success_probability, 1)
        self.assertEqual(report.expected_errors, 1)
        self.assertTrue(report.satisfied)
        self.assertFalse(verify_avg_tau(load_machine('bundled:one_flip'), '1', Fraction(1, 2)).satisfied)
        with self.assertRaises(NotDeterministic):
            verify_avg_tau(load_machine('bundled:coinflip'), '1', 1)

    def test_avg_r(self):
        report = verify_avg_r(load_machine('bundled:tape_zeroer'), '1', 2)
        self.assertEqual(report.expected_errors, 2)
        self.assertEqual(report.witnesses['errors'], '11')
        self.assertTrue(report.satisfied)

    def test_one_sided(self):
        machine = load_machine('bundled:one_sided')
        report = measure_one_sided(machine, '1', '0')
        self.assertEqual((report.delta, report.eps), (Fraction(1, 2), Fraction(1, 2)))
        self.assertTrue(report.yes_always_accepts)
        self.assertTrue(verify_r_delta_eps(machine, '1', '0', Fraction(1, 2), Fraction(1, 2)).satisfied)
        self.assertFalse(verify_r_delta_eps(machine, '1', '0', Fraction(1, 4), Fraction(1, 2)).satisfied)
