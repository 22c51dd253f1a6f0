from fractions import Fraction

from django.test import SimpleTestCase

from catalytic.exceptions import NotDeterministic, TransformError
from catalytic.machine import load_machine, validate
from catalytic.simulator import measure_one_sided, tau_rows, verify_bp_delta_eps
from catalytic.transforms import (
    boost_majority, dyadic, halve_transform, high_error_machine, square_transform,
    xor_randomness_transform,
)


class TradeoffTests(SimpleTestCase):

    def setUp(self):
        self.machine = load_machine('bundled:one_sided')

    def test_halving(self):
        report = measure_one_sided(halve_transform(self.machine), '1', '0')
        self.assertEqual((report.delta, report.eps), (Fraction(1, 4), Fraction(1, 4)))
        self.assertTrue(report.yes_always_accepts)

    def test_squaring(self):
        report = measure_one_sided(square_transform(self.machine), '1', '0')
        self.assertEqual((report.delta, report.eps), (Fraction(3, 4), Fraction(3, 4)))

    def test_halved_machine_validates(self):
        self.assertTrue(validate(halve_transform(self.machine)).ok)


class HighErrorTests(SimpleTestCase):

    def test_dyadic(self):
        self.assertEqual(dyadic(Fraction(3, 8)), (3, 3))
        self.assertEqual(dyadic(1), (1, 0))
        for alpha in (Fraction(1, 3), Fraction(3, 2)):
            with self.subTest(alpha=alpha), self.assertRaises(TransformError):
                dyadic(alpha)

    def test_guessing_machine(self):
        machine = high_error_machine(load_machine('bundled:tape_zeroer'), Fraction(1, 4))
        report = verify_bp_delta_eps(machine, '1', 1, Fraction(1, 4), Fraction(1, 8))
        self.assertEqual(report.success_probability, Fraction(5, 8))
        self.assertEqual(1 - report.reset_probability, Fraction(1, 4))
        self.assertTrue(report.satisfied)

    def test_needs_a_deterministic_decider(self):
        with self.assertRaises(NotDeterministic):
            high_error_machine(load_machine('bundled:coinflip'), Fraction(1, 2))


class RandomnessTests(SimpleTestCase):

    def test_xor_transform_averages_over_tau(self):
        transformed = xor_randomness_transform(load_machine('bundled:zptau_half'))
        self.assertEqual(transformed.s, 5)
        _, rows = tau_rows(transformed, '1')
        for row in rows:
            self.assertEqual(row.success, Fraction(1, 2))
            self.assertEqual(row.reset, 1)

    def test_boost_majority(self):
        with self.assertRaises(TransformError):
            boost_majority(load_machine('bundled:long_chain'), 2)
        boosted = boost_majority(load_machine('bundled:long_chain'), 3)
        _, rows = tau_rows(boosted, '1')
        self.assertTrue(all(row.success == 1 and row.reset == 1 for row in rows))
