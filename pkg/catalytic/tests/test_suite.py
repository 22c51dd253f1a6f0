from unittest import mock

from django.test import SimpleTestCase, tag

from catalytic import suite
from catalytic.exceptions import BudgetExceeded


class SuiteTests(SimpleTestCase):

    def assertChecksPass(self, names):
        results = suite.run_suite(names)
        self.assertCountEqual([r.name for r in results], names)
        for result in results:
            with self.subTest(result.name):
                self.assertTrue(result.passed, result.detail)
        return results

    def test_selected_checks_pass(self):
        self.assertChecksPass(['bch', 'nisan', 'high-error', 'uniqueness'])

    def test_machine_transform_checks_pass(self):
        self.assertChecksPass(['tradeoffs', 'lossless-wrapper', 'error-vector', 'xor-transform',
                               'polytime-zp'])

    def test_graph_checks_pass(self):
        self.assertChecksPass(['traversal', 'disjoint-averaging', 'multiplicity', 'exit-bound'])

    def test_gamma_recurrence_passes(self):
        [result] = self.assertChecksPass(['gamma-recurrence'])
        self.assertIn('failing levels none', result.detail)

    @tag('slow')
    def test_f_contract_passes(self):
        [result] = self.assertChecksPass(['f-contract'])
        self.assertIn('every tag round-trips', result.detail)
        self.assertNotIn('dontknow', result.detail)

    def test_every_check_is_named(self):
        self.assertEqual(len({name for name, _ in suite.CHECKS}), 16)

    def test_compression_records(self):
        passed, detail = suite.compression_round_trips()
        self.assertTrue(passed, detail)
        self.assertIn('badhash frees 2', detail)

    def test_lab_errors_fail_the_check(self):
        def too_big():
            raise BudgetExceeded('graph of 10 vertices, budget is 5')

        with mock.patch.object(suite, 'CHECKS', [('big', too_big)]):
            [result] = suite.run_suite()
        self.assertFalse(result.passed)
        self.assertEqual(result.detail, 'BudgetExceeded: graph of 10 vertices, budget is 5')
