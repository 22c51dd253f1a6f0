import tempfile
from contextlib import redirect_stderr, redirect_stdout
from io import StringIO
from pathlib import Path

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase

from catalytic import cli
from catalytic.ecc import enc_bch


def ctm(*args):
    out = StringIO()
    call_command('ctm', *args, stdout=out)
    return out.getvalue()


class CtmCommandTests(SimpleTestCase):

    def assertExitCode(self, code, *args):
        with self.assertRaises(CommandError) as ctx:
            ctm(*args)
        self.assertEqual(ctx.exception.returncode, code)

    def test_validate(self):
        output = ctm('validate', 'bundled:accept_once')
        self.assertIn('validate accept_once', output)
        self.assertIn('ok', output)

    def test_run_one_tau(self):
        output = ctm('run', 'bundled:coinflip', '--tau', '00', '--coins', 'bits:1')
        self.assertIn('final_cat', output)
        self.assertIn('10', output)

    def test_run_every_tau_writes_rows(self):
        with tempfile.TemporaryDirectory() as tmp:
            ctm('run', 'bundled:bp_pair', '--out', tmp, '--format', 'tsv')
            rows = (Path(tmp) / 'bp_pair-rows.tsv').read_text().splitlines()
        self.assertEqual(rows[0], 'tau\tsuccess\treset\texpected_errors\tdontknow')
        self.assertEqual(len(rows), 5)

    def test_graph(self):
        output = ctm('graph', 'bundled:accept_once')
        self.assertIn('vertices', output)
        self.assertIn('1x2 49x2', output)

    def test_oracle(self):
        output = ctm('oracle', 'bundled:coinflip', '--tau', '00', '--beta', '1/2')
        self.assertIn('exit_probability', output)
        self.assertIn('1/2', output)

    def test_ecc(self):
        self.assertEqual(ctm('ecc', 'encode', '1011', '--e', '1').strip(), enc_bch('1011', 1))
        word = list(enc_bch('1011', 1))
        word[2] = '1' if word[2] == '0' else '0'
        self.assertEqual(ctm('ecc', 'decode', ''.join(word), '--e', '1', '--c', '4').strip(), '1011')
        self.assertIn('passed', ctm('ecc', 'audit', '--c', '3', '--e', '1'))

    def test_prg_audit(self):
        self.assertIn('holds', ctm('prg', 'audit', '--m', '2'))

    def test_compress(self):
        with tempfile.TemporaryDirectory() as tmp:
            params = Path(tmp) / 'params.json'
            params.write_text('{"m": 4, "l": 1, "H": 4096, "T": 64, "T_prime": 16, '
                              '"threshold": "1/8", "eps": "1/4"}')
            output = ctm('compress', 'bundled:accept_once', '--params', str(params))
        self.assertIn('accept', output)

    def test_verify_class(self):
        output = ctm('verify-class', 'bundled:bp_pair', '--class', 'bp', '--delta', '1/4',
                     '--eps', '1/4', '--rows')
        self.assertIn('satisfied', output)
        self.assertIn('3/4', output)

    def test_suite_subset(self):
        with tempfile.TemporaryDirectory() as tmp:
            pdf = Path(tmp) / 'suite.pdf'
            output = ctm('suite', '--only', 'tradeoffs', 'xor-transform', '--pdf', str(pdf))
            self.assertTrue(pdf.read_bytes().startswith(b'%PDF'))
        self.assertIn('tradeoffs', output)
        self.assertIn('xor-transform', output)

    def test_exit_codes(self):
        self.assertExitCode(1, 'verify-class', 'bundled:one_flip', '--class', 'bp', '--delta', '1/2')
        self.assertExitCode(2, 'validate', 'bundled:no_such_machine')
        self.assertExitCode(2, 'run', 'bundled:accept_once', '--input', '12')
        self.assertExitCode(2, 'verify-class', 'bundled:one_sided', '--class', 'r')
        self.assertExitCode(3, 'compress', 'bundled:accept_once', '--params', 'preset:paper')


class CliTests(SimpleTestCase):

    def test_main_returns_exit_codes(self):
        with redirect_stdout(StringIO()) as out, redirect_stderr(StringIO()):
            self.assertEqual(cli.main(['validate', 'bundled:accept_once']), 0)
            self.assertEqual(cli.main(['validate', 'bundled:no_such_machine']), 2)
        self.assertIn('validate accept_once', out.getvalue())
