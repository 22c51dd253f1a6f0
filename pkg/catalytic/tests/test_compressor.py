import json
import tempfile
from fractions import Fraction
from pathlib import Path

from django.conf import settings
from django.test import SimpleTestCase, override_settings
from hypothesis import given
from hypothesis import strategies as st

from catalytic.bits import to_bits
from catalytic.compressor import (
    BADHASH, GENERAL, POLYTIME, SI_INDEX, SL_PRIME, TIMESTAMP, Compressor, Params,
    StructuredTape, count_v, index_v, load_params,
)
from catalytic.conf import DEFAULTS, lab_settings
from catalytic.exceptions import (
    ParamsInfeasible, ParseError, PreconditionFailed, PreconditionNotBig, PreconditionSmallS,
    UnknownTag, WidthMismatch,
)
from catalytic.hashprg import HashFn, PrgSpec, identity_prg
from catalytic.machine import HaltKind, load_machine
from catalytic.suite import compression_instances, driver_instances


def small_params(**overrides):
    values = dict(m=4, l=1, H=4096, T=64, T_prime=16, threshold=Fraction(1, 8),
                  delta=Fraction(0), eps=Fraction(1, 4))
    values.update(overrides)
    return Params(**values)


class TapeTests(SimpleTestCase):

    def test_layout(self):
        prg = PrgSpec(3, (HashFn(3, 5, 6), HashFn(3, 1, 0)))
        tape = StructuredTape.build('10', prg, '000111000')
        self.assertEqual(tape.bits, '10' + '101110' + '001000' + '000111000')
        self.assertEqual(tape.slot(1), '001000')
        self.assertEqual(tape.slot(2), '101110')
        self.assertEqual(tape.prg, prg)
        self.assertEqual(tape.with_slot(1, '111111').prg.hash_at(1), HashFn(3, 7, 7))
        self.assertEqual(StructuredTape.from_bits(tape.bits, 2, 3, 2), tape)

    def test_render_parse(self):
        tape = StructuredTape.build('1', identity_prg(3, 1), '101010101')
        text = tape.render()
        self.assertTrue(text.startswith('c=1 m=3 l=1\n'))
        self.assertEqual(StructuredTape.parse(text), tape)

    def test_bad_tapes(self):
        with self.assertRaises(WidthMismatch):
            StructuredTape.build('1', identity_prg(3, 1), '1010')
        with self.assertRaises(ParseError):
            StructuredTape.parse('c=1 m=3\n8\n-\n-\n')
        with self.assertRaises(ParseError):
            StructuredTape.parse('c=1 m=3 l=1\n8\n')


class ParamsTests(SimpleTestCase):

    def test_desk_preset(self):
        params = Params.desk()
        self.assertEqual((params.m, params.l, params.H), (4, 16, 4096))
        self.assertTrue(params.covers_tar)
        self.assertEqual(params.alpha, Fraction(1, 512))
        self.assertEqual(params.beta, Fraction(1, 4))
        self.assertEqual(params.zeta, 0)
        self.assertEqual(params.level_width, 5)
        self.assertEqual(load_params(None), params)
        self.assertEqual(Params.desk(m=3).m, 3)

    def test_infeasible(self):
        with self.assertRaises(ParamsInfeasible):
            small_params(eps=Fraction(3, 4))
        with self.assertRaises(ParamsInfeasible):
            small_params(threshold=Fraction(0))
        with self.assertRaises(ParamsInfeasible):
            small_params(m=13)
        with self.assertRaises(ParamsInfeasible):
            load_params('preset:paper', load_machine('bundled:accept_once'))

    def test_project_settings_only_override(self):
        self.assertEqual(set(settings.CATALAB), {'JOBS'})
        self.assertEqual(lab_settings.DESK_PARAMS, DEFAULTS['DESK_PARAMS'])
        self.assertEqual(lab_settings.SEED_BUDGET, 1 << 12)

    @override_settings(CATALAB={'SEED_BUDGET': 16})
    def test_seed_budget_setting(self):
        small_params(m=4)
        with self.assertRaises(ParamsInfeasible):
            small_params(m=5)

    def test_json_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'params.json'
            path.write_text(json.dumps({'m': 4, 'l': 2, 'H': 64, 'T': 8, 'T_prime': 2,
                                        'threshold': '1/8', 'eps': '1/4'}))
            params = load_params(str(path))
            self.assertEqual((params.m, params.l, params.delta), (4, 2, 0))
            self.assertEqual(params.threshold, Fraction(1, 8))
            path.write_text(json.dumps({'m': 4}))
            with self.assertRaises(ParseError):
                load_params(str(path))
        with self.assertRaises(ParseError):
            load_params('/no/such/params.json')


class IndexTests(SimpleTestCase):

    def setUp(self):
        self.machine = load_machine('bundled:long_chain')
        self.compressor = Compressor(self.machine, '', Params(
            m=6, l=2, H=4096, T=16, T_prime=1, threshold=Fraction(1, 8),
            delta=Fraction(0), eps=Fraction(1, 4)))
        self.tape = StructuredTape.build('1', PrgSpec(6, (HashFn(6, 1, 0),) * 2), '0' * 18)

    def test_layer_counts(self):
        self.assertEqual(self.compressor.count_s(self.tape, 1), 26)
        self.assertGreaterEqual(self.compressor.count_v(self.tape, 1), 26)

    def test_first_member_is_the_accepting_root(self):
        conf, witness = self.compressor.index_s(self.tape, 1, 0)
        self.assertEqual(conf.state, 'acc')
        self.assertEqual(conf.cat, '1')
        self.assertEqual(witness[:2], (0, 0))
        self.assertEqual(self.compressor.seed_classes(conf, 1, self.tape.prg, Fraction(1, 8)), ['1'])

    def test_small_layer_holds_the_members(self):
        params = self.compressor.params
        small = [index_v(self.machine, '', self.tape, 1, j, params)[0]
                 for j in range(count_v(self.machine, '', self.tape, 1, params))]
        self.assertEqual(len(small), len(set(small)))
        self.assertIn(self.compressor.index_s(self.tape, 1, 0)[0], small)

    def test_fractions(self):
        self.assertEqual(self.compressor.fractions('1', self.tape.prg), (0, 0))

    def test_preconditions(self):
        with self.assertRaises(PreconditionSmallS):
            Compressor(self.machine, '', Params(
                m=6, l=2, H=4096, T=64, T_prime=1, threshold=Fraction(1, 8),
                delta=Fraction(0), eps=Fraction(1, 4))).si_index_compress(self.tape, 1)
        with self.assertRaises(PreconditionNotBig):
            self.compressor.timestamp_compress(self.tape, (0, HaltKind.ACCEPT, 1))
        with self.assertRaises(PreconditionFailed):
            self.compressor.badhash_compress(self.tape, 0, lambda h: False)


class RecordTests(SimpleTestCase):

    def test_round_trips(self):
        freed = {'timestamp': 1, 'si_index': 1, 'badhash': 2, 'slprime': 1}
        tags = {'timestamp': TIMESTAMP, 'si_index': SI_INDEX, 'badhash': BADHASH, 'slprime': SL_PRIME}
        for name, compressor, tape, compress, predicate in compression_instances():
            with self.subTest(name):
                compressed = compress()
                self.assertEqual(compressed.tar[:2], tags[name])
                self.assertEqual(compressor.freed_bits(compressed, predicate), freed[name])
                self.assertEqual(compressor.r_subroutine(compressed, predicate), tape)

    def test_timestamp_record(self):
        name, compressor, tape, compress, _ = compression_instances()[0]
        compressed = compress()
        self.assertTrue(compressed.tar.endswith('0'))
        self.assertEqual(compressed.hashes, tape.hashes)
        self.assertEqual(compressed.tar[2:8], to_bits(0, 6))

    def test_badhash_frees_the_tape_tail(self):
        _, compressor, tape, compress, predicate = compression_instances()[2]
        compressed = compress()
        freed = compressor.freed_bits(compressed, predicate)
        self.assertEqual(freed, 2)
        self.assertTrue(compressed.bits.endswith('0' * freed))
        self.assertEqual(compressed.tar[:4], BADHASH + '00')
        self.assertEqual(compressed.tar[4:16], tape.tar[4:16])
        self.assertEqual(compressed.slot(1)[6:], tape.tar[:4] + tape.tar[16:])

    def test_slprime_record(self):
        _, compressor, tape, compress, _ = compression_instances()[3]
        compressed = compress()
        self.assertEqual(compressed.tar[:2], SL_PRIME)
        self.assertEqual(compressor.slprime_decompress(compressed), tape)

    def test_unknown_records(self):
        _, compressor, tape, _, _ = compression_instances()[1]
        garbage = StructuredTape.build(tape.tau, tape.prg, SI_INDEX + '1' * 16)
        with self.assertRaises(UnknownTag):
            compressor.r_subroutine(garbage)

    def test_shape_mismatch(self):
        _, compressor, _, _, _ = compression_instances()[1]
        with self.assertRaises(ParamsInfeasible):
            compressor.f_subroutine(StructuredTape.build('1', identity_prg(3, 1), '0' * 9))


class DecideTests(SimpleTestCase):

    def setUp(self):
        self.machine = load_machine('bundled:accept_once')
        self.params = small_params()
        self.compressor = Compressor(self.machine, '1', self.params)

    @given(st.text('01', min_size=21, max_size=21), st.sampled_from([GENERAL, POLYTIME]))
    def test_sure_accept_is_decided(self, bits, mode):
        tape = StructuredTape.from_bits(bits, 1, 4, 1)
        outcome = self.compressor.f_subroutine(tape, mode)
        self.assertEqual(outcome.result, 'accept')
        self.assertTrue(outcome.decisive)
        self.assertEqual(outcome.tape, tape)
        self.assertEqual((outcome.f_acc, outcome.f_rej), (1, 0))

    def test_polytime_covers_every_tar_value(self):
        compressor = Compressor(self.machine, '1', small_params(m=2, H=63))
        prg = PrgSpec(2, (HashFn(2, 3, 1),))
        for value in range(2 ** 6):
            tape = StructuredTape.build('0', prg, to_bits(value, 6))
            with self.subTest(value=value):
                outcome = compressor.f_subroutine(tape, POLYTIME)
                self.assertNotEqual(outcome.result, 'dontknow')

    def test_polytime_rejects_trees_smaller_than_tar(self):
        compressor = Compressor(self.machine, '', small_params(m=6, H=1))
        tape = StructuredTape.build('0', PrgSpec(6, (HashFn(6, 1, 0),)), to_bits(3, 18))
        self.assertFalse(compressor.params.covers_tar)
        with self.assertRaises(ParamsInfeasible):
            compressor.f_subroutine(tape, POLYTIME)
        self.assertEqual(compressor.f_subroutine(tape, GENERAL).result, 'compressed')


class DriverTests(SimpleTestCase):

    def test_each_tag_is_reached_by_f(self):
        for name, compressor, tape, mode, tag in driver_instances():
            with self.subTest(name):
                outcome = compressor.f_subroutine(tape, mode)
                self.assertEqual(outcome.result, 'compressed')
                self.assertEqual(outcome.tag, tag)
                self.assertEqual(outcome.tape.tar[:2], tag)
                self.assertGreaterEqual(outcome.freed_bits, 1)
                self.assertTrue(outcome.tape.tar.endswith('0' * outcome.freed_bits))
                self.assertEqual(compressor.r_subroutine(outcome.tape), tape)

    def test_badhash_record_layout(self):
        _, compressor, tape, mode, _ = driver_instances()[2]
        outcome = compressor.f_subroutine(tape, mode)
        self.assertEqual(outcome.level, 0)
        self.assertEqual(outcome.freed_bits, 3)
        self.assertEqual(outcome.tape.tar, '100' + '101101101101' + '000')
        self.assertEqual(outcome.tape.slot(1)[6:], '101' + '101')
        self.assertEqual(outcome.tape.tau, tape.tau)

    def test_slprime_needs_polytime(self):
        _, compressor, tape, _, _ = driver_instances()[3]
        outcome = compressor.f_subroutine(tape, GENERAL)
        self.assertEqual(outcome.result, 'dontknow')
        self.assertEqual(outcome.tape, tape)
