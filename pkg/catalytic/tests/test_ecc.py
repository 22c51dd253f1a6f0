from django.test import SimpleTestCase
from hypothesis import given
from hypothesis import strategies as st

from catalytic.ecc import (
    bch_params, brute_force_decode, build_lossless_wrapper, dec_bch, ecc_audit, enc_bch,
    lossless_wrapper, stated_redundancy, wrapper_overhead,
)
from catalytic.exceptions import DecodeFailure, InadmissibleParams, ParamsInfeasible
from catalytic.gf import GF2m, field, minimal_polynomial, poly_mod, poly_mul
from catalytic.machine import load_machine
from catalytic.simulator import tau_rows


class FieldTests(SimpleTestCase):

    @given(st.integers(min_value=2, max_value=10).flatmap(
        lambda m: st.tuples(st.just(m), st.integers(min_value=1, max_value=2 ** m - 1))))
    def test_inverse(self, case):
        m, a = case
        gf = field(m)
        self.assertEqual(gf.mul(a, gf.inv(a)), 1)

    def test_generator_has_full_order(self):
        gf = field(4)
        self.assertEqual(len(set(gf.exp_table)), 15)

    def test_polynomials(self):
        self.assertEqual(poly_mul(0b11, 0b11), 0b101)
        self.assertEqual(poly_mod(0b101, 0b11), 0)
        self.assertEqual(minimal_polynomial(field(3), 1), 0b1011)

    def test_unsupported_width(self):
        with self.assertRaises(ParamsInfeasible):
            GF2m(17)


class BchTests(SimpleTestCase):

    def test_lengths(self):
        self.assertEqual(stated_redundancy(4, 1), 9)
        self.assertEqual(bch_params(4, 1).length, 13)
        self.assertEqual(bch_params(4, 0).length, 6)
        self.assertEqual(enc_bch('1011', 0), '101100')
        with self.assertRaises(InadmissibleParams):
            bch_params(0, 1)

    @given(st.data())
    def test_corrects_up_to_e_flips(self, data):
        c = data.draw(st.integers(min_value=2, max_value=10), label='c')
        e = data.draw(st.integers(min_value=1, max_value=2), label='e')
        message = data.draw(st.text('01', min_size=c, max_size=c), label='message')
        word = list(enc_bch(message, e))
        flips = data.draw(st.sets(st.integers(min_value=0, max_value=len(word) - 1), max_size=e),
                          label='flips')
        for k in flips:
            word[k] = '1' if word[k] == '0' else '0'
        self.assertEqual(dec_bch(''.join(word), e, c=c), message)

    def test_decode_needs_a_length(self):
        with self.assertRaises(DecodeFailure):
            dec_bch('0' * 13, 1)

    def test_too_many_padding_flips(self):
        params = bch_params(4, 1)
        word = enc_bch('1011', 1, params)
        padded = word[:-2] + '11'
        with self.assertRaises(DecodeFailure):
            dec_bch(padded, 1, params)

    def test_nearest_codeword(self):
        params = bch_params(4, 1)
        word = enc_bch('1011', 1, params)
        flipped = ('0' if word[0] == '1' else '1') + word[1:]
        nearest = brute_force_decode(flipped, params)
        self.assertEqual((nearest.message, nearest.distance, nearest.ambiguous), ('1011', 1, False))
        self.assertEqual(nearest.message, dec_bch(flipped, 1, params))

    def test_audit(self):
        audit = ecc_audit(4, 1)
        self.assertTrue(audit.passed)
        self.assertEqual(audit.words_checked, 16 * 14)
        self.assertGreaterEqual(audit.min_distance, 3)


class WrapperTests(SimpleTestCase):

    def test_wrapper_restores_every_tau(self):
        wrapped = build_lossless_wrapper(load_machine('bundled:one_flip'), 1)
        self.assertEqual(wrapped.s, 3 + wrapper_overhead(load_machine('bundled:one_flip'), 1))
        for x in ('0', '1'):
            _, rows = tau_rows(wrapped, x, expected_answer=int(x))
            with self.subTest(x=x):
                self.assertTrue(all(row.reset == 1 and row.success == 1 for row in rows))

    def test_correction_radius_from_expected_errors(self):
        wrapped = lossless_wrapper(load_machine('bundled:one_flip'), '1', 1)
        self.assertEqual(wrapped.name, 'one_flip-bch1')
