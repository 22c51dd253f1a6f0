from django.test import SimpleTestCase
from hypothesis import given
from hypothesis import strategies as st

from catalytic.bits import (
    bits_to_hex, check_bits, clog2, from_bits, hex_to_bits, to_bits, xor_bits,
)
from catalytic.coins import parse_coins, seeded_bits, take
from catalytic.exceptions import LengthMismatch, ParseError, WidthMismatch


class BitsTests(SimpleTestCase):

    def test_clog2(self):
        self.assertEqual([clog2(v) for v in (0, 1, 2, 3, 4, 5, 8, 9)], [0, 0, 1, 2, 2, 3, 3, 4])

    def test_to_bits_pads_and_rejects_overflow(self):
        self.assertEqual(to_bits(5, 4), '0101')
        self.assertEqual(to_bits(0, 0), '')
        with self.assertRaises(WidthMismatch):
            to_bits(16, 4)

    @given(st.integers(min_value=1, max_value=16).flatmap(
        lambda w: st.tuples(st.just(w), st.integers(min_value=0, max_value=2 ** w - 1))))
    def test_from_bits_inverts_to_bits(self, case):
        width, value = case
        self.assertEqual(from_bits(to_bits(value, width)), value)

    def test_check_bits(self):
        self.assertEqual(check_bits('0110', 4), '0110')
        with self.assertRaises(ParseError):
            check_bits('01a')
        with self.assertRaises(WidthMismatch):
            check_bits('01', 3)

    def test_xor_needs_equal_lengths(self):
        self.assertEqual(xor_bits('1100', '1010'), '0110')
        with self.assertRaises(LengthMismatch):
            xor_bits('1', '10')

    def test_hex_sections(self):
        self.assertEqual(hex_to_bits('a'), '1010')
        self.assertEqual(hex_to_bits('0x8', 1), '1')
        self.assertEqual(bits_to_hex('101'), 'a')
        self.assertEqual(bits_to_hex(''), '')
        with self.assertRaises(WidthMismatch):
            hex_to_bits('9', 1)
        with self.assertRaises(ParseError):
            hex_to_bits('zz')


class CoinTests(SimpleTestCase):

    def test_explicit_streams(self):
        self.assertEqual(take(parse_coins('bits:101'), 5), [1, 0, 1])
        self.assertEqual(take(parse_coins('0xf0'), 8), [1, 1, 1, 1, 0, 0, 0, 0])

    def test_seeded_stream_is_reproducible(self):
        self.assertEqual(take(parse_coins('seeded:5'), 130), take(seeded_bits(5), 130))
        self.assertNotEqual(take(seeded_bits(5), 64), take(seeded_bits(6), 64))

    def test_bad_specs(self):
        for spec in ('seeded:x', 'seeded:-1', 'bits:012'):
            with self.subTest(spec=spec), self.assertRaises(ParseError):
                parse_coins(spec)
