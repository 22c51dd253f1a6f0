"""Bitstring helpers. Bitstrings are ASCII '0'/'1' strings, index 0 leftmost."""
import itertools

from .exceptions import LengthMismatch, ParseError, WidthMismatch


def clog2(value):
    """Ceiling of log2, with clog2(0) == clog2(1) == 0."""
    if value <= 1:
        return 0
    return (value - 1).bit_length()


def to_bits(value, width):
    if value < 0 or value >= 1 << width:
        raise WidthMismatch(f'{value} does not fit in {width} bits.')
    if width == 0:
        return ''
    return format(value, f'0{width}b')


def from_bits(bits):
    return int(bits, 2) if bits else 0


def check_bits(bits, width=None, name='bitstring'):
    if any(ch not in '01' for ch in bits):
        raise ParseError(f'{name} must contain only 0 and 1, got {bits!r}.')
    if width is not None and len(bits) != width:
        raise WidthMismatch(f'{name} must be {width} bits, got {len(bits)}.')
    return bits


def set_bit(bits, index, value):
    return bits[:index] + str(value) + bits[index + 1:]


def flip_bit(bits, index):
    return set_bit(bits, index, 1 - int(bits[index]))


def xor_bits(a, b):
    if len(a) != len(b):
        raise LengthMismatch(f'Cannot xor {len(a)} bits with {len(b)} bits.')
    return ''.join('1' if x != y else '0' for x, y in zip(a, b))


def all_bitstrings(width):
    """All bitstrings of the given width in lexicographic order."""
    for combo in itertools.product('01', repeat=width):
        yield ''.join(combo)


def hex_to_bits(text, width=None):
    text = text.strip().lower()
    if text.startswith('0x'):
        text = text[2:]
    try:
        bits = ''.join(format(int(ch, 16), '04b') for ch in text)
    except ValueError:
        raise ParseError(f'Not a hex string: {text!r}.')
    if width is None:
        return bits
    if len(bits) < width or '1' in bits[width:]:
        raise WidthMismatch(f'Hex section does not encode exactly {width} bits.')
    return bits[:width]


def bits_to_hex(bits):
    if not bits:
        return ''
    padded = bits + '0' * (-len(bits) % 4)
    return ''.join(format(int(padded[i:i + 4], 2), 'x') for i in range(0, len(padded), 4))
