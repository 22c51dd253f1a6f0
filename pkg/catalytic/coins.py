"""
Coin streams.

A stream is either a hex string (4 bits per digit, most significant bit
first, optional ``0x``), ``bits:<01...>``, or ``seeded:<N>``: the splitmix64
expansion of the 64-bit integer N, 64 bits per output word, most significant
bit first.
"""
import itertools

from .bits import check_bits, hex_to_bits
from .exceptions import ParseError

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15


def splitmix64(seed):
    state = seed & MASK64
    while True:
        state = (state + GOLDEN_GAMMA) & MASK64
        z = state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        yield z ^ (z >> 31)


def seeded_bits(seed):
    for word in splitmix64(seed):
        for shift in range(63, -1, -1):
            yield (word >> shift) & 1


def parse_coins(spec):
    """Return an iterator of coin bits for a CLI coin specification."""
    spec = (spec or '').strip()
    if spec.startswith('seeded:'):
        try:
            seed = int(spec[len('seeded:'):], 0)
        except ValueError:
            raise ParseError(f'Bad seed in {spec!r}.')
        if not 0 <= seed <= MASK64:
            raise ParseError('Seeds are 64-bit unsigned integers.')
        return seeded_bits(seed)
    if spec.startswith('bits:'):
        return iter([int(b) for b in check_bits(spec[len('bits:'):], name='coins')])
    return iter([int(b) for b in hex_to_bits(spec)])


def take(stream, count):
    return list(itertools.islice(stream, count))
