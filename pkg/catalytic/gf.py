"""
Arithmetic in GF(2^m) and over GF(2)[x].

Field elements are ints whose bits are polynomial coefficients (bit k is the
coefficient of x^k). Each width uses a fixed primitive modulus, so ``x`` (the
element 2) generates the multiplicative group.
"""
from functools import cached_property, lru_cache

from .exceptions import ParamsInfeasible

PRIMITIVE_POLYNOMIALS = {
    1: 0b11,
    2: 0b111,
    3: 0b1011,
    4: 0b10011,
    5: 0b100101,
    6: 0b1000011,
    7: 0b10000011,
    8: 0b100011101,
    9: 0x211,
    10: 0x409,
    11: 0x805,
    12: 0x1053,
    13: 0x201B,
    14: 0x4443,
    15: 0x8003,
    16: 0x1100B,
}


class GF2m:
    """The field GF(2^m) reduced by the published primitive polynomial."""

    def __init__(self, m):
        if m not in PRIMITIVE_POLYNOMIALS:
            raise ParamsInfeasible(f'GF(2^{m}) is outside the supported widths 1..16.')
        self.m = m
        self.modulus = PRIMITIVE_POLYNOMIALS[m]
        self.size = 1 << m
        self._mask = 1 << m

    def __repr__(self):
        return f'GF2m({self.m})'

    def mul(self, a, b):
        result = 0
        for _ in range(self.m):
            if b & 1:
                result ^= a
            b >>= 1
            a <<= 1
            if a & self._mask:
                a ^= self.modulus
        return result

    @property
    def generator(self):
        return 2 if self.m > 1 else 1

    @cached_property
    def exp_table(self):
        table = [1]
        for _ in range(self.size - 2):
            table.append(self.mul(table[-1], self.generator))
        return table

    @cached_property
    def log_table(self):
        return {value: power for power, value in enumerate(self.exp_table)}

    def alpha_pow(self, k):
        return self.exp_table[k % (self.size - 1)]

    def pow(self, a, k):
        if a == 0:
            return 0 if k else 1
        return self.alpha_pow(self.log_table[a] * k)

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError('0 has no inverse in GF(2^m).')
        return self.alpha_pow(-self.log_table[a])


@lru_cache(maxsize=None)
def field(m):
    return GF2m(m)


# GF(2)[x] polynomials as ints

def poly_mul(a, b):
    result = 0
    while b:
        if b & 1:
            result ^= a
        b >>= 1
        a <<= 1
    return result


def poly_mod(a, modulus):
    degree = modulus.bit_length() - 1
    while a and a.bit_length() - 1 >= degree:
        a ^= modulus << (a.bit_length() - 1 - degree)
    return a


def poly_degree(a):
    return a.bit_length() - 1


def minimal_polynomial(gf, power):
    """Minimal polynomial over GF(2) of alpha^power, as a bit mask."""
    order = gf.size - 1
    coset = []
    k = power % order
    while k not in coset:
        coset.append(k)
        k = (2 * k) % order
    # product of (x + alpha^k) with coefficients in GF(2^m), low degree first
    coeffs = [1]
    for k in coset:
        root = gf.alpha_pow(k)
        shifted = [0] + coeffs
        scaled = [gf.mul(c, root) for c in coeffs] + [0]
        coeffs = [x ^ y for x, y in zip(shifted, scaled)]
    mask = 0
    for degree, coeff in enumerate(coeffs):
        if coeff not in (0, 1):
            raise ArithmeticError(f'Minimal polynomial of alpha^{power} left GF(2).')
        mask |= coeff << degree
    return mask
