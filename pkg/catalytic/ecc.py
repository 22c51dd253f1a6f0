"""
Shortened binary BCH codes and the lossy-to-lossless wrapper.

A codeword for a c-bit message is ``message | parity | zero padding`` of
total length c + (2e+1) * ceil(log2(c+e)). The parity is the remainder of
message(x) * x^deg(g) modulo the generator g, the product of the distinct
minimal polynomials of alpha^1 .. alpha^2e over the smallest field whose
length covers c + deg(g).
"""
import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

from .bits import all_bitstrings, check_bits, clog2, from_bits, to_bits, xor_bits
from .conf import lab_settings
from .exceptions import BudgetExceeded, DecodeFailure, InadmissibleParams
from .gf import field as gf_field
from .gf import minimal_polynomial, poly_degree, poly_mod, poly_mul
from .simulator import tau_rows
from .transforms import WILD, MachineBuilder, embed, script

logger = logging.getLogger(__name__)

MAX_FIELD_WIDTH = 16


@dataclass(frozen=True)
class BchParams:
    c: int
    e: int
    redundancy: int
    mu: int
    generator: int

    @property
    def parity_bits(self):
        return poly_degree(self.generator)

    @property
    def length(self):
        return self.c + self.redundancy

    @property
    def code_length(self):
        """Length of the shortened BCH part, before zero padding."""
        return self.c + self.parity_bits

    @cached_property
    def gf(self):
        return gf_field(self.mu) if self.mu else None


def stated_redundancy(c, e):
    return (2 * e + 1) * clog2(c + e)


def bch_params(c, e):
    if c < 1 or e < 0:
        raise InadmissibleParams(f'Need c >= 1 and e >= 0, got c={c}, e={e}.')
    redundancy = stated_redundancy(c, e)
    if e == 0:
        return BchParams(c, 0, redundancy, 0, 1)
    for mu in range(2, MAX_FIELD_WIDTH + 1):
        gf = gf_field(mu)
        if 2 * e >= gf.size - 1:
            continue
        generator = 1
        seen = set()
        for power in range(1, 2 * e + 1):
            factor = minimal_polynomial(gf, power)
            if factor not in seen:
                seen.add(factor)
                generator = poly_mul(generator, factor)
        if gf.size - 1 < c + poly_degree(generator):
            continue
        if poly_degree(generator) > redundancy:
            raise InadmissibleParams(
                f'BCH for c={c}, e={e} needs {poly_degree(generator)} parity bits; '
                f'the budget is {redundancy}.'
            )
        return BchParams(c, e, redundancy, mu, generator)
    raise InadmissibleParams(f'No field up to GF(2^{MAX_FIELD_WIDTH}) carries c={c}, e={e}.')


def parity(params, message):
    if not params.parity_bits:
        return ''
    shifted = from_bits(message) << params.parity_bits
    return to_bits(poly_mod(shifted, params.generator), params.parity_bits)


def enc_bch(message, e, params=None):
    params = bch_params(len(message), e) if params is None else params
    check_bits(message, params.c, 'message')
    return message + parity(params, message) + '0' * (params.redundancy - params.parity_bits)


def _syndromes(params, word):
    gf = params.gf
    top = params.code_length - 1
    exponents = [top - k for k, bit in enumerate(word) if bit == '1']
    syndromes = []
    for j in range(1, 2 * params.e + 1):
        value = 0
        for p in exponents:
            value ^= gf.alpha_pow(j * p)
        syndromes.append(value)
    return syndromes


def berlekamp_massey(gf, syndromes):
    """Error locator polynomial, lowest degree first."""
    locator, previous = [1], [1]
    length, shift, last = 0, 1, 1
    for n, syndrome in enumerate(syndromes):
        discrepancy = syndrome
        for i in range(1, length + 1):
            if i < len(locator):
                discrepancy ^= gf.mul(locator[i], syndromes[n - i])
        if discrepancy == 0:
            shift += 1
            continue
        scale = gf.mul(discrepancy, gf.inv(last))
        updated = locator + [0] * max(0, len(previous) + shift - len(locator))
        for i, coeff in enumerate(previous):
            updated[i + shift] ^= gf.mul(scale, coeff)
        if 2 * length <= n:
            previous, locator = locator, updated
            length, last, shift = n + 1 - length, discrepancy, 1
        else:
            locator = updated
            shift += 1
    return locator[:length + 1], length


def dec_bch(word, e, params=None, c=None):
    """Message of the unique codeword within distance e, else DecodeFailure."""
    if params is None:
        if c is None:
            raise DecodeFailure('dec_bch needs the message length c or explicit params.')
        params = bch_params(c, e)
    check_bits(word, params.length, 'codeword')
    budget = params.e - word[params.code_length:].count('1')
    if budget < 0:
        raise DecodeFailure('Too many nonzero padding bits.')
    code = word[:params.code_length]
    if not params.parity_bits:
        return code[:params.c]
    syndromes = _syndromes(params, code)
    if not any(syndromes):
        return code[:params.c]
    gf = params.gf
    locator, count = berlekamp_massey(gf, syndromes)
    if count > budget:
        raise DecodeFailure(f'The locator has degree {count}, more than the {budget} correctable errors.')
    top = params.code_length - 1
    fixed = list(code)
    roots = 0
    for p in range(params.code_length):
        x = gf.alpha_pow(-p)
        value = 0
        for i, coeff in enumerate(locator):
            value ^= gf.mul(coeff, gf.pow(x, i))
        if value == 0:
            roots += 1
            k = top - p
            fixed[k] = '1' if fixed[k] == '0' else '0'
    fixed = ''.join(fixed)
    if roots != count or any(_syndromes(params, fixed)):
        raise DecodeFailure('The error locator does not split over the code positions.')
    return fixed[:params.c]


@dataclass(frozen=True)
class NearestCodeword:
    message: str
    distance: int
    ambiguous: bool


def brute_force_decode(word, params):
    if 2 ** params.c > lab_settings.BRUTE_FORCE_BUDGET:
        raise BudgetExceeded(f'2^{params.c} messages exceed BRUTE_FORCE_BUDGET.')
    best, best_distance, ties = None, None, 0
    for message in all_bitstrings(params.c):
        distance = xor_bits(enc_bch(message, params.e, params), word).count('1')
        if best_distance is None or distance < best_distance:
            best, best_distance, ties = message, distance, 1
        elif distance == best_distance:
            ties += 1
    return NearestCodeword(best, best_distance, ties > 1)


@dataclass
class EccAudit:
    c: int
    e: int
    length: int
    redundancy: int
    mu: int
    parity_bits: int
    words_checked: int = 0
    failures: list = field(default_factory=list)
    brute_force_mismatches: int = 0
    min_distance: int | None = None

    @property
    def passed(self):
        return (not self.failures and not self.brute_force_mismatches
                and (self.min_distance is None or self.min_distance >= 2 * self.e + 1))


def ecc_audit(c, e, cross_check=True):
    """Every message under every flip set of weight <= e decodes back."""
    params = bch_params(c, e)
    if 2 ** c > lab_settings.BRUTE_FORCE_BUDGET:
        raise BudgetExceeded(f'2^{c} messages exceed BRUTE_FORCE_BUDGET.')
    audit = EccAudit(c, e, params.length, params.redundancy, params.mu, params.parity_bits)
    codewords = {message: enc_bch(message, e, params) for message in all_bitstrings(c)}
    for message, word in codewords.items():
        for weight in range(e + 1):
            for flips in itertools.combinations(range(params.length), weight):
                corrupted = list(word)
                for k in flips:
                    corrupted[k] = '1' if corrupted[k] == '0' else '0'
                corrupted = ''.join(corrupted)
                audit.words_checked += 1
                try:
                    decoded = dec_bch(corrupted, e, params)
                except DecodeFailure:
                    decoded = None
                if decoded != message:
                    audit.failures.append((message, flips))
                if cross_check:
                    nearest = min(
                        codewords, key=lambda m: (xor_bits(codewords[m], corrupted).count('1'), m)
                    )
                    audit.brute_force_mismatches += nearest != message
    if len(codewords) > 1:
        audit.min_distance = min(
            xor_bits(a, b).count('1') for a, b in itertools.combinations(codewords.values(), 2)
        )
    logger.debug('BCH audit c=%d e=%d: %d words, %d failures', c, e, audit.words_checked,
                 len(audit.failures))
    return audit


# Lossless wrapper

def parity_columns(params):
    """parity(unit_j) for every message position j."""
    return [parity(params, to_bits(1 << (params.c - 1 - j), params.c)) for j in range(params.c)]


def _parity_sweep(builder, tag, params, columns, s, then):
    """XOR parity(cat) into the parity cells.

    Starts with the catalytic head on cell 0 and the work head on cell s, and
    ends there.
    """
    c, d = params.c, params.parity_bits
    stops = [f'{tag}.A{j}' for j in range(c)]
    back = [(WILD, WILD, (0, 0, -1))] * (c - 1)
    finish = script(builder, f'{tag}.home', back, then=then)
    for j, column in enumerate(columns):
        last = j == c - 1
        after = finish if last else stops[j + 1]
        xor_steps = [('!' if bit == '1' else WILD, WILD, (0, 1 if k < d - 1 else 0, 0))
                     for k, bit in enumerate(column)]
        xor_steps += [(WILD, WILD, (0, -1, 0))] * (d - 1)
        if not last:
            xor_steps.append((WILD, WILD, (0, 0, 1)))
        add_column = script(builder, f'{tag}.B{j}', xor_steps, then=after)
        builder.add(stops[j], after, catbit=0, moves=(0, 0, 0 if last else 1))
        builder.add(stops[j], add_column, catbit=1)
    return stops[0]


def _correct(builder, tag, params, columns, kind, halt):
    """Match the parity cells against each flip set of weight <= e and apply the first hit."""
    d = params.parity_bits
    candidates = [
        flips for weight in range(params.e + 1)
        for flips in itertools.combinations(range(params.c), weight)
    ]
    entry = halt
    # built back to front so every candidate knows where a mismatch continues
    for index in reversed(range(len(candidates))):
        flips = candidates[index]
        expected = ['0'] * d
        for j in flips:
            expected = list(xor_bits(''.join(expected), columns[j]))
        steps, position = [], 0
        for j in flips:
            steps += [(WILD, WILD, (0, 0, 1))] * (j - position)
            steps.append((WILD, '!', (0, 0, 0)))
            position = j
        apply = script(builder, f'{tag}.{kind.value}.fix{index}', steps, then=halt)
        names = [f'{tag}.{kind.value}.cmp{index}.{k}' for k in range(d)]
        for k, name in enumerate(names):
            bit = int(expected[k])
            hit = names[k + 1] if k + 1 < d else apply
            builder.add(name, hit, workbit=bit, moves=(0, 1 if k + 1 < d else 0, 0))
            miss = script(builder, f'{tag}.{kind.value}.miss{index}.{k}',
                          [(WILD, WILD, (0, -1, 0))] * k, then=entry)
            builder.add(name, miss, workbit=1 - bit)
        entry = names[0]
    return entry


def build_lossless_wrapper(machine, e):
    """Encode tau into extra work cells, run, and repair up to ``e`` flipped cells."""
    params = bch_params(machine.c, e)
    s = machine.s
    builder = MachineBuilder(f'{machine.name}-bch{e}', s + params.redundancy, machine.c,
                             machine.randomized)
    halts = builder.halts(machine.halt_kinds)
    if not params.parity_bits:
        return builder.build(embed(builder, machine, 'm', lambda kind, positions: halts[kind]), halts)
    columns = parity_columns(params)

    def on_halt(kind, positions):
        _, whead, chead = positions
        home = [(WILD, WILD, (0, 0, -1))] * chead + [(WILD, WILD, (0, 1, 0))] * (s - whead)
        correct = _correct(builder, 'dec', params, columns, kind, halts[kind])
        check = _parity_sweep(builder, f'dec.{kind.value}', params, columns, s, then=correct)
        return script(builder, f'home.{kind.value}.{whead}.{chead}', home, then=check)

    inner = embed(builder, machine, 'm', on_halt, track=(False, True, True))
    rewind = script(builder, 'rewind', [(WILD, WILD, (0, -1, 0))] * s, then=inner)
    encode = _parity_sweep(builder, 'enc', params, columns, s, then=rewind)
    start = script(builder, 'seek', [(WILD, WILD, (0, 1, 0))] * s, then=encode)
    return builder.build(start, halts)


def lossless_wrapper(machine, input, delta, horizon=None):
    """Wrap with e_corrected = ceil(e'/delta), e' the worst expected error count."""
    _, rows = tau_rows(machine, input, horizon=horizon)
    expected = max(row.expected_errors for row in rows)
    e = -(-Fraction(expected) // Fraction(delta))
    logger.info('Wrapping %s: expected errors %s, correcting %d', machine.name, expected, e)
    return build_lossless_wrapper(machine, int(e))


def wrapper_overhead(machine, e):
    return bch_params(machine.c, e).redundancy
