"""
Affine hash family over GF(2^m) and the hash-chain PRG built from it.

A hash ``h(x) = a*x + b`` is stored in 2m bits, a first. The "first bit" of an
output is its most significant bit. PRG_i(seed) is the concatenation of the
first bits of h_i(seed), ..., h_1(seed).
"""
import enum
import itertools
import logging
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

from .bits import check_bits, from_bits, to_bits
from .coins import seeded_bits, take
from .conf import lab_settings
from .exceptions import BudgetExceeded, IndexRange, WidthMismatch
from .gf import field
from .machine import predecessors
from .oracle import SeedSweep, compute_Si, prg_error_profile

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class HashFn:
    m: int
    a: int
    b: int

    def __call__(self, x):
        return field(self.m).mul(self.a, x) ^ self.b

    def first_bit(self, x):
        return self(x) >> (self.m - 1)

    def encode(self):
        return to_bits(self.a, self.m) + to_bits(self.b, self.m)

    @classmethod
    def decode(cls, bits, m):
        check_bits(bits, 2 * m, 'hash')
        return cls(m, from_bits(bits[:m]), from_bits(bits[m:]))

    @property
    def rank(self):
        """Position in the family's lexicographic order."""
        return (self.a << self.m) | self.b

    @classmethod
    def from_rank(cls, m, rank):
        return cls(m, rank >> m, rank & ((1 << m) - 1))


def hash_family(m):
    for a, b in itertools.product(range(2 ** m), repeat=2):
        yield HashFn(m, a, b)


def hash_eval(h, x):
    check_bits(x, h.m, 'x')
    return to_bits(h(from_bits(x)), h.m)


@dataclass(frozen=True)
class PrgSpec:
    """Hashes in tape order, h_l first."""
    m: int
    hashes: tuple

    @property
    def l(self):
        return len(self.hashes)

    def hash_at(self, k):
        if not 1 <= k <= self.l:
            raise IndexRange(f'There is no h_{k} among {self.l} hashes.')
        return self.hashes[self.l - k]

    def level_bit(self, k, seed):
        return self.hash_at(k).first_bit(seed)

    def encode(self):
        return ''.join(h.encode() for h in self.hashes)

    @classmethod
    def from_bits(cls, bits, m, l):
        if len(bits) != 2 * m * l:
            raise WidthMismatch(f'{l} hashes of width {m} take {2 * m * l} bits, got {len(bits)}.')
        return cls(m, tuple(HashFn.decode(bits[k:k + 2 * m], m) for k in range(0, len(bits), 2 * m)))

    def replace(self, k, h):
        hashes = list(self.hashes)
        hashes[self.l - k] = h
        return PrgSpec(self.m, tuple(hashes))


def prg_eval(prg, i, seed):
    if not 0 <= i <= prg.l:
        raise IndexRange(f'PRG_{i} is undefined for l = {prg.l}.')
    x = from_bits(check_bits(seed, prg.m, 'seed'))
    return ''.join(str(prg.level_bit(k, x)) for k in range(i, 0, -1))


def random_prg(m, l, seed):
    stream = seeded_bits(seed)
    return PrgSpec.from_bits(''.join(map(str, take(stream, 2 * m * l))), m, l)


def identity_prg(m, l):
    return PrgSpec(m, (HashFn(m, 1, 0),) * l)


# Independence and goodness

class SeedHalf(enum.Enum):
    EMPTY = frozenset()
    ZERO_HALF = frozenset({0})
    ONE_HALF = frozenset({1})
    ALL = frozenset({0, 1})

    @property
    def rho(self):
        return Fraction(len(self.value), 2)

    def admits(self, bit):
        return bit in self.value

    @classmethod
    def for_labels(cls, labels):
        return cls(frozenset(labels))


def compute_A(machine, input, tau, prg, i, node, kind, sweep=None):
    sweep = SeedSweep(machine, input, tau, prg, i) if sweep is None else sweep
    return sweep.seeds_containing(node, i, kind)


def compute_B(machine, input, node_v, node_z):
    """Seeds whose h_{i+1} first bit labels an edge from z down to v."""
    labels = {label for label, u in predecessors(machine, input, node_v) if u == node_z}
    if node_v == node_z and machine.is_halting(node_v.state):
        labels = {0, 1}
    return SeedHalf.for_labels(labels)


def neighbours_above(machine, input, conf):
    """Configurations with an edge into ``conf`` from the next level up."""
    found = {u for _, u in predecessors(machine, input, conf)}
    if machine.is_halting(conf.state):
        found.add(conf)
    return sorted(found, key=str)


def deviation(h, A, B, m):
    hits = sum(1 for x in A if B.admits(h.first_bit(x)))
    rho_A = Fraction(len(A), 2 ** m)
    return abs(Fraction(hits, 2 ** m) - rho_A * B.rho)


def is_independent(h, A, B, alpha):
    return deviation(h, A, B, h.m) <= alpha


@dataclass
class GoodnessContext:
    """Every (A, B) pair a good h_{i+1} must be independent for."""
    m: int
    i: int
    members: list
    pairs: list

    @property
    def empty(self):
        return not self.pairs


def goodness_context(machine, input, tau, prg, i, threshold, sweep=None):
    sweep = SeedSweep(machine, input, tau, prg, i) if sweep is None else sweep
    members = sorted(compute_Si(machine, input, tau, prg, i, threshold, sweep), key=str)
    pairs = []
    for v in members:
        a_acc = sweep.seeds_containing(v, i, SeedSweep.kinds[0])
        a_rej = sweep.seeds_containing(v, i, SeedSweep.kinds[1])
        for z in neighbours_above(machine, input, v):
            B = compute_B(machine, input, v, z)
            pairs.append((v, z, a_acc, B))
            pairs.append((v, z, a_rej, B))
    return GoodnessContext(prg.m, i, members, pairs)


def is_good(h, context, alpha):
    return all(is_independent(h, A, B, alpha) for _, _, A, B in context.pairs)


def bad_hashes(context, alpha):
    """Bad members of the family in lexicographic (a, b) order."""
    if 2 ** (2 * context.m) > lab_settings.BRUTE_FORCE_BUDGET:
        raise BudgetExceeded(f'The GF(2^{context.m}) family has {2 ** (2 * context.m)} members.')
    return [h for h in hash_family(context.m) if not is_good(h, context, alpha)]


def bad_fraction(A, B, alpha, m):
    bad = sum(1 for h in hash_family(m) if not is_independent(h, A, B, alpha))
    return Fraction(bad, 2 ** (2 * m))


def nisan_bad_bound(rho_A, rho_B, m, alpha):
    rho_A, rho_B, alpha = Fraction(rho_A), Fraction(rho_B), Fraction(alpha)
    return rho_A * rho_B * (1 - rho_B) / (2 ** m * alpha ** 2)


def aggregate_bad_bound(S_size, d_M, m, alpha):
    return Fraction(2 * d_M * S_size) / (2 ** m * Fraction(alpha) ** 2)


@dataclass
class AuditReport:
    m: int
    family_size: int
    constraints: int
    failures: int

    @property
    def holds(self):
        return self.failures == 0


def pairwise_independence_audit(m, family=None):
    family = list(hash_family(m) if family is None else family)
    size = 2 ** m
    counts = Counter()
    for h in family:
        outputs = [h(x) for x in range(size)]
        for x, y in itertools.permutations(range(size), 2):
            counts[(x, y, outputs[x], outputs[y])] += 1
    constraints = failures = 0
    for x, y in itertools.permutations(range(size), 2):
        for u, v in itertools.product(range(size), repeat=2):
            constraints += 1
            if counts[(x, y, u, v)] * size * size != len(family):
                failures += 1
    return AuditReport(m, len(family), constraints, failures)


# Error recurrence

@dataclass(frozen=True)
class RecurrenceRow:
    i: int
    good: bool
    gamma_acc: Fraction
    gamma_rej: Fraction
    next_acc: Fraction
    next_rej: Fraction
    bound: Fraction

    @property
    def holds(self):
        return not self.good or (self.next_acc <= self.gamma_acc + self.bound
                                 and self.next_rej <= self.gamma_rej + self.bound)


def gamma_recurrence(machine, input, tau, prg, threshold, alpha=None):
    """Per i < l: is h_{i+1} good, and does gamma_{i+1} <= gamma_i + 2 alpha + threshold."""
    alpha = Fraction(1, 2 * prg.l ** 2) if alpha is None else Fraction(alpha)
    threshold = Fraction(threshold)
    sweep = SeedSweep(machine, input, tau, prg, prg.l)
    profile = prg_error_profile(machine, input, tau, prg, prg.l, sweep)
    rows = []
    for i in range(prg.l):
        context = goodness_context(machine, input, tau, prg, i, threshold, sweep)
        good = is_good(prg.hash_at(i + 1), context, alpha)
        rows.append(RecurrenceRow(
            i, good, *profile[i], *profile[i + 1], bound=2 * alpha + threshold,
        ))
        logger.debug('gamma recurrence %s i=%d good=%s', machine.name, i, good)
    return rows
