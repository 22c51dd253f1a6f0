"""
End-to-end checks over the bundled machines, run by ``ctm suite``.

Each check returns a SuiteResult; a check that raises a lab error is reported
as failed with the error text, so one broken check never hides the others.
"""
import itertools
import logging
import math
from dataclasses import dataclass
from fractions import Fraction

from .bits import all_bitstrings, to_bits
from .compressor import POLYTIME, Compressor, Params, StructuredTape
from .confgraph import (
    AtMost, ConfigurationForest, EulerTour, Exceeds, build_explicit_graph, count_size, tour_lap,
)
from .deciders import ANSWERS, error_vector_decider, ground_truth, zptau_profile
from .ecc import bch_params, build_lossless_wrapper, ecc_audit, stated_redundancy
from .exceptions import CatalyticError
from .hashprg import (
    HashFn, PrgSpec, SeedHalf, bad_fraction, gamma_recurrence, nisan_bad_bound,
    pairwise_independence_audit, random_prg,
)
from .machine import HaltKind, bundled_machine_names, load_machine
from .oracle import (
    avg_size_bound, exit_probability, reset_target_uniqueness, tau_beta_graph, tau_multiplicity,
)
from .simulator import default_horizon, measure_one_sided, tau_rows, verify_bp_delta_eps
from .transforms import halve_transform, high_error_machine, square_transform, xor_randomness_transform

logger = logging.getLogger(__name__)

DETERMINISTIC = ('accept_once', 'tape_zeroer', 'long_chain', 'one_flip', 'zptau_half')
LOSSLESS = ('accept_once', 'long_chain', 'zptau_half')
RANDOMIZED = ('coinflip', 'bp_pair', 'one_sided')
BETAS = (Fraction(1, 4), Fraction(1, 2), Fraction(3, 4))


@dataclass
class SuiteResult:
    name: str
    passed: bool
    detail: str


def traversal_fidelity():
    checked = 0
    for name in DETERMINISTIC:
        machine = load_machine(f'bundled:{name}')
        for x in ('0', '1'):
            graph = build_explicit_graph(machine, x)
            tour = EulerTour(ConfigurationForest(machine, x))
            for component in graph.components():
                members = set(component)
                for conf in component:
                    if set(tour_lap(tour, conf)) != members:
                        return False, f'{name} x={x}: the tour from {conf} leaves its component.'
                    if count_size(machine, x, conf, len(members)) != AtMost(len(members)):
                        return False, f'{name} x={x}: count_size of {conf} is wrong.'
                    if len(members) > 1 and count_size(machine, x, conf, len(members) - 1) != Exceeds(len(members) - 1):
                        return False, f'{name} x={x}: count_size of {conf} missed the bound.'
                    checked += 1
    return True, f'{checked} configurations: laps, sizes and bounds agree with explicit components.'


def disjoint_averaging():
    lines = []
    for name in LOSSLESS:
        machine = load_machine(f'bundled:{name}')
        horizon = default_horizon(machine, 1)
        for beta in BETAS[:2]:
            graphs = [tau_beta_graph(machine, '1', tau, beta, horizon) for tau in all_bitstrings(machine.c)]
            for a, b in itertools.combinations(graphs, 2):
                if a.vertices & b.vertices:
                    return False, f'{name} beta={beta}: tau={a.tau} and tau={b.tau} share vertices.'
            average = Fraction(sum(len(g.vertices) for g in graphs), len(graphs))
            bound = avg_size_bound(machine, beta)
            if average > bound:
                return False, f'{name} beta={beta}: average {average} exceeds {bound}.'
            lines.append(f'{name}@{beta}: {average}')
    return True, 'disjoint; averages ' + ', '.join(lines)


def multiplicity():
    worst = {}
    for name in bundled_machine_names():
        machine = load_machine(f'bundled:{name}')
        horizon = default_horizon(machine, 1)
        for beta in BETAS:
            counts = tau_multiplicity(machine, '1', beta, horizon)
            top = max(counts.values(), default=0)
            if top > math.floor(1 / beta):
                return False, f'{name} beta={beta}: a configuration is a node for {top} settings.'
            worst[beta] = max(worst.get(beta, 0), top)
    return True, 'max multiplicity ' + ', '.join(f'{b}: {n}' for b, n in worst.items())


def exit_bound():
    checked = 0
    for name in RANDOMIZED:
        machine = load_machine(f'bundled:{name}')
        for x in ('0', '1'):
            horizon, rows = tau_rows(machine, x)
            for row in rows:
                for beta in BETAS:
                    graph = tau_beta_graph(machine, x, row.tau, beta, horizon)
                    if not graph.vertices:
                        continue
                    exit_p = exit_probability(graph)
                    if exit_p > (1 - row.reset) / (1 - beta):
                        return False, f'{name} x={x} tau={row.tau} beta={beta}: exit {exit_p}.'
                    checked += 1
    return True, f'{checked} (machine, input, tau, beta) graphs within the exit bound.'


def high_error():
    machine = high_error_machine(load_machine('bundled:tape_zeroer'), Fraction(1, 4))
    report = verify_bp_delta_eps(machine, '1', 1, Fraction(1, 4), Fraction(1, 8))
    destroy = 1 - report.reset_probability
    ok = report.success_probability == Fraction(5, 8) and destroy == Fraction(1, 4)
    return ok, f'success {report.success_probability}, destroy {destroy}'


def tradeoffs():
    machine = load_machine('bundled:one_sided')
    base = measure_one_sided(machine, '1', '0')
    halved = measure_one_sided(halve_transform(machine), '1', '0')
    squared = measure_one_sided(square_transform(machine), '1', '0')
    d, e = base.delta, base.eps
    ok = ((halved.delta, halved.eps) == (d / 2, e / 2)
          and (squared.delta, squared.eps) == (2 * d - d * d, 2 * e - e * e))
    return ok, (f'base ({d}, {e}); halved ({halved.delta}, {halved.eps}); '
                f'squared ({squared.delta}, {squared.eps})')


def bch_codes():
    audits = []
    for c, e in itertools.product(range(2, 7), range(3)):
        params = bch_params(c, e)
        if params.length != c + stated_redundancy(c, e):
            return False, f'c={c} e={e}: length {params.length}.'
        audit = ecc_audit(c, e)
        if not audit.passed:
            return False, f'c={c} e={e}: {len(audit.failures)} failures, distance {audit.min_distance}.'
        audits.append(audit.words_checked)
    return True, f'{len(audits)} (c, e) pairs, {sum(audits)} corrupted words decoded.'


def lossless_wrapper_reset():
    wrapped = build_lossless_wrapper(load_machine('bundled:one_flip'), 1)
    for x in ('0', '1'):
        _, rows = tau_rows(wrapped, x, expected_answer=int(x))
        bad = [row.tau for row in rows if row.reset != 1 or row.success != 1]
        if bad:
            return False, f'x={x}: tau={bad[0]} is not restored.'
    return True, f'{wrapped.name}: every tau restored on both inputs.'


def nisan_bound_check():
    for m in (1, 2, 3):
        audit = pairwise_independence_audit(m)
        if not audit.holds:
            return False, f'm={m}: {audit.failures} pairwise constraints fail.'
    subsets = [frozenset(range(k)) for k in (1, 2, 4, 6)] + [frozenset({1, 3, 5, 7})]
    triples = 0
    for A, B, alpha in itertools.product(subsets, (SeedHalf.ZERO_HALF, SeedHalf.ONE_HALF),
                                         (Fraction(1, 4), Fraction(1, 8))):
        measured = bad_fraction(A, B, alpha, 3)
        bound = nisan_bad_bound(Fraction(len(A), 8), B.rho, 3, alpha)
        if measured > bound:
            return False, f'|A|={len(A)} {B.name} alpha={alpha}: {measured} > {bound}.'
        triples += 1
    return True, f'audit holds for m <= 3; {triples} (A, B, alpha) triples within the bound.'


def recurrence():
    machine = load_machine('bundled:bp_pair')
    prg = random_prg(6, 8, seed=7)
    rows = gamma_recurrence(machine, '1', '00', prg, Fraction(1, 8))
    failed = [row.i for row in rows if not row.holds]
    good = sum(row.good for row in rows)
    return not failed, f'{good} of {len(rows)} hashes good; failing levels {failed or "none"}.'


def compression_instances():
    """One constructed instance per tag: (name, compressor, tape, compress, bad_predicate)."""
    accept_once = load_machine('bundled:accept_once')
    long_chain = load_machine('bundled:long_chain')
    stamp = Compressor(accept_once, '', Params(m=6, l=1, H=1, T=64, T_prime=16,
                                               threshold=Fraction(1, 8), delta=Fraction(0),
                                               eps=Fraction(1, 4)))
    stamp_tape = StructuredTape.build('0', PrgSpec(6, (HashFn(6, 1, 0),)), to_bits(3, 18))
    index = Compressor(long_chain, '', Params(m=6, l=2, H=4096, T=16, T_prime=1,
                                              threshold=Fraction(1, 8), delta=Fraction(0),
                                              eps=Fraction(1, 4)))
    index_prg = PrgSpec(6, (HashFn(6, 1, 0), HashFn(6, 1, 0)))
    index_tape = StructuredTape.build('1', index_prg, '0' * 18)
    bad_prg = PrgSpec(6, (HashFn(6, 5, 9), HashFn(6, 0, 3)))
    bad_tape = StructuredTape.build('0', bad_prg, '101' * 6)

    def a_is_zero(h):
        return h.a == 0

    return [
        ('timestamp', stamp, stamp_tape,
         lambda: stamp.timestamp_compress(stamp_tape, (0, HaltKind.ACCEPT, 1)), None),
        ('si_index', index, index_tape, lambda: index.si_index_compress(index_tape, 1), None),
        ('badhash', index, bad_tape, lambda: index.badhash_compress(bad_tape, 0, a_is_zero), a_is_zero),
        ('slprime', index, index_tape, lambda: index.slprime_compress(index_tape), None),
    ]


def compression_round_trips():
    lines = []
    for name, compressor, tape, compress, predicate in compression_instances():
        compressed = compress()
        freed = compressor.freed_bits(compressed, predicate)
        restored = compressor.r_subroutine(compressed, predicate)
        if restored != tape or freed < 1:
            return False, f'{name}: restored={restored == tape} freed={freed}.'
        lines.append(f'{name} frees {freed}')
    return True, '; '.join(lines)


def driver_instances():
    """Tapes on which F itself picks each tag: (name, compressor, tape, mode, tag)."""
    accept_once = load_machine('bundled:accept_once')
    long_chain = load_machine('bundled:long_chain')
    coinflip = load_machine('bundled:coinflip')
    stamp = Compressor(accept_once, '', Params(m=6, l=1, H=1, T=64, T_prime=16,
                                               threshold=Fraction(1, 8), delta=Fraction(0),
                                               eps=Fraction(1, 4)))
    index = Compressor(long_chain, '', Params(m=6, l=2, H=4096, T=16, T_prime=1,
                                              threshold=Fraction(1, 8), delta=Fraction(0),
                                              eps=Fraction(1, 4)))
    bad = Compressor(coinflip, '1', Params(m=6, l=1, H=4096, T=64, T_prime=16,
                                           threshold=Fraction(1, 8), delta=Fraction(0),
                                           eps=Fraction(1, 4), alpha=Fraction(1, 8)))
    slprime = Compressor(long_chain, '', Params(m=6, l=2, H=2 ** 18, T=64, T_prime=1,
                                                threshold=Fraction(1, 8), delta=Fraction(0),
                                                eps=Fraction(1, 4)))
    identity = PrgSpec(6, (HashFn(6, 1, 0), HashFn(6, 1, 0)))
    return [
        ('timestamp', stamp, StructuredTape.build('0', PrgSpec(6, (HashFn(6, 1, 0),)), to_bits(3, 18)),
         'general', '00'),
        ('si_index', index, StructuredTape.build('1', identity, '0' * 18), 'general', '01'),
        ('badhash', bad, StructuredTape.build('00', PrgSpec(6, (HashFn(6, 0, 3),)), '101' * 6),
         'general', '10'),
        ('slprime', slprime, StructuredTape.build('1', identity, '0' * 18), POLYTIME, '11'),
    ]


def f_contract():
    """F on every tape of a small instance, then on one tape per tag."""
    machine = load_machine('bundled:accept_once')
    params = Params(m=2, l=1, H=63, T=64, T_prime=16, threshold=Fraction(1, 8),
                    delta=Fraction(0), eps=Fraction(1, 4))
    compressor = Compressor(machine, '1', params)
    truth = ANSWERS[HaltKind.ACCEPT if ground_truth(machine, '1') else HaltKind.REJECT]
    width = machine.c + 2 * params.m * params.l + 3 * params.m
    counts = {}
    for bits in all_bitstrings(width):
        tape = StructuredTape.from_bits(bits, machine.c, params.m, params.l)
        for mode in ('general', POLYTIME):
            outcome = compressor.f_subroutine(tape, mode)
            counts[outcome.result] = counts.get(outcome.result, 0) + 1
            if outcome.result == 'compressed':
                if compressor.r_subroutine(outcome.tape) != tape:
                    return False, f'R does not undo F on {bits}.'
                continue
            if outcome.tape != tape:
                return False, f'F changed an uncompressed tape {bits}.'
            if outcome.decisive and outcome.result != truth:
                return False, f'F answered {outcome.result} on {bits}.'
            if mode == POLYTIME and outcome.result == 'dontknow':
                return False, f'Polytime mode gave up on {bits}.'
    for name, driver, tape, mode, tag in driver_instances():
        outcome = driver.f_subroutine(tape, mode)
        if outcome.result != 'compressed' or outcome.tag != tag:
            return False, f'{name}: F gave {outcome.result} with tag {outcome.tag}.'
        if driver.r_subroutine(outcome.tape) != tape:
            return False, f'{name}: R does not undo F.'
    return True, ', '.join(f'{k} {v}' for k, v in sorted(counts.items())) + '; every tag round-trips'


def error_vectors_check():
    machine = load_machine('bundled:one_flip')
    for x in ('0', '1'):
        for tau in all_bitstrings(machine.c):
            outcome = error_vector_decider(machine, x, tau, 1)
            expected = 'accept' if x == '1' else 'reject'
            if outcome.result != expected:
                return False, f'x={x} tau={tau}: {outcome.result}.'
    zeroer = load_machine('bundled:tape_zeroer')
    unknown = sum(error_vector_decider(zeroer, '1', tau, 1).result == 'dontknow'
                  for tau in all_bitstrings(zeroer.c))
    fraction = Fraction(unknown, 2 ** zeroer.c)
    return fraction <= Fraction(1, 10), f'one_flip decisive everywhere; tape_zeroer dontknow {fraction}.'


def polytime_zp():
    machine = load_machine('bundled:zptau_half')
    lines = []
    for x in ('0', '1'):
        profile = zptau_profile(machine, x, 10 * 2 ** (4 * machine.s))
        if profile.wrong or profile.non_bottom != profile.good_and_small:
            return False, f'x={x}: wrong {profile.wrong}, {profile.non_bottom} vs {profile.good_and_small}.'
        lines.append(f'x={x} answered {profile.non_bottom}')
    return True, '; '.join(lines)


def xor_transform():
    machine = load_machine('bundled:zptau_half')
    transformed = xor_randomness_transform(machine)
    for x in ('0', '1'):
        answer = int(x)
        _, original = tau_rows(machine, x, answer)
        fraction = sum((row.success for row in original), Fraction(0)) / len(original)
        _, rows = tau_rows(transformed, x, answer)
        for row in rows:
            if row.success != fraction or row.reset != 1:
                return False, f'x={x} tau={row.tau}: success {row.success}, reset {row.reset}.'
    return True, f'every tau succeeds with probability {fraction} and is restored.'


def uniqueness():
    machine = load_machine('bundled:accept_once')
    report = reset_target_uniqueness(machine, '1', 2, default_horizon(machine, 1))
    return report.holds, f'{report.checked} configurations, destroy {report.destroy_probability}.'


CHECKS = [
    ('traversal', traversal_fidelity),
    ('disjoint-averaging', disjoint_averaging),
    ('multiplicity', multiplicity),
    ('exit-bound', exit_bound),
    ('high-error', high_error),
    ('tradeoffs', tradeoffs),
    ('bch', bch_codes),
    ('lossless-wrapper', lossless_wrapper_reset),
    ('nisan', nisan_bound_check),
    ('gamma-recurrence', recurrence),
    ('compression', compression_round_trips),
    ('f-contract', f_contract),
    ('error-vector', error_vectors_check),
    ('polytime-zp', polytime_zp),
    ('xor-transform', xor_transform),
    ('uniqueness', uniqueness),
]


def run_suite(only=None):
    results = []
    for name, check in CHECKS:
        if only and name not in only:
            continue
        try:
            passed, detail = check()
        except CatalyticError as exc:
            passed, detail = False, f'{type(exc).__name__}: {exc}'
        logger.info('suite %s: %s', name, 'pass' if passed else 'FAIL')
        results.append(SuiteResult(name, passed, detail))
    return results
