"""
Decision procedures built on compress-or-decide and on tree traversal.
"""
import itertools
import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

from .bits import all_bitstrings, xor_bits
from .compressor import GENERAL, Compressor, StructuredTape
from .confgraph import ConfigurationForest, EulerTour, Exceeds, count_size, tour_lap
from .exceptions import AllChunksUndecided, LengthMismatch, NotDeterministic, TraversalError
from .machine import HaltKind, check_input, halt_configuration, start_configuration
from .simulator import run, tau_rows

logger = logging.getLogger(__name__)

ANSWERS = {HaltKind.ACCEPT: 'accept', HaltKind.REJECT: 'reject', HaltKind.DONTKNOW: 'dontknow'}


def ground_truth(machine, input, horizon=None, jobs=None):
    """1 when acceptance averaged over every tau is at least 1/2."""
    _, rows = tau_rows(machine, input, 1, horizon, jobs)
    average = sum((row.success for row in rows), Fraction(0)) / len(rows)
    return int(average >= Fraction(1, 2))


# Chunked compress-or-decide

@dataclass
class ChunkedOutcome:
    answer: int
    decided_by: str
    outcomes: list
    final_tape: str
    freed_bits: int = 0

    @property
    def chunk_results(self):
        return [outcome.result for outcome in self.outcomes]


def chunk_width(c, m, l):
    return c + 2 * m * l + 3 * m


def split_chunks(long_tape, chunk_count, c, m, l):
    width = chunk_width(c, m, l)
    if len(long_tape) < chunk_count * width:
        raise LengthMismatch(f'{chunk_count} chunks of {width} bits need {chunk_count * width} bits, '
                             f'got {len(long_tape)}.')
    return [StructuredTape.from_bits(long_tape[k * width:(k + 1) * width], c, m, l)
            for k in range(chunk_count)]


def _join(tapes, long_tape, width):
    return ''.join(tape.bits for tape in tapes) + long_tape[len(tapes) * width:]


def chunked_decider(machine, input, long_tape, chunk_count, params, mode=GENERAL, horizon=None):
    """Runs F on chunks in order; when every chunk compressed, decides in the freed space.

    Compressed chunks are restored with R before returning, so the long tape
    comes back unchanged on every path.
    """
    compressor = Compressor(machine, input, params)
    width = chunk_width(machine.c, params.m, params.l)
    tapes = split_chunks(long_tape, chunk_count, machine.c, params.m, params.l)
    working = list(tapes)
    outcomes = []

    def restore():
        for k, outcome in enumerate(outcomes):
            if outcome.result == 'compressed':
                working[k] = compressor.r_subroutine(outcome.tape)
        return _join(working, long_tape, width)

    for k, tape in enumerate(tapes):
        outcome = compressor.f_subroutine(tape, mode)
        outcomes.append(outcome)
        if outcome.decisive:
            logger.debug('Chunk %d decided %s', k, outcome.result)
            return ChunkedOutcome(int(outcome.result == 'accept'), 'chunk', outcomes, restore())
        if outcome.result == 'compressed':
            working[k] = outcome.tape
    if any(outcome.result != 'compressed' for outcome in outcomes):
        raise AllChunksUndecided(
            f'{sum(o.result == "dontknow" for o in outcomes)} of {chunk_count} chunks answered DontKnow.',
            final_tape=restore(),
        )
    freed = sum(outcome.freed_bits for outcome in outcomes)
    logger.info('All %d chunks compressed, %d bits freed', chunk_count, freed)
    answer = ground_truth(machine, input, horizon)
    return ChunkedOutcome(answer, 'freed_space', outcomes, restore(), freed_bits=freed)


# Error vectors

def vector_count(c, e):
    return sum(math.comb(c, weight) for weight in range(min(10 * e, c) + 1))


def error_vectors(c, e):
    """Vectors of weight at most 10e, by weight and then lexicographically."""
    for weight in range(min(10 * e, c) + 1):
        for ones in itertools.combinations(range(c), weight):
            yield ''.join('1' if k in ones else '0' for k in range(c))


@dataclass
class ErrorVectorOutcome:
    result: str
    tau: str
    vector: str | None = None
    tried: int = 0


def error_vector_decider(machine, input, tau, e):
    if not machine.is_deterministic:
        raise NotDeterministic(f'{machine.name} is randomized.')
    check_input(input)
    tour = EulerTour(ConfigurationForest(machine, input))
    start = start_configuration(machine, tau)
    tried = 0
    for z in error_vectors(machine.c, e):
        tried += 1
        shifted = xor_bits(tau, z)
        for kind in (HaltKind.ACCEPT, HaltKind.REJECT):
            if kind not in machine.halt_kinds:
                continue
            if start in tour_lap(tour, halt_configuration(machine, kind, shifted)):
                return ErrorVectorOutcome(ANSWERS[kind], tau, z, tried)
    return ErrorVectorOutcome('dontknow', tau, tried=tried)


def error_vector_profile(machine, input, e):
    """Result counts of the error-vector decider over every tau."""
    return Counter(error_vector_decider(machine, input, tau, e).result
                   for tau in all_bitstrings(machine.c))


# Zero-error machines

@dataclass
class ChunkRetryOutcome:
    answer: int
    segment: int | None
    erased: bool
    final_tape: str


def _decisive_run(machine, input, tau, horizon):
    outcome = run(machine, input, tau, horizon=horizon)
    if outcome.halt is HaltKind.DONTKNOW:
        return None
    return int(outcome.halt is HaltKind.ACCEPT)


def chunk_retry_decider(machine, input, long_tape, iterations, horizon=None):
    """Tries ``iterations`` c-bit segments in turn; if all give up, erases the first."""
    if not machine.is_deterministic:
        raise NotDeterministic(f'{machine.name} is randomized.')
    c = machine.c
    if len(long_tape) < iterations * c:
        raise LengthMismatch(f'{iterations} segments of {c} bits need {iterations * c} bits.')
    for k in range(iterations):
        answer = _decisive_run(machine, input, long_tape[k * c:(k + 1) * c], horizon)
        if answer is not None:
            return ChunkRetryOutcome(answer, k, False, long_tape)
    for tau in all_bitstrings(c):
        answer = _decisive_run(machine, input, tau, horizon)
        if answer is not None:
            logger.info('All %d segments gave up; erased the first and used tau=%s', iterations, tau)
            return ChunkRetryOutcome(answer, None, True, '0' * c + long_tape[c:])
    raise AllChunksUndecided(f'{machine.name} gives up on every tau.')


def erasure_probability(machine, input, iterations, horizon=None):
    bottom = sum(1 for tau in all_bitstrings(machine.c)
                 if _decisive_run(machine, input, tau, horizon) is None)
    return Fraction(bottom, 2 ** machine.c) ** iterations


@dataclass
class ZpOutcome:
    result: str
    size: object
    steps: int = 0


def polytime_zptau(machine, input, tau, size_bound):
    """Answers only when the tree holding start_tau has at most ``size_bound`` nodes."""
    start = start_configuration(machine, tau)
    size = count_size(machine, input, start, size_bound)
    if isinstance(size, Exceeds):
        return ZpOutcome('dontknow', size)
    tour = EulerTour(ConfigurationForest(machine, input))
    conf, steps, kind = start, 0, None
    while kind is None:
        conf = tour.next_vertex(conf)
        steps += 1
        kind = machine.halting_states.get(conf.state)
        if conf == start:
            break
    for _ in range(steps):
        conf = tour.prev_vertex(conf)
    if conf != start:
        raise TraversalError(f'Stepping back from the halt ended at {conf}, not {start}.')
    return ZpOutcome(ANSWERS.get(kind, 'dontknow'), size, steps)


@dataclass
class ZpProfile:
    non_bottom: Fraction
    good_and_small: Fraction
    wrong: int
    results: dict = field(default_factory=dict)


def zptau_profile(machine, input, size_bound, horizon=None):
    answered = good_small = wrong = 0
    results = Counter()
    for tau in all_bitstrings(machine.c):
        outcome = polytime_zptau(machine, input, tau, size_bound)
        results[outcome.result] += 1
        truth = run(machine, input, tau, horizon=horizon).halt
        if outcome.result != 'dontknow':
            answered += 1
            wrong += outcome.result != ANSWERS[truth]
        if truth is not HaltKind.DONTKNOW and not isinstance(outcome.size, Exceeds):
            good_small += 1
    total = 2 ** machine.c
    return ZpProfile(Fraction(answered, total), Fraction(good_small, total), wrong, dict(results))
