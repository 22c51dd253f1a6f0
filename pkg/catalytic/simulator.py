"""
Running machines and checking class membership.

``run`` executes one path with an explicit coin stream. The verifiers work on
exact distributions over all coin streams (``oracle.halt_distribution``),
exhaustively over every initial catalytic setting.
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import partial

from .bits import all_bitstrings, check_bits
from .conf import lab_settings
from .exceptions import CoinsExhausted, HorizonExceeded, LengthMismatch, NotDeterministic
from .machine import HaltKind, start_configuration, step, universe_size
from .oracle import halt_distribution
from .parallel import ordered_map

logger = logging.getLogger(__name__)

ANSWER_KINDS = {1: HaltKind.ACCEPT, 0: HaltKind.REJECT}


@dataclass(frozen=True)
class RunOutcome:
    halt: HaltKind
    final_cat: str
    steps: int
    coins_consumed: int


def default_horizon(machine, n):
    return lab_settings.HORIZON_FACTOR * universe_size(machine, n)


def run(machine, input, tau, coins=(), horizon=None):
    conf = start_configuration(machine, tau)
    horizon = default_horizon(machine, len(input)) if horizon is None else horizon
    coins = iter(coins)
    steps = consumed = 0
    while not machine.is_halting(conf.state):
        if steps >= horizon:
            raise HorizonExceeded(f'{machine.name} did not halt within {horizon} steps.')
        coin = 0
        if machine.randomized:
            try:
                coin = next(coins)
            except StopIteration:
                raise CoinsExhausted(f'{machine.name} needed more than {consumed} coins.')
            consumed += 1
        conf = step(machine, input, conf, coin)
        steps += 1
    return RunOutcome(machine.halting_states[conf.state], conf.cat, steps, consumed)


def hamming(a, b):
    if len(a) != len(b):
        raise LengthMismatch(f'Cannot compare {len(a)} bits with {len(b)} bits.')
    return sum(x != y for x, y in zip(a, b))


@dataclass(frozen=True)
class TauRow:
    tau: str
    success: Fraction
    reset: Fraction
    expected_errors: Fraction
    dontknow: Fraction


@dataclass
class ClassReport:
    kind: str
    success_probability: Fraction
    reset_probability: Fraction
    expected_errors: Fraction
    satisfied: bool
    witnesses: dict
    horizon: int
    thresholds: dict = field(default_factory=dict)
    rows: list = field(default_factory=list)


def tau_row(machine, input, expected_answer, horizon, tau):
    dist = halt_distribution(machine, input, tau, horizon)
    target = ANSWER_KINDS[expected_answer]
    success = reset = errors = dontknow = Fraction(0)
    for (kind, cat), p in dist.items():
        if kind is target:
            success += p
        elif kind is HaltKind.DONTKNOW:
            dontknow += p
        if cat == tau:
            reset += p
        errors += p * hamming(cat, tau)
    return TauRow(tau, success, reset, errors, dontknow)


def tau_rows(machine, input, expected_answer=1, horizon=None, jobs=None):
    check_bits(input, name='input')
    horizon = default_horizon(machine, len(input)) if horizon is None else horizon
    worker = partial(tau_row, machine, input, expected_answer, horizon)
    return horizon, ordered_map(worker, all_bitstrings(machine.c), jobs)


def _worst(rows):
    low_success = min(rows, key=lambda row: row.success)
    low_reset = min(rows, key=lambda row: row.reset)
    high_errors = max(rows, key=lambda row: row.expected_errors)
    return low_success, low_reset, high_errors


def verify_bp_delta_eps(machine, input, expected_answer, delta, eps, horizon=None, jobs=None):
    horizon, rows = tau_rows(machine, input, expected_answer, horizon, jobs)
    low_success, low_reset, high_errors = _worst(rows)
    return ClassReport(
        kind='bp',
        success_probability=low_success.success,
        reset_probability=low_reset.reset,
        expected_errors=high_errors.expected_errors,
        satisfied=(low_success.success >= Fraction(1, 2) + eps and low_reset.reset >= 1 - delta),
        witnesses={'success': low_success.tau, 'reset': low_reset.tau, 'errors': high_errors.tau},
        horizon=horizon,
        thresholds={'delta': Fraction(delta), 'eps': Fraction(eps)},
        rows=rows,
    )


def verify_avg_r(machine, input, e, horizon=None, expected_answer=1, jobs=None):
    horizon, rows = tau_rows(machine, input, expected_answer, horizon, jobs)
    low_success, low_reset, high_errors = _worst(rows)
    return ClassReport(
        kind='avg-r',
        success_probability=low_success.success,
        reset_probability=low_reset.reset,
        expected_errors=high_errors.expected_errors,
        satisfied=high_errors.expected_errors <= e and low_success.success >= Fraction(2, 3),
        witnesses={'success': low_success.tau, 'reset': low_reset.tau, 'errors': high_errors.tau},
        horizon=horizon,
        thresholds={'e': Fraction(e)},
        rows=rows,
    )


def verify_avg_tau(machine, input, e, horizon=None, expected_answer=1, jobs=None):
    if not machine.is_deterministic:
        raise NotDeterministic(f'{machine.name} uses its coins.')
    horizon, rows = tau_rows(machine, input, expected_answer, horizon, jobs)
    total = Fraction(len(rows))
    correct = sum(row.success for row in rows) / total
    average_errors = sum(row.expected_errors for row in rows) / total
    wrong = [row.tau for row in rows if row.success != 1]
    return ClassReport(
        kind='avg-tau',
        success_probability=correct,
        reset_probability=sum(row.reset for row in rows) / total,
        expected_errors=average_errors,
        satisfied=average_errors <= e and not wrong,
        witnesses={'wrong': wrong[0] if wrong else '', 'errors': _worst(rows)[2].tau},
        horizon=horizon,
        thresholds={'e': Fraction(e)},
        rows=rows,
    )


@dataclass
class OneSidedReport:
    delta: Fraction
    eps: Fraction
    yes_always_accepts: bool
    satisfied: bool
    witnesses: dict
    horizon: int


def measure_one_sided(machine, yes_input, no_input, horizon=None, jobs=None):
    """Measured (delta, eps) of a one-sided error machine.

    delta is the worst probability of not resetting over both inputs and every
    tau; eps is the worst probability of rejecting the no-instance.
    """
    horizon_yes, yes_rows = tau_rows(machine, yes_input, 1, horizon, jobs)
    horizon_no, no_rows = tau_rows(machine, no_input, 0, horizon, jobs)
    worst_reset = min(yes_rows + no_rows, key=lambda row: row.reset)
    worst_reject = min(no_rows, key=lambda row: row.success)
    return OneSidedReport(
        delta=1 - worst_reset.reset,
        eps=worst_reject.success,
        yes_always_accepts=all(row.success == 1 for row in yes_rows),
        satisfied=False,
        witnesses={'reset': worst_reset.tau, 'reject': worst_reject.tau},
        horizon=max(horizon_yes, horizon_no),
    )


def verify_r_delta_eps(machine, yes_input, no_input, delta, eps, horizon=None, jobs=None):
    report = measure_one_sided(machine, yes_input, no_input, horizon, jobs)
    report.satisfied = report.yes_always_accepts and report.delta <= delta and report.eps >= eps
    return report
