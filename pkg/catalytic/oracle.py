"""
Exact ground truth.

Everything here is computed with ``fractions.Fraction`` over the full
configuration set or the full seed set, so the results can be compared with
``==`` against the bounded-space procedures elsewhere in the app.
"""
import logging
import math
from collections import Counter, deque
from dataclasses import dataclass, field
from fractions import Fraction

from .bits import all_bitstrings, check_bits
from .coins import seeded_bits
from .conf import lab_settings
from .exceptions import BudgetExceeded, EmptyGraph, NotHalting, TransitionError
from .machine import (
    HaltKind, canonical_serialize, halt_configuration, predecessors, start_configuration,
    step, successors, universe,
)

logger = logging.getLogger(__name__)

HALF = Fraction(1, 2)
BOTTOM = 'bottom'


def _branches(machine, input, conf, strict=False):
    """(probability, next configuration) pairs.

    A coin whose step leaves a tape raises when ``strict``; otherwise its
    mass is simply missing from the pairs.
    """
    coins = (0, 1) if machine.randomized else (0,)
    weight = Fraction(1, len(coins))
    branches = []
    for coin in coins:
        try:
            branches.append((weight, step(machine, input, conf, coin)))
        except TransitionError:
            if strict:
                raise
    return branches


def halt_distribution(machine, input, tau, horizon, strict=True):
    """Exact distribution of (halt kind, final catalytic tape) from start_tau.

    With ``strict`` any mass still running at the horizon raises NotHalting
    and a step off a tape raises its TransitionError; otherwise both the
    running and the lost mass are returned under the key ``None``.
    """
    frontier = {start_configuration(machine, tau): Fraction(1)}
    halted = Counter()
    lost = Fraction(0)
    for _ in range(horizon + 1):
        moving = Counter()
        for conf, p in frontier.items():
            kind = machine.halting_states.get(conf.state)
            if kind is not None:
                halted[(kind, conf.cat)] += p
                continue
            branches = _branches(machine, input, conf, strict)
            lost += p * (1 - sum((q for q, _ in branches), Fraction(0)))
            for q, nxt in branches:
                moving[nxt] += p * q
        frontier = moving
        if not frontier:
            break
    running = sum(frontier.values(), Fraction(0))
    if running and strict:
        raise NotHalting(f'{machine.name} keeps {running} of its mass running after {horizon} steps.')
    result = dict(halted)
    if running + lost:
        result[None] = running + lost
    return result


# Reach tables

@dataclass
class ReachTable:
    """P(acc_tau), P(rej_tau) within k steps for every configuration and k <= horizon."""
    machine: object
    input: str
    tau: str
    horizon: int
    levels: list = field(repr=False)

    def row(self, conf, level=None):
        level = self.horizon if level is None else min(level, self.horizon)
        table = self.levels[min(level, len(self.levels) - 1)]
        acc, rej = table.get(conf, (Fraction(0), Fraction(0)))
        return acc, rej, 1 - acc - rej

    def export_lines(self):
        n = len(self.input)
        for level, table in enumerate(self.levels):
            for conf in sorted(table, key=lambda v: canonical_serialize(self.machine, n, v)):
                acc, rej, other = self.row(conf, level)
                yield f'{canonical_serialize(self.machine, n, conf)},{level},{acc},{rej},{other}'


def reach_probabilities(machine, input, tau, horizon):
    """Backward DP over every configuration. Stops early once a level repeats."""
    check_bits(tau, machine.c, 'tau')
    confs = list(universe(machine, len(input)))
    acc = halt_configuration(machine, HaltKind.ACCEPT, tau)
    rej = halt_configuration(machine, HaltKind.REJECT, tau)
    base = {acc: (Fraction(1), Fraction(0)), rej: (Fraction(0), Fraction(1))}
    moves = {
        conf: _branches(machine, input, conf)
        for conf in confs if not machine.is_halting(conf.state)
    }
    levels = [base]
    zero = (Fraction(0), Fraction(0))
    for _ in range(horizon):
        previous = levels[-1]
        current = dict(base)
        for conf, branches in moves.items():
            p_acc = p_rej = Fraction(0)
            for q, nxt in branches:
                a, r = previous.get(nxt, zero)
                p_acc += q * a
                p_rej += q * r
            if p_acc or p_rej:
                current[conf] = (p_acc, p_rej)
        if current == previous:
            break
        levels.append(current)
    logger.debug('Reach table for %s tau=%s: %d distinct levels', machine.name, tau, len(levels))
    return ReachTable(machine, input, tau, horizon, levels)


def tau_beta_nodes(machine, input, tau, beta, horizon, table=None):
    table = reach_probabilities(machine, input, tau, horizon) if table is None else table
    return {
        conf for conf in universe(machine, len(input))
        if sum(table.row(conf)[:2]) >= beta
    }


@dataclass
class TauBetaGraph:
    tau: str
    beta: Fraction
    start: object
    vertices: set
    edges: list
    horizon: int

    @property
    def bottom_edges(self):
        return sum(1 for _, _, v in self.edges if v == BOTTOM)


def tau_beta_graph(machine, input, tau, beta, horizon, table=None):
    members = tau_beta_nodes(machine, input, tau, beta, horizon, table)
    start = start_configuration(machine, tau)
    graph = TauBetaGraph(tau, Fraction(beta), start, set(), [], horizon)
    if start not in members:
        return graph
    graph.vertices.add(start)
    queue = deque([start])
    while queue:
        conf = queue.popleft()
        if machine.is_halting(conf.state):
            continue
        for coin in (0, 1):
            try:
                nxt = step(machine, input, conf, coin)
            except TransitionError:
                graph.edges.append((conf, coin, BOTTOM))
                continue
            if nxt not in members:
                graph.edges.append((conf, coin, BOTTOM))
                continue
            graph.edges.append((conf, coin, nxt))
            if nxt not in graph.vertices:
                graph.vertices.add(nxt)
                queue.append(nxt)
    return graph


def exit_probability(graph):
    """Probability that the walk from start ends in the bottom sink."""
    if not graph.vertices:
        raise EmptyGraph(f'The tau^beta graph for tau={graph.tau} is empty.')
    out = {}
    for u, coin, v in graph.edges:
        out.setdefault(u, []).append(v)
    frontier = {graph.start: Fraction(1)}
    absorbed = Fraction(0)
    for _ in range(graph.horizon + 1):
        moving = Counter()
        for conf, p in frontier.items():
            targets = out.get(conf, [])
            for v in targets:
                if v == BOTTOM:
                    absorbed += p / len(targets)
                else:
                    moving[v] += p / len(targets)
        frontier = moving
        if not frontier:
            break
    return absorbed


def tau_multiplicity(machine, input, beta, horizon):
    counts = Counter()
    for tau in all_bitstrings(machine.c):
        counts.update(tau_beta_nodes(machine, input, tau, beta, horizon))
    return counts


def avg_tau_beta_size(machine, input, beta, horizon):
    total = sum(
        len(tau_beta_graph(machine, input, tau, beta, horizon).vertices)
        for tau in all_bitstrings(machine.c)
    )
    return Fraction(total, 2 ** machine.c)


def avg_size_bound(machine, beta):
    return Fraction(machine.s ** 2 * 2 ** (3 * machine.s)) / Fraction(beta)


# Seed sweeps

class SeedSweep:
    """Per-seed y-trees of acc_tau and rej_tau under a hash-chain PRG.

    Level k of every PRG_i tree reads the first bit of h_k(seed), so one
    downward sweep to level ``levels`` serves every i <= levels. ``layers[seed]
    [kind][k]`` is the set of configurations at level k.
    """

    def __init__(self, machine, input, tau, prg, levels=None):
        self.machine = machine
        self.input = input
        self.tau = tau
        self.prg = prg
        self.levels = prg.l if levels is None else levels
        if 2 ** prg.m > lab_settings.SEED_BUDGET:
            raise BudgetExceeded(f'2^{prg.m} seeds exceed SEED_BUDGET.')
        self._predecessors = {}
        self.layers = {}
        for seed in range(2 ** prg.m):
            self.layers[seed] = {kind: self._tree_layers(kind, seed) for kind in self.kinds}
        logger.debug('Swept %d seeds for %s tau=%s', 2 ** prg.m, machine.name, tau)

    kinds = (HaltKind.ACCEPT, HaltKind.REJECT)

    def _preds(self, conf):
        if conf not in self._predecessors:
            self._predecessors[conf] = predecessors(self.machine, self.input, conf)
        return self._predecessors[conf]

    def _tree_layers(self, kind, seed):
        root = halt_configuration(self.machine, kind, self.tau)
        layers = [{root}]
        for level in range(1, self.levels + 1):
            bit = self.prg.level_bit(level, seed)
            below = set()
            for conf in layers[-1]:
                below.update(v for label, v in self._preds(conf) if label == bit)
                if self.machine.is_halting(conf.state):
                    below.add(conf)
            layers.append(below)
        return layers

    def contains(self, seed, kind, conf, level):
        return conf in self.layers[seed][kind][level]

    def seeds_containing(self, conf, level, kind):
        return frozenset(
            seed for seed, trees in self.layers.items() if conf in trees[kind][level]
        )

    def tree_size(self, seed, kind, level):
        return sum(len(layer) for layer in self.layers[seed][kind][:level + 1])

    def seed_counts(self, level):
        """For every layer-``level`` configuration, the number of seeds whose trees hold it."""
        counts = Counter()
        for trees in self.layers.values():
            counts.update(trees[HaltKind.ACCEPT][level] | trees[HaltKind.REJECT][level])
        return counts

    def kind_counts(self, level, kind):
        counts = Counter()
        for trees in self.layers.values():
            counts.update(trees[kind][level])
        return counts


def compute_Vi(machine, input, tau, prg, i, sweep=None):
    sweep = SeedSweep(machine, input, tau, prg, i) if sweep is None else sweep
    return set(sweep.seed_counts(i))


def compute_Si(machine, input, tau, prg, i, threshold, sweep=None):
    sweep = SeedSweep(machine, input, tau, prg, i) if sweep is None else sweep
    need = Fraction(threshold) * 2 ** prg.m
    return {conf for conf, count in sweep.seed_counts(i).items() if count >= need}


def prg_error_profile(machine, input, tau, prg, levels=None, sweep=None, table=None):
    """gamma_i for i = 0..levels as (gamma_acc, gamma_rej) pairs."""
    levels = prg.l if levels is None else levels
    sweep = SeedSweep(machine, input, tau, prg, levels) if sweep is None else sweep
    table = reach_probabilities(machine, input, tau, levels) if table is None else table
    seeds = 2 ** prg.m
    confs = list(universe(machine, len(input)))
    profile = []
    for i in range(levels + 1):
        acc_counts = sweep.kind_counts(i, HaltKind.ACCEPT)
        rej_counts = sweep.kind_counts(i, HaltKind.REJECT)
        gamma_acc = gamma_rej = Fraction(0)
        for conf in confs:
            p_acc, p_rej, _ = table.row(conf, i)
            gamma_acc = max(gamma_acc, abs(p_acc - Fraction(acc_counts[conf], seeds)))
            gamma_rej = max(gamma_rej, abs(p_rej - Fraction(rej_counts[conf], seeds)))
        profile.append((gamma_acc, gamma_rej))
    return profile


def prg_error_gamma(machine, input, tau, prg, i, sweep=None):
    return prg_error_profile(machine, input, tau, prg, i, sweep)[i]


def estimate_fractions(machine, input, tau, prg, l=None, sweep=None):
    l = prg.l if l is None else l
    sweep = SeedSweep(machine, input, tau, prg, l) if sweep is None else sweep
    start = start_configuration(machine, tau)
    seeds = 2 ** prg.m
    f_acc = Fraction(len(sweep.seeds_containing(start, l, HaltKind.ACCEPT)), seeds)
    f_rej = Fraction(len(sweep.seeds_containing(start, l, HaltKind.REJECT)), seeds)
    return f_acc, f_rej


# Random walks

@dataclass(frozen=True)
class WalkParams:
    beta: Fraction
    gamma: Fraction
    T: int
    length: int
    eta: Fraction


def walk_params(delta, eps, s):
    delta, eps = Fraction(delta), Fraction(eps)
    ratio = delta / (2 * eps)
    beta = HALF * (1 - ratio)
    gamma = 2 * delta / (1 + ratio)
    T = math.ceil(10 * (1 + (HALF - eps) / (2 * eps - gamma)))
    return WalkParams(beta, gamma, T, T * 2 ** (4 * s), Fraction(9, 10) * (2 * eps - gamma))


def random_walk_decider(machine, input, length, exact=True, trials=1000, seed=0):
    """Pr over uniform tau and coins that a ``length``-step walk from start_tau ends at acc_tau."""
    if exact:
        if 2 ** machine.c > lab_settings.BRUTE_FORCE_BUDGET:
            raise BudgetExceeded(f'2^{machine.c} catalytic settings exceed BRUTE_FORCE_BUDGET.')
        total = Fraction(0)
        for tau in all_bitstrings(machine.c):
            dist = halt_distribution(machine, input, tau, length, strict=False)
            total += dist.get((HaltKind.ACCEPT, tau), Fraction(0))
        return total / 2 ** machine.c
    coins = seeded_bits(seed)
    hits = 0
    for _ in range(trials):
        tau = ''.join(str(next(coins)) for _ in range(machine.c))
        conf = start_configuration(machine, tau)
        for _ in range(length):
            if machine.is_halting(conf.state):
                break
            try:
                conf = step(machine, input, conf, next(coins) if machine.randomized else 0)
            except TransitionError:
                break
        if conf == halt_configuration(machine, HaltKind.ACCEPT, tau):
            hits += 1
    return Fraction(hits, trials)


@dataclass
class UniquenessReport:
    threshold: Fraction
    destroy_probability: Fraction
    vacuous: bool
    checked: int = 0
    violations: list = field(default_factory=list)

    @property
    def holds(self):
        return not self.vacuous and not self.violations


def reset_target_uniqueness(machine, input, walk_bound, horizon, threshold=None):
    """Within ``walk_bound`` steps of any start, each configuration resets to one tau."""
    threshold = Fraction(1, 2 ** (walk_bound + 3)) if threshold is None else Fraction(threshold)
    taus = list(all_bitstrings(machine.c))
    destroy = max(
        1 - sum(p for key, p in halt_distribution(machine, input, tau, horizon).items() if key[1] == tau)
        for tau in taus
    )
    report = UniquenessReport(threshold, destroy, vacuous=destroy > threshold)
    if report.vacuous:
        logger.warning('Reset failure %s is above %s; uniqueness check is vacuous', destroy, threshold)
        return report
    three_quarters = {
        tau: tau_beta_nodes(machine, input, tau, Fraction(3, 4), horizon) for tau in taus
    }
    near = set()
    for tau in taus:
        frontier = {start_configuration(machine, tau)}
        near |= frontier
        for _ in range(walk_bound):
            frontier = {nxt for conf in frontier for _, nxt in successors(machine, input, conf)}
            near |= frontier
    for conf in sorted(near, key=lambda v: canonical_serialize(machine, len(input), v)):
        targets = [tau for tau in taus if conf in three_quarters[tau]]
        report.checked += 1
        if len(targets) != 1:
            report.violations.append((conf, targets))
    return report
