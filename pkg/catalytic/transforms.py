"""
Machine-to-machine transformations, built as explicit product machines.

Every transform returns an ordinary ``MachineSpec`` so the result can be
validated, run, graphed and verified like any other machine. Inner machines
are embedded state by state; where a later phase needs to know the head
positions at the inner halt, the positions are carried in the state names.
"""
import itertools
import logging
from collections import deque
from fractions import Fraction

from .exceptions import NotDeterministic, TransformError
from .machine import HaltKind, MachineSpec, Transition

logger = logging.getLogger(__name__)

WILD = '*'


def _resolve(spec, reads, current):
    if spec == WILD:
        return current
    if spec == '!':
        return 1 - current
    if callable(spec):
        return spec(*reads)
    return int(spec)


class MachineBuilder:
    """Accumulates the states and rows of a product machine."""

    def __init__(self, name, s, c, randomized):
        self.name = name
        self.s = s
        self.c = c
        self.randomized = randomized
        self.states = []
        self._known = set()
        self.transitions = {}

    def state(self, name):
        if name not in self._known:
            self._known.add(name)
            self.states.append(name)
        return name

    def add(self, state, next_state, *, inbit=WILD, workbit=WILD, catbit=WILD, coin=WILD,
            work=WILD, cat=WILD, moves=(0, 0, 0)):
        """Add rows; read wildcards expand, write specs may be callables of the reads."""
        self.state(state)
        self.state(next_state)
        options = [(0, 1) if value == WILD else (value,) for value in (inbit, workbit, catbit, coin)]
        for reads in itertools.product(*options):
            key = (state,) + reads
            transition = Transition(
                next_state, _resolve(work, reads, reads[1]), _resolve(cat, reads, reads[2]), *moves
            )
            if self.transitions.setdefault(key, transition) != transition:
                raise TransformError(f'Conflicting rows for {key} in {self.name}.')

    def halts(self, kinds):
        names = {HaltKind.ACCEPT: 'acc', HaltKind.REJECT: 'rej', HaltKind.DONTKNOW: 'dk'}
        return {kind: self.state(names[kind]) for kind in kinds}

    def build(self, start, halts):
        return MachineSpec(
            name=self.name,
            states=tuple(self.states),
            start=start,
            accept=halts[HaltKind.ACCEPT],
            reject=halts[HaltKind.REJECT],
            dontknow=halts.get(HaltKind.DONTKNOW),
            s=self.s,
            c=self.c,
            randomized=self.randomized,
            transitions=dict(self.transitions),
        )


def script(builder, tag, micro_steps, then):
    """Chain of states applying (work, cat, moves) steps whatever they read."""
    if not micro_steps:
        return then
    names = [builder.state(f'{tag}#{k}') for k in range(len(micro_steps))]
    for k, (work, cat, moves) in enumerate(micro_steps):
        target = names[k + 1] if k + 1 < len(names) else then
        builder.add(names[k], target, work=work, cat=cat, moves=moves)
    return names[0]


def rewind_steps(positions, s, zero_work=False):
    """Steps that return every head to cell 0, optionally zeroing the work tape."""
    ihead, whead, chead = (p or 0 for p in positions)
    steps = []
    if zero_work:
        steps += [('0', WILD, (0, -1, 0))] * whead
        steps += [('0', WILD, (0, 1, 0))] * (s - 1)
        steps += [('0', WILD, (0, 0, 0))]
        steps += [(WILD, WILD, (0, -1, 0))] * (s - 1)
    else:
        steps += [(WILD, WILD, (0, -1, 0))] * whead
    steps += [(WILD, WILD, (0, 0, -1))] * chead
    steps += [(WILD, WILD, (-1, 0, 0))] * ihead
    return steps


def embed(builder, machine, tag, on_halt, track=(False, False, False), input_length=None):
    """Copy ``machine`` into ``builder`` and return the embedded start state.

    ``track`` selects which of (input, work, cat) head positions are carried
    in the state names. Rows into a halting state are redirected to
    ``on_halt(kind, positions)``, with ``None`` for untracked heads.
    """
    if track[0] and input_length is None:
        raise TransformError(f'{machine.name} moves its input head; pass input_length.')
    limits = (input_length, machine.s - 1, machine.c - 1)

    def name(state, positions):
        marks = '.'.join(str(p) for p in positions if p is not None)
        return f'{tag}:{state}@{marks}' if marks else f'{tag}:{state}'

    origin = (machine.start, tuple(0 if tracked else None for tracked in track))
    seen = {origin}
    queue = deque([origin])
    trap = None
    while queue:
        state, positions = queue.popleft()
        here = builder.state(name(state, positions))
        for (_, inbit, workbit, catbit, coin), t in machine.rows_from.get(state, ()):
            moves = (t.input_move, t.work_move, t.cat_move)
            moved = tuple(None if p is None else p + m for p, m in zip(positions, moves))
            if any(p is not None and not 0 <= p <= hi for p, hi in zip(moved, limits)):
                # the inner machine would leave its tape here
                if trap is None:
                    trap = builder.state(f'{tag}:trap')
                    builder.add(trap, trap)
                target = trap
            elif machine.is_halting(t.next_state):
                target = on_halt(machine.halting_states[t.next_state], moved)
            else:
                nxt = (t.next_state, moved)
                if nxt not in seen:
                    seen.add(nxt)
                    queue.append(nxt)
                target = name(*nxt)
            builder.add(here, target, inbit=inbit, workbit=workbit, catbit=catbit, coin=coin,
                        work=t.work_write, cat=t.cat_write, moves=moves)
    return name(*origin)


def _repeat(machine, runs, initial, fold, decide, name, input_length=None):
    """Run ``machine`` ``runs`` times on the same tapes, folding the halt kinds.

    Between runs every head returns to 0 and the work tape is zeroed. The
    folded summary lives in the finite control.
    """
    builder = MachineBuilder(name, machine.s, machine.c, machine.randomized)
    track = (machine.moves_input, True, True)
    if machine.moves_input and input_length is None:
        raise TransformError(f'{machine.name} moves its input head; pass input_length.')
    halts = builder.halts(machine.halt_kinds)
    built = {}

    def run_start(run, summary):
        if (run, summary) in built:
            return built[run, summary]
        tag = f'r{run}:{summary}'
        if run == runs:
            entry = embed(builder, machine, tag, lambda kind, positions: halts[decide(fold(summary, kind))])
        else:
            def on_halt(kind, positions):
                folded = fold(summary, kind)
                marks = '.'.join(str(p) for p in positions if p is not None)
                return script(builder, f'c{run}:{folded}@{marks}',
                              rewind_steps(positions, machine.s, zero_work=True),
                              then=run_start(run + 1, folded))
            entry = embed(builder, machine, tag, on_halt, track=track, input_length=input_length)
        built[run, summary] = entry
        return entry

    return builder.build(run_start(1, initial), halts)


def boost_majority(machine, k, input_length=None):
    """Run ``k`` times and answer with the strict majority (dontknow otherwise)."""
    if k < 1 or k % 2 == 0:
        raise TransformError(f'k must be a positive odd count, got {k}.')

    def fold(tally, kind):
        accepts, rejects, unknowns = (int(x) for x in tally.split('-'))
        accepts += kind is HaltKind.ACCEPT
        rejects += kind is HaltKind.REJECT
        unknowns += kind is HaltKind.DONTKNOW
        return f'{accepts}-{rejects}-{unknowns}'

    def decide(tally):
        accepts, rejects, _ = (int(x) for x in tally.split('-'))
        if 2 * accepts > k:
            return HaltKind.ACCEPT
        if 2 * rejects > k:
            return HaltKind.REJECT
        return HaltKind.DONTKNOW

    return _repeat(machine, k, '0-0-0', fold, decide, f'{machine.name}-boost{k}', input_length)


def halve_transform(machine):
    """Accept outright on a 1 coin, otherwise run the machine."""
    builder = MachineBuilder(f'{machine.name}-halved', machine.s, machine.c, True)
    start = builder.state('flip')
    halts = builder.halts(machine.halt_kinds)
    inner = embed(builder, machine, 'm', lambda kind, positions: halts[kind])
    builder.add(start, halts[HaltKind.ACCEPT], coin=1)
    builder.add(start, inner, coin=0)
    return builder.build(start, halts)


def square_transform(machine, input_length=None):
    """Run twice; reject if either run rejects."""
    order = {'none': 0, HaltKind.ACCEPT.value: 1, HaltKind.DONTKNOW.value: 2, HaltKind.REJECT.value: 3}

    def fold(previous, kind):
        return max(previous, kind.value, key=order.__getitem__)

    return _repeat(machine, 2, 'none', fold, HaltKind, f'{machine.name}-squared', input_length)


def erase_cat_steps(c):
    """Sweep the catalytic tape writing zeros and come back to cell 0."""
    if c == 1:
        return [(WILD, '0', (0, 0, 0))]
    steps = [(WILD, '0', (0, 0, 1))] * (c - 1) + [(WILD, '0', (0, 0, -1))]
    return steps + [(WILD, WILD, (0, 0, -1))] * (c - 2)


def dyadic(alpha):
    alpha = Fraction(alpha)
    den = alpha.denominator
    if not 0 <= alpha <= 1 or den & (den - 1):
        raise TransformError(f'alpha must be a dyadic rational in [0, 1], got {alpha}.')
    return alpha.numerator, den.bit_length() - 1


def high_error_machine(decider, alpha):
    """With probability alpha erase the catalytic tape and decide there; else guess."""
    if not decider.is_deterministic:
        raise NotDeterministic(f'{decider.name} uses its coins.')
    p, q = dyadic(alpha)
    builder = MachineBuilder(f'{decider.name}-high-error-{p}-{2 ** q}', decider.s, decider.c, True)
    start = builder.state('coin0.0') if q else None
    halts = builder.halts(decider.halt_kinds)
    guess = builder.state('guess')
    builder.add(guess, halts[HaltKind.ACCEPT], coin=1)
    builder.add(guess, halts[HaltKind.REJECT], coin=0)
    inner = embed(builder, decider, 'd', lambda kind, positions: halts[kind])
    erase = script(builder, 'erase', erase_cat_steps(decider.c), then=inner)

    def branch(r):
        return erase if r < p else guess

    if not q:
        return builder.build(branch(0), halts)
    for j in range(q):
        for r in range(2 ** j):
            for bit in (0, 1):
                nr = 2 * r + bit
                target = f'coin{j + 1}.{nr}' if j + 1 < q else branch(nr)
                builder.add(f'coin{j}.{r}', target, coin=bit)
    return builder.build(start, halts)


def xor_randomness_transform(machine):
    """Read c coins r, run on tau xor r, undo the xor before halting.

    The coins are kept in c extra work cells after the original work tape.
    """
    if not machine.is_deterministic:
        raise NotDeterministic(f'{machine.name} uses its coins.')
    s, c = machine.s, machine.c
    builder = MachineBuilder(f'{machine.name}-xor', s + c, c, True)
    halts = builder.halts(machine.halt_kinds)

    def unmix_chain(kind):
        names = [f'unmix.{kind.value}{j}' for j in range(c)]
        for j, name in enumerate(names):
            last = j == c - 1
            builder.add(name, halts[kind] if last else names[j + 1],
                        cat=lambda inbit, workbit, catbit, coin: catbit ^ workbit,
                        moves=(0, 0, 0) if last else (0, 1, 1))
        return names[0]

    def on_halt(kind, positions):
        _, whead, chead = positions
        steps = [(WILD, WILD, (0, 0, -1))] * chead + [(WILD, WILD, (0, 1, 0))] * (s - whead)
        return script(builder, f'home.{kind.value}.{whead}.{chead}', steps, then=unmix_chain(kind))

    inner = embed(builder, machine, 'm', on_halt, track=(False, True, True))
    rewind = script(builder, 'rewind',
                    [(WILD, WILD, (0, -1, -1))] * (c - 1) + [(WILD, WILD, (0, -1, 0))] * s,
                    then=inner)
    mix = [f'mix{j}' for j in range(c)]
    for j, name in enumerate(mix):
        last = j == c - 1
        builder.add(name, rewind if last else mix[j + 1],
                    work=lambda inbit, workbit, catbit, coin: coin,
                    cat=lambda inbit, workbit, catbit, coin: catbit ^ coin,
                    moves=(0, 0, 0) if last else (0, 1, 1))
    start = script(builder, 'seek', [(WILD, WILD, (0, 1, 0))] * s, then=mix[0])
    return builder.build(start, halts)
