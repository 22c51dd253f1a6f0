"""
Catalytic Turing machines.

A machine has a read-only binary input tape, an ``s``-bit work tape, a
``c``-bit catalytic tape and (when randomized) one coin per step. Halting
configurations are canonical: heads at 0 and a fixed per-kind pattern on the
work tape, so ``acc_tau`` / ``rej_tau`` / ``dk_tau`` depend on the catalytic
contents only.

Machine files (``.ctm``) are line oriented::

    states=start,acc,rej
    start=start
    accept=acc
    reject=rej
    s=3
    c=1
    randomized=false
    start * * * * -> acc * * S S S

Read fields accept ``*`` as a wildcard. In the write fields ``*`` keeps the
bit that was read and ``!`` writes its complement.
"""
import enum
import itertools
import logging
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

from .bits import all_bitstrings, check_bits, clog2, from_bits, set_bit, to_bits
from .conf import lab_settings
from .exceptions import (
    BudgetExceeded, HeadOutOfBounds, MissingTransition, ParseError,
    StepOnHalted, TransitionError,
)

logger = logging.getLogger(__name__)

MACHINES_DIR = Path(__file__).resolve().parent / 'machines'
BUNDLED_PREFIX = 'bundled:'

MOVES = {'L': -1, 'S': 0, 'R': 1}
MOVE_NAMES = {move: name for name, move in MOVES.items()}


class HaltKind(enum.Enum):
    ACCEPT = 'accept'
    REJECT = 'reject'
    DONTKNOW = 'dontknow'


HALT_PATTERNS = {
    HaltKind.ACCEPT: '111',
    HaltKind.REJECT: '110',
    HaltKind.DONTKNOW: '10',
}


def halt_pattern(kind, s):
    prefix = HALT_PATTERNS[kind]
    return prefix + '0' * (s - len(prefix))


@dataclass(frozen=True)
class Transition:
    next_state: str
    work_write: int
    cat_write: int
    input_move: int
    work_move: int
    cat_move: int


@dataclass(frozen=True)
class Configuration:
    state: str
    ihead: int
    whead: int
    chead: int
    work: str
    cat: str

    def __str__(self):
        return f'{self.state}[{self.ihead},{self.whead},{self.chead}|{self.work}|{self.cat}]'


@dataclass(frozen=True, eq=False)
class MachineSpec:
    name: str
    states: tuple
    start: str
    accept: str
    reject: str
    dontknow: str | None
    s: int
    c: int
    randomized: bool
    transitions: dict = field(repr=False)

    def __post_init__(self):
        if len(set(self.states)) != len(self.states):
            raise ParseError('State names must be unique.')
        for role in ('start', 'accept', 'reject'):
            if getattr(self, role) not in self.states:
                raise ParseError(f'The {role} state {getattr(self, role)!r} is not declared.')
        if self.dontknow is not None and self.dontknow not in self.states:
            raise ParseError(f'The dontknow state {self.dontknow!r} is not declared.')
        halts = [self.accept, self.reject] + ([self.dontknow] if self.dontknow else [])
        if len(set(halts)) != len(halts):
            raise ParseError('Halting states must be distinct.')
        if self.start in halts:
            raise ParseError('The start state cannot be a halting state.')
        if self.s < 3:
            raise ParseError('The work tape needs at least 3 bits for the halting patterns.')
        if self.c < 1:
            raise ParseError('The catalytic tape needs at least 1 bit.')
        for key, transition in self.transitions.items():
            if key[0] not in self.states or transition.next_state not in self.states:
                raise ParseError(f'Transition {key} refers to an undeclared state.')

    @cached_property
    def halting_states(self):
        kinds = {self.accept: HaltKind.ACCEPT, self.reject: HaltKind.REJECT}
        if self.dontknow is not None:
            kinds[self.dontknow] = HaltKind.DONTKNOW
        return kinds

    @cached_property
    def nonhalting_states(self):
        return tuple(q for q in self.states if q not in self.halting_states)

    @cached_property
    def state_index(self):
        return {q: i for i, q in enumerate(self.states)}

    @cached_property
    def halt_kinds(self):
        return tuple(kind for kind in HaltKind if kind in self.halting_states.values())

    @cached_property
    def is_deterministic(self):
        for (state, inbit, workbit, catbit, coin), transition in self.transitions.items():
            if coin == 0 and self.transitions.get((state, inbit, workbit, catbit, 1)) != transition:
                return False
        return True

    @cached_property
    def rows_into(self):
        rows = {}
        for key in sorted(self.transitions, key=self._key_order):
            rows.setdefault(self.transitions[key].next_state, []).append((key, self.transitions[key]))
        return rows

    @cached_property
    def rows_from(self):
        rows = {}
        for key in sorted(self.transitions, key=self._key_order):
            rows.setdefault(key[0], []).append((key, self.transitions[key]))
        return rows

    @cached_property
    def moves_input(self):
        return any(t.input_move for t in self.transitions.values())

    def _key_order(self, key):
        return (self.state_index[key[0]],) + key[1:]

    def is_halting(self, state):
        return state in self.halting_states

    def halt_state(self, kind):
        for state, state_kind in self.halting_states.items():
            if state_kind is kind:
                return state
        raise ParseError(f'Machine {self.name} has no {kind.value} state.')


def start_configuration(machine, tau):
    check_bits(tau, machine.c, 'tau')
    return Configuration(machine.start, 0, 0, 0, '0' * machine.s, tau)


def halt_configuration(machine, kind, cat):
    return Configuration(machine.halt_state(kind), 0, 0, 0, halt_pattern(kind, machine.s), cat)


def halt_kind(machine, conf):
    return machine.halting_states.get(conf.state)


def is_canonical_halt(machine, conf):
    kind = halt_kind(machine, conf)
    if kind is None:
        return False
    return conf == halt_configuration(machine, kind, conf.cat)


def input_bit(input, position):
    """Input cell ``len(input)`` is the end-marker and reads 0."""
    return int(input[position]) if position < len(input) else 0


def step(machine, input, conf, coin=0):
    if machine.is_halting(conf.state):
        raise StepOnHalted(f'{conf} is halting.')
    key = (conf.state, input_bit(input, conf.ihead), int(conf.work[conf.whead]),
           int(conf.cat[conf.chead]), coin)
    try:
        t = machine.transitions[key]
    except KeyError:
        raise MissingTransition(f'{machine.name} has no row for {key}.')
    ihead = conf.ihead + t.input_move
    whead = conf.whead + t.work_move
    chead = conf.chead + t.cat_move
    if not 0 <= ihead <= len(input):
        raise HeadOutOfBounds(f'Input head moves to {ihead} from {conf}.', code='input')
    if not 0 <= whead < machine.s:
        raise HeadOutOfBounds(f'Work head moves to {whead} from {conf}.', code='work')
    if not 0 <= chead < machine.c:
        raise HeadOutOfBounds(f'Catalytic head moves to {chead} from {conf}.', code='cat')
    cat = set_bit(conf.cat, conf.chead, t.cat_write)
    kind = machine.halting_states.get(t.next_state)
    if kind is not None:
        return halt_configuration(machine, kind, cat)
    work = set_bit(conf.work, conf.whead, t.work_write)
    return Configuration(t.next_state, ihead, whead, chead, work, cat)


def successors(machine, input, conf):
    """Labeled out-edges; labels whose step leaves a tape have no edge."""
    if machine.is_halting(conf.state):
        return []
    edges = []
    for coin in (0, 1):
        try:
            edges.append((coin, step(machine, input, conf, coin)))
        except TransitionError:
            continue
    return edges


def predecessors(machine, input, target):
    """All (label, v) with (label, target) in successors(v), in canonical order."""
    n = len(input)
    found = []
    if machine.is_halting(target.state):
        if not is_canonical_halt(machine, target):
            return []
        for (state, inbit, workbit, catbit, coin), t in machine.rows_into.get(target.state, ()):
            for chead in range(machine.c):
                if int(target.cat[chead]) != t.cat_write or not 0 <= chead + t.cat_move < machine.c:
                    continue
                cat = set_bit(target.cat, chead, catbit)
                for ihead in range(n + 1):
                    if input_bit(input, ihead) != inbit or not 0 <= ihead + t.input_move <= n:
                        continue
                    for whead in range(machine.s):
                        if not 0 <= whead + t.work_move < machine.s:
                            continue
                        for rest in all_bitstrings(machine.s - 1):
                            work = rest[:whead] + str(workbit) + rest[whead:]
                            found.append((coin, Configuration(state, ihead, whead, chead, work, cat)))
    else:
        for (state, inbit, workbit, catbit, coin), t in machine.rows_into.get(target.state, ()):
            ihead = target.ihead - t.input_move
            whead = target.whead - t.work_move
            chead = target.chead - t.cat_move
            if not (0 <= ihead <= n and 0 <= whead < machine.s and 0 <= chead < machine.c):
                continue
            if input_bit(input, ihead) != inbit:
                continue
            if int(target.work[whead]) != t.work_write or int(target.cat[chead]) != t.cat_write:
                continue
            found.append((coin, Configuration(
                state, ihead, whead, chead,
                set_bit(target.work, whead, workbit), set_bit(target.cat, chead, catbit),
            )))
    verified = [(coin, v) for coin, v in found if step(machine, input, v, coin) == target]
    verified.sort(key=lambda edge: (edge[0], conf_key(machine, edge[1])))
    return verified


def conf_key(machine, conf):
    """Sort key that agrees with the order of canonical serializations."""
    return (machine.state_index[conf.state], conf.ihead, conf.whead, conf.chead, conf.work, conf.cat)


@dataclass(frozen=True)
class SerialWidths:
    state: int
    ihead: int
    whead: int
    chead: int
    work: int
    cat: int

    @property
    def u(self):
        return self.state + self.ihead + self.whead + self.chead + self.work

    @property
    def total(self):
        return self.u + self.cat


def serial_widths(machine, n):
    return SerialWidths(
        state=clog2(len(machine.states)),
        ihead=clog2(n + 1),
        whead=clog2(machine.s),
        chead=clog2(machine.c),
        work=machine.s,
        cat=machine.c,
    )


def serialize_u(machine, n, conf):
    """Everything but the catalytic tape: state, heads, work tape."""
    widths = serial_widths(machine, n)
    return (to_bits(machine.state_index[conf.state], widths.state)
            + to_bits(conf.ihead, widths.ihead)
            + to_bits(conf.whead, widths.whead)
            + to_bits(conf.chead, widths.chead)
            + conf.work)


def parse_u(machine, n, bits, cat):
    widths = serial_widths(machine, n)
    check_bits(bits, widths.u, 'configuration')
    fields = []
    offset = 0
    for width in (widths.state, widths.ihead, widths.whead, widths.chead):
        fields.append(from_bits(bits[offset:offset + width]))
        offset += width
    state, ihead, whead, chead = fields
    if state >= len(machine.states) or ihead > n or whead >= machine.s or chead >= machine.c:
        raise ParseError(f'{bits} is not a configuration of {machine.name}.')
    return Configuration(machine.states[state], ihead, whead, chead, bits[offset:], cat)


def canonical_serialize(machine, n, conf):
    return serialize_u(machine, n, conf) + conf.cat


def canonical_parse(machine, n, bits):
    widths = serial_widths(machine, n)
    if len(bits) != widths.total:
        raise ParseError(f'Expected {widths.total} bits, got {len(bits)}.')
    return parse_u(machine, n, bits[:widths.u], bits[widths.u:])


def universe_size(machine, n):
    nonhalting = len(machine.nonhalting_states) * (n + 1) * machine.s * machine.c
    return nonhalting * 2 ** (machine.s + machine.c) + len(machine.halting_states) * 2 ** machine.c


def universe(machine, n, budget=None):
    """Non-halting configurations in every head/tape setting, then the canonical halts."""
    budget = lab_settings.GRAPH_BUDGET if budget is None else budget
    size = universe_size(machine, n)
    if size > budget:
        raise BudgetExceeded(f'{machine.name} has {size} configurations, budget is {budget}.')
    for state in machine.nonhalting_states:
        for ihead, whead, chead in itertools.product(range(n + 1), range(machine.s), range(machine.c)):
            for work in all_bitstrings(machine.s):
                for cat in all_bitstrings(machine.c):
                    yield Configuration(state, ihead, whead, chead, work, cat)
    for kind in machine.halt_kinds:
        for cat in all_bitstrings(machine.c):
            yield halt_configuration(machine, kind, cat)


def degree(machine, input, conf):
    return len(successors(machine, input, conf)) + len(predecessors(machine, input, conf))


def compute_d_M(machine, inputs):
    return max(degree(machine, x, conf) for x in inputs for conf in universe(machine, len(x)))


def reachable(machine, input, tau):
    """Configurations reachable from start_tau, with the labels that leave a tape."""
    seen = {start_configuration(machine, tau)}
    queue = deque(seen)
    violations = []
    while queue:
        conf = queue.popleft()
        if machine.is_halting(conf.state):
            continue
        for coin in (0, 1):
            try:
                nxt = step(machine, input, conf, coin)
            except HeadOutOfBounds:
                violations.append((conf, coin))
                continue
            except MissingTransition:
                continue
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return seen, violations


@dataclass
class ValidationReport:
    name: str
    state_count: int
    s: int
    c: int
    randomized: bool
    deterministic: bool
    missing_rows: list
    halting_rows: list
    coin_mismatches: list
    bound_violations: list
    canonical_halts: bool
    d_M: int | None
    d_M_note: str = ''
    answer_conflicts: list = field(default_factory=list)

    @property
    def s_accounting(self):
        return 4 * self.s

    @property
    def ok(self):
        return self.canonical_halts and not (
            self.missing_rows or self.halting_rows or self.coin_mismatches or self.bound_violations
            or self.answer_conflicts
        )


def validate(machine, inputs=None):
    inputs = tuple(lab_settings.DEFAULT_INPUTS if inputs is None else inputs)
    missing = [
        (state, inbit, workbit, catbit, coin)
        for state in machine.nonhalting_states
        for inbit, workbit, catbit, coin in itertools.product((0, 1), repeat=4)
        if (state, inbit, workbit, catbit, coin) not in machine.transitions
    ]
    halting_rows = sorted(key for key in machine.transitions if machine.is_halting(key[0]))
    coin_mismatches = []
    if not machine.randomized:
        coin_mismatches = sorted(
            key[:4] for key, t in machine.transitions.items()
            if key[4] == 0 and machine.transitions.get(key[:4] + (1,)) != t
        )
    violations, conflicts = [], []
    canonical = True
    for x in inputs:
        answers = set()
        for tau in all_bitstrings(machine.c):
            seen, bad = reachable(machine, x, tau)
            violations.extend(bad)
            answers.update(machine.halting_states.get(conf.state) for conf in seen)
            canonical = canonical and all(
                is_canonical_halt(machine, conf) for conf in seen if machine.is_halting(conf.state)
            )
        if machine.dontknow is not None and {HaltKind.ACCEPT, HaltKind.REJECT} <= answers:
            conflicts.append(x)
    d_M, note = None, ''
    try:
        d_M = compute_d_M(machine, inputs)
    except BudgetExceeded as exc:
        note = str(exc)
        logger.warning('d_M not computed: %s', exc)
    return ValidationReport(
        name=machine.name,
        state_count=len(machine.states),
        s=machine.s,
        c=machine.c,
        randomized=machine.randomized,
        deterministic=machine.is_deterministic,
        missing_rows=missing,
        halting_rows=halting_rows,
        coin_mismatches=coin_mismatches,
        bound_violations=sorted({(str(conf), coin) for conf, coin in violations}),
        canonical_halts=canonical,
        d_M=d_M,
        d_M_note=note,
        answer_conflicts=conflicts,
    )


# .ctm files

HEADER_KEYS = ('states', 'start', 'accept', 'reject', 'dontknow', 's', 'c', 'randomized')
REQUIRED_KEYS = frozenset(HEADER_KEYS) - {'dontknow'}


def _header_int(header, key):
    try:
        return int(header[key])
    except ValueError:
        raise ParseError(f'{key}= must be an integer, got {header[key]!r}.')


def _write_bit(symbol, read, lineno):
    if symbol == '*':
        return read
    if symbol == '!':
        return 1 - read
    if symbol in ('0', '1'):
        return int(symbol)
    raise ParseError(f'line {lineno}: bad write symbol {symbol!r}.')


def _expand_row(lineno, line):
    lhs, _, rhs = line.partition('->')
    left, right = lhs.split(), rhs.split()
    if len(left) != 5 or len(right) != 6:
        raise ParseError(f'line {lineno}: expected "state in work cat coin -> state w c mI mW mC".')
    state, reads = left[0], left[1:]
    options = []
    for symbol in reads:
        if symbol == '*':
            options.append((0, 1))
        elif symbol in ('0', '1'):
            options.append((int(symbol),))
        else:
            raise ParseError(f'line {lineno}: bad read symbol {symbol!r}.')
    next_state, wsym, csym, *moves = right
    try:
        input_move, work_move, cat_move = (MOVES[m] for m in moves)
    except KeyError:
        raise ParseError(f'line {lineno}: moves must be L, S or R.')
    for inbit, workbit, catbit, coin in itertools.product(*options):
        yield (state, inbit, workbit, catbit, coin), Transition(
            next_state, _write_bit(wsym, workbit, lineno), _write_bit(csym, catbit, lineno),
            input_move, work_move, cat_move,
        )


def parse_machine(text, name='machine'):
    header = {}
    rows = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split('#', 1)[0].strip()
        if not line:
            continue
        if '->' in line:
            rows.append((lineno, line))
            continue
        key, sep, value = line.partition('=')
        key = key.strip()
        if not sep or key not in HEADER_KEYS:
            raise ParseError(f'line {lineno}: expected a header line or a transition.')
        if key in header:
            raise ParseError(f'line {lineno}: duplicate header {key}=.')
        header[key] = value.strip()
    missing = sorted(REQUIRED_KEYS - header.keys())
    if missing:
        raise ParseError(f'Missing header lines: {", ".join(missing)}.')
    if header['randomized'] not in ('true', 'false'):
        raise ParseError('randomized= must be true or false.')
    transitions = {}
    for lineno, line in rows:
        for key, transition in _expand_row(lineno, line):
            if key in transitions:
                raise ParseError(f'line {lineno}: duplicate transition for {key}.')
            transitions[key] = transition
    return MachineSpec(
        name=name,
        states=tuple(q.strip() for q in header['states'].split(',') if q.strip()),
        start=header['start'],
        accept=header['accept'],
        reject=header['reject'],
        dontknow=header.get('dontknow') or None,
        s=_header_int(header, 's'),
        c=_header_int(header, 'c'),
        randomized=header['randomized'] == 'true',
        transitions=transitions,
    )


def render_machine(machine):
    lines = [
        f'states={",".join(machine.states)}',
        f'start={machine.start}',
        f'accept={machine.accept}',
        f'reject={machine.reject}',
    ]
    if machine.dontknow:
        lines.append(f'dontknow={machine.dontknow}')
    lines += [f's={machine.s}', f'c={machine.c}', f'randomized={str(machine.randomized).lower()}']
    for key in sorted(machine.transitions, key=machine._key_order):
        state, inbit, workbit, catbit, coin = key
        t = machine.transitions[key]
        if coin == 1 and machine.transitions.get(key[:4] + (0,)) == t:
            continue
        coin_symbol = '*' if coin == 0 and machine.transitions.get(key[:4] + (1,)) == t else str(coin)
        lines.append(
            f'{state} {inbit} {workbit} {catbit} {coin_symbol} -> {t.next_state} '
            f'{t.work_write} {t.cat_write} '
            f'{MOVE_NAMES[t.input_move]} {MOVE_NAMES[t.work_move]} {MOVE_NAMES[t.cat_move]}'
        )
    return '\n'.join(lines) + '\n'


def bundled_machine_names():
    return sorted(path.stem for path in MACHINES_DIR.glob('*.ctm'))


def load_machine(ref):
    """Load a machine from a path or a ``bundled:<name>`` reference."""
    ref = str(ref)
    if ref.startswith(BUNDLED_PREFIX):
        path = MACHINES_DIR / f'{ref[len(BUNDLED_PREFIX):]}.ctm'
    else:
        path = Path(ref)
    try:
        text = path.read_text(encoding='utf-8')
    except OSError as exc:
        raise ParseError(f'Cannot read machine {ref}: {exc.strerror}.')
    return parse_machine(text, name=path.stem)


def check_input(input):
    return check_bits(input, name='input')
