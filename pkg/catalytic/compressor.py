"""
Compress-or-decide over a structured catalytic tape.

A structured tape is ``tau | h_l ... h_1 | tar``. ``Compressor.f_subroutine``
either decides the input from the seed fractions of the hash-chain PRG, or
rewrites the tape into one of four compressed records whose trailing bits are
free; ``r_subroutine`` undoes any of them exactly.

Record layouts (wi bits per level index, wu bits per non-catalytic
configuration part)::

    00 seed(m) level(wi) i(wi) u(wu) 0...          tar is a step count
    01 idx i(wi) u(wu) tar[w:] 0...                tar[:w] indexes S_i
    10 i(wi) tar[2+wi:-f] 0(f)   with h_{i+1} replaced by  rank tar[:2+wi] tar[-f:]
    11 idx(2) u(wu) tar[w:] 0...                   tar[:w] indexes S'_l
"""
import json
import logging
import math
from collections import Counter
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path

from .bits import bits_to_hex, check_bits, clog2, from_bits, hex_to_bits, to_bits
from .conf import lab_settings
from .confgraph import AtMost, EulerTour, LayeredNode, YForest, layered_successor, tour_lap
from .exceptions import (
    BudgetExceeded, IndexOverflow, InadmissibleTape, ParamsInfeasible, ParseError,
    PreconditionFailed, PreconditionNotBig, PreconditionSmallS, SeedClassUnstable,
    SizeBoundViolated, TransitionError, UnknownTag,
)
from .hashprg import (
    GoodnessContext, HashFn, PrgSpec, compute_B, hash_family, is_good, neighbours_above,
)
from .machine import (
    HaltKind, halt_configuration, is_canonical_halt,
    parse_u, predecessors, serial_widths, serialize_u, start_configuration,
)

logger = logging.getLogger(__name__)

TIMESTAMP = '00'
SI_INDEX = '01'
BADHASH = '10'
SL_PRIME = '11'

KIND_BITS = {HaltKind.ACCEPT: 0, HaltKind.REJECT: 1}
GENERAL = 'general'
POLYTIME = 'polytime'
SL_PRIME_FRACTION = Fraction(1, 4)


@dataclass(frozen=True)
class StructuredTape:
    c: int
    m: int
    l: int
    tau: str
    hashes: str
    tar: str

    def __post_init__(self):
        check_bits(self.tau, self.c, 'tau')
        check_bits(self.hashes, 2 * self.m * self.l, 'hashes')
        check_bits(self.tar, 3 * self.m, 'tar')

    @classmethod
    def build(cls, tau, prg, tar):
        return cls(len(tau), prg.m, prg.l, tau, prg.encode(), tar)

    @classmethod
    def from_bits(cls, bits, c, m, l):
        check_bits(bits, c + 2 * m * l + 3 * m, 'tape')
        return cls(c, m, l, bits[:c], bits[c:c + 2 * m * l], bits[c + 2 * m * l:])

    @property
    def bits(self):
        return self.tau + self.hashes + self.tar

    @property
    def prg(self):
        return PrgSpec.from_bits(self.hashes, self.m, self.l)

    def slot(self, k):
        """The 2m bits holding h_k."""
        start = 2 * self.m * (self.l - k)
        return self.hashes[start:start + 2 * self.m]

    def with_slot(self, k, bits):
        start = 2 * self.m * (self.l - k)
        return replace(self, hashes=self.hashes[:start] + bits + self.hashes[start + 2 * self.m:])

    def render(self):
        return '\n'.join([
            f'c={self.c} m={self.m} l={self.l}',
            bits_to_hex(self.tau) or '-',
            bits_to_hex(self.hashes) or '-',
            bits_to_hex(self.tar) or '-',
        ]) + '\n'

    @classmethod
    def parse(cls, text):
        lines = [line.strip() for line in text.splitlines() if line.strip()]
        if len(lines) != 4:
            raise ParseError('A tape file has a header line and three hex lines.')
        try:
            header = dict(part.split('=', 1) for part in lines[0].split())
            c, m, l = (int(header[key]) for key in ('c', 'm', 'l'))
        except (KeyError, ValueError):
            raise ParseError(f'Bad tape header {lines[0]!r}.')

        def section(text, width):
            return '' if text == '-' else hex_to_bits(text, width)

        return cls(c, m, l, section(lines[1], c), section(lines[2], 2 * m * l),
                   section(lines[3], 3 * m))


@dataclass(frozen=True)
class Params:
    m: int
    l: int
    H: int
    T: int
    T_prime: int
    threshold: Fraction
    delta: Fraction
    eps: Fraction
    alpha: Fraction | None = None

    def __post_init__(self):
        if min(self.m, self.l, self.H, self.T, self.T_prime) < 1:
            raise ParamsInfeasible('m, l, H, T and T_prime must all be at least 1.')
        if not 0 < self.eps <= Fraction(1, 2) or not 0 <= self.delta < 1:
            raise ParamsInfeasible(f'Need 0 < eps <= 1/2 and 0 <= delta < 1, got {self.eps}, {self.delta}.')
        if not 0 < self.threshold <= 1:
            raise ParamsInfeasible(f'The S_i threshold must lie in (0, 1], got {self.threshold}.')
        if self.alpha is None:
            object.__setattr__(self, 'alpha', Fraction(1, 2 * self.l ** 2))
        if 2 ** self.m > lab_settings.SEED_BUDGET:
            raise ParamsInfeasible(f'2^{self.m} seeds exceed SEED_BUDGET={lab_settings.SEED_BUDGET}.')

    @property
    def ratio(self):
        return self.delta / (2 * self.eps)

    @property
    def beta(self):
        return Fraction(1, 4) * (1 - self.ratio)

    @property
    def zeta(self):
        return 2 * self.delta / (1 + self.ratio)

    @property
    def eta(self):
        return 2 * self.delta / (Fraction(3, 2) + self.delta / (4 * self.eps))

    @property
    def level_width(self):
        return clog2(self.l + 1)

    @property
    def covers_tar(self):
        """Every big y-tree has a node for each of the 2^{3m} tar values."""
        return self.H >= 2 ** (3 * self.m) - 1

    @classmethod
    def desk(cls, **overrides):
        preset = dict(lab_settings.DESK_PARAMS)
        values = dict(
            m=preset['M'], l=preset['L'], H=preset['H'], T=preset['T'], T_prime=preset['T_PRIME'],
            threshold=Fraction(preset['THRESHOLD']), delta=Fraction(preset['DELTA']),
            eps=Fraction(preset['EPS']),
        )
        values.update(overrides)
        return cls(**values)

    @classmethod
    def paper(cls, machine, delta=Fraction(0), eps=Fraction(1, 4)):
        s = machine.s
        m = 500 * s
        logger.warning('Preset paper for s=%d needs 2^%d seeds and l = 2^%d', s, m, 20 * s)
        raise ParamsInfeasible(
            f'Full-scale parameters for s={s}: m={m}, l=2^{20 * s}, H=2^{3 * m}, T=2^{100 * s}, '
            f'threshold=2^-{30 * s}, delta={delta}, eps={eps}; 2^{m} seeds exceed '
            f'SEED_BUDGET={lab_settings.SEED_BUDGET}.'
        )


def load_params(spec, machine=None):
    """``preset:desk``, ``preset:paper`` or a JSON file checked by ParamsSerializer."""
    from .serializers import ParamsSerializer

    spec = spec or f'preset:{lab_settings.PARAMS_PRESET}'
    if spec == 'preset:desk':
        return Params.desk()
    if spec == 'preset:paper':
        if machine is None:
            raise ParamsInfeasible('preset:paper depends on the machine.')
        return Params.paper(machine)
    try:
        data = json.loads(Path(spec).read_text(encoding='utf-8'))
    except (OSError, ValueError) as exc:
        raise ParseError(f'Cannot read parameters from {spec}: {exc}.')
    serializer = ParamsSerializer(data=data)
    if not serializer.is_valid():
        raise ParseError(f'Invalid parameters in {spec}: {dict(serializer.errors)}.')
    return Params(**serializer.validated_data)


@dataclass
class LayerSweep:
    """Layer-i nodes of every (kind, seed) y-tree, or the first tree above H."""
    level: int
    big: tuple | None = None
    witnesses: dict = field(default_factory=dict)
    seeds: dict = field(default_factory=dict)
    kind_seeds: dict = field(default_factory=dict)

    def members(self, need=0):
        """Configurations seen by at least ``need`` seeds, in witness order."""
        return [conf for conf in self.witnesses if len(self.seeds[conf]) >= need]


@dataclass
class FOutcome:
    result: str
    tape: StructuredTape
    tag: str | None = None
    level: int | None = None
    freed_bits: int = 0
    f_acc: Fraction | None = None
    f_rej: Fraction | None = None
    note: str = ''

    @property
    def decisive(self):
        return self.result in ('accept', 'reject')


class Compressor:

    def __init__(self, machine, input, params):
        self.machine = machine
        self.input = input
        self.params = params
        self.n = len(input)
        self.wu = serial_widths(machine, self.n).u
        self.wi = params.level_width
        self._preds = {}
        self._sweeps = {}

    @property
    def seed_count(self):
        return 2 ** self.params.m

    def preds(self, conf):
        if conf not in self._preds:
            self._preds[conf] = predecessors(self.machine, self.input, conf)
        return self._preds[conf]

    def forest(self, prg, i, seed):
        return YForest(self.machine, self.input, lambda j: prg.level_bit(i - j + 1, seed), i,
                       preds=self.preds)

    def root(self, kind, tau):
        return LayeredNode(halt_configuration(self.machine, kind, tau), 0)

    def _check_tape(self, tape):
        if (tape.c, tape.m, tape.l) != (self.machine.c, self.params.m, self.params.l):
            raise ParamsInfeasible(
                f'Tape shape c={tape.c} m={tape.m} l={tape.l} does not match the machine and params.'
            )

    # Indexing

    def sweep(self, tau, prg, i):
        key = (tau, prg.hashes[prg.l - i:], i)
        if key in self._sweeps:
            return self._sweeps[key]
        result = LayerSweep(level=i)
        for kind, bit in KIND_BITS.items():
            for seed in range(self.seed_count):
                tour = EulerTour(self.forest(prg, i, seed))
                root = self.root(kind, tau)
                if not isinstance(tour.size(root, self.params.H), AtMost):
                    result.big = (kind, seed)
                    self._sweeps[key] = result
                    return result
                for t, node in enumerate(tour_lap(tour, root)):
                    if node.level != i:
                        continue
                    result.witnesses.setdefault(node.conf, (bit, seed, t))
                    result.seeds.setdefault(node.conf, set()).add(seed)
                    result.kind_seeds.setdefault((node.conf, kind), set()).add(seed)
        logger.debug('Layer %d sweep for tau=%s: %d configurations', i, tau, len(result.witnesses))
        self._sweeps[key] = result
        return result

    def _small_sweep(self, tau, prg, i):
        result = self.sweep(tau, prg, i)
        if result.big:
            kind, seed = result.big
            raise SizeBoundViolated(f'The {kind.value} tree of seed {seed} at i={i} exceeds H.')
        return result

    def s_members(self, tau, prg, i, fraction=None):
        fraction = self.params.threshold if fraction is None else fraction
        return self._small_sweep(tau, prg, i).members(fraction * self.seed_count)

    def count_v(self, tape, i):
        return len(self._small_sweep(tape.tau, tape.prg, i).witnesses)

    def index_v(self, tape, i, j):
        result = self._small_sweep(tape.tau, tape.prg, i)
        conf = list(result.witnesses)[j]
        return conf, result.witnesses[conf]

    def count_s(self, tape, i):
        return len(self.s_members(tape.tau, tape.prg, i))

    def index_s(self, tape, i, j):
        conf = self.s_members(tape.tau, tape.prg, i)[j]
        return conf, self._small_sweep(tape.tau, tape.prg, i).witnesses[conf]

    def seed_classes(self, conf, level, prg, fraction):
        """Catalytic settings whose trees hold (conf, level) for enough seeds, by first seed."""
        counts, first = Counter(), {}
        for seed in range(self.seed_count):
            node = LayeredNode(conf, level)
            try:
                for k in range(level, 0, -1):
                    node = layered_successor(self.machine, self.input, node, prg.level_bit(k, seed))
            except TransitionError:
                continue
            if self.machine.halting_states.get(node.conf.state) not in KIND_BITS:
                continue
            if not is_canonical_halt(self.machine, node.conf):
                continue
            counts[node.conf.cat] += 1
            first.setdefault(node.conf.cat, seed)
        need = fraction * self.seed_count
        return [tau for tau in sorted(first, key=first.get) if counts[tau] >= need]

    def fractions(self, tau, prg):
        result = self._small_sweep(tau, prg, self.params.l)
        start = start_configuration(self.machine, tau)
        return tuple(
            Fraction(len(result.kind_seeds.get((start, kind), ())), self.seed_count)
            for kind in KIND_BITS
        )

    def goodness_context(self, tau, prg, i):
        result = self._small_sweep(tau, prg, i)
        members = result.members(self.params.threshold * self.seed_count)
        pairs = []
        for v in members:
            for z in neighbours_above(self.machine, self.input, v):
                B = compute_B(self.machine, self.input, v, z)
                for kind in KIND_BITS:
                    pairs.append((v, z, frozenset(result.kind_seeds.get((v, kind), ())), B))
        return GoodnessContext(self.params.m, i, members, pairs)

    def bad_predicate(self, tau, prg, i):
        context = self.goodness_context(tau, prg, i)
        return lambda h: not is_good(h, context, self.params.alpha)

    # Records

    def _parse_u(self, bits, cat):
        try:
            return parse_u(self.machine, self.n, bits, cat)
        except (ParseError, ValueError):
            raise UnknownTag(f'{bits} is not a configuration of {self.machine.name}.')

    @staticmethod
    def _check_free(bits, where):
        if '1' in bits:
            raise UnknownTag(f'The freed bits of {where} are not zero.')

    def timestamp_compress(self, tape, witness):
        seed, kind, i = witness
        m, prg = self.params.m, tape.prg
        tour = EulerTour(self.forest(prg, i, seed))
        root = self.root(kind, tape.tau)
        if isinstance(tour.size(root, self.params.H), AtMost):
            raise PreconditionNotBig(f'The {kind.value} tree of seed {seed} at i={i} has at most H nodes.')
        record_width = 2 + m + 2 * self.wi + self.wu
        if record_width >= 3 * m:
            raise ParamsInfeasible(f'A timestamp record takes {record_width} of {3 * m} tar bits.')
        node = root
        for _ in range(from_bits(tape.tar)):
            node = tour.next_vertex(node)
            if node == root:
                raise InadmissibleTape(f'val(tar) = {from_bits(tape.tar)} is not below the tree size.')
        record = (TIMESTAMP + to_bits(seed, m) + to_bits(node.level, self.wi) + to_bits(i, self.wi)
                  + serialize_u(self.machine, self.n, node.conf))
        return replace(tape, tau=node.conf.cat, tar=record.ljust(3 * m, '0'))

    def timestamp_decompress(self, tape):
        m, wi, tar = self.params.m, self.wi, tape.tar
        offset = 2
        seed = from_bits(tar[offset:offset + m])
        offset += m
        level = from_bits(tar[offset:offset + wi])
        i = from_bits(tar[offset + wi:offset + 2 * wi])
        offset += 2 * wi
        conf = self._parse_u(tar[offset:offset + self.wu], tape.tau)
        self._check_free(tar[offset + self.wu:], 'the timestamp record')
        if i > self.params.l or level > i:
            raise UnknownTag(f'Level {level} and i={i} do not describe a y-tree node.')
        tour = EulerTour(self.forest(tape.prg, i, seed))
        node = LayeredNode(conf, level)
        steps = 0
        while node.level:
            node = tour.prev_vertex(node)
            steps += 1
            if steps >= 2 ** (3 * m):
                raise UnknownTag('The recorded node has no level-0 root within range.')
        if self.machine.halting_states.get(node.conf.state) not in KIND_BITS:
            raise UnknownTag(f'The recorded node descends to {node.conf}, not a halt.')
        return replace(tape, tau=node.conf.cat, tar=to_bits(steps, 3 * m))

    def _index_width(self, bound, record_width):
        width = max(clog2(bound), record_width + 1)
        if width > 3 * self.params.m:
            raise ParamsInfeasible(f'An index record needs {width} of {3 * self.params.m} tar bits.')
        return width

    def _si_layout(self):
        idx_width = clog2(math.floor(1 / self.params.threshold))
        record_width = 2 + idx_width + self.wi + self.wu
        return idx_width, record_width, self._index_width(self.params.T, record_width)

    def si_index_compress(self, tape, i):
        prg = tape.prg
        members = self.s_members(tape.tau, prg, i)
        if len(members) < self.params.T:
            raise PreconditionSmallS(f'|S_{i}| = {len(members)} is below T = {self.params.T}.')
        idx_width, record_width, width = self._si_layout()
        j = from_bits(tape.tar[:width])
        if j >= len(members):
            raise InadmissibleTape(f'Index {j} is outside S_{i} of size {len(members)}.')
        conf = members[j]
        classes = self.seed_classes(conf, i, prg, self.params.threshold)
        if tape.tau not in classes:
            raise SeedClassUnstable(f'tau={tape.tau} is not among the seed classes of {conf}.')
        record = (SI_INDEX + to_bits(classes.index(tape.tau), idx_width) + to_bits(i, self.wi)
                  + serialize_u(self.machine, self.n, conf))
        tar = record + tape.tar[width:] + '0' * (width - record_width)
        return replace(tape, tau=conf.cat, tar=tar)

    def si_index_decompress(self, tape):
        idx_width, record_width, width = self._si_layout()
        tar = tape.tar
        idx = from_bits(tar[2:2 + idx_width])
        i = from_bits(tar[2 + idx_width:2 + idx_width + self.wi])
        conf = self._parse_u(tar[2 + idx_width + self.wi:record_width], tape.tau)
        self._check_free(tar[3 * self.params.m - (width - record_width):], 'the S_i record')
        if i >= self.params.l:
            raise UnknownTag(f'i={i} is out of range.')
        prg = tape.prg
        classes = self.seed_classes(conf, i, prg, self.params.threshold)
        if idx >= len(classes):
            raise UnknownTag(f'Class index {idx} is outside {len(classes)} classes.')
        tau = classes[idx]
        members = self.s_members(tau, prg, i)
        if conf not in members:
            raise SeedClassUnstable(f'{conf} left S_{i} for tau={tau}.')
        restored = to_bits(members.index(conf), width) + tar[record_width:record_width + 3 * self.params.m - width]
        return replace(tape, tau=tau, tar=restored)

    def _sl_layout(self):
        record_width = 2 + 2 + self.wu
        return record_width, self._index_width(self.params.T_prime, record_width)

    def slprime_compress(self, tape):
        l, prg = self.params.l, tape.prg
        members = self.s_members(tape.tau, prg, l, SL_PRIME_FRACTION)
        if len(members) < self.params.T_prime:
            raise PreconditionFailed(f"|S'_l| = {len(members)} is below T' = {self.params.T_prime}.")
        f_acc, f_rej = self.fractions(tape.tau, prg)
        cut = Fraction(1, 2) + self.params.eps / 2
        if f_acc >= cut or f_rej >= cut:
            raise PreconditionFailed('A seed fraction already decides the input.')
        record_width, width = self._sl_layout()
        j = from_bits(tape.tar[:width])
        if j >= len(members):
            raise InadmissibleTape(f"Index {j} is outside S'_l of size {len(members)}.")
        conf = members[j]
        classes = self.seed_classes(conf, l, prg, SL_PRIME_FRACTION)
        if tape.tau not in classes:
            raise SeedClassUnstable(f'tau={tape.tau} is not among the seed classes of {conf}.')
        record = SL_PRIME + to_bits(classes.index(tape.tau), 2) + serialize_u(self.machine, self.n, conf)
        tar = record + tape.tar[width:] + '0' * (width - record_width)
        return replace(tape, tau=conf.cat, tar=tar)

    def slprime_decompress(self, tape):
        record_width, width = self._sl_layout()
        l, tar, prg = self.params.l, tape.tar, tape.prg
        idx = from_bits(tar[2:4])
        conf = self._parse_u(tar[4:record_width], tape.tau)
        self._check_free(tar[3 * self.params.m - (width - record_width):], "the S'_l record")
        classes = self.seed_classes(conf, l, prg, SL_PRIME_FRACTION)
        if idx >= len(classes):
            raise UnknownTag(f'Class index {idx} is outside {len(classes)} classes.')
        tau = classes[idx]
        members = self.s_members(tau, prg, l, SL_PRIME_FRACTION)
        if conf not in members:
            raise SeedClassUnstable(f"{conf} left S'_l for tau={tau}.")
        restored = to_bits(members.index(conf), width) + tar[record_width:record_width + 3 * self.params.m - width]
        return replace(tape, tau=tau, tar=restored)

    def _bad_layout(self, bad_count):
        rank_width = clog2(bad_count)
        head = 2 + self.wi
        freed = 2 * self.params.m - rank_width - head
        return rank_width, head, freed

    def badhash_compress(self, tape, i, bad_predicate):
        m = self.params.m
        if not 0 <= i < self.params.l:
            raise PreconditionFailed(f'There is no h_{i + 1} to replace.')
        h = tape.prg.hash_at(i + 1)
        if not bad_predicate(h):
            raise PreconditionFailed(f'h_{i + 1} is good.')
        if 2 ** (2 * m) > lab_settings.BRUTE_FORCE_BUDGET:
            raise BudgetExceeded(f'The GF(2^{m}) family has {2 ** (2 * m)} members.')
        bad = [g.rank for g in hash_family(m) if bad_predicate(g)]
        rank_width, head, freed = self._bad_layout(len(bad))
        if freed < 1:
            raise IndexOverflow(
                f'{len(bad)} bad hashes need {rank_width} rank bits; the slot has '
                f'{2 * m - head} after relocating the tar head.'
            )
        body = 3 * m - freed
        slot = to_bits(bad.index(h.rank), rank_width) + tape.tar[:head] + tape.tar[body:]
        tar = BADHASH + to_bits(i, self.wi) + tape.tar[head:body] + '0' * freed
        return replace(tape.with_slot(i + 1, slot), tar=tar)

    def badhash_decompress(self, tape, bad_predicate=None):
        m, tar = self.params.m, tape.tar
        i = from_bits(tar[2:2 + self.wi])
        if i >= self.params.l:
            raise UnknownTag(f'i={i} is out of range.')
        if bad_predicate is None:
            bad_predicate = self.bad_predicate(tape.tau, tape.prg, i)
        bad = [g.rank for g in hash_family(m) if bad_predicate(g)]
        rank_width, head, freed = self._bad_layout(len(bad))
        if freed < 1:
            raise UnknownTag(f'{len(bad)} bad hashes leave no freed bits; this is not a bad-hash record.')
        body = 3 * m - freed
        slot = tape.slot(i + 1)
        rank = from_bits(slot[:rank_width])
        self._check_free(tar[body:], 'the bad-hash record')
        if rank >= len(bad):
            raise UnknownTag(f'Bad-hash rank {rank} is outside {len(bad)} bad hashes.')
        h = HashFn.from_rank(m, bad[rank])
        restored = slot[rank_width:rank_width + head] + tar[head:body] + slot[rank_width + head:]
        return replace(tape.with_slot(i + 1, h.encode()), tar=restored)

    def freed_bits(self, tape, bad_predicate=None):
        """Length of the zero region a compressed record frees."""
        tag = tape.tar[:2]
        if tag == TIMESTAMP:
            return 3 * self.params.m - (2 + self.params.m + 2 * self.wi + self.wu)
        if tag == SI_INDEX:
            _, record_width, width = self._si_layout()
            return width - record_width
        if tag == SL_PRIME:
            record_width, width = self._sl_layout()
            return width - record_width
        if bad_predicate is None:
            i = from_bits(tape.tar[2:2 + self.wi])
            bad_predicate = self.bad_predicate(tape.tau, tape.prg, i)
        bad = sum(1 for g in hash_family(self.params.m) if bad_predicate(g))
        return self._bad_layout(bad)[2]

    # Drivers

    def r_subroutine(self, tape, bad_predicate=None):
        self._check_tape(tape)
        tag = tape.tar[:2]
        if tag == TIMESTAMP:
            return self.timestamp_decompress(tape)
        if tag == SI_INDEX:
            return self.si_index_decompress(tape)
        if tag == BADHASH:
            return self.badhash_decompress(tape, bad_predicate)
        if tag == SL_PRIME:
            return self.slprime_decompress(tape)
        raise UnknownTag(f'Unknown tag {tag!r}.')

    def _compress(self, tape, tag, level, compress, bad_predicate=None, mode=GENERAL):
        try:
            compressed = compress()
        except (InadmissibleTape, IndexOverflow) as exc:
            if mode == POLYTIME:
                raise ParamsInfeasible(f'Polytime mode cannot compress with tag {tag} at i={level}: {exc}')
            logger.warning('Tape cannot be compressed with tag %s at i=%d: %s', tag, level, exc)
            return FOutcome('dontknow', tape, tag=tag, level=level, note=str(exc))
        return FOutcome('compressed', compressed, tag=tag, level=level,
                        freed_bits=self.freed_bits(compressed, bad_predicate))

    def f_subroutine(self, tape, mode=GENERAL):
        """Decide, compress or (general mode only) give up.

        Polytime mode never returns dontknow: parameters that would force it
        to raise ParamsInfeasible instead.
        """
        self._check_tape(tape)
        prg, params = tape.prg, self.params
        if mode == POLYTIME and not params.covers_tar:
            raise ParamsInfeasible(
                f'Polytime mode needs H >= 2^{3 * params.m} - 1 so every tar value names a '
                f'node of a big tree, got H={params.H}.'
            )
        for i in range(params.l + 1):
            result = self.sweep(tape.tau, prg, i)
            if result.big:
                kind, seed = result.big
                return self._compress(tape, TIMESTAMP, i,
                                      lambda: self.timestamp_compress(tape, (seed, kind, i)), mode=mode)
            if i == params.l:
                break
            if len(result.members(params.threshold * self.seed_count)) >= params.T:
                return self._compress(tape, SI_INDEX, i, lambda: self.si_index_compress(tape, i),
                                      mode=mode)
            predicate = self.bad_predicate(tape.tau, prg, i)
            if predicate(prg.hash_at(i + 1)):
                return self._compress(tape, BADHASH, i,
                                      lambda: self.badhash_compress(tape, i, predicate), predicate, mode)
        f_acc, f_rej = self.fractions(tape.tau, prg)
        cut = (Fraction(1, 2) + params.eps - params.zeta if mode == GENERAL
               else Fraction(1, 2) + params.eps / 2)
        if f_acc >= cut:
            return FOutcome('accept', tape, f_acc=f_acc, f_rej=f_rej)
        if f_rej >= cut:
            return FOutcome('reject', tape, f_acc=f_acc, f_rej=f_rej)
        if mode == GENERAL:
            return FOutcome('dontknow', tape, f_acc=f_acc, f_rej=f_rej)
        members = self.s_members(tape.tau, prg, params.l, SL_PRIME_FRACTION)
        if len(members) < params.T_prime:
            raise ParamsInfeasible(
                f"Neither fraction reaches {cut} and |S'_l| = {len(members)} is below T' = {params.T_prime}."
            )
        outcome = self._compress(tape, SL_PRIME, params.l, lambda: self.slprime_compress(tape), mode=mode)
        outcome.f_acc, outcome.f_rej = f_acc, f_rej
        return outcome


# Module-level entry points

def count_v(machine, input, tape, i, params):
    return Compressor(machine, input, params).count_v(tape, i)


def index_v(machine, input, tape, i, j, params):
    return Compressor(machine, input, params).index_v(tape, i, j)


def count_s(machine, input, tape, i, params):
    return Compressor(machine, input, params).count_s(tape, i)


def index_s(machine, input, tape, i, j, params):
    return Compressor(machine, input, params).index_s(tape, i, j)


def f_subroutine(machine, input, tape, params, mode=GENERAL):
    return Compressor(machine, input, params).f_subroutine(tape, mode)


def r_subroutine(machine, input, tape, params):
    return Compressor(machine, input, params).r_subroutine(tape)
