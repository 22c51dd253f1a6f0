"""
Configuration graphs.

The traversal half of this module never materializes a graph: a component is
walked as an Euler tour using only ``successors`` / ``predecessors``, with a
fixed rotation at every vertex (parent first, then children in canonical
order). The explicit half builds whole graphs at desk scale and is used as the
reference the tours are checked against.
"""
import logging
from collections import Counter, deque
from dataclasses import dataclass, field
from functools import lru_cache

from .conf import lab_settings
from .exceptions import (
    BitAccessFailure, BudgetExceeded, LevelZero, NotDeterministic, TransitionError,
    TraversalError,
)
from .machine import (
    canonical_serialize, conf_key, predecessors, start_configuration, step, successors,
    universe, universe_size,
)

logger = logging.getLogger(__name__)

CHILD_CACHE_SIZE = 1 << 14


@dataclass(frozen=True)
class LayeredNode:
    conf: object
    level: int

    def __str__(self):
        return f'{self.level}:{self.conf}'


@dataclass(frozen=True)
class AtMost:
    size: int


@dataclass(frozen=True)
class Exceeds:
    bound: int


class Forest:
    """A rooted forest given by ``parent`` and ordered ``children``."""

    def parent(self, node):
        raise NotImplementedError

    def children(self, node):
        raise NotImplementedError


class ConfigurationForest(Forest):
    """G_{M,x} of a deterministic machine: every vertex points to its successor."""

    def __init__(self, machine, input):
        if not machine.is_deterministic:
            raise NotDeterministic(f'{machine.name} is randomized; its graph is not a forest.')
        self.machine = machine
        self.input = input
        self.children = lru_cache(maxsize=CHILD_CACHE_SIZE)(self._children)

    def parent(self, conf):
        edges = successors(self.machine, self.input, conf)
        return edges[0][1] if edges else None

    def _children(self, conf):
        kids = {v for _, v in predecessors(self.machine, self.input, conf)}
        return tuple(sorted(kids, key=lambda v: conf_key(self.machine, v)))


def layered_successor(machine, input, node, bit):
    if node.level == 0:
        raise LevelZero(f'{node} is on level 0.')
    if machine.is_halting(node.conf.state):
        return LayeredNode(node.conf, node.level - 1)
    return LayeredNode(step(machine, input, node.conf, bit), node.level - 1)


class YForest(Forest):
    """The y-subgraph of the layered graph with ``ylen`` levels below the top.

    ``ybit(j)`` returns bit y_j (1-indexed); level i uses y_{ylen - i + 1}.
    Nodes above ``ylen`` are isolated.
    """

    def __init__(self, machine, input, ybit, ylen, preds=None):
        if ylen > lab_settings.MAX_Y_LENGTH:
            raise BitAccessFailure(f'|y| = {ylen} exceeds MAX_Y_LENGTH.', code='too_long')
        self.machine = machine
        self.input = input
        self._ybit = ybit
        self.ylen = ylen
        self._preds = preds or (lambda conf: predecessors(machine, input, conf))
        self.children = lru_cache(maxsize=CHILD_CACHE_SIZE)(self._children)

    def bit_for_level(self, level):
        try:
            bit = int(self._ybit(self.ylen - level + 1))
        except (IndexError, KeyError, TypeError, ValueError) as exc:
            raise BitAccessFailure(f'Cannot read the y-bit for level {level}: {exc}.')
        if bit not in (0, 1):
            raise BitAccessFailure(f'y-bit for level {level} is {bit}.')
        return bit

    def parent(self, node):
        if node.level == 0 or node.level > self.ylen:
            return None
        try:
            return layered_successor(self.machine, self.input, node, self.bit_for_level(node.level))
        except TransitionError:
            return None

    def _children(self, node):
        if node.level >= self.ylen:
            return ()
        level = node.level + 1
        bit = self.bit_for_level(level)
        kids = {
            LayeredNode(v, level)
            for label, v in self._preds(node.conf) if label == bit
        }
        if self.machine.is_halting(node.conf.state):
            kids.add(LayeredNode(node.conf, level))
        return tuple(sorted(kids, key=lambda n: conf_key(self.machine, n.conf)))


class EulerTour:
    """Edge-rotation walk over a forest.

    A position is (vertex, slot). Slot 0 is the edge to the parent (a
    self-loop at a root) and slot j > 0 the edge to the j-th child.
    """

    def __init__(self, forest):
        self.forest = forest

    def advance(self, node, slot):
        children = self.forest.children(node)
        nxt = (slot + 1) % (1 + len(children))
        if nxt:
            return children[nxt - 1], 0
        parent = self.forest.parent(node)
        if parent is None:
            return node, 0
        return parent, 1 + self.forest.children(parent).index(node)

    def retreat(self, node, slot):
        if slot:
            child = self.forest.children(node)[slot - 1]
            return child, len(self.forest.children(child))
        parent = self.forest.parent(node)
        if parent is None:
            return node, len(self.forest.children(node))
        return parent, self.forest.children(parent).index(node)

    def next_vertex(self, node):
        position = self.advance(node, 0)
        while position[1]:
            position = self.advance(*position)
        return position[0]

    def prev_vertex(self, node):
        # arrivals on slot 0 mark first visits; walk back to the previous one
        position = self.retreat(node, 0)
        while True:
            if position[1] == 0:
                return position[0]
            position = self.retreat(*position)

    def size(self, node, bound):
        origin = (node, 0)
        position = origin
        darts = visits = 0
        closed = False
        while darts < 6 * bound:
            position = self.advance(*position)
            darts += 1
            if position[1] == 0:
                visits += 1
            if position == origin:
                closed = True
                break
        for _ in range(darts):
            position = self.retreat(*position)
        if position != origin:
            raise TraversalError(f'Reverse walk from {node} ended at {position[0]}.')
        if closed and visits <= bound:
            return AtMost(visits)
        return Exceeds(bound)


def next_step(machine, input, conf):
    return EulerTour(ConfigurationForest(machine, input)).next_vertex(conf)


def step_back(machine, input, conf):
    return EulerTour(ConfigurationForest(machine, input)).prev_vertex(conf)


def count_size(machine, input, conf, bound):
    return EulerTour(ConfigurationForest(machine, input)).size(conf, bound)


def y_dfs_next(machine, input, node, ybit, ylen):
    return EulerTour(YForest(machine, input, ybit, ylen)).next_vertex(node)


def y_dfs_prev(machine, input, node, ybit, ylen):
    return EulerTour(YForest(machine, input, ybit, ylen)).prev_vertex(node)


def y_dfs_size(machine, input, node, ybit, ylen, bound):
    return EulerTour(YForest(machine, input, ybit, ylen)).size(node, bound)


def ybits_from_string(y):
    """Bit access for a materialized y, 1-indexed."""
    def ybit(j):
        if not 1 <= j <= len(y):
            raise IndexError(f'y has no bit {j}')
        return int(y[j - 1])
    return ybit


def tour_lap(tour, node):
    """Vertices of node's component in tour order, starting at ``node``."""
    order = [node]
    current = tour.next_vertex(node)
    while current != node:
        order.append(current)
        current = tour.next_vertex(current)
    return order


# Explicit graphs

@dataclass
class ExplicitGraph:
    machine: object
    input: str
    vertices: list
    edges: list
    levels: int | None = None
    index: dict = field(default_factory=dict)

    def __post_init__(self):
        self.index = {v: i for i, v in enumerate(self.vertices)}
        self.out_edges = {v: [] for v in self.vertices}
        self.in_edges = {v: [] for v in self.vertices}
        for u, label, v in self.edges:
            self.out_edges[u].append((label, v))
            self.in_edges[v].append((label, u))

    @property
    def layered(self):
        return self.levels is not None

    def sinks(self):
        return [v for v in self.vertices if not self.out_edges[v]]

    def components(self):
        """Weakly connected components, each in vertex order."""
        seen = set()
        found = []
        for root in self.vertices:
            if root in seen:
                continue
            seen.add(root)
            queue = deque([root])
            members = []
            while queue:
                v = queue.popleft()
                members.append(v)
                for _, w in self.out_edges[v] + self.in_edges[v]:
                    if w not in seen:
                        seen.add(w)
                        queue.append(w)
            found.append(sorted(members, key=self.index.__getitem__))
        return found

    def component_of(self, vertex):
        for members in self.components():
            if vertex in members:
                return members
        raise KeyError(vertex)

    def sort_key(self, vertex):
        if self.layered:
            return conf_key(self.machine, vertex.conf)
        return conf_key(self.machine, vertex)

    def preorder(self, root):
        """Pre-order from a root: children are the distinct in-neighbors, in canonical order."""
        order = []
        stack = [root]
        while stack:
            v = stack.pop()
            order.append(v)
            kids = sorted({u for _, u in self.in_edges[v] if u != v}, key=self.sort_key)
            stack.extend(reversed(kids))
        return order

    def stats(self):
        degrees = Counter()
        for u, _, v in self.edges:
            degrees[u] += 1
            degrees[v] += 1
        return GraphStats(
            vertices=len(self.vertices),
            edges=len(self.edges),
            sinks=len(self.sinks()),
            max_degree=max(degrees.values(), default=0),
            component_sizes=dict(sorted(Counter(len(c) for c in self.components()).items())),
        )

    def edge_lines(self):
        n = len(self.input)

        def label(vertex):
            if self.layered:
                return f'{vertex.level} {canonical_serialize(self.machine, n, vertex.conf)}'
            return canonical_serialize(self.machine, n, vertex)

        for u, bit, v in self.edges:
            yield f'{label(u)} -({bit})-> {label(v)}'


@dataclass(frozen=True)
class GraphStats:
    vertices: int
    edges: int
    sinks: int
    max_degree: int
    component_sizes: dict


def build_explicit_graph(machine, input, levels=None, tau=None, budget=None):
    """Materialize G_{M,x}, G_{M,x,tau}, or the layered graph with ``levels`` + 1 copies."""
    budget = lab_settings.GRAPH_BUDGET if budget is None else budget
    size = universe_size(machine, len(input)) * (1 if levels is None else levels + 1)
    if size > budget:
        raise BudgetExceeded(f'{machine.name} would materialize {size} vertices, budget is {budget}.')
    if tau is not None:
        start = start_configuration(machine, tau)
        vertices = [start]
        seen = {start}
        queue = deque(vertices)
        while queue:
            conf = queue.popleft()
            for _, nxt in successors(machine, input, conf):
                if nxt not in seen:
                    seen.add(nxt)
                    vertices.append(nxt)
                    queue.append(nxt)
    else:
        vertices = list(universe(machine, len(input), budget))
    if levels is None:
        edges = [
            (conf, bit, nxt)
            for conf in vertices for bit, nxt in successors(machine, input, conf)
        ]
        logger.debug('Built %s with %d vertices and %d edges', machine.name, len(vertices), len(edges))
        return ExplicitGraph(machine, input, vertices, edges)
    layered = [LayeredNode(conf, level) for level in range(levels + 1) for conf in vertices]
    edges = []
    for node in layered:
        if node.level == 0:
            continue
        if machine.is_halting(node.conf.state):
            below = LayeredNode(node.conf, node.level - 1)
            edges += [(node, 0, below), (node, 1, below)]
            continue
        for bit, nxt in successors(machine, input, node.conf):
            edges.append((node, bit, LayeredNode(nxt, node.level - 1)))
    return ExplicitGraph(machine, input, layered, edges, levels=levels)


def explicit_y_tree(graph, node, ybit, ylen):
    """Vertex set of the y-tree of ``node``, from a layered ExplicitGraph."""
    if node.level > ylen:
        return {node}

    def selected(u, label):
        return 1 <= u.level <= ylen and label == int(ybit(ylen - u.level + 1))

    seen = {node}
    queue = deque([node])
    while queue:
        v = queue.popleft()
        neighbours = [w for label, w in graph.out_edges[v] if selected(v, label)]
        neighbours += [u for label, u in graph.in_edges[v] if selected(u, label)]
        for w in neighbours:
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return seen
