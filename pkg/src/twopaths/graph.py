"""Digraph ingestion and normalization.

A raw digraph with four designated terminals is rewritten until every edge
can serve as a first-order branch: no self-loops, no parallel edges, inputs
with in-degree 0, outputs with out-degree 0, and no interior node with both
in-degree and out-degree above 1.  The rewrites (subdividing offending
edges, attaching fresh terminals, splitting busy nodes) all preserve which
pairs of terminal-to-terminal paths can be made node-disjoint.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import InvalidTerminals


@dataclass(frozen=True)
class RawDigraph:
    nodes: frozenset[str]
    edges: tuple[tuple[str, str], ...]
    inputs: tuple[str, str]
    outputs: tuple[str, str]
    # Rewritten nodes map back to the node of the input graph they stand
    # for; nodes absent from the map are original.
    origin: dict[str, str] = field(default_factory=dict, compare=False)

    def validate(self) -> None:
        terminals = (*self.inputs, *self.outputs)
        if len(set(terminals)) != 4:
            raise InvalidTerminals(f"terminals must be distinct: {terminals}")
        missing = [t for t in terminals if t not in self.nodes]
        if missing:
            raise InvalidTerminals(f"terminals not in node set: {missing}")
        for a, b in self.edges:
            if a not in self.nodes or b not in self.nodes:
                raise InvalidTerminals(f"edge endpoint not in node set: {(a, b)}")

    def original_node(self, v: str) -> str:
        seen = set()
        while v in self.origin and v not in seen:
            seen.add(v)
            v = self.origin[v]
        return v

    def successors(self) -> dict[str, list[str]]:
        adj: dict[str, list[str]] = {v: [] for v in sorted(self.nodes)}
        for a, b in self.edges:
            adj[a].append(b)
        for v in adj:
            adj[v].sort()
        return adj


def digraph(edges, inputs, outputs, extra_nodes=()) -> RawDigraph:
    """Convenience constructor; node set is inferred from edges and terminals."""
    nodes = set(extra_nodes)
    nodes.update(inputs)
    nodes.update(outputs)
    for a, b in edges:
        nodes.add(a)
        nodes.add(b)
    g = RawDigraph(frozenset(nodes), tuple(edges), tuple(inputs), tuple(outputs))
    g.validate()
    return g


class _FreshNames:
    def __init__(self, taken):
        self.taken = set(taken)
        self.counter = 0

    def make(self, stem: str) -> str:
        while True:
            self.counter += 1
            name = f"{stem}_{self.counter}"
            if name not in self.taken:
                self.taken.add(name)
                return name


def normalize(raw: RawDigraph) -> RawDigraph:
    """Remove self-loops, parallel edges and terminal-degree violations.

    Self-loops v->v become v->w->v, repeated copies of an edge a->b become
    a->w->b, and a terminal with forbidden degree is demoted to an interior
    node behind a fresh terminal carrying a single edge.  Fresh node names
    are assigned in a deterministic scan order.
    """
    raw.validate()
    fresh = _FreshNames(raw.nodes)
    origin = dict(raw.origin)
    edges: list[tuple[str, str]] = []
    seen: set[tuple[str, str]] = set()
    for a, b in sorted(raw.edges):
        if a == b:
            w = fresh.make("loop")
            origin[w] = raw.original_node(a)
            edges.append((a, w))
            edges.append((w, a))
        elif (a, b) in seen:
            w = fresh.make("par")
            origin[w] = raw.original_node(a)
            edges.append((a, w))
            edges.append((w, b))
        else:
            seen.add((a, b))
            edges.append((a, b))

    inputs = list(raw.inputs)
    outputs = list(raw.outputs)
    heads = {b for _, b in edges}
    tails = {a for a, _ in edges}
    for k, u in enumerate(inputs):
        if u in heads:
            u_new = fresh.make("in")
            origin[u_new] = raw.original_node(u)
            edges.append((u_new, u))
            inputs[k] = u_new
    for k, y in enumerate(outputs):
        if y in tails:
            y_new = fresh.make("out")
            origin[y_new] = raw.original_node(y)
            edges.append((y, y_new))
            outputs[k] = y_new

    nodes = set(raw.nodes) | {a for a, _ in edges} | {b for _, b in edges}
    nodes.update(inputs)
    nodes.update(outputs)
    g = RawDigraph(
        frozenset(nodes),
        tuple(sorted(edges)),
        (inputs[0], inputs[1]),
        (outputs[0], outputs[1]),
        origin,
    )
    g.validate()
    return g


def split_nodes(g: RawDigraph) -> RawDigraph:
    """Split every interior node with in-degree > 1 and out-degree > 1 into
    an entry/exit pair joined by one edge."""
    indeg: dict[str, int] = {}
    outdeg: dict[str, int] = {}
    for a, b in g.edges:
        outdeg[a] = outdeg.get(a, 0) + 1
        indeg[b] = indeg.get(b, 0) + 1
    terminals = set(g.inputs) | set(g.outputs)
    fresh = _FreshNames(g.nodes)
    origin = dict(g.origin)
    entry: dict[str, str] = {}
    exit_: dict[str, str] = {}
    extra: list[tuple[str, str]] = []
    for v in sorted(g.nodes):
        if v in terminals:
            continue
        if indeg.get(v, 0) > 1 and outdeg.get(v, 0) > 1:
            v_in = fresh.make(v)
            v_out = fresh.make(v)
            root = g.original_node(v)
            origin[v_in] = root
            origin[v_out] = root
            entry[v] = v_in
            exit_[v] = v_out
            extra.append((v_in, v_out))
    if not entry:
        return g
    edges = [(exit_.get(a, a), entry.get(b, b)) for a, b in g.edges]
    edges.extend(extra)
    nodes = (set(g.nodes) - set(entry)) | set(entry.values()) | set(exit_.values())
    out = RawDigraph(
        frozenset(nodes), tuple(sorted(edges)), g.inputs, g.outputs, origin
    )
    out.validate()
    return out


def standardize(raw: RawDigraph) -> RawDigraph:
    return split_nodes(normalize(raw))


@dataclass(frozen=True)
class Branch:
    index: int  # 1-based; doubles as the branch-variable index
    tail: str
    head: str


@dataclass(frozen=True)
class StandardSfg:
    branches: tuple[Branch, ...]
    in_degree: dict[str, int]
    out_degree: dict[str, int]
    inputs: tuple[str, str]
    outputs: tuple[str, str]
    origin: dict[str, str]

    @property
    def n(self) -> int:
        return len(self.branches)

    @property
    def nodes(self) -> list[str]:
        seen = dict.fromkeys(self.inputs)
        seen.update(dict.fromkeys(self.outputs))
        for b in self.branches:
            seen[b.tail] = None
            seen[b.head] = None
        return sorted(seen)

    def check_invariants(self) -> None:
        pairs = set()
        for b in self.branches:
            assert b.tail != b.head, f"self-loop branch {b}"
            assert (b.tail, b.head) not in pairs, f"parallel branch {b}"
            pairs.add((b.tail, b.head))
        for u in self.inputs:
            assert self.in_degree.get(u, 0) == 0, f"input {u} has in-degree"
        for y in self.outputs:
            assert self.out_degree.get(y, 0) == 0, f"output {y} has out-degree"
        terminals = set(self.inputs) | set(self.outputs)
        for v in self.nodes:
            if v in terminals:
                continue
            di = self.in_degree.get(v, 0)
            do = self.out_degree.get(v, 0)
            assert min(di, do) <= 1, f"unsplit node {v}: in={di} out={do}"


@dataclass(frozen=True)
class SystemStructure:
    """0/1 skeleton of the state equations read off the branch graph.

    a0[i][j] = 1 iff branch j+1 feeds branch i+1 (head of j is tail of i);
    b[i][k] = 1 iff branch i+1 leaves input k+1; c[j][i] = 1 iff branch i+1
    enters output j+1.  The diagonal of the state matrix is left open for a
    branch-variable assignment.
    """

    n: int
    a0: tuple[tuple[int, ...], ...]
    b: tuple[tuple[int, int], ...]
    c: tuple[tuple[int, ...], tuple[int, ...]]

    def a_at(self, alpha) -> list[list[int]]:
        """Dense state matrix with the diagonal set to `alpha`."""
        m = [list(row) for row in self.a0]
        for i, v in enumerate(alpha):
            m[i][i] = v
        return m

    def feeds(self) -> list[list[int]]:
        """Sparse view: feeds()[i] lists the 0-based branches feeding branch i."""
        return [
            [j for j, x in enumerate(row) if x]
            for row in self.a0
        ]


def build_system(g: RawDigraph) -> tuple[StandardSfg, SystemStructure]:
    """Index the branches and assemble the system skeleton.

    Expects a normalized and split digraph; branch order is lexicographic
    by (tail, head) so the matrices are reproducible across runs.
    """
    edges = sorted(g.edges)
    branches = tuple(
        Branch(i + 1, a, b) for i, (a, b) in enumerate(edges)
    )
    indeg: dict[str, int] = {}
    outdeg: dict[str, int] = {}
    for br in branches:
        outdeg[br.tail] = outdeg.get(br.tail, 0) + 1
        indeg[br.head] = indeg.get(br.head, 0) + 1
    sfg = StandardSfg(branches, indeg, outdeg, g.inputs, g.outputs, dict(g.origin))
    sfg.check_invariants()

    n = len(branches)
    a0 = tuple(
        tuple(1 if branches[j].head == branches[i].tail else 0 for j in range(n))
        for i in range(n)
    )
    b = tuple(
        (
            1 if br.tail == g.inputs[0] else 0,
            1 if br.tail == g.inputs[1] else 0,
        )
        for br in branches
    )
    c = (
        tuple(1 if br.head == g.outputs[0] else 0 for br in branches),
        tuple(1 if br.head == g.outputs[1] else 0 for br in branches),
    )
    return sfg, SystemStructure(n, a0, b, c)
