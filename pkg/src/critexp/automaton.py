"""Strong Markov structures for free groups.

A coding is a finite directed multigraph whose edges carry generator
labels, with a distinguished start vertex.  A path ``e_1, ..., e_n`` from
the start evaluates to the group element ``pi(e_n) ... pi(e_1)``.

Generator symbols are strings; the formal inverse of ``"a"`` is ``"a'"``.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Iterator, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components


def inverse_symbol(s: str) -> str:
    return s[:-1] if s.endswith("'") else s + "'"


class GroupWord(tuple):
    """Freely reduced word over generator symbols (tuple of strings)."""

    def __new__(cls, symbols: Iterable[str] = ()):
        out: list[str] = []
        for s in symbols:
            if out and out[-1] == inverse_symbol(s):
                out.pop()
            else:
                out.append(s)
        return super().__new__(cls, out)

    @classmethod
    def parse(cls, text: str) -> "GroupWord":
        """Parse ``"ab'c"``-style text (single-letter generators) or space-separated symbols."""
        text = text.strip()
        if " " in text:
            return cls(text.split())
        syms: list[str] = []
        for ch in text:
            if ch == "'":
                if not syms:
                    raise ValueError(f"dangling inverse mark in {text!r}")
                syms[-1] = inverse_symbol(syms[-1])
            else:
                syms.append(ch)
        return cls(syms)

    def inverse(self) -> "GroupWord":
        return GroupWord(inverse_symbol(s) for s in reversed(self))

    def __mul__(self, other) -> "GroupWord":
        return GroupWord(tuple(self) + tuple(other))

    def power(self, k: int) -> "GroupWord":
        base = self if k >= 0 else self.inverse()
        return GroupWord(tuple(base) * abs(k))

    def is_cyclically_reduced(self) -> bool:
        return len(self) < 2 or self[0] != inverse_symbol(self[-1])

    def __str__(self) -> str:
        return "".join(self) if all(len(s.rstrip("'")) == 1 for s in self) else " ".join(self)

    def __repr__(self) -> str:
        return f"GroupWord({str(self)!r})"


@dataclass(frozen=True)
class Edge:
    id: int
    source: str
    target: str
    label: str


@dataclass(frozen=True)
class Cycle:
    """Closed edge path in canonical (lexicographically minimal) rotation."""

    edges: tuple[int, ...]
    period: int

    @property
    def length(self) -> int:
        return len(self.edges)

    @property
    def primitive(self) -> bool:
        return self.period == len(self.edges)


class LabeledGraph:
    """Labeled directed multigraph with a start vertex.

    ``letters`` optionally rewrites each label as a word in a free basis
    (e.g. ``{"c": "b'a'"}`` when ``c = (ab)^{-1}``); labels not listed are
    free generators themselves.  It is only used for validation.
    """

    def __init__(self, vertices: Sequence[str], edges: Iterable[tuple[str, str, str]],
                 start: str | None, letters: dict[str, str] | None = None):
        self.vertices = tuple(str(v) for v in vertices)
        if len(set(self.vertices)) != len(self.vertices):
            raise ValueError("duplicate vertex ids")
        vset = set(self.vertices)
        self.edges = tuple(Edge(i, str(s), str(t), str(lab)) for i, (s, t, lab) in enumerate(edges))
        for e in self.edges:
            if e.source not in vset or e.target not in vset:
                raise ValueError(f"edge {e.id} references an unknown vertex")
        if start is not None and start not in vset:
            raise ValueError(f"start vertex {start!r} is not a vertex")
        self.start = start
        self.letters = dict(letters or {})
        self._out: dict[str, list[Edge]] = {v: [] for v in self.vertices}
        self._in: dict[str, list[Edge]] = {v: [] for v in self.vertices}
        for e in self.edges:
            self._out[e.source].append(e)
            self._in[e.target].append(e)

    def out_edges(self, v: str) -> list[Edge]:
        return self._out[v]

    def in_edges(self, v: str) -> list[Edge]:
        return self._in[v]

    @property
    def labels(self) -> set[str]:
        return {e.label for e in self.edges}

    def __len__(self) -> int:
        return len(self.vertices)

    def __repr__(self) -> str:
        return f"LabeledGraph({len(self.vertices)} vertices, {len(self.edges)} edges, start={self.start!r})"

    # serialization -----------------------------------------------------
    def to_dict(self) -> dict:
        d = {
            "vertices": list(self.vertices),
            "start": self.start,
            "edges": [{"from": e.source, "to": e.target, "label": e.label} for e in self.edges],
        }
        if self.letters:
            d["letters"] = dict(self.letters)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "LabeledGraph":
        try:
            edges = [(e["from"], e["to"], e["label"]) for e in d["edges"]]
            return cls(d["vertices"], edges, d.get("start"), d.get("letters"))
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed graph description: {exc}") from exc

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json(cls, text: str) -> "LabeledGraph":
        return cls.from_dict(json.loads(text))


def builtin_f2_standard() -> LabeledGraph:
    """Geodesic coding of F(a, b): one vertex per last letter, no backtracking."""
    gens = ["a", "b", "a'", "b'"]
    edges = [("*", g, g) for g in gens]
    for g, h in product(gens, gens):
        if h != inverse_symbol(g):
            edges.append((g, h, h))
    return LabeledGraph(["*"] + gens, edges, "*")


# row s, column t is 1 when the word s t is geodesic in <a, b, c | abc>
ABC_ORDER = ("a", "b", "c", "a'", "b'", "c'")
ABC_MATRIX = np.array([
    [1, 0, 1, 0, 1, 1],
    [1, 1, 0, 1, 0, 1],
    [0, 1, 1, 1, 1, 0],
    [0, 1, 1, 1, 1, 0],
    [1, 0, 1, 0, 1, 1],
    [1, 1, 0, 1, 0, 1],
])


def builtin_f2_abc() -> LabeledGraph:
    """Coding of F(a, b) with generators a, b, c = (ab)^{-1} and their inverses.

    Vertex ``s`` is entered by edges labeled ``s'``; an edge ``s -> t``
    (label ``t'``) exists when ``s t`` is geodesic.  Paths therefore spell
    inverses of geodesic words, so their evaluations are geodesic, and the
    vertex adjacency matrix is ``ABC_MATRIX`` in the order ``ABC_ORDER``.
    """
    edges = [("*", s, inverse_symbol(s)) for s in ABC_ORDER]
    for i, s in enumerate(ABC_ORDER):
        for j, t in enumerate(ABC_ORDER):
            if ABC_MATRIX[i, j]:
                edges.append((s, t, inverse_symbol(t)))
    return LabeledGraph(["*"] + list(ABC_ORDER), edges, "*", letters={"c": "b'a'"})


def builtin(name: str) -> LabeledGraph:
    table = {"standard": builtin_f2_standard, "abc": builtin_f2_abc}
    try:
        return table[name]()
    except KeyError:
        raise ValueError(f"unknown builtin coding {name!r}; choose from {sorted(table)}") from None


def load_coding(spec) -> LabeledGraph:
    """Builtin name, graph dict, or already-built graph."""
    if isinstance(spec, LabeledGraph):
        return spec
    if isinstance(spec, str):
        return builtin(spec)
    if isinstance(spec, dict):
        return LabeledGraph.from_dict(spec)
    raise ValueError(f"cannot interpret coding {spec!r}")


def _components(g: LabeledGraph) -> tuple[int, np.ndarray]:
    idx = {v: i for i, v in enumerate(g.vertices)}
    n = len(g.vertices)
    rows = [idx[e.source] for e in g.edges]
    cols = [idx[e.target] for e in g.edges]
    adj = csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
    return connected_components(adj, directed=True, connection="strong")


def recurrent_subgraph(g: LabeledGraph) -> LabeledGraph:
    """Edges lying on some directed cycle, with their endpoints.

    The start vertex is dropped unless it is itself recurrent.
    """
    if not g.vertices:
        return LabeledGraph([], [], None)
    _, comp = _components(g)
    idx = {v: i for i, v in enumerate(g.vertices)}
    keep = [e for e in g.edges if comp[idx[e.source]] == comp[idx[e.target]]]
    verts = [v for v in g.vertices if any(e.source == v for e in keep)]
    start = g.start if g.start in verts else None
    sub = LabeledGraph(verts, [], start, g.letters)
    # keep original edge ids so weights keyed by id stay valid
    sub.edges = tuple(keep)
    sub._out = {v: [e for e in keep if e.source == v] for v in verts}
    sub._in = {v: [e for e in keep if e.target == v] for v in verts}
    return sub


def is_irreducible(g: LabeledGraph) -> bool:
    if not g.vertices:
        return False
    ncomp, _ = _components(g)
    return ncomp == 1 and len(g.edges) > 0


def vertex_adjacency(g: LabeledGraph, recurrent: bool = True) -> tuple[np.ndarray, tuple[str, ...]]:
    """Edge-count matrix over (recurrent) vertices, with the vertex order used."""
    h = recurrent_subgraph(g) if recurrent else g
    idx = {v: i for i, v in enumerate(h.vertices)}
    a = np.zeros((len(h.vertices), len(h.vertices)), dtype=int)
    for e in h.edges:
        a[idx[e.source], idx[e.target]] += 1
    return a, h.vertices


def edge_map(g: LabeledGraph) -> dict[int, Edge]:
    return {e.id: e for e in g.edges}


def check_path(g: LabeledGraph, path: Sequence[int]) -> list[Edge]:
    emap = edge_map(g)
    try:
        edges = [emap[i] for i in path]
    except KeyError as exc:
        raise ValueError(f"unknown edge id {exc.args[0]}") from None
    for e, f in zip(edges, edges[1:]):
        if e.target != f.source:
            raise ValueError(f"edges {e.id} and {f.id} do not compose")
    return edges


def path_labels(g: LabeledGraph, path: Sequence[int]) -> list[str]:
    return [e.label for e in check_path(g, path)]


def evaluate_path(g: LabeledGraph, path: Sequence[int]) -> GroupWord:
    """``pi(e_n) ... pi(e_1)`` as a reduced word."""
    labels = path_labels(g, path)
    word = GroupWord(reversed(labels))
    if len(word) != len(labels):
        raise ValueError("path evaluation is not reduced; the coding is not geodesic")
    return word


def paths_from(g: LabeledGraph, v: str, n: int) -> Iterator[tuple[int, ...]]:
    """All edge paths of length exactly ``n`` starting at ``v``."""
    stack: list[tuple[str, tuple[int, ...]]] = [(v, ())]
    while stack:
        u, p = stack.pop()
        if len(p) == n:
            yield p
            continue
        for e in reversed(g.out_edges(u)):
            stack.append((e.target, p + (e.id,)))


def _minimal_rotation(seq: tuple[int, ...]) -> tuple[tuple[int, ...], int]:
    n = len(seq)
    rots = [seq[i:] + seq[:i] for i in range(n)]
    period = next(p for p in range(1, n + 1) if n % p == 0 and rots[p % n] == seq)
    return min(rots), period


def enumerate_cycles(g: LabeledGraph, n: int) -> Iterator[Cycle]:
    """Closed paths of length ``n`` in the recurrent part, one per rotation class."""
    if n < 1:
        raise ValueError("cycle length must be >= 1")
    h = recurrent_subgraph(g)
    for e0 in sorted(h.edges, key=lambda e: e.id):
        # canonical rotations start with their minimal edge id
        stack: list[tuple[str, tuple[int, ...]]] = [(e0.target, (e0.id,))]
        while stack:
            u, p = stack.pop()
            if len(p) == n:
                if u == e0.source:
                    canon, period = _minimal_rotation(p)
                    if canon == p:
                        yield Cycle(p, period)
                continue
            for e in reversed(h.out_edges(u)):
                if e.id >= e0.id:
                    stack.append((e.target, p + (e.id,)))


def closed_path_count(g: LabeledGraph, n: int) -> int:
    a, _ = vertex_adjacency(g)
    return int(np.trace(np.linalg.matrix_power(a, n))) if a.size else 0


@dataclass
class ValidationReport:
    passed: bool
    depth: int
    checked_paths: int = 0
    failures: list[str] = field(default_factory=list)

    @property
    def first_failure(self) -> str | None:
        return self.failures[0] if self.failures else None

    def to_dict(self) -> dict:
        return {"passed": self.passed, "depth": self.depth, "checked_paths": self.checked_paths,
                "failures": list(self.failures)}


def _to_basis(g: LabeledGraph, symbols: Sequence[str]) -> GroupWord:
    """Rewrite a label word in the free basis given by ``g.letters``."""
    out: list[str] = []
    for s in symbols:
        base = s[:-1] if s.endswith("'") else s
        if base in g.letters:
            w = GroupWord.parse(g.letters[base])
            out.extend(w if base == s else w.inverse())
        else:
            out.append(s)
    return GroupWord(out)


def _word_lengths(g: LabeledGraph, labels: set[str], radius: int) -> dict[GroupWord, int]:
    """Word length in the label generating set, for elements in the ball of ``radius``."""
    gens = [_to_basis(g, [s]) for s in sorted(labels)]
    dist = {GroupWord(): 0}
    frontier = [GroupWord()]
    for r in range(1, radius + 1):
        nxt = []
        for w in frontier:
            for s in gens:
                x = w * s
                if x not in dist:
                    dist[x] = r
                    nxt.append(x)
        frontier = nxt
    return dist


def validate_strong_markov(g: LabeledGraph, depth: int = 8, max_failures: int = 20) -> ValidationReport:
    """Bounded check of the strong Markov axioms.

    Checks deterministic labels, reachability from the start, symmetry of
    the label set, and exhaustively up to ``depth`` that paths from the
    start evaluate to pairwise distinct elements of word length equal to
    the path length.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    rep = ValidationReport(True, depth)

    def fail(msg: str) -> None:
        rep.passed = False
        if len(rep.failures) < max_failures:
            rep.failures.append(msg)

    if g.start is None:
        fail("no start vertex")
        return rep
    for v in g.vertices:
        seen: set[str] = set()
        for e in g.out_edges(v):
            if e.label in seen:
                fail(f"determinism: vertex {v!r} has two outgoing edges labeled {e.label!r}")
            seen.add(e.label)
    reach = {g.start}
    queue = deque([g.start])
    while queue:
        u = queue.popleft()
        for e in g.out_edges(u):
            if e.target not in reach:
                reach.add(e.target)
                queue.append(e.target)
    for v in g.vertices:
        if v not in reach:
            fail(f"reachability: vertex {v!r} is not reachable from the start")
    labels = g.labels
    for s in sorted(labels):
        if inverse_symbol(s) not in labels:
            fail(f"symmetry: label {s!r} appears without its inverse")
    if not rep.passed:
        return rep

    lengths = _word_lengths(g, labels, depth)
    seen_elements: dict[GroupWord, tuple[int, ...]] = {GroupWord(): ()}
    frontier: list[tuple[str, tuple[int, ...], list[str]]] = [(g.start, (), [])]
    for n in range(1, depth + 1):
        nxt = []
        for u, p, labs in frontier:
            for e in g.out_edges(u):
                q, qlabs = p + (e.id,), labs + [e.label]
                rep.checked_paths += 1
                elem = _to_basis(g, list(reversed(qlabs)))
                if elem in seen_elements:
                    fail(f"injectivity: paths {seen_elements[elem]} and {q} evaluate to {elem}")
                else:
                    seen_elements[elem] = q
                wl = lengths.get(elem)
                if wl != n:
                    fail(f"geodesicity: path {q} has length {n} but evaluates to an element of "
                         f"word length {wl if wl is not None else '>' + str(depth)}")
                nxt.append((e.target, q, qlabs))
        frontier = nxt
    # every element of the ball must be hit (surjectivity up to depth)
    missing = [w for w, r in lengths.items() if w not in seen_elements]
    if missing:
        fail(f"surjectivity: {len(missing)} elements of length <= {depth} are not coded, e.g. {missing[0]}")
    return rep
