"""Random graphs, clique statistics and the clique degree ``deg_G``.

Graphs are stored as one Python-int bitset per vertex.  Randomness comes
from numpy's PCG64 bit generator seeded as ``PCG64(seed)`` (i.e. through
``SeedSequence(seed)``): ``sample_gnp_half`` draws ``ceil(C(n,2)/64)`` raw
64-bit words, unpacks them least-significant bit first, and assigns bit ``t``
to the unordered pair of colex rank ``t`` -- ``(0,1), (0,2), (1,2), (0,3), ...``
where pair ``{u < v}`` has rank ``u + v(v-1)/2``.
"""
from __future__ import annotations

import io
import os
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Iterator

import numpy as np

from .combinat import binomial, elements_of, mask_of

__all__ = [
    "Graph",
    "CliqueStats",
    "MAX_ENUMERATION_N",
    "sample_gnp_half",
    "plant_clique",
    "force_clique",
    "common_neighbors",
    "count_cliques",
    "count_cliques_in",
    "iter_cliques",
    "clique_array",
    "clique_degree",
    "clique_stats",
    "enumerate_all_graphs",
    "is_clique",
    "read_graph",
    "write_graph",
    "format_graph",
    "parse_graph",
]

#: ``enumerate_all_graphs`` refuses anything larger (2^15 graphs at n = 6).
MAX_ENUMERATION_N = 6


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph on vertices ``0..n-1``."""

    n: int
    adjacency: tuple[int, ...]
    _dense: np.ndarray | None = field(default=None, repr=False, compare=False, hash=False)

    def __post_init__(self):
        if len(self.adjacency) != self.n:
            raise ValueError("adjacency must have one bitset per vertex")
        for u, row in enumerate(self.adjacency):
            if row >> u & 1:
                raise ValueError(f"self-loop at vertex {u}")
            if row >> self.n:
                raise ValueError(f"vertex {u} has a neighbour outside 0..{self.n - 1}")
            for v in elements_of(row):
                if not self.adjacency[v] >> u & 1:
                    raise ValueError(f"adjacency not symmetric at ({u},{v})")

    # constructors -----------------------------------------------------
    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        rows = [0] * n
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u},{v}) out of range")
            rows[u] |= 1 << v
            rows[v] |= 1 << u
        return cls(n, tuple(rows))

    @classmethod
    def from_matrix(cls, adj: np.ndarray) -> "Graph":
        adj = np.asarray(adj, dtype=bool)
        n = adj.shape[0]
        if adj.shape != (n, n) or np.any(adj != adj.T) or np.any(np.diag(adj)):
            raise ValueError("adjacency matrix must be symmetric with zero diagonal")
        weights = [1 << v for v in range(n)]
        rows = tuple(sum(w for w, bit in zip(weights, adj[u]) if bit) for u in range(n))
        return cls(n, rows)

    @classmethod
    def complete(cls, n: int) -> "Graph":
        full = (1 << n) - 1
        return cls(n, tuple(full ^ (1 << u) for u in range(n)))

    @classmethod
    def empty(cls, n: int) -> "Graph":
        return cls(n, (0,) * n)

    @classmethod
    def cycle(cls, n: int) -> "Graph":
        return cls.from_edges(n, [(u, (u + 1) % n) for u in range(n)])

    @classmethod
    def petersen(cls) -> "Graph":
        outer = [(i, (i + 1) % 5) for i in range(5)]
        spokes = [(i, i + 5) for i in range(5)]
        inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
        return cls.from_edges(10, outer + spokes + inner)

    # queries ----------------------------------------------------------
    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.adjacency[u] >> v & 1)

    def degree(self, u: int) -> int:
        return self.adjacency[u].bit_count()

    def edges(self) -> list[tuple[int, int]]:
        """Edges ``(u, v)`` with ``u < v``, sorted lexicographically."""
        return [(u, v) for u in range(self.n) for v in elements_of(self.adjacency[u]) if v > u]

    @property
    def num_edges(self) -> int:
        return sum(row.bit_count() for row in self.adjacency) // 2

    def matrix(self) -> np.ndarray:
        """Dense boolean adjacency matrix (cached; do not mutate)."""
        if self._dense is None:
            adj = np.zeros((self.n, self.n), dtype=bool)
            for u, v in self.edges():
                adj[u, v] = adj[v, u] = True
            adj.setflags(write=False)
            object.__setattr__(self, "_dense", adj)
        return self._dense

    def with_clique(self, vertices: Iterable[int]) -> "Graph":
        verts = sorted(set(vertices))
        mask = mask_of(verts)
        rows = list(self.adjacency)
        for v in verts:
            rows[v] |= mask ^ (1 << v)
        return Graph(self.n, tuple(rows))


@dataclass(frozen=True)
class CliqueStats:
    a: int
    count: int
    expected: Fraction


def _pair_rank(u: int, v: int) -> int:
    return u + v * (v - 1) // 2


def sample_gnp_half(n: int, seed: int) -> Graph:
    """G(n, 1/2): one PCG64 bit per unordered pair, pairs in colex order."""
    if n < 1:
        raise ValueError("n must be >= 1")
    m = binomial(n, 2)
    if m == 0:
        return Graph.empty(n)
    bitgen = np.random.PCG64(seed)
    words = bitgen.random_raw((m + 63) // 64).astype("<u8")
    bits = np.unpackbits(words.view(np.uint8), bitorder="little")[:m].astype(bool)
    adj = np.zeros((n, n), dtype=bool)
    iu = _colex_pairs(n)
    adj[iu[0][bits], iu[1][bits]] = True
    adj |= adj.T
    return Graph.from_matrix(adj)


def _colex_pairs(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Pairs ``(u, v)``, ``u < v``, ordered by colex rank."""
    vs = np.repeat(np.arange(n), np.arange(n))
    us = np.concatenate([np.arange(v) for v in range(n)]) if n > 1 else np.zeros(0, dtype=int)
    return us.astype(np.int64), vs.astype(np.int64)


def plant_clique(graph: Graph, k: int, seed: int) -> Graph:
    """Complete a uniformly random k-subset, drawn by ``Generator(PCG64(seed)).choice``."""
    if not 1 <= k <= graph.n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={graph.n}")
    rng = np.random.Generator(np.random.PCG64(seed))
    chosen = rng.choice(graph.n, size=k, replace=False)
    return graph.with_clique(int(v) for v in chosen)


def force_clique(graph: Graph, vertices: Iterable[int]) -> Graph:
    """Set every edge inside ``vertices`` present (conditioning on a clique)."""
    return graph.with_clique(vertices)


def is_clique(graph: Graph, vertices: Iterable[int]) -> bool:
    verts = list(vertices)
    mask = mask_of(verts)
    return all((graph.adjacency[v] | (1 << v)) & mask == mask for v in verts)


def _common_mask(graph: Graph, vertices: Iterable[int]) -> int:
    verts = list(vertices)
    mask = (1 << graph.n) - 1
    for v in verts:
        mask &= graph.adjacency[v]
    return mask & ~mask_of(verts)


def common_neighbors(graph: Graph, vertices: Iterable[int]) -> frozenset[int]:
    """``A_I``: vertices outside ``I`` adjacent to every vertex of ``I``."""
    return frozenset(elements_of(_common_mask(graph, vertices)))


def _count_in_mask(adj: tuple[int, ...], cand: int, size: int) -> int:
    if size == 0:
        return 1
    if size == 1:
        return cand.bit_count()
    total = 0
    while cand:
        if cand.bit_count() < size:
            break
        low = cand & -cand
        v = low.bit_length() - 1
        cand ^= low
        total += _count_in_mask(adj, cand & adj[v], size - 1)
    return total


def count_cliques_in(graph: Graph, vertices: Iterable[int] | int, size: int) -> int:
    """Number of ``size``-cliques inside the induced subgraph on ``vertices``.

    ``vertices`` may be a bitmask.
    """
    cand = vertices if isinstance(vertices, int) else mask_of(vertices)
    if size < 0:
        return 0
    return _count_in_mask(graph.adjacency, cand, size)


def count_cliques(graph: Graph, a: int) -> int:
    """``N_a(G)``; ``N_0 = 1`` and ``N_1 = n``."""
    if not 0 <= a <= graph.n:
        raise ValueError(f"need 0 <= a <= n, got a={a}")
    return _count_in_mask(graph.adjacency, (1 << graph.n) - 1, a)


def iter_cliques(graph: Graph, a: int) -> Iterator[tuple[int, ...]]:
    """All a-cliques as sorted tuples (lexicographic order)."""
    adj = graph.adjacency

    def walk(prefix: tuple[int, ...], cand: int, need: int):
        if need == 0:
            yield prefix
            return
        while cand and cand.bit_count() >= need:
            low = cand & -cand
            v = low.bit_length() - 1
            cand ^= low
            yield from walk(prefix + (v,), cand & adj[v], need - 1)

    yield from walk((), (1 << graph.n) - 1, a)


def clique_array(graph: Graph, a: int) -> np.ndarray:
    """All a-cliques as an ``(N_a, a)`` int array of sorted rows, lexicographic order."""
    if a < 0:
        raise ValueError("a must be >= 0")
    n = graph.n
    if a == 0:
        return np.zeros((1, 0), dtype=np.int64)
    adj = graph.matrix()
    cliques = np.arange(n, dtype=np.int64).reshape(-1, 1)
    later = np.arange(n)
    for _ in range(a - 1):
        if len(cliques) == 0:
            break
        ok = later[None, :] > cliques[:, -1:]
        for c in range(cliques.shape[1]):
            ok &= adj[cliques[:, c]]
        rows, ext = np.nonzero(ok)
        cliques = np.column_stack([cliques[rows], ext]).astype(np.int64)
    return cliques.reshape(-1, a)


def clique_degree(graph: Graph, vertices: Iterable[int], r: int) -> int:
    """``deg_G(I)``: number of 2r-vertex cliques containing ``I``.

    Zero unless ``I`` is a clique; otherwise the number of ``(2r - |I|)``-cliques
    in the common neighbourhood of ``I``.
    """
    verts = sorted(set(vertices))
    if len(verts) > 2 * r:
        raise ValueError(f"|I| = {len(verts)} exceeds 2r = {2 * r}")
    if not is_clique(graph, verts):
        return 0
    return _count_in_mask(graph.adjacency, _common_mask(graph, verts), 2 * r - len(verts))


def clique_stats(graph: Graph, a: int) -> CliqueStats:
    expected = Fraction(binomial(graph.n, a), 2 ** binomial(a, 2))
    return CliqueStats(a=a, count=count_cliques(graph, a), expected=expected)


def enumerate_all_graphs(n: int) -> Iterator[Graph]:
    """Every labelled graph on n vertices, in edge-bitmask order.

    Bit ``t`` of the mask is the pair of colex rank ``t``.
    """
    if n > MAX_ENUMERATION_N:
        raise OverflowError(f"refusing to enumerate 2^{binomial(n, 2)} graphs (n > {MAX_ENUMERATION_N})")
    if n < 0:
        raise ValueError("n must be >= 0")
    pairs = [(u, v) for v in range(n) for u in range(v)]
    for mask in range(1 << len(pairs)):
        rows = [0] * n
        for t, (u, v) in enumerate(pairs):
            if mask >> t & 1:
                rows[u] |= 1 << v
                rows[v] |= 1 << u
        yield Graph(n, tuple(rows))


# text format ------------------------------------------------------------

def format_graph(graph: Graph) -> str:
    """``"n m"`` then m sorted lines ``"u v"`` with ``u < v``; trailing newline."""
    edges = graph.edges()
    lines = [f"{graph.n} {len(edges)}"] + [f"{u} {v}" for u, v in edges]
    return "\n".join(lines) + "\n"


def parse_graph(text: str) -> Graph:
    lines = text.splitlines()
    if not lines:
        raise ValueError("empty graph file")
    try:
        n, m = (int(tok) for tok in lines[0].split())
    except ValueError as exc:
        raise ValueError(f"bad header line {lines[0]!r}") from exc
    body = [ln for ln in lines[1:] if ln.strip()]
    if len(body) != m:
        raise ValueError(f"header announces {m} edges, found {len(body)}")
    edges = []
    for ln in body:
        u, v = (int(tok) for tok in ln.split())
        if not u < v:
            raise ValueError(f"edge line {ln!r} must have u < v")
        edges.append((u, v))
    if edges != sorted(set(edges)):
        raise ValueError("edge lines must be sorted and distinct")
    return Graph.from_edges(n, edges)


def write_graph(graph: Graph, path: str | os.PathLike | io.TextIOBase) -> None:
    text = format_graph(graph)
    if hasattr(path, "write"):
        path.write(text)
        return
    with open(path, "w", newline="\n") as fh:
        fh.write(text)


def read_graph(path: str | os.PathLike) -> Graph:
    with open(path) as fh:
        return parse_graph(fh.read())
