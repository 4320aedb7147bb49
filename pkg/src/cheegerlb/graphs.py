"""Simple undirected graphs: construction, file formats, generators, Laplacians.

Vertices are 0-based in memory. The text formats (edge list, METIS
adjacency) use 1-based vertex ids; the conversion happens only in the
parsers and serializers.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np


class ParseError(ValueError):
    """A graph file could not be parsed."""


class HeaderError(ParseError):
    """Missing or malformed header line."""


class VertexRangeError(ParseError):
    """Vertex id outside [1, n]."""


class SelfLoopError(ParseError):
    """Edge with identical endpoints."""


class DuplicateEdgeError(ParseError):
    """The same undirected edge listed twice."""


class TooFewVerticesError(ParseError):
    """Graphs need at least 3 vertices."""


class EdgeCountError(ParseError):
    """Number of edges found disagrees with the header."""


class DisconnectedSampleError(RuntimeError):
    """A random-graph draw came out disconnected; retry with another seed."""


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on vertices 0..n-1.

    Edges are stored as a sorted tuple of pairs (i, j) with i < j.
    No self-loops, no parallel edges, n >= 3. Instances are immutable
    and safe to share across threads.
    """

    n: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        if self.n < 3:
            raise TooFewVerticesError(f"need n >= 3 vertices, got {self.n}")
        seen: set[tuple[int, int]] = set()
        canon = []
        for e in self.edges:
            i, j = e
            if i == j:
                raise SelfLoopError(f"self-loop at vertex {i}")
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise VertexRangeError(f"edge {e} outside vertex range [0, {self.n - 1}]")
            if i > j:
                i, j = j, i
            if (i, j) in seen:
                raise DuplicateEdgeError(f"duplicate edge {{{i}, {j}}}")
            seen.add((i, j))
            canon.append((i, j))
        object.__setattr__(self, "edges", tuple(sorted(canon)))

    @property
    def m(self) -> int:
        return len(self.edges)

    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.n, dtype=np.int64)
        for i, j in self.edges:
            deg[i] += 1
            deg[j] += 1
        return deg

    def neighbors(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for i, j in self.edges:
            adj[i].append(j)
            adj[j].append(i)
        return [sorted(a) for a in adj]

    def is_connected(self) -> bool:
        if self.n == 0:
            return True
        adj = self.neighbors()
        seen = [False] * self.n
        stack = [0]
        seen[0] = True
        count = 1
        while stack:
            v = stack.pop()
            for w in adj[v]:
                if not seen[w]:
                    seen[w] = True
                    count += 1
                    stack.append(w)
        return count == self.n


def laplacian(g: Graph) -> np.ndarray:
    """Laplacian L = D - A as a dense symmetric integer matrix.

    L[i][j] = -1 iff {i,j} is an edge, L[i][i] = deg(i), 0 otherwise.
    """
    L = np.zeros((g.n, g.n), dtype=np.int64)
    for i, j in g.edges:
        L[i, j] = -1
        L[j, i] = -1
        L[i, i] += 1
        L[j, j] += 1
    return L


def _noncomment_lines(text: str, skip_blank: bool) -> list[str]:
    out = []
    for raw in text.splitlines():
        line = raw.strip()
        if line.startswith("%") or line.startswith("#"):
            continue
        if not line and skip_blank:
            continue
        out.append(line)
    return out


def _parse_header(line: str, what: str) -> tuple[int, int]:
    parts = line.split()
    # METIS headers may carry a fmt token; only the all-zeros (unweighted)
    # variants are supported.
    if len(parts) == 3 and what == "metis":
        if set(parts[2]) != {"0"}:
            raise HeaderError(f"weighted METIS graphs are not supported (fmt={parts[2]!r})")
        parts = parts[:2]
    if len(parts) != 2:
        raise HeaderError(f"expected header 'n m', got {line!r}")
    try:
        n, m = int(parts[0]), int(parts[1])
    except ValueError as exc:
        raise HeaderError(f"non-integer header fields in {line!r}") from exc
    if n < 3:
        raise TooFewVerticesError(f"need n >= 3 vertices, got n={n}")
    if m < 0:
        raise HeaderError(f"negative edge count m={m}")
    return n, m


def _check_vertex(v: int, n: int, context: str) -> None:
    if not (1 <= v <= n):
        raise VertexRangeError(f"vertex {v} out of range [1, {n}] in {context}")


def parse_edge_list(text: str) -> Graph:
    """Parse the edge-list format: header "n m", then m lines "i j".

    Vertex ids are 1-based. Blank lines and lines starting with '%' or
    '#' are skipped; fields may be separated by any whitespace.
    """
    lines = _noncomment_lines(text, skip_blank=True)
    if not lines:
        raise HeaderError("empty input")
    n, m = _parse_header(lines[0], "edgelist")
    body = lines[1:]
    if len(body) != m:
        raise EdgeCountError(f"header announces {m} edges, found {len(body)} edge lines")
    edges = []
    for line in body:
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(f"expected edge line 'i j', got {line!r}")
        try:
            i, j = int(parts[0]), int(parts[1])
        except ValueError as exc:
            raise ParseError(f"non-integer vertex id in {line!r}") from exc
        _check_vertex(i, n, line)
        _check_vertex(j, n, line)
        if i == j:
            raise SelfLoopError(f"self-loop at vertex {i}")
        edges.append((i - 1, j - 1))
    return Graph(n, tuple(edges))


def parse_metis(text: str) -> Graph:
    """Parse METIS adjacency format.

    Line 1 is "n m" (optionally with an unweighted fmt code); line 1+i
    lists the neighbors of vertex i. Every edge must appear in both
    endpoint lines. Blank lines are significant (isolated vertices),
    '%' starts a comment.
    """
    lines = []
    for raw in text.splitlines():
        line = raw.strip()
        if line.startswith("%") or line.startswith("#"):
            continue
        lines.append(line)
    # trailing blank lines are padding, interior ones are empty adjacencies
    while lines and not lines[-1]:
        lines.pop()
    if not lines or not lines[0]:
        raise HeaderError("empty input")
    n, m = _parse_header(lines[0], "metis")
    body = lines[1:]
    if len(body) > n:
        raise ParseError(f"more than {n} adjacency lines")
    body += [""] * (n - len(body))
    neigh: list[set[int]] = [set() for _ in range(n)]
    for i, line in enumerate(body, start=1):
        for tok in line.split():
            try:
                j = int(tok)
            except ValueError as exc:
                raise ParseError(f"non-integer neighbor {tok!r} on line of vertex {i}") from exc
            _check_vertex(j, n, f"adjacency of vertex {i}")
            if j == i:
                raise SelfLoopError(f"self-loop at vertex {i}")
            if j in neigh[i - 1]:
                raise DuplicateEdgeError(f"neighbor {j} listed twice for vertex {i}")
            neigh[i - 1].add(j)
    edges = []
    for i in range(1, n + 1):
        for j in neigh[i - 1]:
            if i < j:
                if i not in neigh[j - 1]:
                    raise ParseError(f"edge {{{i}, {j}}} missing from the line of vertex {j}")
                edges.append((i - 1, j - 1))
            elif i not in neigh[j - 1]:
                raise ParseError(f"edge {{{j}, {i}}} missing from the line of vertex {j}")
    if len(edges) != m:
        raise EdgeCountError(f"header announces {m} edges, found {len(edges)}")
    return Graph(n, tuple(edges))


def parse_graph(data: str | bytes, fmt: str = "edgelist") -> Graph:
    """Parse graph file content in the named format ("edgelist" or "metis")."""
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    if fmt == "edgelist":
        return parse_edge_list(text)
    if fmt == "metis":
        return parse_metis(text)
    raise ValueError(f"unknown graph format {fmt!r}")


def serialize_edge_list(g: Graph) -> str:
    lines = [f"{g.n} {g.m}"]
    lines += [f"{i + 1} {j + 1}" for i, j in g.edges]
    return "\n".join(lines) + "\n"


def serialize_metis(g: Graph) -> str:
    adj = g.neighbors()
    lines = [f"{g.n} {g.m}"]
    lines += [" ".join(str(j + 1) for j in row) for row in adj]
    return "\n".join(lines) + "\n"


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise ValueError("cycle needs n >= 3")
    return Graph(n, tuple((i, (i + 1) % n) for i in range(n)))


def path_graph(n: int) -> Graph:
    if n < 3:
        raise ValueError("path needs n >= 3")
    return Graph(n, tuple((i, i + 1) for i in range(n - 1)))


def complete_graph(n: int) -> Graph:
    if n < 3:
        raise ValueError("complete graph needs n >= 3")
    return Graph(n, tuple((i, j) for i in range(n) for j in range(i + 1, n)))


def complete_bipartite_graph(a: int, b: int) -> Graph:
    if a < 1 or b < 1 or a + b < 3:
        raise ValueError("complete bipartite graph needs a, b >= 1 and a + b >= 3")
    return Graph(a + b, tuple((i, a + j) for i in range(a) for j in range(b)))


def gnp_graph(n: int, p: float, seed: int) -> Graph:
    """Erdos-Renyi G(n, p) sample, deterministic for a fixed seed.

    Raises DisconnectedSampleError when the draw is disconnected, so
    callers can distinguish that outcome from parameter errors.
    """
    if n < 3:
        raise ValueError("gnp needs n >= 3")
    if not (0.0 <= p <= 1.0):
        raise ValueError(f"edge probability must be in [0, 1], got {p}")
    rng = random.Random(seed)
    edges = tuple((i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p)
    g = Graph(n, edges)
    if not g.is_connected():
        raise DisconnectedSampleError(f"G({n}, {p}) sample with seed {seed} is disconnected")
    return g


def connected_gnp_graph(n: int, p: float, seed: int, max_tries: int = 64) -> Graph:
    """First connected G(n, p) sample at seeds seed, seed+1, ..."""
    for k in range(max_tries):
        try:
            return gnp_graph(n, p, seed + k)
        except DisconnectedSampleError:
            continue
    raise DisconnectedSampleError(
        f"no connected G({n}, {p}) sample in {max_tries} seeds starting at {seed}"
    )


def generate_family(family: str, params: Sequence[float] | Iterable[float]) -> Graph:
    """Dispatch generator by family name.

    Families and parameters: cycle(n), path(n), complete(n),
    complete-bipartite(a, b), gnp(n, p, seed).
    """
    args = list(params)
    if family == "cycle":
        return cycle_graph(int(args[0]))
    if family == "path":
        return path_graph(int(args[0]))
    if family == "complete":
        return complete_graph(int(args[0]))
    if family == "complete-bipartite":
        return complete_bipartite_graph(int(args[0]), int(args[1]))
    if family == "gnp":
        return gnp_graph(int(args[0]), float(args[1]), int(args[2]))
    raise ValueError(f"unknown graph family {family!r}")
