"""Stable graphs: canonical forms, enumeration, automorphisms, boundary loci.

A stable graph is the dual graph of a nodal curve: vertices carry genera,
numbered legs mark points, and edges are unordered pairs of half-edges
(self-loops allowed).  Markings are never permuted by isomorphisms, so legs
are fixed pointwise throughout.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations, product
from math import factorial, prod

from .errors import InvalidInputError

SMOOTH = "smooth"
RATIONAL_TAILS = "rational_tails"
COMPACT_TYPE = "compact_type"
GENERAL = "general"

LOCI = (SMOOTH, RATIONAL_TAILS, COMPACT_TYPE, GENERAL)


@dataclass(frozen=True)
class StableGraph:
    """Dual graph of a stable curve.

    ``genera[v]`` is the genus of vertex ``v``; ``legs[i]`` is the vertex
    carrying marking ``i+1``; each edge is stored with the smaller vertex
    index first (equal indices make a self-loop).  A half-edge is addressed
    as ``(edge index, side)`` with side 0 at ``edges[e][0]``.
    """

    genera: tuple[int, ...]
    legs: tuple[int, ...]
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "genera", tuple(int(x) for x in self.genera))
        object.__setattr__(self, "legs", tuple(int(v) for v in self.legs))
        norm = tuple(
            (int(a), int(b)) if a <= b else (int(b), int(a)) for a, b in self.edges
        )
        object.__setattr__(self, "edges", norm)

    @property
    def num_vertices(self) -> int:
        return len(self.genera)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @property
    def num_markings(self) -> int:
        return len(self.legs)

    @property
    def h1(self) -> int:
        """First Betti number of the graph."""
        return self.num_edges - self.num_vertices + 1

    @property
    def genus(self) -> int:
        """Arithmetic genus: sum of vertex genera plus h1."""
        return sum(self.genera) + self.h1

    def valence(self, v: int) -> int:
        """Number of half-edges and legs at vertex v."""
        halves = sum((a == v) + (b == v) for a, b in self.edges)
        return halves + sum(1 for w in self.legs if w == v)

    def markings_at(self, v: int) -> tuple[int, ...]:
        return tuple(i + 1 for i, w in enumerate(self.legs) if w == v)


def trivial_graph(g: int, n: int) -> StableGraph:
    """The edgeless graph of type (g, n): one genus-g vertex with all legs."""
    return StableGraph((g,), (0,) * n, ())


def validate_stable_graph(
    graph: StableGraph, g: int | None = None, n: int | None = None
) -> None:
    """Check connectivity, vertex stability and (optionally) the ambient type."""
    V = graph.num_vertices
    if V == 0:
        raise InvalidInputError("graph needs at least one vertex")
    if any(gv < 0 for gv in graph.genera):
        raise InvalidInputError("vertex genera must be nonnegative")
    if any(v not in range(V) for v in graph.legs):
        raise InvalidInputError("leg attached to a missing vertex")
    if any(a not in range(V) or b not in range(V) for a, b in graph.edges):
        raise InvalidInputError("edge attached to a missing vertex")
    adjacency = defaultdict(set)
    for a, b in graph.edges:
        adjacency[a].add(b)
        adjacency[b].add(a)
    seen = {0}
    stack = [0]
    while stack:
        for w in adjacency[stack.pop()]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    if len(seen) != V:
        raise InvalidInputError("graph must be connected")
    for v in range(V):
        if 2 * graph.genera[v] - 2 + graph.valence(v) <= 0:
            raise InvalidInputError(f"vertex {v} is unstable")
    if n is not None and graph.num_markings != n:
        raise InvalidInputError(f"expected {n} markings, found {graph.num_markings}")
    if g is not None and graph.genus != g:
        raise InvalidInputError(f"expected genus {g}, found {graph.genus}")


@dataclass(frozen=True)
class DecoratedGraph:
    """A stable graph with psi exponents on half-edges and legs.

    ``hpsi[e] = (k0, k1)`` gives the exponents at the two sides of edge e,
    aligned with the stored edge orientation; ``lpsi[i]`` is the exponent
    at marking ``i+1``.  The cohomological degree counts one per edge plus
    all psi exponents.
    """

    graph: StableGraph
    hpsi: tuple[tuple[int, int], ...]
    lpsi: tuple[int, ...]

    def __post_init__(self) -> None:
        hpsi = tuple((int(a), int(b)) for a, b in self.hpsi)
        lpsi = tuple(int(k) for k in self.lpsi)
        object.__setattr__(self, "hpsi", hpsi)
        object.__setattr__(self, "lpsi", lpsi)
        if len(hpsi) != self.graph.num_edges:
            raise InvalidInputError("hpsi must align with the edge list")
        if len(lpsi) != self.graph.num_markings:
            raise InvalidInputError("lpsi must align with the markings")
        if any(a < 0 or b < 0 for a, b in hpsi) or any(k < 0 for k in lpsi):
            raise InvalidInputError("psi exponents must be nonnegative")

    @property
    def degree(self) -> int:
        return (
            self.graph.num_edges
            + sum(a + b for a, b in self.hpsi)
            + sum(self.lpsi)
        )


def decorate(
    graph: StableGraph,
    hpsi: tuple[tuple[int, int], ...] | None = None,
    lpsi: tuple[int, ...] | None = None,
) -> DecoratedGraph:
    """Attach psi decorations to a graph; defaults are all-zero exponents."""
    if hpsi is None:
        hpsi = ((0, 0),) * graph.num_edges
    if lpsi is None:
        lpsi = (0,) * graph.num_markings
    return DecoratedGraph(graph, tuple(hpsi), tuple(lpsi))


# -- canonical form ---------------------------------------------------------


def _genus_sorted_orders(genera: tuple[int, ...]):
    # Only orderings whose relabeled genus sequence is ascending can be
    # minimal, so candidates are permutations within equal-genus classes.
    by_genus: dict[int, list[int]] = defaultdict(list)
    for v, gv in enumerate(genera):
        by_genus[gv].append(v)
    classes = [by_genus[gv] for gv in sorted(by_genus)]
    for choice in product(*(permutations(c) for c in classes)):
        order = [0] * len(genera)
        pos = 0
        for cls in choice:
            for v in cls:
                order[v] = pos
                pos += 1
        yield tuple(order)


def _encode(dec: DecoratedGraph, order: tuple[int, ...]):
    graph = dec.graph
    genera_new = [0] * graph.num_vertices
    for v, gv in enumerate(graph.genera):
        genera_new[order[v]] = gv
    legs_new = tuple(order[v] for v in graph.legs)
    records = []
    for (a, b), (ka, kb) in zip(graph.edges, dec.hpsi):
        ea, eb = (order[a], ka), (order[b], kb)
        records.append((ea, eb) if ea <= eb else (eb, ea))
    records.sort()
    return (tuple(genera_new), legs_new, dec.lpsi, tuple(records))


def _decode(encoding) -> DecoratedGraph:
    genera, legs, lpsi, records = encoding
    edges = tuple((ea[0], eb[0]) for ea, eb in records)
    hpsi = tuple((ea[1], eb[1]) for ea, eb in records)
    return DecoratedGraph(StableGraph(genera, legs, edges), hpsi, lpsi)


@lru_cache(maxsize=None)
def canonical_encoding(dec: DecoratedGraph):
    """Minimal encoding of the isomorphism class (legs fixed pointwise)."""
    return min(_encode(dec, order) for order in _genus_sorted_orders(dec.graph.genera))


@lru_cache(maxsize=None)
def canonical_form(dec: DecoratedGraph) -> DecoratedGraph:
    """Canonical representative of the isomorphism class of a decorated graph.

    Two decorated graphs related by a vertex/half-edge relabeling that fixes
    every marking have the same canonical form; idempotent by construction.
    """
    return _decode(canonical_encoding(dec))


def canonical_stable_graph(graph: StableGraph) -> StableGraph:
    """Canonical representative of an undecorated stable graph."""
    return canonical_form(decorate(graph)).graph


def graph_sort_key(graph: StableGraph):
    """Deterministic total order: edge count, then canonical encoding."""
    return (graph.num_edges, canonical_encoding(decorate(graph)))


# -- automorphisms -----------------------------------------------------------


def _leg_fixing_genus_perms(graph: StableGraph):
    fixed = set(graph.legs)
    movable: dict[int, list[int]] = defaultdict(list)
    base = list(range(graph.num_vertices))
    for v in range(graph.num_vertices):
        if v not in fixed:
            movable[graph.genera[v]].append(v)
    groups = list(movable.values())
    for choice in product(*(permutations(grp) for grp in groups)):
        sigma = base[:]
        for grp, image in zip(groups, choice):
            for v, w in zip(grp, image):
                sigma[v] = w
        yield tuple(sigma)


@lru_cache(maxsize=None)
def automorphism_order(graph: StableGraph) -> int:
    """Order of the automorphism group, with legs fixed pointwise.

    Automorphisms are pairs (vertex permutation, half-edge bijection)
    preserving genera, leg attachment and the edge pairing.  For a fixed
    vertex permutation the half-edge choices factor: parallel edges between
    a vertex pair may permute (m! ways) and each self-loop may also swap
    its two half-edges (l! * 2^l ways for l loops at one vertex).
    """
    pair_mult = Counter(e for e in graph.edges if e[0] != e[1])
    loop_mult = Counter(a for a, b in graph.edges if a == b)
    count = 0
    for sigma in _leg_fixing_genus_perms(graph):
        ok = all(
            pair_mult[tuple(sorted((sigma[a], sigma[b])))] == m
            for (a, b), m in pair_mult.items()
        )
        if ok and all(loop_mult[sigma[a]] == m for a, m in loop_mult.items()):
            count += 1
    edge_factor = prod(factorial(m) for m in pair_mult.values())
    loop_factor = prod(factorial(m) * 2**m for m in loop_mult.values())
    return count * edge_factor * loop_factor


# -- enumeration -------------------------------------------------------------


def _one_edge_degenerations(graph: StableGraph):
    # Every stable graph with k+1 edges contracts to one with k edges, so
    # iterating these two moves from the trivial graph reaches everything.
    V = graph.num_vertices
    for v in range(V):
        gv = graph.genera[v]
        if gv >= 1:
            genera = list(graph.genera)
            genera[v] -= 1
            yield StableGraph(tuple(genera), graph.legs, graph.edges + ((v, v),))
        legs_here = [i for i, w in enumerate(graph.legs) if w == v]
        halves_here = [
            (e, s)
            for e, ends in enumerate(graph.edges)
            for s in (0, 1)
            if ends[s] == v
        ]
        items = len(legs_here) + len(halves_here)
        for g1 in range(gv + 1):
            g2 = gv - g1
            for mask in range(1 << items):
                moved = bin(mask).count("1")
                # stability of both halves of the split (one new half-edge each)
                if 2 * g1 - 2 + (items - moved) + 1 <= 0:
                    continue
                if 2 * g2 - 2 + moved + 1 <= 0:
                    continue
                legs_list = list(graph.legs)
                ends_list = [list(ends) for ends in graph.edges]
                for pos, i in enumerate(legs_here):
                    if mask >> pos & 1:
                        legs_list[i] = V
                for off, (e, s) in enumerate(halves_here):
                    if mask >> (len(legs_here) + off) & 1:
                        ends_list[e][s] = V
                genera = list(graph.genera)
                genera[v] = g1
                genera.append(g2)
                edges = tuple(tuple(ends) for ends in ends_list) + ((v, V),)
                yield StableGraph(tuple(genera), tuple(legs_list), edges)


@lru_cache(maxsize=None)
def enumerate_stable_graphs(g: int, n: int, max_edges: int) -> tuple[StableGraph, ...]:
    """All stable graphs of type (g, n) with at most ``max_edges`` edges.

    One canonical representative per isomorphism class, in a deterministic
    order.  Built by repeated one-edge degeneration (vertex splitting and
    self-loop insertion) starting from the trivial graph.
    """
    if g < 0 or n < 0 or 2 * g - 2 + n <= 0:
        raise InvalidInputError(f"(g, n) = ({g}, {n}) is unstable")
    start = trivial_graph(g, n)
    found = {start}
    frontier = [start]
    for _ in range(max_edges):
        fresh = []
        for graph in frontier:
            for degen in _one_edge_degenerations(graph):
                rep = canonical_stable_graph(degen)
                if rep not in found:
                    found.add(rep)
                    fresh.append(rep)
        frontier = fresh
    return tuple(sorted(found, key=graph_sort_key))


# -- boundary loci and special families --------------------------------------


def classify_locus(graph: StableGraph, g: int | None = None) -> str:
    """Most restrictive open locus whose boundary stratum the graph indexes.

    Edgeless graphs are ``smooth``; trees with a genus-g vertex are
    ``rational_tails``; other trees are ``compact_type``; anything with a
    cycle is ``general``.
    """
    if g is None:
        g = graph.genus
    if graph.num_edges == 0:
        return SMOOTH
    if graph.h1 == 0:
        return RATIONAL_TAILS if g in graph.genera else COMPACT_TYPE
    return GENERAL


def edge_split(graph: StableGraph, e: int):
    """Content split induced by a separating edge, or None if non-separating.

    Returns a sorted pair ``((genus, markings), (genus, markings))`` where
    each side lists its total genus and sorted marking tuple.
    """
    a, b = graph.edges[e]
    if a == b:
        return None
    adjacency = defaultdict(set)
    for j, (x, y) in enumerate(graph.edges):
        if j != e:
            adjacency[x].add(y)
            adjacency[y].add(x)
    seen = {a}
    stack = [a]
    while stack:
        for w in adjacency[stack.pop()]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    if b in seen:
        return None
    side_a = (
        sum(graph.genera[v] for v in seen),
        tuple(i + 1 for i, v in enumerate(graph.legs) if v in seen),
    )
    side_b = (
        sum(graph.genera[v] for v in range(graph.num_vertices) if v not in seen),
        tuple(i + 1 for i, v in enumerate(graph.legs) if v not in seen),
    )
    return tuple(sorted((side_a, side_b)))


def two_loop_graphs(g: int, n: int) -> tuple[tuple[StableGraph, str], ...]:
    """All 2-loops of type (g, n): two vertices joined by exactly two edges.

    Each comes tagged ``"even"`` or ``"odd"`` by whether both vertices carry
    an even number of legs.  Returns an empty tuple when none are stable.
    """
    out: dict[StableGraph, str] = {}
    for g1 in range(g):
        g2 = g - 1 - g1
        for bits in range(1 << n):
            legs = tuple((bits >> i) & 1 for i in range(n))
            n1 = legs.count(0)
            n2 = n - n1
            if 2 * g1 - 2 + 2 + n1 <= 0 or 2 * g2 - 2 + 2 + n2 <= 0:
                continue
            rep = canonical_stable_graph(
                StableGraph((g1, g2), legs, ((0, 1), (0, 1)))
            )
            tag = "even" if n1 % 2 == 0 and n2 % 2 == 0 else "odd"
            out[rep] = tag
    return tuple(sorted(out.items(), key=lambda kv: graph_sort_key(kv[0])))


# -- JSON interchange --------------------------------------------------------


def graph_to_json(graph: StableGraph) -> dict:
    """Encode a graph as ``{"vertices": [{"genus", "legs"}], "edges": [[a,b]]}``."""
    return {
        "vertices": [
            {"genus": graph.genera[v], "legs": list(graph.markings_at(v))}
            for v in range(graph.num_vertices)
        ],
        "edges": [list(e) for e in graph.edges],
    }


def graph_from_json(data: dict) -> StableGraph:
    """Decode the JSON graph encoding; inverse of :func:`graph_to_json`."""
    try:
        vertices = data["vertices"]
        genera = tuple(int(v["genus"]) for v in vertices)
        marks: dict[int, int] = {}
        for i, v in enumerate(vertices):
            for m in v.get("legs", ()):
                if int(m) in marks:
                    raise InvalidInputError(f"marking {m} attached twice")
                marks[int(m)] = i
        n = len(marks)
        if n and sorted(marks) != list(range(1, n + 1)):
            raise InvalidInputError("markings must be 1..n")
        legs = tuple(marks[i + 1] for i in range(n))
        edges = tuple((int(a), int(b)) for a, b in data["edges"])
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInputError(f"bad graph encoding: {exc}") from exc
    return StableGraph(genera, legs, edges)
