"""Built-in verification suites cross-checking the engine against itself.

Each suite returns :class:`Check` records; the CLI renders them and turns
failures into a nonzero exit status.  The graph suite rebuilds the whole
catalogue by brute force (labeled enumeration plus an explicit isomorphism
quotient over vertex permutations, and automorphism counting over raw
half-edge permutations), so the enumerator and the counting formula are
validated against an independent implementation path.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement, permutations, product

from .cohft import (
    DiagonalRMatrix,
    compact_type_closed_form,
    smooth_slope_class,
    symplectic_check,
    two_loop_report,
    verlinde_chern_character,
    verlinde_w_matrix,
)
from .errors import InvalidInputError
from .fusion import builtin_sl2, builtin_slr_level1, rank
from .graphs import (
    StableGraph,
    automorphism_order,
    canonical_stable_graph,
    enumerate_stable_graphs,
)
from .tautology import TautClass


@dataclass(frozen=True)
class Check:
    """One named verification with its expectation and observed outcome."""

    name: str
    passed: bool
    expected: str
    actual: str


def _class_diff(lhs: TautClass, rhs: TautClass) -> str:
    keys = set(lhs.terms) | set(rhs.terms)
    bad = sum(
        1
        for key in keys
        if lhs.terms.get(key, Fraction(0)) != rhs.terms.get(key, Fraction(0))
    )
    return f"{bad} of {len(keys)} terms differ"


# -- rank tables ---------------------------------------------------------------


def suite_ranks() -> list[Check]:
    checks = []
    datum = builtin_sl2(1)
    for g in range(5):
        bad = None
        cases = 0
        for n in range(5):
            for vec in product((0, 1), repeat=n):
                cases += 1
                want = 2**g if sum(vec) % 2 == 0 else 0
                got = rank(datum, g, vec)
                if got != want and bad is None:
                    bad = f"d_{g}{vec} = {got}, wanted {want}"
        checks.append(
            Check(
                name=f"sl2 level 1 rank table, genus {g}, n <= 4",
                passed=bad is None,
                expected="2^g for an even box count, else 0",
                actual=f"all {cases} label vectors match" if bad is None else bad,
            )
        )
    for r in (2, 3, 4):
        datum = builtin_slr_level1(r)
        for g in range(4):
            bad = None
            cases = 0
            for n in range(5):
                for vec in product(range(r), repeat=n):
                    cases += 1
                    want = r**g if sum(vec) % r == 0 else 0
                    got = rank(datum, g, vec)
                    if got != want and bad is None:
                        bad = f"d_{g}{vec} = {got}, wanted {want}"
            checks.append(
                Check(
                    name=f"sl{r} level 1 rank table, genus {g}, n <= 4",
                    passed=bad is None,
                    expected="r^g when the label sum vanishes mod r, else 0",
                    actual=f"all {cases} label vectors match" if bad is None else bad,
                )
            )
    return checks


# -- smooth-locus slope --------------------------------------------------------


def suite_slope() -> list[Check]:
    checks = []
    for level in (1, 2):
        datum = builtin_sl2(level)
        for g, n in ((1, 1), (2, 2), (0, 4)):
            vectors = [
                vec
                for vec in product(range(level + 1), repeat=n)
                if rank(datum, g, vec) > 0
            ]
            fails = []
            for vec in vectors:
                lhs = verlinde_chern_character(datum, g, n, vec, 3).restrict("smooth")
                rhs = smooth_slope_class(datum, g, n, vec, 3)
                if lhs != rhs:
                    fails.append(vec)
            checks.append(
                Check(
                    name=f"smooth slope, sl2 level {level}, (g,n)=({g},{n}), degree 3",
                    passed=not fails,
                    expected=(
                        "smooth restriction equals rank * exp(lambda and psi slope) "
                        f"for {len(vectors)} positive-rank label vectors"
                    ),
                    actual="all match" if not fails else f"mismatch at labels {fails[:3]}",
                )
            )
    return checks


# -- compact-type closed form --------------------------------------------------


def suite_closedform() -> list[Check]:
    checks = []
    for r in (2, 3):
        for g, n in ((1, 2), (2, 3)):
            datum = builtin_slr_level1(r)
            for vec in product(range(r), repeat=n):
                if sum(vec) % r:
                    continue
                lhs = verlinde_chern_character(datum, g, n, vec, 3).restrict(
                    "compact_type"
                )
                rhs = compact_type_closed_form(r, g, n, vec, 3)
                equal = lhs == rhs
                checks.append(
                    Check(
                        name=f"closed form r={r}, (g,n)=({g},{n}), labels={vec}",
                        passed=equal,
                        expected="graph sum on compact type equals the closed exponential",
                        actual="equal term-by-term" if equal else _class_diff(lhs, rhs),
                    )
                )
    datum = builtin_slr_level1(2)
    lhs = verlinde_chern_character(datum, 2, 0, (), 3).restrict("compact_type")
    rhs = compact_type_closed_form(2, 2, 0, (), 3)
    checks.append(
        Check(
            name="closed form r=2, (g,n)=(2,0) (no markings, no divisor terms)",
            passed=lhs == rhs,
            expected="pure exponential r^g exp(-lambda/2)",
            actual="equal term-by-term" if lhs == rhs else _class_diff(lhs, rhs),
        )
    )
    return checks


# -- 2-loop dichotomy ----------------------------------------------------------


def suite_twoloop() -> list[Check]:
    rows = two_loop_report(3, 2)
    evens = [row for row in rows if row.parity == "even"]
    odds = [row for row in rows if row.parity == "odd"]
    checks = [
        Check(
            name="2-loop census, (g,n)=(3,2)",
            passed=(len(evens), len(odds)) == (2, 3),
            expected="2 even and 3 odd classes",
            actual=f"{len(evens)} even and {len(odds)} odd",
        ),
        Check(
            name="odd 2-loop coefficients vanish",
            passed=all(row.raw == 0 for row in odds),
            expected="raw coefficient 0 on every odd class",
            actual=", ".join(str(row.raw) for row in odds),
        ),
        Check(
            name="even 2-loop raw coefficients",
            passed=all(row.raw == Fraction(1, 8) for row in evens),
            expected="1/8 on every even class (hand expansion)",
            actual=", ".join(str(row.raw) for row in evens),
        ),
        Check(
            name="even 2-loop normalized coefficients",
            passed=all(row.normalized == Fraction(1, 16) for row in evens),
            expected="1/16 = (-1/4)^2 after dividing |Aut| and rank factors out",
            actual=", ".join(str(row.normalized) for row in evens),
        ),
    ]
    return checks


# -- symplectic property -------------------------------------------------------


def suite_symplectic() -> list[Check]:
    checks = []
    data = [builtin_sl2(level) for level in (1, 2, 3)]
    data += [builtin_slr_level1(r) for r in (2, 3, 4, 5)]
    for datum in data:
        ok = symplectic_check(datum, verlinde_w_matrix(datum, 8), 8)
        checks.append(
            Check(
                name=f"weight exponential is symplectic, {datum.name}, degree 8",
                passed=ok,
                expected="R(z) R*(-z) = 1 for every label",
                actual="holds" if ok else "violated",
            )
        )
    datum = builtin_sl2(1)
    entries = {
        m: list(verlinde_w_matrix(datum, 8).entry(m)) for m in datum.labels
    }
    entries[1][3] += Fraction(1, 7)
    perturbed = DiagonalRMatrix({m: tuple(s) for m, s in entries.items()}, 8)
    caught = not symplectic_check(datum, perturbed, 8)
    checks.append(
        Check(
            name="perturbed matrix fails the symplectic test",
            passed=caught,
            expected="violation detected",
            actual="detected" if caught else "missed",
        )
    )
    return checks


# -- graph catalogue vs brute force --------------------------------------------


def _compositions(total: int, parts: int):
    if parts == 0:
        if total == 0:
            yield ()
        return
    for head in range(total + 1):
        for tail in _compositions(total - head, parts - 1):
            yield (head,) + tail


def _brute_connected(num_vertices: int, edges) -> bool:
    if num_vertices == 1:
        return True
    adjacency = defaultdict(set)
    for a, b in edges:
        adjacency[a].add(b)
        adjacency[b].add(a)
    seen = {0}
    stack = [0]
    while stack:
        for w in adjacency[stack.pop()]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == num_vertices


def _brute_stable(genera, legs, edges) -> bool:
    for v in range(len(genera)):
        valence = sum((a == v) + (b == v) for a, b in edges)
        valence += sum(1 for w in legs if w == v)
        if 2 * genera[v] - 2 + valence <= 0:
            return False
    return True


def _brute_isomorphic(x: StableGraph, y: StableGraph) -> bool:
    V = x.num_vertices
    if V != y.num_vertices or sorted(x.genera) != sorted(y.genera):
        return False
    target = Counter(y.edges)
    for sigma in permutations(range(V)):
        if any(y.genera[sigma[v]] != x.genera[v] for v in range(V)):
            continue
        if any(sigma[x.legs[i]] != y.legs[i] for i in range(x.num_markings)):
            continue
        mapped = Counter(
            tuple(sorted((sigma[a], sigma[b]))) for a, b in x.edges
        )
        if mapped == target:
            return True
    return False


def _brute_signature(graph: StableGraph):
    per_vertex = []
    for v in range(graph.num_vertices):
        halves = sum((a == v) + (b == v) for a, b in graph.edges)
        per_vertex.append((graph.genera[v], graph.markings_at(v), halves))
    return (tuple(sorted(per_vertex)), graph.num_edges)


def brute_force_stable_graphs(g: int, n: int, num_edges: int) -> tuple[StableGraph, ...]:
    """One representative per isomorphism class, by exhaustive enumeration.

    Every labeled stable graph of type (g, n) with exactly ``num_edges``
    edges is generated and the quotient is taken by testing all vertex
    permutations; nothing is shared with the production enumerator.
    """
    buckets: dict = defaultdict(list)
    for V in range(1, num_edges + 2):
        h1 = num_edges - V + 1
        if h1 < 0 or g - h1 < 0:
            continue
        pairs = [(a, b) for a in range(V) for b in range(a, V)]
        for combo in combinations_with_replacement(pairs, num_edges):
            if not _brute_connected(V, combo):
                continue
            for genera in _compositions(g - h1, V):
                for legs in product(range(V), repeat=n):
                    if not _brute_stable(genera, legs, combo):
                        continue
                    graph = StableGraph(genera, legs, combo)
                    bucket = buckets[_brute_signature(graph)]
                    if not any(_brute_isomorphic(graph, rep) for rep in bucket):
                        bucket.append(graph)
    return tuple(rep for bucket in buckets.values() for rep in bucket)


def brute_force_automorphism_order(graph: StableGraph) -> int:
    """|Aut| by testing every permutation of the half-edge set directly."""
    E = graph.num_edges
    if E == 0:
        return 1
    halves = [(e, s) for e in range(E) for s in (0, 1)]
    vertex_of = [graph.edges[e][s] for e, s in halves]
    V = graph.num_vertices
    count = 0
    for perm in permutations(range(2 * E)):
        ok = True
        for e in range(E):
            if halves[perm[2 * e]][0] != halves[perm[2 * e + 1]][0]:
                ok = False
                break
        if not ok:
            continue
        sigma: list[int | None] = [None] * V
        for pos, image_pos in enumerate(perm):
            v, w = vertex_of[pos], vertex_of[image_pos]
            if sigma[v] is None:
                sigma[v] = w
            elif sigma[v] != w:
                ok = False
                break
        if not ok or None in sigma or len(set(sigma)) != V:
            continue
        if any(graph.genera[sigma[v]] != graph.genera[v] for v in range(V)):
            continue
        if any(sigma[v] != v for v in graph.legs):
            continue
        count += 1
    return count


def suite_graphs() -> list[Check]:
    checks = []
    grid = [(g, n) for g in range(3) for n in range(4) if 2 * g - 2 + n > 0]
    for g, n in grid:
        catalogued = defaultdict(list)
        for graph in enumerate_stable_graphs(g, n, 3):
            catalogued[graph.num_edges].append(graph)
        problems = []
        for E in range(4):
            brute = brute_force_stable_graphs(g, n, E)
            listed = catalogued.get(E, [])
            if len(brute) != len(listed):
                problems.append(
                    f"{E} edges: {len(brute)} brute classes vs {len(listed)} catalogued"
                )
                continue
            seen = set()
            for rep in brute:
                canon = canonical_stable_graph(rep)
                if canon not in listed or canon in seen:
                    problems.append(f"{E} edges: class matching failed at {rep}")
                    break
                seen.add(canon)
                brute_aut = brute_force_automorphism_order(rep)
                if brute_aut != automorphism_order(canon):
                    problems.append(
                        f"{E} edges: |Aut| {automorphism_order(canon)} vs "
                        f"brute {brute_aut} at {rep}"
                    )
                    break
        checks.append(
            Check(
                name=f"graph catalogue and |Aut|, (g,n)=({g},{n}), up to 3 edges",
                passed=not problems,
                expected="brute-force classes and automorphism counts match",
                actual="match" if not problems else "; ".join(problems),
            )
        )
    for (g, n, k), want in (((0, 4, 1), 4), ((1, 1, 1), 2), ((2, 0, 1), 3)):
        got = len(enumerate_stable_graphs(g, n, k))
        checks.append(
            Check(
                name=f"catalogue size, (g,n)=({g},{n}), up to {k} edge(s)",
                passed=got == want,
                expected=str(want),
                actual=str(got),
            )
        )
    return checks


# -- suite registry ------------------------------------------------------------

SUITES = {
    "ranks": suite_ranks,
    "symplectic": suite_symplectic,
    "graphs": suite_graphs,
    "slope": suite_slope,
    "closedform": suite_closedform,
    "twoloop": suite_twoloop,
}

SUITE_ORDER = ("ranks", "symplectic", "graphs", "slope", "closedform", "twoloop")


def run_suite(name: str) -> list[Check]:
    """Run one named suite, or all of them in a deterministic order."""
    if name == "all":
        checks = []
        for key in SUITE_ORDER:
            checks.extend(SUITES[key]())
        return checks
    if name not in SUITES:
        raise InvalidInputError(
            f"unknown suite {name!r}; choose from all, {', '.join(SUITE_ORDER)}"
        )
    return SUITES[name]()
