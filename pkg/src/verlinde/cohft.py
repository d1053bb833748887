"""Diagonal R-matrix actions on rank TQFTs and the Verlinde character.

The central computation is a Givental-style graph sum: a diagonal R-matrix
acts on the topological field theory of fusion ranks, producing for every
stable graph and every edge labeling a decorated-graph contribution

    1/|Aut|  *  prod_v rank  *  prod_legs R(psi)  *  prod_edges edge factor,

where the edge factor is the bivariate series
(1 - R_mu(psi') R_mu*(psi'')) / (psi' + psi'').  Specializing R to the
diagonal weight exponential and multiplying by the global anomaly
exponential yields the total Chern character of the Verlinde bundle.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import partial
from math import factorial
from itertools import product
from typing import Hashable, Mapping, Sequence

from .errors import InvalidInputError
from .fusion import (
    FusionDatum,
    anomaly_prefactor_exponent,
    builtin_sl2,
    builtin_slr_level1,
    rank,
    rank_by_indices,
)
from .graphs import (
    DecoratedGraph,
    StableGraph,
    automorphism_order,
    canonical_form,
    decorate,
    enumerate_stable_graphs,
    trivial_graph,
    two_loop_graphs,
    validate_stable_graph,
)
from .tautology import (
    DivisorSymbol,
    TautClass,
    exp_of_divisor_combination,
    taut_class,
)

Label = Hashable


def edge_factor_series(w, degree: int) -> tuple[Fraction, ...]:
    """Coefficients c_k of (psi'+psi'')^k in (1 - exp(w(psi'+psi''))) / (psi'+psi'').

    Expanding the numerator gives c_k = -w^(k+1) / (k+1)! for k = 0..degree.
    """
    w = Fraction(w)
    return tuple(-(w ** (k + 1)) / factorial(k + 1) for k in range(degree + 1))


def _exp_series(c: Fraction, degree: int) -> tuple[Fraction, ...]:
    c = Fraction(c)
    return tuple(c**k / factorial(k) for k in range(degree + 1))


@dataclass(frozen=True)
class DiagonalRMatrix:
    """A diagonal R-matrix: one truncated power series per label.

    Entries are coefficient tuples of length ``degree + 1`` with constant
    term 1 (shorter input is zero-padded).
    """

    entries: Mapping[Label, tuple[Fraction, ...]]
    degree: int

    def __post_init__(self) -> None:
        if self.degree < 0:
            raise InvalidInputError("degree must be nonnegative")
        clean = {}
        for label, series in dict(self.entries).items():
            coeffs = tuple(Fraction(x) for x in series)[: self.degree + 1]
            coeffs = coeffs + (Fraction(0),) * (self.degree + 1 - len(coeffs))
            if coeffs[0] != 1:
                raise InvalidInputError("R-matrix entries need constant term 1")
            clean[label] = coeffs
        object.__setattr__(self, "entries", clean)

    def entry(self, label: Label) -> tuple[Fraction, ...]:
        try:
            return self.entries[label]
        except KeyError:
            raise InvalidInputError(f"no R-matrix entry for label {label!r}") from None


def identity_rmatrix(datum: FusionDatum, degree: int) -> DiagonalRMatrix:
    """The identity matrix: every entry is the constant series 1."""
    one = (Fraction(1),) + (Fraction(0),) * degree
    return DiagonalRMatrix({m: one for m in datum.labels}, degree)


def verlinde_w_matrix(datum: FusionDatum, degree: int) -> DiagonalRMatrix:
    """The weight exponential W: entry exp(z * weight(label)) per label."""
    return DiagonalRMatrix(
        {m: _exp_series(datum.weight(m), degree) for m in datum.labels}, degree
    )


def symplectic_check(datum: FusionDatum, matrix: DiagonalRMatrix, degree: int) -> bool:
    """True iff R_mu(z) * R_mu*(-z) = 1 through the given degree, all labels."""
    if matrix.degree < degree:
        raise InvalidInputError("R-matrix truncated below the requested degree")
    for m in datum.labels:
        a = matrix.entry(m)
        b = matrix.entry(datum.dual_label(m))
        for k in range(degree + 1):
            total = sum(a[i] * b[k - i] * (-1) ** (k - i) for i in range(k + 1))
            if total != (1 if k == 0 else 0):
                return False
    return True


def _bivariate_edge_factor(a: Sequence[Fraction], b: Sequence[Fraction], degree: int):
    """q[i][j] with (z + w) q(z, w) = 1 - a(z) b(w), through total degree-1.

    The numerator vanishes on z = -w for symplectic input, so the division
    is exact: with N_{i,j} = -a_i b_j the recurrence is
    q_{i,j} = N_{i+1,j} - q_{i+1,j-1}.
    """
    if degree == 0:
        return []
    q = [[Fraction(0)] * degree for _ in range(degree)]
    for j in range(degree):
        for i in range(degree - j):
            val = -(a[i + 1] * b[j])
            if j >= 1:
                val -= q[i + 1][j - 1]
            q[i][j] = val
    return q


def _graph_contributions(
    graph: StableGraph,
    datum: FusionDatum,
    matrix: DiagonalRMatrix,
    label_indices: tuple[int, ...],
    degree: int,
    edge_tables: dict,
    live_labels: tuple[int, ...],
) -> dict:
    n = graph.num_markings
    E = graph.num_edges
    V = graph.num_vertices
    budget = degree - E
    inv_aut = Fraction(1, automorphism_order(graph))
    dual = datum._dual_index
    leg_idx_at: list[list[int]] = [[] for _ in range(V)]
    for i, v in enumerate(graph.legs):
        leg_idx_at[v].append(label_indices[i])
    leg_series = [matrix.entry(datum.labels[idx]) for idx in label_indices]
    out: dict = {}
    canon_cache: dict = {}

    def record(coeff: Fraction, hpsi: tuple, lpsi: tuple) -> None:
        dec = canon_cache.get((hpsi, lpsi))
        if dec is None:
            dec = canonical_form(DecoratedGraph(graph, hpsi, lpsi))
            canon_cache[(hpsi, lpsi)] = dec
        key = (0, dec)
        out[key] = out.get(key, Fraction(0)) + coeff

    def distribute(coeff0: Fraction, tables: list) -> None:
        # spread the remaining psi budget over edge sides and legs
        def rec(slot: int, remaining: int, coeff: Fraction, hacc: tuple, lacc: tuple):
            if slot < E:
                table = tables[slot]
                for i in range(remaining + 1):
                    for j in range(remaining - i + 1):
                        q = table[i][j]
                        if q:
                            rec(slot + 1, remaining - i - j, coeff * q,
                                hacc + ((i, j),), lacc)
            elif slot < E + n:
                series = leg_series[slot - E]
                for k in range(remaining + 1):
                    if series[k]:
                        rec(slot + 1, remaining - k, coeff * series[k],
                            hacc, lacc + (k,))
            else:
                record(coeff, hacc, lacc)

        rec(0, budget, coeff0, (), ())

    for assign in product(live_labels, repeat=E):
        tables = []
        dead = False
        for idx in assign:
            table, is_zero = edge_tables[idx]
            if is_zero:
                dead = True
                break
            tables.append(table)
        if dead:
            continue
        local = [list(ls) for ls in leg_idx_at]
        for e, idx in enumerate(assign):
            a, b = graph.edges[e]
            local[a].append(idx)
            local[b].append(dual[idx])
        coeff0 = inv_aut
        for v in range(V):
            rv = rank_by_indices(datum, graph.genera[v], tuple(sorted(local[v])))
            if rv == 0:
                coeff0 = Fraction(0)
                break
            coeff0 *= rv
        if coeff0:
            distribute(coeff0, tables)
    return out


def rmatrix_action(
    datum: FusionDatum,
    matrix: DiagonalRMatrix,
    g: int,
    n: int,
    labels: Sequence[Label],
    degree: int,
    threads: int = 1,
) -> TautClass:
    """Graph sum of the diagonal R-matrix action on the rank TQFT.

    Sums over all stable graphs of (g, n) with at most ``degree`` edges and
    all edge labelings; each term contributes its vertex ranks, leg series
    R(psi) and bivariate edge factors, weighted by 1/|Aut| of the plain
    graph.  The result carries no lambda powers.
    """
    labels = tuple(labels)
    if len(labels) != n:
        raise InvalidInputError(f"expected {n} labels, got {len(labels)}")
    if degree < 0:
        raise InvalidInputError("degree must be nonnegative")
    if 2 * g - 2 + n <= 0:
        raise InvalidInputError(f"(g, n) = ({g}, {n}) is unstable")
    label_indices = tuple(datum.index(m) for m in labels)
    if matrix.degree < degree:
        raise InvalidInputError("R-matrix truncated below the requested degree")
    if not symplectic_check(datum, matrix, degree):
        raise InvalidInputError("R-matrix is not symplectic")
    edge_tables = {}
    live = []
    for idx, m in enumerate(datum.labels):
        table = _bivariate_edge_factor(
            matrix.entry(m), matrix.entry(datum.dual_label(m)), degree
        )
        is_zero = all(
            table[i][j] == 0
            for i in range(len(table))
            for j in range(len(table) - i)
        ) if table else True
        edge_tables[idx] = (table, is_zero)
        if not is_zero:
            live.append(idx)
    # edges labeled by a dead entry contribute nothing, but the trivial
    # graph has no edges, so enumeration must still include it
    worker = partial(
        _graph_contributions,
        datum=datum,
        matrix=matrix,
        label_indices=label_indices,
        degree=degree,
        edge_tables=edge_tables,
        live_labels=tuple(live),
    )
    graphs = enumerate_stable_graphs(g, n, degree)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            partials = list(pool.map(worker, graphs))
    else:
        partials = [worker(graph) for graph in graphs]
    merged: dict = {}
    for part in partials:
        for key, coeff in part.items():
            merged[key] = merged.get(key, Fraction(0)) + coeff
    return TautClass(g, n, degree, {k: v for k, v in merged.items() if v})


def verlinde_chern_character(
    datum: FusionDatum,
    g: int,
    n: int,
    labels: Sequence[Label],
    degree: int,
    zero_lambda_genus0: bool = False,
    threads: int = 1,
) -> TautClass:
    """Total Chern character of the Verlinde bundle through the given degree.

    Computed as the weight-exponential graph sum multiplied by the global
    prefactor exp(-anomaly/2 * lambda_1), with lambda_1 kept as a free
    symbol.  ``zero_lambda_genus0`` drops positive lambda powers when
    g = 0 (where the Hodge bundle has no fibers to contribute).
    """
    action = rmatrix_action(
        datum, verlinde_w_matrix(datum, degree), g, n, labels, degree, threads
    )
    a = anomaly_prefactor_exponent(datum)
    out: dict = {}
    for (lam0, dec), coeff in action.terms.items():
        top = degree - lam0 - dec.degree
        for p in range(top + 1):
            if p > 0 and (a == 0 or (zero_lambda_genus0 and g == 0)):
                break
            q = coeff * a**p / factorial(p)
            key = (lam0 + p, dec)
            out[key] = out.get(key, Fraction(0)) + q
    return TautClass(g, n, degree, {k: v for k, v in out.items() if v})


def smooth_slope_class(
    datum: FusionDatum, g: int, n: int, labels: Sequence[Label], degree: int
) -> TautClass:
    """rank * exp(-anomaly/2 * lambda + sum weight(mu_i) psi_i), trivial graph only."""
    labels = tuple(labels)
    base = exp_of_divisor_combination(
        g,
        n,
        anomaly_prefactor_exponent(datum),
        {i + 1: datum.weight(m) for i, m in enumerate(labels)},
        {},
        degree,
    )
    return base.scale(rank(datum, g, labels))


def slope_restriction_check(
    datum: FusionDatum, g: int, n: int, labels: Sequence[Label], degree: int = 3
) -> bool:
    """Check that the smooth restriction of the character equals the slope class.

    The left side runs the full graph sum and drops boundary terms; the
    right side is the closed exponential on the trivial graph.  Zero-rank
    inputs are rejected (the character vanishes; no slope to compare).
    """
    if rank(datum, g, labels) == 0:
        raise InvalidInputError("zero-rank input: nothing to compare")
    lhs = verlinde_chern_character(datum, g, n, labels, degree).restrict("smooth")
    rhs = smooth_slope_class(datum, g, n, labels, degree)
    return lhs == rhs


# -- sl_r level 1 specifics ---------------------------------------------------


def slr_tree_remainders(
    r: int, tree: StableGraph, labels: Sequence[int]
) -> dict[int, int]:
    """The unique mod-r remainder assignment on the half-edges of a tree.

    Conditions: the two halves of each edge sum to 0 mod r, and at every
    vertex the incident half-edge remainders plus leg labels sum to 0 mod r.
    Peeling terminal vertices determines the assignment uniquely.  Returns
    ``{edge index: remainder at side 0}``.
    """
    if r < 2:
        raise InvalidInputError("r must be at least 2")
    validate_stable_graph(tree)
    if tree.h1 != 0:
        raise InvalidInputError("remainder assignment needs a tree")
    labels = tuple(int(m) for m in labels)
    if len(labels) != tree.num_markings:
        raise InvalidInputError("one label per marking required")
    if any(m < 0 or m >= r for m in labels):
        raise InvalidInputError("labels must be remainders 0..r-1")
    if sum(labels) % r != 0:
        raise InvalidInputError("total label sum must vanish mod r")
    V = tree.num_vertices
    val = [0] * V
    for i, v in enumerate(tree.legs):
        val[v] += labels[i]
    deg = [0] * V
    for a, b in tree.edges:
        deg[a] += 1
        deg[b] += 1
    alive_edges = set(range(tree.num_edges))
    side0: dict[int, int] = {}
    queue = [v for v in range(V) if deg[v] == 1]
    while queue:
        v = queue.pop()
        edge = next(
            (e for e in alive_edges if v in tree.edges[e]), None
        )
        if edge is None:
            continue
        a, b = tree.edges[edge]
        s = 0 if a == v else 1
        here = (-val[v]) % r
        side0[edge] = here if s == 0 else (r - here) % r
        other = b if s == 0 else a
        val[other] = (val[other] + (r - here)) % r
        alive_edges.discard(edge)
        deg[v] -= 1
        deg[other] -= 1
        if deg[other] == 1:
            queue.append(other)
    return side0


def compact_type_closed_form(
    r: int, g: int, n: int, labels: Sequence[int], degree: int
) -> TautClass:
    """Closed exponential form of the sl_r level-1 character on compact type:

        r^g * exp(-(r-1)/2 lambda + sum w_i psi_i - sum_e w_e delta_e),

    where e runs over separating divisors and w_e is the weight of the
    remainder forced on e by the leg labels.  Divisors whose remainder is 0
    drop out (in particular every divisor with an unmarked side).
    """
    datum = builtin_slr_level1(r)
    labels = tuple(int(m) for m in labels)
    if len(labels) != n:
        raise InvalidInputError(f"expected {n} labels, got {len(labels)}")
    if any(m < 0 or m >= r for m in labels):
        raise InvalidInputError("labels must be remainders 0..r-1")
    if sum(labels) % r != 0:
        raise InvalidInputError("total label sum must vanish mod r")
    divisors: dict[DivisorSymbol, Fraction] = {}
    for graph in enumerate_stable_graphs(g, n, 1):
        if graph.num_edges != 1 or graph.edges[0][0] == graph.edges[0][1]:
            continue
        remainder = slr_tree_remainders(r, graph, labels)[0]
        w = datum.weight(remainder)
        if w:
            divisors[DivisorSymbol(graph)] = -w
    base = exp_of_divisor_combination(
        g,
        n,
        anomaly_prefactor_exponent(datum),
        {i + 1: datum.weight(m) for i, m in enumerate(labels)},
        divisors,
        degree,
    )
    return base.scale(Fraction(r) ** g).restrict("compact_type")


@dataclass(frozen=True)
class TwoLoopRow:
    """One 2-loop graph's degree-2 coefficient, raw and normalized."""

    graph: StableGraph
    parity: str
    raw: Fraction
    normalized: Fraction


def two_loop_report(g: int, n: int, degree: int = 2) -> tuple[TwoLoopRow, ...]:
    """Degree-2 2-loop coefficients of the all-box sl_2 level-1 character.

    ``raw`` is the stored coefficient of the undecorated 2-loop graph;
    ``normalized`` divides out the folded 1/|Aut| and the vertex rank
    factors 2^(g_v), isolating the product of the two edge factors.
    """
    if n % 2 != 0:
        raise InvalidInputError("an all-box labeling needs an even marking count")
    if g < 2:
        raise InvalidInputError("2-loop graphs need genus at least 2")
    if degree < 2:
        raise InvalidInputError("2-loop graphs appear first in degree 2")
    datum = builtin_sl2(1)
    character = verlinde_chern_character(datum, g, n, (1,) * n, degree)
    rows = []
    for graph, parity in two_loop_graphs(g, n):
        raw = character.coefficient_of(0, decorate(graph))
        normalized = (
            raw * automorphism_order(graph) / Fraction(2) ** sum(graph.genera)
        )
        rows.append(TwoLoopRow(graph, parity, raw, normalized))
    return tuple(rows)
