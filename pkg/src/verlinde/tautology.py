"""Formal graded classes spanned by decorated stable graphs.

A :class:`TautClass` is a finite rational linear combination of pairs
(lambda power, decorated stable graph) on a fixed ambient type (g, n),
truncated above a fixed total degree.  lambda_1 is kept as a free commuting
symbol.  The divisor calculus implemented here is deliberately limited: a
power of a separating boundary divisor resolves to its edge decorated with
(-psi' - psi'')^(power-1), and a product of distinct pairwise-compatible
separating divisors resolves to the unique tree carrying those edges.
Products whose excess-intersection corrections would not vanish are
rejected rather than computed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import comb, factorial
from typing import Iterable, Mapping

from .errors import InvalidInputError, UnsupportedProductError
from .graphs import (
    COMPACT_TYPE,
    RATIONAL_TAILS,
    SMOOTH,
    DecoratedGraph,
    StableGraph,
    canonical_encoding,
    canonical_form,
    canonical_stable_graph,
    classify_locus,
    decorate,
    edge_split,
    enumerate_stable_graphs,
    graph_from_json,
    graph_sort_key,
    graph_to_json,
    trivial_graph,
    validate_stable_graph,
)
from .fusion import format_fraction, parse_fraction


@dataclass(frozen=True)
class DivisorSymbol:
    """A separating boundary divisor, named by its one-edge stable tree."""

    graph: StableGraph

    def __post_init__(self) -> None:
        if self.graph.num_edges != 1:
            raise InvalidInputError("divisor symbol needs exactly one edge")
        a, b = self.graph.edges[0]
        if a == b:
            raise InvalidInputError("non-separating divisor symbol rejected")
        rep = canonical_stable_graph(self.graph)
        validate_stable_graph(rep)
        object.__setattr__(self, "graph", rep)

    @property
    def split(self):
        """Sorted pair of (genus, markings) contents of the two sides."""
        return edge_split(self.graph, 0)

    def sort_key(self):
        return graph_sort_key(self.graph)


def divisor_from_split(
    g: int, n: int, side_genus: int, side_markings: Iterable[int]
) -> DivisorSymbol:
    """Separating divisor of (g, n) with the given content on one side."""
    marks = frozenset(int(m) for m in side_markings)
    if any(m < 1 or m > n for m in marks):
        raise InvalidInputError("markings out of range")
    if side_genus < 0 or side_genus > g:
        raise InvalidInputError("side genus out of range")
    legs = tuple(0 if i + 1 in marks else 1 for i in range(n))
    graph = StableGraph((side_genus, g - side_genus), legs, ((0, 1),))
    validate_stable_graph(graph, g=g, n=n)
    return DivisorSymbol(graph)


_ALLOWED = {
    SMOOTH: {SMOOTH},
    RATIONAL_TAILS: {SMOOTH, RATIONAL_TAILS},
    COMPACT_TYPE: {SMOOTH, RATIONAL_TAILS, COMPACT_TYPE},
}


@dataclass(frozen=True)
class TautClass:
    """Rational combination of (lambda power, decorated graph) pairs.

    ``terms`` maps ``(lambda_power, canonical DecoratedGraph)`` to a nonzero
    Fraction; every stored term has total degree at most ``truncation``.
    Use :func:`taut_class` to build instances from raw contributions.
    """

    g: int
    n: int
    truncation: int
    terms: Mapping[tuple[int, DecoratedGraph], Fraction]

    def __post_init__(self) -> None:
        object.__setattr__(self, "terms", dict(self.terms))

    # -- linear structure --------------------------------------------------

    def add(self, other: "TautClass") -> "TautClass":
        """Sum; the result is truncated at the smaller of the two degrees."""
        if (self.g, self.n) != (other.g, other.n):
            raise InvalidInputError("ambient type mismatch in add")
        truncation = min(self.truncation, other.truncation)
        merged: dict = {}
        for source in (self.terms, other.terms):
            for key, coeff in source.items():
                if key[0] + key[1].degree > truncation:
                    continue
                merged[key] = merged.get(key, Fraction(0)) + coeff
        return TautClass(
            self.g, self.n, truncation, {k: v for k, v in merged.items() if v}
        )

    def scale(self, q) -> "TautClass":
        q = Fraction(q)
        if q == 0:
            return TautClass(self.g, self.n, self.truncation, {})
        return TautClass(
            self.g, self.n, self.truncation,
            {key: coeff * q for key, coeff in self.terms.items()},
        )

    def coefficient_of(self, lambda_power: int, dec: DecoratedGraph) -> Fraction:
        """Coefficient of a term; the query graph is canonicalized first."""
        return self.terms.get((lambda_power, canonical_form(dec)), Fraction(0))

    def restrict(self, locus: str) -> "TautClass":
        """Keep only terms supported on the named open locus."""
        if locus not in _ALLOWED:
            raise InvalidInputError(f"unknown locus {locus!r}")
        allowed = _ALLOWED[locus]
        return TautClass(
            self.g, self.n, self.truncation,
            {
                key: coeff
                for key, coeff in self.terms.items()
                if classify_locus(key[1].graph, self.g) in allowed
            },
        )

    def degree_part(self, d: int) -> "TautClass":
        return TautClass(
            self.g, self.n, self.truncation,
            {k: v for k, v in self.terms.items() if k[0] + k[1].degree == d},
        )

    def sorted_terms(self):
        """Terms as (lambda, graph, coeff), ordered by degree then encoding."""
        return sorted(
            ((lam, dec, coeff) for (lam, dec), coeff in self.terms.items()),
            key=lambda t: (
                t[0] + t[1].degree,
                t[0],
                canonical_encoding(t[1]),
            ),
        )

    def is_zero(self) -> bool:
        return not self.terms


def taut_class(g: int, n: int, truncation: int, contributions=()) -> TautClass:
    """Build a class from (lambda_power, graph, coefficient) triples.

    Graphs are canonicalized, isomorphic contributions merged, zeros
    dropped.  Contributions above the truncation degree are an error.
    """
    if truncation < 0:
        raise InvalidInputError("truncation degree must be nonnegative")
    acc: dict = {}
    for lam, dec, coeff in contributions:
        if lam < 0:
            raise InvalidInputError("lambda powers must be nonnegative")
        if dec.graph.num_markings != n or dec.graph.genus != g:
            raise InvalidInputError("term has wrong ambient type")
        if lam + dec.degree > truncation:
            raise InvalidInputError("term degree exceeds the truncation")
        key = (lam, canonical_form(dec))
        acc[key] = acc.get(key, Fraction(0)) + Fraction(coeff)
    return TautClass(g, n, truncation, {k: v for k, v in acc.items() if v})


def zero_class(g: int, n: int, truncation: int) -> TautClass:
    return TautClass(g, n, truncation, {})


def unit_class(g: int, n: int, truncation: int) -> TautClass:
    """The fundamental class: coefficient 1 on the undecorated trivial graph."""
    return taut_class(g, n, truncation, [(0, decorate(trivial_graph(g, n)), 1)])


# -- divisor calculus --------------------------------------------------------


def _check_no_correction(sym: DivisorSymbol, g: int) -> None:
    # A power of this divisor resolves to psi classes on its own edge only
    # when no side is an unmarked piece of genus <= g/2; otherwise strata in
    # the self-intersection contribute corrections we do not compute.
    for side_genus, side_marks in sym.split:
        if not side_marks and 2 * side_genus <= g:
            raise UnsupportedProductError(
                "divisor bounds an unmarked side of genus "
                f"{side_genus} <= {g}/2; correction terms are not implemented"
            )


@lru_cache(maxsize=None)
def _tree_split_table(g: int, n: int, num_edges: int):
    table: dict = {}
    for graph in enumerate_stable_graphs(g, n, num_edges):
        if graph.num_edges != num_edges or graph.h1 != 0:
            continue
        splits = frozenset(edge_split(graph, e) for e in range(num_edges))
        if len(splits) == num_edges:
            table.setdefault(splits, []).append(graph)
    return table


def _tree_realizing(g: int, n: int, splits: frozenset):
    matches = _tree_split_table(g, n, len(splits)).get(splits, [])
    if len(matches) > 1:
        raise UnsupportedProductError(
            "divisor set is realized by more than one tree"
        )
    return matches[0] if matches else None


def divisor_monomial_expand(
    g: int,
    n: int,
    factors,
    leg_psi: Mapping[int, int] | None = None,
    truncation: int | None = None,
    assume_restricted_context: bool = False,
) -> TautClass:
    """Product of powers of separating divisors times marking psi powers.

    ``factors`` lists ``(DivisorSymbol, exponent >= 1)`` pairs; repeats of
    one symbol merge by adding exponents.  The product resolves on the
    unique tree whose edges realize exactly the given divisors, each edge
    decorated by (-psi' - psi'')^(exponent-1); incompatible divisors give
    the zero class.  No 1/|Aut| factor is applied.  Each factor must pass
    the no-correction test unless ``assume_restricted_context`` asserts a
    rational-tails or compact-type ambient.
    """
    psi = {int(m): int(k) for m, k in (leg_psi or {}).items() if k}
    if any(m < 1 or m > n for m in psi) or any(k < 0 for k in psi.values()):
        raise InvalidInputError("bad marking psi exponents")
    exponents: dict[DivisorSymbol, int] = {}
    for sym, k in factors:
        if int(k) < 1:
            raise InvalidInputError("divisor exponents must be at least 1")
        exponents[sym] = exponents.get(sym, 0) + int(k)
    for sym in exponents:
        if sym.graph.genus != g or sym.graph.num_markings != n:
            raise InvalidInputError("divisor symbol has wrong ambient type")
        if not assume_restricted_context:
            _check_no_correction(sym, g)
    degree = sum(exponents.values()) + sum(psi.values())
    if truncation is None:
        truncation = degree
    if degree > truncation:
        raise InvalidInputError("product degree exceeds the truncation")

    symbols = sorted(exponents, key=DivisorSymbol.sort_key)
    if not symbols:
        tree = trivial_graph(g, n)
        validate_stable_graph(tree)
        order: list[int] = []
    elif len(symbols) == 1:
        tree = symbols[0].graph
        order = [0]
    else:
        tree = _tree_realizing(g, n, frozenset(sym.split for sym in symbols))
        if tree is None:
            return zero_class(g, n, truncation)
        edge_of = {edge_split(tree, e): e for e in range(tree.num_edges)}
        order = [edge_of[sym.split] for sym in symbols]

    lpsi = tuple(psi.get(i + 1, 0) for i in range(n))
    powers = [exponents[sym] for sym in symbols]
    contributions = []
    for combo in product(*(range(k) for k in powers)):
        hpsi = [(0, 0)] * tree.num_edges
        coeff = Fraction(1)
        for sym_pos, i in enumerate(combo):
            k = powers[sym_pos]
            hpsi[order[sym_pos]] = (i, k - 1 - i)
            coeff *= (-1) ** (k - 1) * comb(k - 1, i)
        contributions.append((0, DecoratedGraph(tree, tuple(hpsi), lpsi), coeff))
    return taut_class(g, n, truncation, contributions)


def _bounded_compositions(bounds_len: int, budget: int):
    # weak compositions (k_1, ..., k_m) with sum <= budget
    if bounds_len == 0:
        yield ()
        return
    for head in range(budget + 1):
        for tail in _bounded_compositions(bounds_len - 1, budget - head):
            yield (head,) + tail


def exp_of_divisor_combination(
    g: int,
    n: int,
    lambda_coeff,
    psi_coeffs: Mapping[int, Fraction] | None,
    divisor_coeffs: Mapping[DivisorSymbol, Fraction] | None,
    truncation: int,
    assume_restricted_context: bool = False,
) -> TautClass:
    """exp(a*lambda + sum w_i psi_i + sum c_e delta_e) through the truncation.

    The exponential is expanded multinomially; divisor powers and products
    resolve through :func:`divisor_monomial_expand`.  Divisors with a zero
    coefficient are dropped before any compatibility checking.
    """
    if 2 * g - 2 + n <= 0:
        raise InvalidInputError(f"(g, n) = ({g}, {n}) is unstable")
    lam_c = Fraction(lambda_coeff)
    psi_items = sorted(
        ((int(m), Fraction(w)) for m, w in (psi_coeffs or {}).items() if w != 0)
    )
    if any(m < 1 or m > n for m, _ in psi_items):
        raise InvalidInputError("psi coefficients must be keyed by markings 1..n")
    div_items = sorted(
        ((sym, Fraction(c)) for sym, c in (divisor_coeffs or {}).items() if c != 0),
        key=lambda item: item[0].sort_key(),
    )
    out: dict = {}
    slots = len(div_items) + len(psi_items)
    for p in range(truncation + 1):
        if p > 0 and lam_c == 0:
            break
        scale_p = lam_c**p / factorial(p)
        for combo in _bounded_compositions(slots, truncation - p):
            div_pows = combo[: len(div_items)]
            psi_pows = combo[len(div_items):]
            coeff = scale_p
            factors = []
            for (sym, c), k in zip(div_items, div_pows):
                if k:
                    coeff *= c**k / factorial(k)
                    factors.append((sym, k))
            leg_psi = {}
            for (m, w), q in zip(psi_items, psi_pows):
                if q:
                    coeff *= w**q / factorial(q)
                    leg_psi[m] = q
            base = divisor_monomial_expand(
                g, n, factors, leg_psi,
                truncation=truncation,
                assume_restricted_context=assume_restricted_context,
            )
            for (lam0, dec), q in base.terms.items():
                key = (p + lam0, dec)
                out[key] = out.get(key, Fraction(0)) + q * coeff
    return TautClass(g, n, truncation, {k: v for k, v in out.items() if v})


# -- JSON interchange --------------------------------------------------------


def tautclass_to_json(cls: TautClass) -> dict:
    """Encode a class with terms sorted by (degree, canonical encoding)."""
    terms = []
    for lam, dec, coeff in cls.sorted_terms():
        terms.append(
            {
                "lambda": lam,
                "graph": graph_to_json(dec.graph),
                "hpsi": [list(pair) for pair in dec.hpsi],
                "lpsi": {
                    str(i + 1): k for i, k in enumerate(dec.lpsi) if k
                },
                "coeff": format_fraction(coeff),
            }
        )
    return {"g": cls.g, "n": cls.n, "truncation": cls.truncation, "terms": terms}


def tautclass_from_json(data: dict) -> TautClass:
    """Decode the JSON class encoding; inverse of :func:`tautclass_to_json`."""
    try:
        g, n = int(data["g"]), int(data["n"])
        truncation = int(data["truncation"])
        contributions = []
        for term in data["terms"]:
            graph = graph_from_json(term["graph"])
            raw_edges = [tuple(int(x) for x in e) for e in term["graph"]["edges"]]
            hpsi = []
            for (a, b), pair in zip(raw_edges, term["hpsi"]):
                ka, kb = int(pair[0]), int(pair[1])
                hpsi.append((ka, kb) if a <= b else (kb, ka))
            lpsi = [0] * n
            for m, k in dict(term.get("lpsi", {})).items():
                lpsi[int(m) - 1] = int(k)
            dec = DecoratedGraph(graph, tuple(hpsi), tuple(lpsi))
            contributions.append((int(term["lambda"]), dec, parse_fraction(term["coeff"])))
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInputError(f"bad class encoding: {exc}") from exc
    return taut_class(g, n, truncation, contributions)
