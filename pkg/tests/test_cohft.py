import pytest
from fractions import Fraction
from itertools import product
from math import comb, factorial

from verlinde import (
    DecoratedGraph,
    DiagonalRMatrix,
    InvalidInputError,
    StableGraph,
    TautClass,
    automorphism_order,
    builtin_sl2,
    builtin_slr_level1,
    canonical_form,
    compact_type_closed_form,
    decorate,
    edge_factor_series,
    enumerate_stable_graphs,
    identity_rmatrix,
    rank,
    rmatrix_action,
    slope_restriction_check,
    slr_tree_remainders,
    smooth_slope_class,
    symplectic_check,
    taut_class,
    trivial_graph,
    two_loop_report,
    verlinde_chern_character,
    verlinde_w_matrix,
)
from verlinde.cohft import _bivariate_edge_factor


def test_edge_factor_series_values():
    w = Fraction(1, 4)
    assert edge_factor_series(w, 3) == (
        Fraction(-1, 4),
        Fraction(-1, 32),
        Fraction(-1, 384),
        Fraction(-1, 6144),
    )
    assert edge_factor_series(0, 5) == (Fraction(0),) * 6


def test_rmatrix_validation():
    with pytest.raises(InvalidInputError, match="constant term"):
        DiagonalRMatrix({0: (Fraction(2),)}, 2)
    with pytest.raises(InvalidInputError, match="degree"):
        DiagonalRMatrix({0: (Fraction(1),)}, -1)
    matrix = DiagonalRMatrix({0: (1, Fraction(1, 2))}, 3)
    assert matrix.entry(0) == (1, Fraction(1, 2), 0, 0)
    with pytest.raises(InvalidInputError, match="no R-matrix entry"):
        matrix.entry(9)


def test_w_matrix_is_the_weight_exponential():
    datum = builtin_sl2(2)
    matrix = verlinde_w_matrix(datum, 4)
    w = datum.weight(1)
    assert matrix.entry(1) == tuple(w**k / factorial(k) for k in range(5))
    ident = identity_rmatrix(datum, 4)
    assert ident.entry(2) == (1, 0, 0, 0, 0)


def test_symplectic_check_builtins_and_perturbation():
    for datum in (builtin_sl2(1), builtin_sl2(3), builtin_slr_level1(4)):
        assert symplectic_check(datum, verlinde_w_matrix(datum, 8), 8)
    datum = builtin_sl2(1)
    entries = {m: list(verlinde_w_matrix(datum, 8).entry(m)) for m in datum.labels}
    entries[1][3] += Fraction(1, 7)
    perturbed = DiagonalRMatrix({m: tuple(s) for m, s in entries.items()}, 8)
    assert not symplectic_check(datum, perturbed, 8)
    with pytest.raises(InvalidInputError, match="truncated"):
        symplectic_check(datum, verlinde_w_matrix(datum, 3), 8)


def test_bivariate_edge_factor_matches_univariate_specialization():
    # for a self-dual exponential entry the quotient is a function of z + w,
    # so the table must reproduce the univariate series with binomials
    for datum, label in ((builtin_sl2(2), 1), (builtin_sl2(2), 2)):
        D = 6
        a = verlinde_w_matrix(datum, D).entry(label)
        table = _bivariate_edge_factor(a, a, D)
        c = edge_factor_series(datum.weight(label), D)
        for i in range(D):
            for j in range(D - i):
                assert table[i][j] == c[i + j] * comb(i + j, i)


def test_bivariate_edge_factor_dual_pair():
    datum = builtin_slr_level1(3)
    D = 5
    matrix = verlinde_w_matrix(datum, D)
    # dual labels share the weight, so the same specialization applies
    table = _bivariate_edge_factor(matrix.entry(1), matrix.entry(2), D)
    c = edge_factor_series(datum.weight(1), D)
    for i in range(D):
        for j in range(D - i):
            assert table[i][j] == c[i + j] * comb(i + j, i)


def test_identity_rmatrix_action_recovers_the_rank_tqft():
    cases = (
        (builtin_sl2(1), 1, 1, (0,)),
        (builtin_sl2(2), 2, 2, (1, 1)),
        (builtin_slr_level1(3), 1, 2, (1, 2)),
        (builtin_slr_level1(2), 2, 0, ()),
    )
    for datum, g, n, labels in cases:
        cls = rmatrix_action(datum, identity_rmatrix(datum, 3), g, n, labels, 3)
        want = taut_class(
            g, n, 3, [(0, decorate(trivial_graph(g, n)), rank(datum, g, labels))]
        )
        assert cls == want


def test_rmatrix_action_validation():
    datum = builtin_sl2(1)
    matrix = verlinde_w_matrix(datum, 2)
    with pytest.raises(InvalidInputError, match="labels"):
        rmatrix_action(datum, matrix, 1, 1, (0, 0), 2)
    with pytest.raises(InvalidInputError, match="unstable"):
        rmatrix_action(datum, matrix, 0, 2, (0, 0), 2)
    with pytest.raises(InvalidInputError, match="truncated"):
        rmatrix_action(datum, matrix, 1, 1, (0,), 5)
    entries = {m: list(matrix.entry(m)) for m in datum.labels}
    entries[1][1] += 1
    skew = DiagonalRMatrix({m: tuple(s) for m, s in entries.items()}, 2)
    with pytest.raises(InvalidInputError, match="symplectic"):
        rmatrix_action(datum, skew, 1, 1, (0,), 2)


def test_character_frozen_expansion_degree2():
    # full (1,1) character of sl2 level 1 through degree 2, checked by hand
    datum = builtin_sl2(1)
    cls = verlinde_chern_character(datum, 1, 1, (0,), 2)
    triv = decorate(trivial_graph(1, 1))
    loop = decorate(StableGraph((0,), (0,), ((0, 0),)))
    loop_psi = decorate(StableGraph((0,), (0,), ((0, 0),)), hpsi=((1, 0),))
    expected = {
        (0, canonical_form(triv)): Fraction(2),
        (1, canonical_form(triv)): Fraction(-1),
        (2, canonical_form(triv)): Fraction(1, 4),
        (0, canonical_form(loop)): Fraction(-1, 8),
        (1, canonical_form(loop)): Fraction(1, 16),
        (0, canonical_form(loop_psi)): Fraction(-1, 32),
    }
    assert dict(cls.terms) == expected


def test_character_zero_rank_labels_give_zero_class():
    datum = builtin_slr_level1(3)
    cls = verlinde_chern_character(datum, 1, 2, (1, 1), 2)
    assert cls.is_zero()


def test_character_degree_zero_is_the_rank():
    datum = builtin_slr_level1(3)
    cls = verlinde_chern_character(datum, 1, 2, (1, 2), 0)
    assert cls == taut_class(1, 2, 0, [(0, decorate(trivial_graph(1, 2)), 3)])


def test_threads_do_not_change_the_result():
    datum = builtin_sl2(2)
    matrix = verlinde_w_matrix(datum, 3)
    serial = rmatrix_action(datum, matrix, 2, 2, (1, 1), 3, threads=1)
    parallel = rmatrix_action(datum, matrix, 2, 2, (1, 1), 3, threads=4)
    assert serial == parallel


def _character_by_parity_count(g, n, labels, D):
    """Independent sl2 level-1 evaluation: parity vertex rule, 2^(g-h1)
    factors, univariate edge tables with explicit binomials."""
    w = {0: Fraction(0), 1: Fraction(1, 4)}
    leg_series = {
        a: [w[a] ** k / factorial(k) for k in range(D + 1)] for a in (0, 1)
    }
    ctable = {
        a: [-(w[a] ** (k + 1)) / factorial(k + 1) for k in range(D + 1)]
        for a in (0, 1)
    }
    acc: dict = {}
    for graph in enumerate_stable_graphs(g, n, D):
        E = graph.num_edges
        base = Fraction(1, automorphism_order(graph)) * Fraction(2) ** (g - graph.h1)
        for assign in product((0, 1), repeat=E):
            parity_ok = True
            for v in range(graph.num_vertices):
                s = sum(labels[i] for i in range(n) if graph.legs[i] == v)
                for e, (x, y) in enumerate(graph.edges):
                    s += assign[e] * ((x == v) + (y == v))
                if s % 2:
                    parity_ok = False
                    break
            if not parity_ok:
                continue
            budget = D - E
            for totals in product(range(budget + 1), repeat=E):
                if sum(totals) > budget:
                    continue
                ecoeff = Fraction(1)
                for e, t in enumerate(totals):
                    ecoeff *= ctable[assign[e]][t]
                if ecoeff == 0:
                    continue
                for splits in product(*(range(t + 1) for t in totals)):
                    hpsi = tuple(
                        (i, t - i) for i, t in zip(splits, totals)
                    )
                    scoeff = ecoeff
                    for i, t in zip(splits, totals):
                        scoeff *= comb(t, i)
                    rem = budget - sum(totals)
                    for lpsi in product(range(rem + 1), repeat=n):
                        if sum(lpsi) > rem:
                            continue
                        lcoeff = Fraction(1)
                        for i, k in enumerate(lpsi):
                            lcoeff *= leg_series[labels[i]][k]
                        if lcoeff == 0:
                            continue
                        dec = canonical_form(DecoratedGraph(graph, hpsi, lpsi))
                        key = (0, dec)
                        acc[key] = acc.get(key, Fraction(0)) + base * scoeff * lcoeff
    out: dict = {}
    for (lam, dec), coeff in acc.items():
        if coeff == 0:
            continue
        for p in range(D - dec.degree + 1):
            key = (lam + p, dec)
            out[key] = out.get(key, Fraction(0)) + coeff * Fraction(-1, 2) ** p / factorial(p)
    return TautClass(g, n, D, {k: v for k, v in out.items() if v})


def test_character_matches_independent_parity_evaluation():
    datum = builtin_sl2(1)
    cases = ((1, 2, (1, 1)), (2, 1, (0,)), (2, 2, (1, 1)))
    for g, n, labels in cases:
        engine = verlinde_chern_character(datum, g, n, labels, 2)
        independent = _character_by_parity_count(g, n, labels, 2)
        assert engine == independent


def test_smooth_slope_class_and_check():
    datum = builtin_sl2(1)
    cls = smooth_slope_class(datum, 1, 1, (0,), 3)
    triv = decorate(trivial_graph(1, 1))
    assert cls.coefficient_of(0, triv) == 2
    assert cls.coefficient_of(1, triv) == -1
    assert slope_restriction_check(datum, 1, 1, (0,), degree=2)
    with pytest.raises(InvalidInputError, match="zero-rank"):
        slope_restriction_check(datum, 1, 1, (1,), degree=2)


def test_slr_tree_remainders_path():
    # chain: (0,[1,2,3]) -- (1,[]) -- (0,[4,5,6]), all labels odd, r = 2
    tree = StableGraph((0, 1, 0), (0, 0, 0, 2, 2, 2), ((0, 1), (1, 2)))
    out = slr_tree_remainders(2, tree, (1, 1, 1, 1, 1, 1))
    assert out == {0: 1, 1: 1}
    datum = builtin_slr_level1(2)
    assert datum.weight(1) == Fraction(1, 4)


def test_slr_tree_remainders_unmarked_side_is_zero():
    tree = StableGraph((0, 1), (0, 0), ((0, 1),))
    assert slr_tree_remainders(2, tree, (1, 1)) == {0: 0}


def test_slr_tree_remainders_orientation():
    # remainder is reported at side 0 of the stored edge
    tree = StableGraph((0, 2), (0, 0, 1), ((0, 1),))
    out = slr_tree_remainders(3, tree, (1, 1, 1))
    assert out == {0: 1}


def test_slr_tree_remainders_validation():
    loop = StableGraph((1,), (0, 0), ((0, 0),))
    with pytest.raises(InvalidInputError, match="tree"):
        slr_tree_remainders(2, loop, (1, 1))
    tree = StableGraph((0, 1), (0, 0), ((0, 1),))
    with pytest.raises(InvalidInputError, match="label"):
        slr_tree_remainders(2, tree, (1,))
    with pytest.raises(InvalidInputError, match="remainders"):
        slr_tree_remainders(2, tree, (1, 5))
    with pytest.raises(InvalidInputError, match="vanish"):
        slr_tree_remainders(2, tree, (1, 0))
    with pytest.raises(InvalidInputError, match="at least 2"):
        slr_tree_remainders(1, tree, (0, 0))


def test_compact_type_closed_form_no_markings():
    cls = compact_type_closed_form(2, 2, 0, (), 3)
    triv = decorate(trivial_graph(2, 0))
    a = Fraction(-1, 2)
    for p in range(4):
        assert cls.coefficient_of(p, triv) == 4 * a**p / factorial(p)
    # every boundary divisor of (2,0) carries remainder 0, so nothing else
    assert len(cls.terms) == 4


def test_compact_type_closed_form_matches_graph_sum():
    datum = builtin_slr_level1(2)
    lhs = verlinde_chern_character(datum, 1, 2, (1, 1), 2).restrict("compact_type")
    rhs = compact_type_closed_form(2, 1, 2, (1, 1), 2)
    assert lhs == rhs


def test_compact_type_closed_form_validation():
    with pytest.raises(InvalidInputError, match="labels"):
        compact_type_closed_form(2, 1, 2, (1,), 2)
    with pytest.raises(InvalidInputError, match="vanish"):
        compact_type_closed_form(3, 1, 2, (1, 1), 2)
    with pytest.raises(InvalidInputError, match="remainders"):
        compact_type_closed_form(2, 1, 2, (1, 3), 2)


def test_two_loop_report_frozen():
    rows = two_loop_report(3, 2)
    assert len(rows) == 5
    for row in rows:
        if row.parity == "odd":
            assert row.raw == 0
            assert row.normalized == 0
        else:
            assert row.raw == Fraction(1, 8)
            assert row.normalized == Fraction(1, 16)


def test_two_loop_report_validation():
    with pytest.raises(InvalidInputError, match="even"):
        two_loop_report(3, 1)
    with pytest.raises(InvalidInputError, match="genus"):
        two_loop_report(1, 2)
    with pytest.raises(InvalidInputError, match="degree 2"):
        two_loop_report(3, 2, degree=1)


def test_zero_lambda_genus0_flag():
    datum = builtin_sl2(1)
    labels = (1, 1, 1, 1)
    triv = decorate(trivial_graph(0, 4))
    free = verlinde_chern_character(datum, 0, 4, labels, 2)
    assert free.coefficient_of(1, triv) == Fraction(-1, 2)
    zeroed = verlinde_chern_character(
        datum, 0, 4, labels, 2, zero_lambda_genus0=True
    )
    assert zeroed.coefficient_of(1, triv) == 0
    assert all(lam == 0 for (lam, _) in zeroed.terms)
    assert zeroed.coefficient_of(0, triv) == free.coefficient_of(0, triv) == 1
