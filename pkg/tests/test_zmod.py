"""Structure algebra, graded lattices, translation, decomposition."""

from fractions import Fraction

import pytest

from blocko import blocks, rootdata, zmod
from blocko.errors import TruncationError, UnsupportedError
from blocko.poly import Poly, divisible_by_linear
from blocko.zmod import (
    ZLattice,
    bott_samelson,
    compose,
    decompose,
    graded_char,
    hom_graded,
    identify_projective,
    identity_hom,
    invariant_structure_algebra,
    isomorphic_up_to_shift,
    lattice_contains,
    moment_graph,
    singular_reduce,
    structure_algebra,
    theta_s,
    ungraded_char,
    verma_zmodule,
    zlattice_to_json,
)

from conftest import weight


@pytest.fixture(scope="module")
def a1_graph():
    cartan = rootdata.cartan_datum([[2]])
    return moment_graph(blocks.block_data(cartan, weight(cartan, 0)))


@pytest.fixture(scope="module")
def a2_graph():
    cartan = rootdata.cartan_datum([[2, -1], [-1, 2]])
    return moment_graph(blocks.block_data(cartan, weight(cartan, 0, 0)))


def test_a1_moment_graph_shape(a1_graph):
    assert a1_graph.vertices == [(), (0,)]
    assert len(a1_graph.edges) == 1


def test_a1_structure_algebra_basis(a1_graph):
    z = structure_algebra(a1_graph)
    assert z.degrees == [0, 2]
    const, top = z.generators
    assert [str(p) for p in const] == ["1", "1"]
    # degree-2 generator is (h, 0) up to unimodular change over the constants
    assert top[0] != top[1]
    (edge_label,) = a1_graph.edges.values()
    assert divisible_by_linear(top[0] - top[1], edge_label)


def test_structure_algebra_rank_equals_vertex_count(a1_graph, a2_graph):
    assert structure_algebra(a1_graph).rank == 2
    assert len(structure_algebra(a1_graph).generators) == 2
    z = structure_algebra(a2_graph)
    assert z.rank == 6
    assert len(z.generators) == 6


def test_structure_algebra_edge_divisibility(a2_graph):
    z = structure_algebra(a2_graph)
    index = {w: i for i, w in enumerate(z.slots)}
    for key, label in a2_graph.edges.items():
        a, b = tuple(key)
        for gen in z.generators:
            assert divisible_by_linear(gen[index[a]] - gen[index[b]], label)


def test_structure_algebra_closed_under_products(a2_graph):
    z = structure_algebra(a2_graph)
    for g in z.generators:
        for h in z.generators:
            prod = tuple(p * q for p, q in zip(g, h))
            d = max(
                (p.degree() for p in prod if not p.is_zero()), default=0
            )
            assert lattice_contains(z, prod, d)


def test_verma_zmodule_is_rank_one(a2_graph):
    m = verma_zmodule(a2_graph, (0,))
    assert m.slots == ((0,),)
    assert m.degrees == [0]


def test_theta_on_verma_gives_interval_algebra(a1_graph):
    m = verma_zmodule(a1_graph, ())
    t = theta_s(m, 0)
    z = structure_algebra(a1_graph)
    assert sorted(t.slots) == sorted(z.slots)
    assert sorted(t.degrees) == sorted(z.degrees)
    # mutual containment: same lattice, not only same character
    for gen, d in zip(t.generators, t.degrees):
        assert lattice_contains(z, gen, d // 2)
    for gen, d in zip(z.generators, z.degrees):
        assert lattice_contains(t, gen, d // 2)


@pytest.mark.parametrize("word", [(), (0,), (1,), (0, 1), (1, 0), (0, 1, 0)])
def test_theta_rank_and_vertex_law(a2_graph, word):
    system = a2_graph.block.coxeter_system
    for s in (0, 1):
        m = verma_zmodule(a2_graph, word)
        t = theta_s(m, s)
        assert t.rank == 2 * m.rank
        n_old = m.vertex_multiset()
        n_new = t.vertex_multiset()
        for w in set(n_new):
            ws = system.normal_form(w + (s,))
            assert n_new[w] == n_old.get(w, 0) + n_old.get(ws, 0)


def test_theta_rejects_bad_wall(a2_graph):
    cartan = a2_graph.block.cartan
    singular = blocks.block_data(cartan, weight(cartan, 0, -1))
    graph = moment_graph(singular)
    with pytest.raises(UnsupportedError):
        theta_s(verma_zmodule(graph, ()), 0)


def test_bott_samelson_ranks(a2_graph):
    assert bott_samelson(a2_graph, (0,)).rank == 2
    assert bott_samelson(a2_graph, (0, 1)).rank == 4
    assert bott_samelson(a2_graph, (0, 1, 0)).rank == 8


def test_graded_char_of_interval_algebra(a1_graph):
    z = structure_algebra(a1_graph)
    assert graded_char(z) == {(): [0], (0,): [2]}


def test_hom_identity_and_composition(a2_graph):
    b = bott_samelson(a2_graph, (0, 1))
    endos = hom_graded(b, b, 0)
    assert len(endos) == 1  # BS(st) is indecomposable
    ident = identity_hom(b)
    u = endos[0]
    assert zmod.homs_equal(
        compose(u, ident, a2_graph.nvars), u
    )


def test_hom_between_distinct_vermas_vanishes(a2_graph):
    m = verma_zmodule(a2_graph, ())
    n = verma_zmodule(a2_graph, (0,))
    for d in range(0, 8, 2):
        assert hom_graded(m, n, d) == []
        assert hom_graded(n, m, d) == []


def test_decompose_bott_samelson_sts(a2_graph):
    b = bott_samelson(a2_graph, (0, 1, 0))
    summands = decompose(b)
    chars = sorted(
        (graded_char(s) for s in summands), key=lambda c: len(c)
    )
    assert len(summands) == 2
    assert chars[0] == {(): [2], (0,): [4]}
    assert chars[1] == {
        (): [0],
        (0,): [2],
        (1,): [2],
        (0, 1): [4],
        (1, 0): [4],
        (0, 1, 0): [6],
    }


def test_decompose_direct_sum_of_vermas(a2_graph):
    m = verma_zmodule(a2_graph, ())
    double = ZLattice(
        a2_graph,
        m.slots + m.slots,
        [g + (Poly.zero(a2_graph.nvars),) for g in m.generators]
        + [(Poly.zero(a2_graph.nvars),) + g for g in m.generators],
        m.degrees + m.degrees,
    )
    summands = decompose(double)
    assert len(summands) == 2
    assert all(graded_char(s) == graded_char(m) for s in summands)


def test_identify_projective_matches_multiplicities(a2_graph):
    from blocko import kl

    block = a2_graph.block
    for v in block.orbit:
        p = identify_projective(a2_graph, v.word)
        got = ungraded_char(p)
        want = kl.projective_multiplicities(
            block, block.coxeter_system.element(v.word)
        )
        assert got == {w: n for w, n in want.items() if n}


def test_isomorphic_up_to_shift(a2_graph):
    m = verma_zmodule(a2_graph, ())
    shifted = ZLattice(a2_graph, m.slots, m.generators, [d + 4 for d in m.degrees])
    assert isomorphic_up_to_shift(m, shifted)
    assert not zmod.chars_equal(m, shifted)


def test_invariant_subalgebra_generator_count(a2_graph):
    closure = [(), (0,)]
    inv = invariant_structure_algebra(a2_graph, closure, 0)
    assert len(inv.generators) == 1  # one coset {e, s}
    g = inv.generators[0]
    assert g[0] == g[1]


def test_singular_reduce_splits_in_two(a2_graph):
    p = identify_projective(a2_graph, (0,))
    copies = singular_reduce(a2_graph, p, (0,))
    assert len(copies) == 2
    assert isomorphic_up_to_shift(copies[0], copies[1])
    assert all(c.rank == 1 for c in copies)


def test_zlattice_json(a1_graph):
    z = structure_algebra(a1_graph)
    report = zlattice_to_json(z)
    assert report["slots"] == ["e", "1"]
    assert [g["degree"] for g in report["generators"]] == [0, 2]
