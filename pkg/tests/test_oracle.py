import random

import pytest

from transita.core import Graph, TransitionSystem, all_transitions
from transita.genred import gen_random_ftg
from transita.oracle import (
    OracleSizeError,
    brute_2dspp,
    brute_compatible_path,
    brute_disjoint_paths,
    brute_pchc,
    brute_psi,
)
from transita.core import DiGraph, EdgeColoring


def test_brute_path_examples():
    g = Graph(2, [(0, 1)])
    assert brute_compatible_path(g, TransitionSystem(), 0, 1, 5) == 1
    p3 = Graph(3, [(0, 1), (1, 2)])
    assert brute_compatible_path(p3, TransitionSystem(), 0, 2, 5) is None
    # hand-checked C5: of the simple 0-2 paths only the long way is usable
    c5 = Graph(5, [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)])
    pairs = set(all_transitions(c5).pairs)
    pairs.discard((0, 1))
    assert brute_compatible_path(c5, TransitionSystem(pairs), 0, 2, 5) == 3


def test_brute_path_size_guard():
    g = Graph(13, [(i, i + 1) for i in range(12)])
    with pytest.raises(OracleSizeError):
        brute_compatible_path(g, TransitionSystem(), 0, 12, None)
    assert (
        brute_compatible_path(g, TransitionSystem(), 0, 12, None, size_guard=False)
        is None
    )


def test_brute_disjoint_paths_examples():
    g = Graph(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])
    t = all_transitions(g)
    assert brute_disjoint_paths(g, t, [], "vertex")
    # crossing pairs in K4: direct edges keep them disjoint
    assert brute_disjoint_paths(g, t, [(0, 2), (1, 3)], "vertex")
    # vertex-disjoint solutions are edge-disjoint solutions
    rng = random.Random(5)
    for _ in range(40):
        gg, tt = gen_random_ftg(rng.randint(4, 8), 0.5, 0.7, rng.randrange(10**6))
        avail = list(range(gg.n))
        rng.shuffle(avail)
        pairs = [(avail[0], avail[1]), (avail[2], avail[3])]
        if brute_disjoint_paths(gg, tt, pairs, "vertex"):
            assert brute_disjoint_paths(gg, tt, pairs, "edge")


def test_brute_disjoint_isolated_terminal():
    g = Graph(3, [(0, 1)])
    assert not brute_disjoint_paths(g, all_transitions(g), [(0, 2)], "vertex")


def test_brute_pchc_examples():
    tri = Graph(3, [(0, 1), (1, 2), (0, 2)])
    assert brute_pchc(tri, EdgeColoring((1, 2, 3), 3))
    c4 = Graph(4, [(0, 1), (1, 2), (2, 3), (0, 3)])
    assert not brute_pchc(c4, EdgeColoring((1, 1, 1, 1), 1))


def test_brute_2dspp_examples():
    # two disjoint parallel corridors
    g = DiGraph(6, [(0, 1), (1, 2), (3, 4), (4, 5)], (1, 1, 1, 1))
    t = all_transitions(g)
    assert brute_2dspp(g, t, [(0, 2), (3, 5)], "vertex")
    # forced shared arc
    g2 = DiGraph(4, [(0, 2), (1, 2), (2, 3)], (1, 1, 1))
    t2 = all_transitions(g2)
    assert not brute_2dspp(g2, t2, [(0, 3), (1, 3)], "edge")
    # removing the transitions flips a yes to a no
    assert not brute_2dspp(g, TransitionSystem(), [(0, 2), (3, 5)], "vertex")


def test_brute_psi_examples():
    h = Graph(2, [(0, 1)])
    g_yes = Graph(2, [(0, 1)])
    assert brute_psi(g_yes, h, (0, 1))
    g_no = Graph(2, [])
    assert not brute_psi(g_no, h, (0, 1))


def test_brute_psi_order_independent():
    rng = random.Random(9)
    for _ in range(40):
        from transita.genred import gen_random_psi

        psi = gen_random_psi(rng.randint(1, 3), 6, 0.5, rng.randrange(10**6))
        fwd = brute_psi(psi.g, psi.h, psi.col)
        rev = brute_psi(psi.g, psi.h, psi.col, order=list(range(psi.h.n))[::-1])
        assert fwd == rev


def test_oracles_are_deterministic():
    g, t = gen_random_ftg(7, 0.5, 0.7, 3)
    a = brute_compatible_path(g, t, 0, 5, 6)
    b = brute_compatible_path(g, t, 0, 5, 6)
    assert a == b
