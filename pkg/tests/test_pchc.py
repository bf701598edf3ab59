import itertools
import random

import pytest

from transita.core import EdgeColoring, Graph
from transita.io import DecompositionFile
from transita.oracle import brute_pchc
from transita.pchc import (
    ColoredTrace,
    FieldGF2a,
    IRREDUCIBLE,
    Trace,
    cut_row,
    e_row,
    field_for_colors,
    fit_colored,
    fit_traces,
    min_degree_decomposition,
    naive_pchc,
    pi_row,
    rank_based_pchc,
    reduce_representatives,
    single_bag_decomposition,
    validate_tree_decomposition,
    _single_cycle,
)


def perfect_matchings(z):
    z = list(z)
    if not z:
        yield ()
        return
    a = z[0]
    for i in range(1, len(z)):
        rest = z[1:i] + z[i + 1 :]
        for m in perfect_matchings(rest):
            yield ((a, z[i]),) + m


def test_irreducible_polynomials_are_irreducible():
    def divides(q, p):
        dq = q.bit_length() - 1
        u = p
        while u and u.bit_length() - 1 >= dq:
            u ^= q << (u.bit_length() - 1 - dq)
        return u == 0

    for a, p in IRREDUCIBLE.items():
        assert p.bit_length() - 1 == a
        if a <= 12:
            for d in range(1, a):
                for q in range(1 << d, 1 << (d + 1)):
                    assert not divides(q, p), (a, q)


def test_field_axioms_exhaustive_small():
    for a in (1, 2, 3, 4):
        F = FieldGF2a(a)
        n = F.size
        for x in range(n):
            assert F.add(x, x) == 0  # characteristic 2
            for y in range(n):
                assert F.mul(x, y) == F.mul(y, x)
                if y:
                    assert F.mul(F.mul(x, y), F.inv(y)) == x
                for z in range(n):
                    assert F.mul(x, F.add(y, z)) == F.add(F.mul(x, y), F.mul(x, z))
                    assert F.mul(F.mul(x, y), z) == F.mul(x, F.mul(y, z))


def test_gf4_multiplication_value():
    assert FieldGF2a(2).mul(2, 2) == 3
    assert FieldGF2a(4).mul(1, 7) == 7


def test_field_for_colors_sizes():
    assert field_for_colors(1).a == 1
    assert field_for_colors(3).a == 2
    assert field_for_colors(4).a == 3
    assert field_for_colors(500).a == 9


def test_fit_examples():
    f2 = ((0, 1), (1, 1))
    t1 = Trace(f2, ((0, 1),))
    assert fit_traces(t1, t1)  # two parallel fragments close a 2-cycle
    f4 = tuple((v, 1) for v in range(4))
    a = Trace(f4, ((0, 1), (2, 3)))
    assert not fit_traces(a, a)  # two separate 2-cycles
    b = Trace(f4, ((1, 2), (0, 3)))
    assert fit_traces(a, b)  # a single 4-cycle


def test_fit_colored_requires_disagreement():
    f2 = ((0, 1), (1, 1))
    m = ((0, 1),)
    assert not fit_colored(
        ColoredTrace(f2, m, ((0, 1), (1, 2))), ColoredTrace(f2, m, ((0, 1), (1, 3)))
    )
    assert fit_colored(
        ColoredTrace(f2, m, ((0, 1), (1, 2))), ColoredTrace(f2, m, ((0, 2), (1, 3)))
    )


def test_pi_row_expansions():
    F = FieldGF2a(3)
    alpha, beta = 3, 5
    assert pi_row({0: alpha}, [0], F) == [alpha, 1]
    assert pi_row({0: alpha, 1: beta}, [0, 1], F) == [
        F.mul(alpha, beta),
        beta,
        alpha,
        1,
    ]


def test_pi_evaluation_identity_random():
    rng = random.Random(4)
    F = FieldGF2a(8)
    for _ in range(1000):
        sz = rng.choice([1, 2, 3])
        z = list(range(sz))
        zp = {v: rng.randint(1, F.size - 1) for v in z}
        zq = {v: rng.randint(1, F.size - 1) for v in z}
        row = pi_row(zp, z, F)
        val = 0
        for mask in range(1 << sz):
            mono = 1
            for i in range(sz):
                if mask >> i & 1:
                    mono = F.mul(mono, zq[z[i]])
            val ^= F.mul(row[mask], mono)
        expected = 1
        for v in z:
            expected = F.mul(expected, zp[v] ^ zq[v])
        assert val == expected


def test_pi_zero_characterization_exhaustive():
    for a in (1, 2, 3):
        F = FieldGF2a(a)
        nz = range(1, F.size)
        for sz in (1, 2):
            z = list(range(sz))
            for zp in itertools.product(nz, repeat=sz):
                row = pi_row(dict(zip(z, zp)), z, F)
                for zq in itertools.product(nz, repeat=sz):
                    val = 0
                    for mask in range(1 << sz):
                        mono = 1
                        for i in range(sz):
                            if mask >> i & 1:
                                mono = F.mul(mono, zq[i])
                        val ^= F.mul(row[mask], mono)
                    assert (val == 0) == any(p == q for p, q in zip(zp, zq))


def test_cut_row_examples_and_factorization():
    # two cuts of {a, b}: the split cut severs the matched pair, the
    # trivial cut agrees with it
    assert cut_row(((0, 1),), [0, 1]) == [0, 1]
    # M = C . C^T over GF(2) for |Z| <= 6
    for sz in (2, 4, 6):
        z = list(range(sz))
        ms = list(perfect_matchings(z))
        for m1 in ms:
            r1 = cut_row(m1, z)
            assert len(r1) == 1 << (sz - 1)
            for m2 in ms:
                r2 = cut_row(m2, z)
                dot = 0
                for x, y in zip(r1, r2):
                    dot ^= x & y
                assert dot == (1 if _single_cycle(m1, m2, z) else 0)


def test_e_row_widths_and_fit_dot_product():
    F = FieldGF2a(3)
    empty = ColoredTrace((), (), ())
    assert e_row(empty, [], F) == [1]
    f2 = ((0, 1), (1, 1))
    tr = ColoredTrace(f2, ((0, 1),), ((0, 1), (1, 2)))
    assert len(e_row(tr, [0, 1], F)) == 8  # 2^(2|Z|-1)
    rng = random.Random(6)
    for _ in range(300):
        sz = rng.choice([2, 4])
        z = list(range(sz))
        ms = list(perfect_matchings(z))
        f = tuple((v, 1) for v in z)
        def rand_trace():
            m = tuple(tuple(sorted(p)) for p in rng.choice(ms))
            zeta = tuple((v, rng.randint(1, 7)) for v in z)
            return ColoredTrace(f, m, zeta)
        t1, t2 = rand_trace(), rand_trace()
        r1 = e_row(t1, z, F)
        v1 = cut_row(t2.matching, z)
        zq = dict(t2.zeta)
        v2 = []
        for mask in range(1 << sz):
            mono = 1
            for i in range(sz):
                if mask >> i & 1:
                    mono = F.mul(mono, zq[z[i]])
            v2.append(mono)
        tensor = [F.mul(a, b) if a else 0 for a in v1 for b in v2]
        dot = 0
        for x, y in zip(r1, tensor):
            dot ^= F.mul(x, y)
        assert (dot != 0) == fit_colored(t1, t2)


def test_reduce_representatives_properties():
    F = FieldGF2a(3)
    f2 = ((0, 1), (1, 1))
    tr = ColoredTrace(f2, ((0, 1),), ((0, 1), (1, 2)))
    assert reduce_representatives([tr, tr], F) == [tr]  # duplicates dropped
    rng = random.Random(11)
    for _ in range(120):
        sz = rng.choice([2, 4])
        z = list(range(sz))
        ms = list(perfect_matchings(z))
        f = tuple((v, 1) for v in z)
        fam = []
        for _ in range(rng.randint(1, 25)):
            m = tuple(tuple(sorted(p)) for p in rng.choice(ms))
            zeta = tuple((v, rng.randint(1, 7)) for v in z)
            fam.append(ColoredTrace(f, m, zeta))
        fam = sorted(set(fam), key=lambda t: (t.matching, t.zeta))
        kept = reduce_representatives(fam, F)
        assert len(kept) <= 1 << (2 * sz - 1)
        assert set(kept) <= set(fam)
        # representation: whatever fits the family fits the kept subset
        for m in ms:
            for _ in range(4):
                tau = ColoredTrace(
                    f,
                    tuple(tuple(sorted(p)) for p in m),
                    tuple((v, rng.randint(1, 7)) for v in z),
                )
                if any(fit_colored(t, tau) for t in fam):
                    assert any(fit_colored(t, tau) for t in kept)


def test_reduce_representatives_rejects_mixed_f():
    F = FieldGF2a(2)
    a = ColoredTrace(((0, 1), (1, 1)), ((0, 1),), ((0, 1), (1, 2)))
    b = ColoredTrace(((0, 0), (1, 0)), (), ())
    with pytest.raises(ValueError):
        reduce_representatives([a, b], F)


def test_pchc_trivial_instances():
    tri = Graph(3, [(0, 1), (1, 2), (0, 2)])
    dec = single_bag_decomposition(tri)
    col = EdgeColoring((1, 2, 3), 3)
    assert naive_pchc(tri, col, dec) and rank_based_pchc(tri, col, dec)
    c4 = Graph(4, [(0, 1), (1, 2), (2, 3), (0, 3)])
    mono = EdgeColoring((1, 1, 1, 1), 1)
    dec4 = single_bag_decomposition(c4)
    assert not naive_pchc(c4, mono, dec4)
    assert not rank_based_pchc(c4, mono, dec4)


def test_triple_equivalence_small_corpus():
    rng = random.Random(7)
    for _ in range(80):
        n = rng.randint(3, 8)
        g = Graph(
            n,
            [
                (u, v)
                for u in range(n)
                for v in range(u + 1, n)
                if rng.random() < rng.choice([0.4, 0.6, 0.8])
            ],
        )
        l = rng.randint(2, 5)
        col = EdgeColoring(tuple(rng.randint(1, l) for _ in range(g.m)), l)
        dec = min_degree_decomposition(g)
        assert validate_tree_decomposition(g, dec) == []
        expected = brute_pchc(g, col)
        assert naive_pchc(g, col, dec) == expected
        assert rank_based_pchc(g, col, dec) == expected


def test_k4_seeded_colorings_match():
    g = Graph(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])
    rng = random.Random(15)
    dec = min_degree_decomposition(g)
    for _ in range(100):
        l = rng.randint(1, 4)
        col = EdgeColoring(tuple(rng.randint(1, l) for _ in range(g.m)), l)
        assert naive_pchc(g, col, dec) == brute_pchc(g, col)


def test_color_renaming_invariance():
    rng = random.Random(21)
    for _ in range(30):
        n = rng.randint(4, 7)
        g = Graph(
            n,
            [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < 0.6],
        )
        l = rng.randint(2, 5)
        colors = [rng.randint(1, l) for _ in range(g.m)]
        dec = min_degree_decomposition(g)
        perm = list(range(1, l + 1))
        rng.shuffle(perm)
        renamed = [perm[c - 1] for c in colors]
        a = rank_based_pchc(g, EdgeColoring(tuple(colors), l), dec)
        b = rank_based_pchc(g, EdgeColoring(tuple(renamed), l), dec)
        assert a == b


def test_validate_tree_decomposition_catches_defects():
    g = Graph(3, [(0, 1), (1, 2)])
    bad = DecompositionFile(0, ((0, 1),), ((0, 1), (2,)))  # edge (1,2) uncovered
    assert any("not covered" in v for v in validate_tree_decomposition(g, bad))
