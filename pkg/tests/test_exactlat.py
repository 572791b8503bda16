from fractions import Fraction
from itertools import product
from math import gcd

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import combos, member, primitive_in_span
from tubular.errors import NotInLattice, NotSublattice, ZeroVector
from tubular.exactlat import (ZZ2, Lattice2, coords, complement, det, hnf,
                              intersection_number, is_primitive_in, minimal_scale,
                              parallel_ratio, rat, rat_str, smith_classes,
                              smith_quotient, torsion_degree, vec)

F = Fraction
HALF_Z_Z = hnf([vec(F(1, 2), 0), vec(0, 1)])


def test_hnf_snowflake_display():
    L = hnf([vec(1, 3), vec(-1, 3), vec(0, 2), vec(2, 0)])
    assert L.rank == 2
    # canonical form keeps 0 <= a2 < a3, so the first row is (1,1)
    assert L.basis == (vec(1, 1), vec(0, 2))
    assert L == hnf([vec(1, 3), vec(0, 2)])
    assert combos([(1, 3), (0, 2)], (1, 1), 3)


def test_hnf_empty_and_half():
    assert hnf([]).rank == 0
    assert hnf([vec(0, 0)]).rank == 0
    L = hnf([vec(F(1, 2), 0), vec(0, 1), vec(1, 1)])
    assert L.basis == (vec(F(1, 2), 0), vec(0, 1))


def test_hnf_rank_one_sign():
    L = hnf([vec(-2, -4), vec(3, 6)])
    assert L.rank == 1 and L.basis == (vec(1, 2),)
    assert hnf([vec(0, -3)]).basis == (vec(0, 3),)


def test_coords_examples():
    L = hnf([vec(1, 3), vec(0, 2)])
    c = coords(L, vec(2, 8))
    b1, b2 = L.basis
    assert b1 * c[0] + b2 * c[1] == vec(2, 8)
    assert c == (2, 3)
    assert coords(ZZ2, vec(0, 0)) == (0, 0)
    assert coords(hnf([vec(2, 2)]), vec(1, 1)) is None
    assert coords(hnf([vec(2, 2)]), vec(-4, -4)) == (-2, 0)


def test_is_primitive_examples():
    assert not is_primitive_in(ZZ2, vec(2, 2))
    assert is_primitive_in(ZZ2, vec(1, 1))
    assert not is_primitive_in(HALF_Z_Z, vec(1, 2))
    with pytest.raises(NotInLattice):
        is_primitive_in(ZZ2, vec(F(1, 2), 0))
    with pytest.raises(ZeroVector):
        is_primitive_in(ZZ2, vec(0, 0))


def test_minimal_scale_examples():
    assert minimal_scale(hnf([vec(-6, 6), vec(2, 2)]), vec(2, -4)) == 2
    assert minimal_scale(hnf([vec(2, -4), vec(-1, -2)]), vec(-6, 6)) == F(4, 3)
    assert minimal_scale(ZZ2, vec(1, 0)) == 1
    assert minimal_scale(hnf([vec(1, 1)]), vec(1, 0)) is None
    with pytest.raises(ZeroVector):
        minimal_scale(ZZ2, vec(0, 0))


def test_torsion_degree_examples():
    assert torsion_degree(ZZ2, vec(2, 2)) == 2
    assert torsion_degree(ZZ2, vec(1, 1)) == 1
    assert torsion_degree(HALF_Z_Z, vec(1, 2)) == 2


def test_parallel_ratio_examples():
    assert parallel_ratio(vec(1, 0), vec(2, 0)) == 2
    assert parallel_ratio(vec(1, 1), vec(1, 1)) == 1
    assert parallel_ratio(vec(1, 0), vec(1, 1)) is None
    assert parallel_ratio(vec(0, 2), vec(0, -1)) == F(-1, 2)
    with pytest.raises(ZeroVector):
        parallel_ratio(vec(0, 0), vec(1, 0))


def test_intersection_number_examples():
    assert intersection_number(vec(0, 1), vec(2 ** 5, 1)) == 32
    assert intersection_number(vec(1, 0), vec(0, 1)) == 1
    assert intersection_number(vec(1, 1), vec(2, 2)) == 0


def _coset_count(sub_basis, box):
    """Number of classes of [0,box)^2 modulo the integer lattice sub_basis."""
    L = hnf([vec(*b) for b in sub_basis])
    reps = []
    for p in product(range(box), repeat=2):
        if not any(coords(L, vec(p[0] - r[0], p[1] - r[1])) is not None for r in reps):
            reps.append(p)
    return len(reps)


def test_smith_quotient_examples():
    assert smith_quotient(ZZ2, hnf([vec(3, 0), vec(0, 3)])) == (3, 3)
    assert smith_quotient(ZZ2, hnf([vec(2, 2), vec(0, 4)])) == (2, 4)
    assert _coset_count([(2, 2), (0, 4)], 8) == 8
    assert smith_quotient(ZZ2, hnf([vec(1, 0)])) == (1, 0)
    with pytest.raises(NotSublattice):
        smith_quotient(ZZ2, HALF_Z_Z)


def test_smith_classes_separate_cosets():
    sub = hnf([vec(2, 2), vec(0, 4)])
    factors, classify = smith_classes(ZZ2, sub)
    classes = {classify(vec(x, y)) for x in range(8) for y in range(8)}
    assert factors == (2, 4) and len(classes) == 8
    for x, y in product(range(-3, 4), repeat=2):
        same = coords(sub, vec(x, y)) is not None
        assert (classify(vec(x, y)) == (0, 0)) == same


def test_complement_gives_oriented_basis():
    assert complement(ZZ2, vec(0, 1)) == vec(1, 0)
    L = hnf([vec(F(1, 2), 0), vec(0, 1)])
    w = vec(F(1, 2), 1)
    c = complement(L, w)
    assert det(c, w) == L.covolume
    with pytest.raises(NotInLattice):
        complement(ZZ2, vec(2, 0))


def test_rat_strings():
    assert rat_str(F(-4)) == "-4"
    assert rat_str(F(1, -2)) == "-1/2"
    assert rat("3/6") == F(1, 2)


# ------------------------------------------------------------ properties

small = st.integers(-8, 8)
pairs = st.tuples(small, small)
nonzero_pairs = pairs.filter(lambda p: p != (0, 0))
lattice_gens = st.lists(nonzero_pairs, min_size=1, max_size=4)
rank2_gens = st.lists(nonzero_pairs, min_size=2, max_size=4).filter(
    lambda g: any(a[0] * b[1] - a[1] * b[0] for a in g for b in g))
denoms = st.sampled_from([1, 1, 2, 3, 4])


def _vecs(g, d=1):
    return [vec(F(x, d), F(y, d)) for x, y in g]


@settings(max_examples=1000)
@given(lattice_gens, denoms, st.randoms(use_true_random=False))
def test_hnf_idempotent_and_order_free(gens, d, rnd):
    L = hnf(_vecs(gens, d))
    assert hnf(L.basis) == L
    shuffled = list(gens)
    rnd.shuffle(shuffled)
    assert hnf(_vecs(shuffled, d)) == L
    if L.rank == 2:
        (a1, a2), (z, a3) = L.basis
        assert a1 > 0 and a3 > 0 and z == 0 and 0 <= a2 < a3
    elif L.rank == 1:
        b = L.basis[0]
        assert (b.x > 0) or (b.x == 0 and b.y > 0)
    for g in _vecs(gens, d):
        assert coords(L, g) is not None


@settings(max_examples=1000)
@given(rank2_gens, pairs)
def test_coords_match_brute_force(gens, v):
    L = hnf(_vecs(gens))
    c = coords(L, vec(*v))
    # canonical bases are (a1,a2),(0,a3) with 0 <= a2 < a3, so |c1| <= |v.x|
    # and |c2| <= |v.y| + |c1| < 17: radius 17 covers every solution
    brute = combos([tuple(b) for b in L.basis], v, 17)
    assert (c is not None) == bool(brute)
    if c is not None:
        assert brute == [c]
    if member(gens, v, 2):
        assert c is not None


@settings(max_examples=1000)
@given(rank2_gens, nonzero_pairs)
def test_is_primitive_matches_minor_oracle(gens, v):
    L = hnf(_vecs(gens))
    x = vec(*v)
    if coords(L, x) is None:
        assert not primitive_in_span(gens, v)
        with pytest.raises(NotInLattice):
            is_primitive_in(L, x)
        return
    assert is_primitive_in(L, x) == primitive_in_span(gens, v)
    # not primitive iff some proper fraction x/d still lies in L
    proper = any(coords(L, x / d) is not None for d in range(2, 17))
    assert is_primitive_in(L, x) == (not proper)


@settings(max_examples=1000)
@given(rank2_gens, nonzero_pairs, st.sampled_from([F(1, 3), F(1, 2), F(2), F(5), F(-7, 4)]))
def test_primitivity_scaling_equivariance(gens, v, alpha):
    L = hnf(_vecs(gens))
    x = vec(*v)
    if coords(L, x) is None:
        return
    assert is_primitive_in(L.scaled(alpha), x * alpha) == is_primitive_in(L, x)


@settings(max_examples=1000)
@given(rank2_gens, nonzero_pairs, denoms)
def test_minimal_scale_and_torsion_degree(gens, v, d):
    L = hnf(_vecs(gens))
    u = vec(F(v[0], d), F(v[1], d))
    t = minimal_scale(L, u)
    assert t > 0 and coords(L, u * t) is not None
    for p in (2, 3, 5, 7):
        assert coords(L, u * (t / p)) is None
    if coords(L, u) is not None:
        assert torsion_degree(L, u) * t == 1


@settings(max_examples=300)
@given(rank2_gens, st.integers(1, 12))
def test_smith_of_scaled_lattice(gens, n):
    L = hnf(_vecs(gens))
    assert smith_quotient(L, L.scaled(n)) == (n, n)


@settings(max_examples=300)
@given(rank2_gens, rank2_gens)
def test_smith_order_is_index(sup_gens, sub_gens):
    sup = hnf(_vecs(sup_gens))
    b1, b2 = sup.basis
    # sub generated by integer combinations of sup's basis
    sub = hnf([b1 * x + b2 * y for x, y in sub_gens])
    d1, d2 = smith_quotient(sup, sub)
    assert d2 % d1 == 0
    assert d1 * d2 == sub.covolume / sup.covolume


@settings(max_examples=500)
@given(rank2_gens, nonzero_pairs)
def test_complement_property(gens, v):
    L = hnf(_vecs(gens))
    x = vec(*v)
    c = coords(L, x)
    if c is None or gcd(*c) != 1:
        return
    w = complement(L, x)
    assert det(w, x) == L.covolume
    assert hnf([w, x]) == L
