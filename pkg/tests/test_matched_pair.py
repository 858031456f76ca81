import itertools

import numpy as np
import pytest

from bicross.errors import FactorizationError
from bicross.groups import automorphism_group, builtin_group, dihedral_group, find_isomorphisms
from bicross.matched_pair import (MatchedPair, cycles_conjugation, derive_matched_pair, double_cross_product,
                                  exact_factorizations, find_factor_preserving_or_reversing,
                                  find_factor_reversing, is_factor_reversing, pair_inverse,
                                  select_factorization, verify_matched_pair)


def _brute_subgroups(x):
    """Every subgroup generated by at most two elements; enough for the groups used here."""
    out = set()
    for a, b in itertools.product(range(x.order), repeat=2):
        seen, frontier = {0}, [0]
        while frontier:
            frontier = [y for y in {x.mul(f, g) for f in frontier for g in (a, b)} if y not in seen]
            seen.update(frontier)
        out.add(frozenset(seen))
    return out


def _brute_factorization_count(x):
    subs = _brute_subgroups(x)
    return sum(1 for g in subs for m in subs
               if len({x.mul(a, b) for a in g for b in m}) == x.order and len(g) * len(m) == x.order)


@pytest.mark.parametrize("spec,count", [("sym:3", 8), ("cyclic:6", 4), ("dihedral:4", 18), ("cyclic:1", 1),
                                        ("cyclic:12", 4), ("product:cyclic:2,cyclic:2", 8)])
def test_factorization_counts(spec, count):
    x = builtin_group(spec)
    assert len(exact_factorizations(x)) == count
    assert _brute_factorization_count(x) == count


@pytest.mark.parametrize("spec", ["sym:3", "dihedral:4", "dihedral:6", "cyclic:12"])
def test_all_factorizations_are_matched_pairs(spec):
    x = builtin_group(spec)
    for i in range(len(exact_factorizations(x))):
        rep = verify_matched_pair(select_factorization(x, i))
        assert rep.passed, rep.summary()


def test_z6z6_laws(z6z6):
    assert verify_matched_pair(z6z6).passed
    assert z6z6.nG == z6z6.nM == 6


def test_z6z6_actions_are_sign_changes(z6z6):
    # even elements act trivially, odd ones negate, in additive Z6 labels
    for s, u in itertools.product(range(6), repeat=2):
        assert z6z6.lt(s, u) == (u if s % 2 == 0 else -u % 6)
        assert z6z6.rt(s, u) == (s if u % 2 == 0 else -s % 6)


def test_corrupted_action_is_caught(s3_z3z2):
    bad = s3_z3z2.act_left.copy()
    bad[1, 1], bad[1, 2] = bad[1, 2], bad[1, 1]
    mp = MatchedPair(s3_z3z2.X, s3_z3z2.G, s3_z3z2.M, bad, s3_z3z2.act_right)
    rep = verify_matched_pair(mp)
    assert not rep.passed
    assert rep.failures()[0].counterexample is not None


def test_double_cross_product_is_isomorphic(s3_z2z3, z6z6):
    for mp in (s3_z2z3, z6z6):
        dcp, iso = double_cross_product(mp)
        assert dcp.check_invariants()
        assert iso.is_valid()


def test_pair_inverse(z6z6):
    dcp, _ = double_cross_product(z6z6)
    n = z6z6.nM
    for u, s in itertools.product(range(6), repeat=2):
        v, t = pair_inverse(z6z6, u, s)
        assert dcp.mul(u * n + s, v * n + t) == 0


def test_not_a_factorization():
    x = builtin_group("sym:3")
    subs = exact_factorizations(x)[0]
    with pytest.raises(FactorizationError):
        derive_matched_pair(x, subs[0], subs[0])


def test_selector_errors():
    x = builtin_group("sym:3")
    with pytest.raises(FactorizationError):
        select_factorization(x, 99)
    with pytest.raises(FactorizationError):
        select_factorization(x, "z6z6")
    with pytest.raises(FactorizationError):
        select_factorization(x, "nonsense")


def test_z6z6_alias_matches_builtin_product():
    mp = select_factorization(builtin_group("product:dihedral:3,dihedral:3"), "z6z6")
    assert mp.nG == mp.nM == 6
    assert mp.G.is_cyclic() and mp.M.is_cyclic()
    assert verify_matched_pair(mp).passed


def test_self_duality_counts(z6z6):
    rev = find_factor_reversing(z6z6)
    either = find_factor_preserving_or_reversing(z6z6)
    assert len(rev) == 4 and len(either) == 8
    aut = automorphism_group(either)
    assert find_isomorphisms(aut, dihedral_group(4))
    assert not find_isomorphisms(aut, builtin_group("product:cyclic:2,cyclic:4"))
    assert not find_isomorphisms(aut, builtin_group("product:cyclic:2,product:cyclic:2,cyclic:2"))


def test_named_conjugations_reverse_factors(z6z6):
    for cyc in ("(1425)(36)", "(14)(25)(36)"):
        theta = cycles_conjugation(z6z6.X, cyc)
        assert theta.is_valid()
        assert is_factor_reversing(z6z6, theta)


def test_order_mismatch_gives_no_reversing(s3_z3z2):
    assert find_factor_reversing(s3_z3z2) == []
    assert find_factor_reversing(s3_z3z2, order_shortcut=False) == []


def test_trivial_group():
    mp = select_factorization(builtin_group("cyclic:1"), 0)
    assert verify_matched_pair(mp).passed
    assert np.array_equal(mp.act_left, [[0]])
