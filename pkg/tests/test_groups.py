import itertools
import json

import pytest

from bicross.errors import OrderCapExceeded, SpecError
from bicross.groups import (FiniteGroup, automorphism_group, builtin_group, conjugation, cyclic_group,
                            dihedral_group, find_isomorphisms, group_from_json, group_to_json, load_group,
                            perm_from_cycles, subgroups_of, symmetric_group)


@pytest.mark.parametrize("spec,order", [("cyclic:1", 1), ("cyclic:12", 12), ("sym:3", 6), ("sym:4", 24),
                                        ("dihedral:1", 2), ("dihedral:6", 12),
                                        ("product:dihedral:3,dihedral:3", 36),
                                        ("product:cyclic:2,product:cyclic:2,cyclic:3", 12)])
def test_builtin_orders_and_laws(spec, order):
    g = builtin_group(spec)
    assert g.order == order
    assert g.check_invariants()


def test_associativity_by_brute_force():
    g = dihedral_group(4)
    for a, b, c in itertools.product(range(g.order), repeat=3):
        assert g.mul(g.mul(a, b), c) == g.mul(a, g.mul(b, c))


def test_abelian_flags():
    assert cyclic_group(7).is_abelian()
    assert not symmetric_group(3).is_abelian()
    assert builtin_group("product:cyclic:2,cyclic:2").is_abelian()


@pytest.mark.parametrize("bad", ["cyclic:0", "cyclic", "product:cyclic:2", "foo:3", "cyclic:3x"])
def test_bad_specs(bad):
    with pytest.raises(SpecError):
        builtin_group(bad)


def test_large_symmetric_refused():
    with pytest.raises(OrderCapExceeded):
        builtin_group("sym:7")


def test_subgroup_counts():
    # S3: trivial, three of order 2, one of order 3, whole group
    subs = subgroups_of(symmetric_group(3))
    assert sorted(s.order for s in subs) == [1, 2, 2, 2, 3, 6]
    # Z12 has one subgroup per divisor
    assert len(subgroups_of(cyclic_group(12))) == 6


def test_automorphism_counts():
    # |Aut(Z_n)| = φ(n), |Aut(S3)| = 6, |Aut(D4)| = 8
    assert len(find_isomorphisms(cyclic_group(12), cyclic_group(12))) == 4
    assert len(find_isomorphisms(symmetric_group(3), symmetric_group(3))) == 6
    assert len(find_isomorphisms(dihedral_group(4), dihedral_group(4))) == 8
    assert find_isomorphisms(cyclic_group(4), builtin_group("product:cyclic:2,cyclic:2")) == []


def test_isomorphisms_are_valid():
    for iso in find_isomorphisms(dihedral_group(3), symmetric_group(3)):
        assert iso.is_valid()
        assert iso.then(iso.inverse()).map == tuple(range(6))


def test_inner_automorphism_group_of_s3():
    s3 = symmetric_group(3)
    inner = {conjugation(s3, y) for y in range(6)}
    aut = automorphism_group(list(inner))
    assert aut.order == 6 and not aut.is_abelian()


def test_perm_from_cycles():
    assert perm_from_cycles("(123)", 3) == (1, 2, 0)
    assert perm_from_cycles("(12)(34)", 4) == (1, 0, 3, 2)


def test_json_round_trip(tmp_path):
    g = dihedral_group(5)
    path = tmp_path / "g.json"
    path.write_text(json.dumps(group_to_json(g)))
    back = load_group(str(path))
    assert back.cayley == g.cayley


def test_json_from_generators():
    g = group_from_json({"degree": 4, "permutation_generators": [[1, 2, 3, 0], [3, 2, 1, 0]]})
    assert g.order == 8


def test_json_rejects_non_associative():
    # a Latin square with identity 0 that is not a group table
    table = [[0, 1, 2, 3, 4], [1, 0, 3, 4, 2], [2, 4, 0, 1, 3], [3, 2, 4, 0, 1], [4, 3, 1, 2, 0]]
    with pytest.raises(SpecError):
        group_from_json({"cayley": table})


def test_json_rejects_wrong_order():
    with pytest.raises(SpecError):
        group_from_json({"cayley": cyclic_group(3).cayley, "order": 4})


def test_constructor_rejects_bad_identity():
    with pytest.raises(ValueError):
        FiniteGroup([[1, 0], [0, 1]])
