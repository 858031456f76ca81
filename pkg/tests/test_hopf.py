import json

import numpy as np
import pytest

from bicross.errors import MissingStar
from bicross.groups import builtin_group, cyclic_group, symmetric_group
from bicross.hopf import (HopfAlgebra, dual_hopf, function_hopf, group_hopf, is_cocommutative, is_commutative,
                          noncommuting_pair, verify_hopf_axioms, verify_hopf_morphism, verify_star)
from bicross.sparse import Sparse, contract


@pytest.mark.parametrize("spec", ["cyclic:1", "cyclic:5", "sym:3", "dihedral:4"])
def test_group_and_function_algebras(spec):
    x = builtin_group(spec)
    kx, fx = group_hopf(x), function_hopf(x)
    assert verify_hopf_axioms(kx, involutive=True).passed
    assert verify_hopf_axioms(fx, involutive=True).passed
    assert verify_star(kx).passed and verify_star(fx).passed
    assert is_cocommutative(kx) and is_commutative(fx)
    assert is_commutative(kx) == x.is_abelian()


def test_dual_of_group_algebra_is_function_algebra():
    x = symmetric_group(3)
    assert dual_hopf(group_hopf(x)).same_structure(function_hopf(x))


def test_noncommuting_pair():
    kx = group_hopf(symmetric_group(3))
    i, j = noncommuting_pair(kx)
    x = symmetric_group(3)
    assert x.mul(i, j) != x.mul(j, i)
    assert noncommuting_pair(group_hopf(cyclic_group(4))) is None


def test_corrupted_antipode_fails():
    h = group_hopf(symmetric_group(3))
    bad = HopfAlgebra(h.space, h.product, h.unit, h.coproduct, h.counit, Sparse.identity(h.dim), h.star, "bad")
    rep = verify_hopf_axioms(bad)
    names = {c.name for c in rep.failures()}
    assert "antipode left" in names and "antipode right" in names
    cex = rep["antipode left"].counterexample
    assert cex is not None and "index" in cex


def test_corrupted_product_fails_associativity():
    h = group_hopf(symmetric_group(3))
    p = h.product.to_dict()
    # swap the results of one pair of products
    (k1, _), (k2, _) = [(k, v) for k, v in p.items() if k[:2] in ((1, 2), (1, 3))]
    p.pop(k1), p.pop(k2)
    p[(1, 2, k2[2])] = 1
    p[(1, 3, k1[2])] = 1
    bad = HopfAlgebra(h.space, Sparse.from_dict(h.product.shape, p), h.unit, h.coproduct, h.counit, h.antipode)
    assert not verify_hopf_axioms(bad).passed


def test_missing_star():
    h = group_hopf(cyclic_group(3))
    bare = HopfAlgebra(h.space, h.product, h.unit, h.coproduct, h.counit, h.antipode)
    with pytest.raises(MissingStar):
        verify_star(bare)


def test_json_round_trip():
    h = group_hopf(symmetric_group(3))
    back = HopfAlgebra.from_json(json.loads(json.dumps(h.to_json())))
    assert back.same_structure(h)
    assert back.star == h.star


def test_identity_is_hopf_morphism():
    h = group_hopf(symmetric_group(3))
    assert verify_hopf_morphism(Sparse.identity(h.dim), h, h).passed
    # inversion is an anti-algebra map that also reverses the coproduct, so the
    # plain Hopf-map check must reject it
    inv = np.array([symmetric_group(3).inverse(x) for x in range(6)])
    assert not verify_hopf_morphism(Sparse.permutation(inv), h, h).passed


def test_tensor_power_product_matches_contraction():
    h = group_hopf(symmetric_group(3))
    x = h.coproduct  # batch axis a, then two factors
    got = h.mul(x, x, 2)
    want = contract("aij,bkl,ikp,jlq->abpq", x, x, h.product, h.product)
    assert got == want
