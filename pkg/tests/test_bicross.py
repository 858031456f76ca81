import itertools

import numpy as np
import pytest

from bicross.bicrossproduct import (basis_selfduality_converse_check, build_H, build_Hdual, duality_pairing,
                                    theta_tilde, verify_antipode_pairing, verify_pairing, verify_theta_tilde)
from bicross.errors import NotFactorReversing
from bicross.groups import GroupIsomorphism
from bicross.hopf import dual_hopf, is_cocommutative, is_commutative, verify_hopf_axioms, verify_star
from bicross.matched_pair import find_factor_reversing
from bicross.sparse import Sparse


def _looped_H(mp):
    """Structure tensors of kM▷◀k(G) transcribed one basis tuple at a time."""
    nG, nM = mp.nG, mp.nM
    d = nG * nM
    ix = lambda s, u: s * nG + u  # noqa: E731
    prod, cop = {}, {}
    for s, u, t, v in itertools.product(range(nM), range(nG), range(nM), range(nG)):
        if u == mp.lt(t, v):
            prod[(ix(s, u), ix(t, v), ix(mp.mmul(s, t), v))] = 1
    for s, x, y in itertools.product(range(nM), range(nG), range(nG)):
        cop[(ix(s, mp.gmul(x, y)), ix(s, x), ix(mp.rt(s, x), y))] = 1
    anti = {}
    for s, u in itertools.product(range(nM), range(nG)):
        anti[(ix(mp.minv(mp.rt(s, u)), mp.ginv(mp.lt(s, u))), ix(s, u))] = 1
    return (Sparse.from_dict((d, d, d), prod), Sparse.from_dict((d, d, d), cop), Sparse.from_dict((d, d), anti))


def test_H_matches_looped_transcription(s3_pairs, z6z6):
    for mp in s3_pairs + [z6z6]:
        h = build_H(mp)
        prod, cop, anti = _looped_H(mp)
        assert h.product == prod and h.coproduct == cop and h.antipode == anti


def test_Hdual_is_dual_of_H(s3_pairs, z6z6):
    for mp in s3_pairs + [z6z6]:
        assert build_Hdual(mp).same_structure(dual_hopf(build_H(mp)))


def test_axioms_on_s3(s3_pairs):
    for mp in s3_pairs:
        for h in (build_H(mp), build_Hdual(mp)):
            assert verify_hopf_axioms(h, involutive=True).passed
            assert verify_star(h).passed
        assert verify_antipode_pairing(mp).passed


def test_trivial_factor_gives_group_algebras(s3_pairs):
    # M trivial: H = k(G), commutative; G trivial: H = kM, cocommutative
    for mp in s3_pairs:
        h = build_H(mp)
        if mp.nM == 1:
            assert is_commutative(h)
        if mp.nG == 1:
            assert is_cocommutative(h)


def test_z6z6_is_neither_commutative_nor_cocommutative(z6z6):
    h = build_H(z6z6)
    assert not is_commutative(h) and not is_cocommutative(h)


def test_theta_tilde_checks(z6z6):
    h, hd = build_H(z6z6), build_Hdual(z6z6)
    thetas = find_factor_reversing(z6z6)
    assert len(thetas) == 4
    for th in thetas:
        rep = verify_theta_tilde(z6z6, th, h, hd)
        assert rep.passed, rep.summary()
        assert verify_pairing(h, duality_pairing(z6z6, th)).passed
        back, conv = basis_selfduality_converse_check(z6z6, theta_tilde(z6z6, th))
        assert conv.passed and back == th


def test_non_reversing_theta_rejected(z6z6):
    ident = GroupIsomorphism(z6z6.X, z6z6.X, list(range(36)))
    with pytest.raises(NotFactorReversing):
        theta_tilde(z6z6, ident)


def test_converse_rejects_non_hopf_bijection(z6z6):
    th = find_factor_reversing(z6z6)[0]
    images = theta_tilde(z6z6, th).permutation_images().copy()
    images[[1, 2]] = images[[2, 1]]
    back, rep = basis_selfduality_converse_check(z6z6, images)
    assert back is None and not rep.passed


def test_pairing_is_nondegenerate(z6z6):
    th = find_factor_reversing(z6z6)[0]
    b = duality_pairing(z6z6, th)
    dense = np.zeros(b.shape, dtype=int)
    for (i, j), v in b.entries():
        dense[i, j] = int(v)
    assert np.linalg.matrix_rank(dense) == 36
