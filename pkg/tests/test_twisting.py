import itertools

import numpy as np
import pytest

from bicross.double import build_group_double
from bicross.errors import ObstructionVacuous
from bicross.sparse import Sparse
from bicross.twisting import (closed_form_coboundary_system, coboundary_obstruction_check, coboundary_system,
                              cocycle_F, cocycle_F_inverse, psi_inverse_images, psi_iso, psi_iso_images,
                              quasitriangular_transport_check, twisted_coproduct_check, verify_2cocycle,
                              verify_psi_iso)


def test_F_support_size(z6z6):
    assert cocycle_F(z6z6).nnz == 36 * 6 * 6
    assert cocycle_F_inverse(z6z6).nnz == 36 * 6 * 6


def test_F_is_one_when_M_trivial(s3_pairs):
    for mp in s3_pairs:
        if mp.nM == 1:
            dx, _ = build_group_double(mp.X)
            assert cocycle_F(mp).data == dx.one(2)


def test_F_klein_transcription(klein_pair):
    # abelian X with trivial actions: F = Σ δ_x⊗t ⊗ δ_{t+v}⊗e, t = t^{-1}
    mp = klein_pair
    x = mp.X
    n = x.order
    coords = {}
    for g, t, v in itertools.product(range(n), mp.M.elements, mp.G.elements):
        coords[(g * n + t, x.mul(t, v) * n)] = 1
    assert cocycle_F(mp).data == Sparse.from_dict((n * n, n * n), coords)


def test_cocycle_identity(s3_pairs, klein_pair, z6z6):
    for mp in s3_pairs + [klein_pair, z6z6]:
        dx, _ = build_group_double(mp.X)
        rep = verify_2cocycle(cocycle_F(mp), dx, cocycle_F_inverse(mp))
        assert rep.passed, rep.summary()


def test_inverse_found_without_closed_form(s3_z3z2):
    dx, _ = build_group_double(s3_z3z2.X)
    assert verify_2cocycle(cocycle_F(s3_z3z2), dx).passed


def test_deleted_summand_fails(s3_z3z2):
    dx, _ = build_group_double(s3_z3z2.X)
    f = cocycle_F(s3_z3z2).data
    keep = np.arange(f.nnz) != 5
    broken = Sparse(f.shape, f.idx[keep], f.num[keep], f.den)
    rep = verify_2cocycle(broken, dx, cocycle_F_inverse(s3_z3z2))
    failed = {c.name for c in rep.failures()}
    assert "(1⊗F)(id⊗Δ)F = (F⊗1)(Δ⊗id)F" in failed
    assert "F F^-1 = F^-1 F = 1⊗1" in failed
    assert rep["(1⊗F)(id⊗Δ)F = (F⊗1)(Δ⊗id)F"].counterexample is not None


def test_psi_iso_all_s3(s3_pairs, klein_pair):
    for mp in s3_pairs + [klein_pair]:
        rep = verify_psi_iso(mp)
        assert rep.passed, rep.summary()


def test_psi_iso_z6z6(z6z6):
    assert verify_psi_iso(z6z6).passed


def test_psi_fixes_the_identity_basis_element(z6z6):
    # δ_e⊗e ⊗ e⊗δ_e maps to δ_e⊗e
    assert psi_iso_images(z6z6)[0] == 0


def test_psi_iso_is_bijective(s3_z3z2):
    fwd, back = psi_iso(s3_z3z2)
    assert sorted(fwd.permutation_images()) == list(range(36))
    assert (back @ fwd).is_identity()


def test_literal_inverse_breaks_on_nonabelian_x(s3_pairs, klein_pair):
    fails = 0
    for mp in s3_pairs:
        if mp.nG > 1 and mp.nM > 1:
            fwd = psi_iso_images(mp)
            lit = psi_inverse_images(mp, literal=True)
            fails += int(not np.array_equal(lit[fwd], np.arange(len(fwd))))
    assert fails > 0
    fwd = psi_iso_images(klein_pair)
    assert np.array_equal(psi_inverse_images(klein_pair, literal=True)[fwd], np.arange(len(fwd)))


def test_twisted_coproduct(s3_pairs):
    for mp in s3_pairs:
        rep = twisted_coproduct_check(mp)
        assert rep.passed, rep.summary()


def test_quasitriangular_transport(s3_pairs, klein_pair):
    for mp in s3_pairs + [klein_pair]:
        rep = quasitriangular_transport_check(mp)
        assert rep.passed, rep.summary()


def test_coboundary_tables_agree(s3_z3z2, klein_pair):
    for mp in (s3_z3z2, klein_pair):
        assert np.array_equal(coboundary_system(mp), closed_form_coboundary_system(mp))


def test_not_a_coboundary_klein(klein_pair):
    rep = coboundary_obstruction_check(klein_pair)
    assert rep.passed, rep.summary()
    assert "65536" in rep["every admissible support lies in one block {δ_u⊗y0 : u∈G}"].detail


def test_not_a_coboundary_s3(s3_z3z2, s3_z2z3):
    for mp in (s3_z3z2, s3_z2z3):
        rep = coboundary_obstruction_check(mp)
        assert rep.passed, rep.summary()


def test_coboundary_vacuous(s3_pairs):
    trivial = [mp for mp in s3_pairs if mp.nG == 1 or mp.nM == 1]
    assert trivial
    for mp in trivial:
        with pytest.raises(ObstructionVacuous):
            coboundary_obstruction_check(mp)
