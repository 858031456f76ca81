import itertools
import json

import numpy as np
import pytest

from bicross.errors import ModuleUnverified, NotDecomposable
from bicross.linalg import BasisSpace, LinearMap, cycle_structure, minimal_polynomial
from bicross.representations import (BicrossedBimodule, braiding, chi_to_DX, double_action, dx_braiding,
                                     flip_map, induced_shift, module_from_double_action, schrodinger_module,
                                     tensor_bimodule, trivial_module, verify_bicrossed_bimodule,
                                     verify_braiding_naturality, verify_c_map, verify_chi, verify_schrodinger,
                                     verify_schrodinger_braiding, ybe_check)


@pytest.fixture(scope="module")
def z6z6_psi(z6z6):
    w = schrodinger_module(z6z6)
    assert verify_bicrossed_bimodule(w).passed
    return braiding(w, w)


def _cyclotomic(n):
    """Integer coefficients of the n-th cyclotomic polynomial, highest degree first."""
    p = np.zeros(n + 1, dtype=np.int64)
    p[0], p[-1] = 1, -1
    for d in range(1, n):
        if n % d == 0:
            p, r = np.polydiv(p, _cyclotomic(d))
            assert not np.any(np.round(r))
            p = np.round(p).astype(np.int64)
    return p


def _perm_minpoly_oracle(images):
    """Π Φ_d over every d dividing some cycle length, lowest degree first."""
    seen, lengths = set(), set()
    for start in range(len(images)):
        k, j = 0, start
        while j not in seen:
            seen.add(j)
            j = int(images[j])
            k += 1
        if k:
            lengths.add(k)
    divisors = {d for m in lengths for d in range(1, m + 1) if m % d == 0}
    out = np.array([1], dtype=np.int64)
    for d in sorted(divisors):
        out = np.polymul(out, _cyclotomic(d))
    return [int(c) for c in out[::-1]]


def test_schrodinger_module_all_routes(s3_pairs, z6z6):
    for mp in s3_pairs + [z6z6]:
        w = schrodinger_module(mp)
        rep = verify_bicrossed_bimodule(w)
        assert rep.passed, rep.summary()
        assert w.verified
        assert verify_schrodinger(mp, w).passed
        assert verify_schrodinger_braiding(mp, w).passed


def test_corrupted_grading_is_caught(s3_z2z3):
    w = schrodinger_module(s3_z2z3)
    bad = BicrossedBimodule(w.mp, w.space, w.gradeG, w.gradeM.copy(), w.actM, w.actG)
    bad.gradeM[0] = (bad.gradeM[0] + 1) % w.mp.nM
    rep = verify_bicrossed_bimodule(bad)
    assert not rep.passed and not bad.verified
    failed = {c.name for c in rep.failures()}
    assert any(n.startswith("(ii)") or n.startswith("(iii)") for n in failed)
    assert "h▷(w◁a) = Σ((h1◁a1)▷w)◁(h2▷a2)" in failed or "(XY)▷w = X▷(Y▷w)" in failed


def test_out_of_range_grades(s3_z2z3):
    w = schrodinger_module(s3_z2z3)
    bad = BicrossedBimodule(w.mp, w.space, w.gradeG + 10, w.gradeM, w.actM, w.actG)
    rep = verify_bicrossed_bimodule(bad)
    assert not rep["grades in range"].passed


def test_double_action_round_trip(s3_pairs, z6z6):
    for mp in s3_pairs + [z6z6]:
        w = schrodinger_module(mp)
        assert module_from_double_action(mp, double_action(w)).same_as(w)


def test_round_trip_from_linear_maps(s3_z3z2):
    w = schrodinger_module(s3_z3z2)
    act = double_action(w)
    n, d = act.shape[0], w.dim
    entries_of = {}
    for k, v in act.entries():
        entries_of.setdefault(int(k[0]), []).append(((int(k[2]), int(k[1])), v))
    maps = []
    for x in range(n):
        maps.append(LinearMap.from_entries(BasisSpace.opaque(d), BasisSpace.opaque(d), entries_of.get(x, [])))
    assert module_from_double_action(s3_z3z2, maps).same_as(w)


def test_not_decomposable(s3_z3z2):
    d = 2
    ident = LinearMap.identity(BasisSpace.opaque(d))
    n = (s3_z3z2.nG * s3_z3z2.nM) ** 2
    with pytest.raises(NotDecomposable):
        module_from_double_action(s3_z3z2, [ident] * n)


def test_trivial_module_and_tensor(s3_z3z2):
    one = trivial_module(s3_z3z2)
    assert verify_bicrossed_bimodule(one).passed
    w = schrodinger_module(s3_z3z2)
    verify_bicrossed_bimodule(w)
    for t in (tensor_bimodule(w, one), tensor_bimodule(one, w), tensor_bimodule(w, w)):
        assert verify_bicrossed_bimodule(t).passed


def test_json_round_trip(s3_z3z2):
    w = schrodinger_module(s3_z3z2)
    back = BicrossedBimodule.from_json(s3_z3z2, json.loads(json.dumps(w.to_json())))
    assert back.same_as(w)


def test_braiding_needs_verified_module(s3_z3z2):
    w = schrodinger_module(s3_z3z2)
    with pytest.raises(ModuleUnverified):
        braiding(w, w)
    braiding(w, w, allow_unverified=True)


def test_z6z6_braiding_parity_table(z6z6_psi):
    images = z6z6_psi.permutation_images()
    n, d = 6, 36
    for s, u, t, v in itertools.product(range(n), repeat=4):
        v_out = v if s % 2 == 0 else -v % n
        u_out = u if t % 2 == 0 else (u + 2 * v) % n
        assert images[(s * n + u) * d + t * n + v] == (t * n + v_out) * d + s * n + u_out


def test_z6z6_ybe(z6z6_psi):
    assert ybe_check(z6z6_psi, 36).passed


def test_flip_is_yang_baxter_and_random_permutation_is_not():
    assert ybe_check(flip_map(4)).passed
    rng = np.random.default_rng(7)
    space = BasisSpace.opaque(16)
    psi = LinearMap.from_images(space, space, rng.permutation(16))
    assert not ybe_check(psi, 4).passed


def test_z6z6_cycle_counts(z6z6_psi):
    cycles = cycle_structure(z6z6_psi)
    counts = {k: cycles.count(k) for k in sorted(set(cycles))}
    assert counts == {1: 36, 2: 306, 3: 12, 4: 108, 6: 30}
    assert sum(k * c for k, c in counts.items()) == 1296


def test_z6z6_minimal_polynomial_against_cyclotomic_oracle(z6z6_psi):
    oracle = _perm_minpoly_oracle(z6z6_psi.permutation_images())
    assert oracle == [-1, 0, -1, 0, 0, 0, 1, 0, 1]
    assert minimal_polynomial(z6z6_psi).int_coeffs() == oracle
    assert minimal_polynomial(z6z6_psi, "krylov").int_coeffs() == oracle


def test_z6z6_block_shifts(z6z6, z6z6_psi):
    even, odd = [0, 2, 4], [1, 3, 5]
    shift, order = induced_shift(z6z6_psi, z6z6, odd, even)
    assert order == 4 and all(shift[(u, v)] == (-v % 6, u) for u in range(6) for v in range(6))
    shift, order = induced_shift(z6z6_psi, z6z6, even, odd)
    assert order == 8 and all(shift[(u, v)] == (v, (u + 2 * v) % 6) for u in range(6) for v in range(6))
    shift, order = induced_shift(z6z6_psi, z6z6, odd, odd)
    assert order == 6 and all(shift[(u, v)] == (-v % 6, (u + 2 * v) % 6) for u in range(6) for v in range(6))
    # Ψ lists t's label first, so even/even pairs come back swapped
    shift, order = induced_shift(z6z6_psi, z6z6, even, even)
    assert order == 2 and all(shift[(u, v)] == (v, u) for u in range(6) for v in range(6))


def test_chi_c_and_naturality(s3_pairs):
    for mp in s3_pairs:
        w = schrodinger_module(mp)
        verify_bicrossed_bimodule(w)
        assert verify_chi(w).passed
        assert verify_c_map(w, w).passed
        assert verify_braiding_naturality(w, w).passed


def test_naturality_with_distinct_modules(s3_z2z3):
    w = schrodinger_module(s3_z2z3)
    verify_bicrossed_bimodule(w)
    ww = tensor_bimodule(w, w)
    verify_bicrossed_bimodule(ww)
    assert verify_c_map(w, ww).passed
    assert verify_braiding_naturality(w, ww).passed
    assert verify_braiding_naturality(ww, w).passed


def test_z6z6_chi_and_naturality(z6z6):
    w = schrodinger_module(z6z6)
    verify_bicrossed_bimodule(w)
    assert verify_chi(w).passed
    assert verify_c_map(w, w).passed
    assert verify_braiding_naturality(w, w).passed


def test_braiding_forms_are_inverse(s3_z3z2):
    w = schrodinger_module(s3_z3z2)
    verify_bicrossed_bimodule(w)
    v = chi_to_DX(w)
    m = dx_braiding(v, v)
    r = dx_braiding(v, v, form="R")
    assert (r @ m).is_identity()
