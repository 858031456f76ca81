"""One test per acceptance criterion.  Every test prints a single verdict line
and then asserts it, so a failing criterion stays visible in the log."""

import itertools
import json
import subprocess
import sys
import time

import pytest

from bicross.bicrossproduct import basis_selfduality_converse_check, build_H, build_Hdual, theta_tilde, \
    verify_theta_tilde
from bicross.double import (build_double_bicross, build_group_double, coadjoint_actions, verify_coadjoint_actions,
                            verify_equivariance, verify_psi)
from bicross.groups import automorphism_group, builtin_group, dihedral_group, find_isomorphisms
from bicross.linalg import minimal_polynomial
from bicross.matched_pair import (exact_factorizations, find_factor_preserving_or_reversing,
                                  find_factor_reversing, select_factorization)
from bicross.representations import (braiding, double_action, induced_shift, module_from_double_action,
                                     schrodinger_module, verify_bicrossed_bimodule, verify_braiding_naturality,
                                     verify_c_map, verify_chi, verify_schrodinger, ybe_check)
from bicross.sweep import SWEEP_GROUPS
from bicross.twisting import (cocycle_F, cocycle_F_inverse, coboundary_obstruction_check,
                              quasitriangular_transport_check, twisted_coproduct_check, verify_2cocycle,
                              verify_psi_iso)


def verdict(n: int, ok: bool, detail: str) -> None:
    print(f"acceptance {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, detail


def _check_cli(out_dir, workers):
    start = time.perf_counter()
    proc = subprocess.run([sys.executable, "-m", "bicross", "check", "--workers", str(workers),
                           "--output-dir", str(out_dir)], capture_output=True, text=True)
    elapsed = time.perf_counter() - start
    path = out_dir / "check.json"
    return proc, elapsed, path


@pytest.fixture(scope="module")
def sweep_w1(tmp_path_factory):
    return _check_cli(tmp_path_factory.mktemp("workers1"), 1)


@pytest.fixture(scope="module")
def sweep_results(sweep_w1):
    proc, _, path = sweep_w1
    assert path.exists(), proc.stderr
    return json.loads(path.read_text())["results"]


@pytest.fixture(scope="module")
def z6z6_psi(z6z6):
    start = time.perf_counter()
    w = schrodinger_module(z6z6)
    verify_bicrossed_bimodule(w)
    psi = braiding(w, w)
    return psi, time.perf_counter() - start


def test_criterion_01_z6z6_minimal_polynomial(z6z6_psi):
    psi, built = z6z6_psi
    start = time.perf_counter()
    poly = minimal_polynomial(psi).int_coeffs()
    elapsed = built + time.perf_counter() - start
    expected = [-1, 0, -1, 0, -1, 0, 0, 0, 1, 0, 1, 0, 1]   # λ¹²+λ¹⁰+λ⁸−λ⁴−λ²−1
    ok = poly == expected and elapsed < 5
    verdict(1, ok, f"minimal polynomial coefficients {poly} (degree {len(poly) - 1}); "
                   f"expected {expected} (degree 12); {elapsed:.2f}s")


def test_criterion_02_z6z6_braiding_table(z6z6_psi):
    psi, built = z6z6_psi
    start = time.perf_counter()
    images = psi.permutation_images()
    n, d = 6, 36
    bad = []
    for s, u, t, v in itertools.product(range(n), repeat=4):
        v_out = v if s % 2 == 0 else -v % n
        u_out = u if t % 2 == 0 else (u + 2 * v) % n
        if images[(s * n + u) * d + t * n + v] != (t * n + v_out) * d + s * n + u_out:
            bad.append((s, u, t, v))
    elapsed = built + time.perf_counter() - start
    verdict(2, not bad and elapsed < 5, f"{1296 - len(bad)}/1296 inputs match the four parity cases; "
                                        f"first mismatch {bad[:1]}; {elapsed:.2f}s")


def test_criterion_03_yang_baxter(z6z6_psi):
    psi, _ = z6z6_psi
    start = time.perf_counter()
    rep = ybe_check(psi, 36)
    elapsed = time.perf_counter() - start
    verdict(3, rep.passed and elapsed < 30, f"{rep.summary()} over 46656 basis vectors; {elapsed:.2f}s")


def test_criterion_04_cycle_blocks(z6z6, z6z6_psi):
    psi, _ = z6z6_psi
    even, odd = [0, 2, 4], [1, 3, 5]
    orders = [induced_shift(psi, z6z6, s, t)[1] for s, t in ((odd, even), (even, odd), (odd, odd))]
    verdict(4, orders == [4, 8, 6], f"shift orders (s odd,t even), (s even,t odd), (s odd,t odd) = {orders}")


def test_criterion_05_hopf_axiom_sweep(sweep_w1, sweep_results):
    proc, elapsed, _ = sweep_w1
    groups = sweep_results["groups"]
    assert [g["group"] for g in groups] == SWEEP_GROUPS
    failures = []
    for g in groups:
        if not g["D(X)"]["passed"]:
            failures.append(f"{g['group']} D(X)")
        for r in g["results"]:
            names = {c["name"] for c in r["report"]["checks"]}
            need = {"H: antipode involutive", "H*: antipode involutive"}
            if r["D(H) axioms"] == "direct":
                need.add("D(H): antipode involutive")
            if not need <= names or not r["report"]["passed"]:
                failures.append(f"{g['group']} factorization {r['index']}")
    n_facts = sum(g["factorizations"] for g in groups)
    ok = proc.returncode == 0 and not failures and elapsed < 300
    verdict(5, ok, f"{n_facts} factorizations over {len(groups)} groups, failures {failures[:3]}; "
                   f"CLI exit {proc.returncode}; {elapsed:.1f}s")


def test_criterion_06_double_agreement(sweep_results):
    bad = [(g["group"], r["index"]) for g in sweep_results["groups"] for r in g["results"]
           if not next(c["passed"] for c in r["report"]["checks"]
                       if c["name"] == "D(H): cross-relation build equals general build")]
    total = sum(len(g["results"]) for g in sweep_results["groups"])
    verdict(6, not bad, f"cross-relation build equals general build on {total - len(bad)}/{total} factorizations")


def test_criterion_07_coadjoint_tables(z6z6):
    cases = [z6z6] + [select_factorization(builtin_group(s), i) for s in ("sym:3", "dihedral:4")
                      for i in range(len(exact_factorizations(builtin_group(s))))]
    closed_ok = all(verify_coadjoint_actions(mp).passed for mp in cases)
    act = coadjoint_actions(z6z6)
    n = 6
    mismatched = set()
    for t, v, s, u in itertools.product(range(n), repeat=4):
        h, a = t * n + v, s * n + u
        want = s * n + (u if t % 2 == 0 else -u % n) if v == (0 if s % 2 == 0 else 2 * u % n) else -1
        if act.h_on_dual[h, a] != want:
            mismatched.add(("▷", t % 2, s % 2))
        need = {(0, 0): 0, (1, 0): 0, (0, 1): -2 * t % n, (1, 1): 2 * t % n}[(u % 2, v % 2)]
        want = (t if u % 2 == 0 else -t % n) * n + v if s == need else -1
        if act.dual_on_h[h, a] != want:
            mismatched.add(("◁", u % 2, v % 2))
    verdict(7, closed_ok and not mismatched,
            f"closed forms = direct sums on {len(cases)} factorizations: {closed_ok}; "
            f"table cases matched {8 - len(mismatched)}/8")


def test_criterion_08_self_duality(z6z6):
    thetas = find_factor_reversing(z6z6)
    either = find_factor_preserving_or_reversing(z6z6)
    dihedral = bool(find_isomorphisms(automorphism_group(either), dihedral_group(4))) if len(either) == 8 else False
    h, hd = build_H(z6z6), build_Hdual(z6z6)
    checks, round_trips = True, True
    for th in thetas:
        checks &= verify_theta_tilde(z6z6, th, h, hd).passed
        back, rep = basis_selfduality_converse_check(z6z6, theta_tilde(z6z6, th))
        round_trips &= rep.passed and back == th
    ok = len(thetas) == 4 and len(either) == 8 and dihedral and checks and round_trips
    verdict(8, ok, f"{len(thetas)} factor-reversing, {len(either)} preserving-or-reversing, dihedral {dihedral}; "
                   f"θ̃ checks {checks}; converse round trip {round_trips}")


def test_criterion_09_order_obstruction(sweep_results):
    unequal = [(g["group"], r) for g in sweep_results["groups"] for r in g["results"] if r["G_order"] != r["M_order"]]
    bad = [(name, r["index"]) for name, r in unequal if r["factor_reversing"] != 0]
    verdict(9, not bad, f"{len(unequal)} factorizations with |G| != |M|, all with zero factor-reversing "
                        f"automorphisms by unrestricted search: {not bad}")


def test_criterion_10_equivariance_and_psi(z6z6):
    cases = [z6z6]
    for spec in ("product:cyclic:2,cyclic:2", "cyclic:4", "dihedral:4", "dihedral:2"):
        x = builtin_group(spec)
        cases += [select_factorization(x, i) for i in range(len(exact_factorizations(x)))]
    instances, ok = 0, True
    for mp in cases:
        thetas = find_factor_reversing(mp)
        if not thetas:
            continue
        dh = build_double_bicross(mp)
        act = coadjoint_actions(mp)
        for th in thetas:
            ok &= verify_equivariance(mp, th, act).passed and verify_psi(mp, th, dh).passed
            instances += 1
    verdict(10, ok and instances > 4, f"equivariance and all ψ checks exhaustive on {instances} (θ, factorization) "
                                      f"instances including all four θ of Z6·Z6: {ok}")


def test_criterion_11_module_round_trip(s3_pairs, z6z6):
    ok, n = True, 0
    for mp in s3_pairs + [z6z6]:
        w = schrodinger_module(mp)
        ok &= verify_bicrossed_bimodule(w).passed and verify_schrodinger(mp, w).passed
        ok &= module_from_double_action(mp, double_action(w)).same_as(w)
        n += 1
    verdict(11, ok, f"Schrödinger module passes (i)-(iv), the compatibility identity and the round trip "
                    f"on {n} factorizations: {ok}")


def test_criterion_12_twisting_suite(s3_z3z2, z6z6):
    start = time.perf_counter()
    results = {}
    for name, mp in (("S3=Z3·Z2", s3_z3z2), ("Z6·Z6", z6z6)):
        dx = build_group_double(mp.X)[0]
        w = schrodinger_module(mp)
        verify_bicrossed_bimodule(w)
        reps = {"cocycle": verify_2cocycle(cocycle_F(mp), dx, cocycle_F_inverse(mp)),
                "ψ": verify_psi_iso(mp, dx=dx),
                "twisted coproduct": twisted_coproduct_check(mp),
                "quasitriangular": quasitriangular_transport_check(mp),
                "χ": verify_chi(w), "c": verify_c_map(w, w), "naturality": verify_braiding_naturality(w, w)}
        results[name] = [k for k, r in reps.items() if not r.passed]
    elapsed = time.perf_counter() - start
    ok = not any(results.values()) and elapsed < 600
    verdict(12, ok, f"failing parts {results}; {elapsed:.1f}s")


def test_criterion_13_not_a_coboundary(klein_pair, s3_z3z2):
    reps = {"Z2·Z2": coboundary_obstruction_check(klein_pair), "S3=Z3·Z2": coboundary_obstruction_check(s3_z3z2)}
    ok = all(r.passed for r in reps.values())
    detail = "; ".join(f"{k}: {r['every admissible support lies in one block {δ_u⊗y0 : u∈G}'].detail}"
                       for k, r in reps.items())
    verdict(13, ok, f"no invertible γ ({detail})")


def test_criterion_14_determinism(sweep_w1, tmp_path):
    _, _, path1 = sweep_w1
    proc, elapsed, path4 = _check_cli(tmp_path, 4)
    same = path4.exists() and path1.read_bytes() == path4.read_bytes()
    verdict(14, same, f"--workers 4 report byte-identical to --workers 1: {same} (exit {proc.returncode}, "
                      f"{elapsed:.1f}s)")
