from bicross.groups import builtin_group
from bicross.matched_pair import exact_factorizations
from bicross.sweep import SWEEP_GROUPS, factorization_orbits, sweep, sweep_group


def test_sweep_group_list():
    assert SWEEP_GROUPS[:12] == [f"cyclic:{n}" for n in range(1, 13)]
    assert "sym:3" in SWEEP_GROUPS and "product:dihedral:3,dihedral:3" in SWEEP_GROUPS
    assert [g for g in SWEEP_GROUPS if g.startswith("dihedral")] == [f"dihedral:{n}" for n in range(1, 7)]


def test_orbits_of_s3():
    x = builtin_group("sym:3")
    facts = exact_factorizations(x)
    orbits = factorization_orbits(x, facts)
    assert len({r for r, _ in orbits}) == 4
    for i, (r, theta) in enumerate(orbits):
        if theta is not None:
            g, m = facts[r]
            assert sorted(theta(e) for e in g.elements) == sorted(facts[i][0].elements)


def test_sweep_small_groups_pass():
    out = sweep(["cyclic:1", "cyclic:6", "sym:3"])
    assert out["passed"]
    assert [g["factorizations"] for g in out["groups"]] == [1, 4, 8]


def test_transported_axioms_agree_with_direct():
    direct = sweep_group("dihedral:4")
    moved = sweep_group("dihedral:4", direct_dim_cap=1)
    assert direct["passed"] and moved["passed"]
    assert any(r["D(H) axioms"].startswith("transported") for r in moved["results"])
    assert all(r["D(H) axioms"] == "direct" for r in direct["results"])


def test_order_obstruction_in_sweep():
    out = sweep_group("cyclic:12")
    for r in out["results"]:
        if r["G_order"] != r["M_order"]:
            assert r["factor_reversing"] == 0
