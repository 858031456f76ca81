"""D(H) as a twist of D(X): the cocycle F, the algebra isomorphism ψ: D(H) -> D(X),
the twisted coproduct and R-matrix, and the check that F is not a coboundary.

Elements of D(X)⊗D(X) are Sparse (d, d) with d = |X|², one axis per factor;
D(X) basis δ_x⊗y sits at x·|X| + y.
"""

from __future__ import annotations

import numpy as np

from .bicrossproduct import build_H
from .double import build_double_bicross, build_group_double, double_R
from .errors import ObstructionVacuous, ShapeError
from .hopf import HopfAlgebra, compare, verify_hopf_axioms, verify_hopf_morphism
from .linalg import AlgebraElement, LinearMap, rank
from .matched_pair import MatchedPair
from .report import Report
from .representations import chi_to_DX, double_action, dx_action, schrodinger_module, verify_bicrossed_bimodule
from .sparse import Sparse, contract


def _ones(n: int) -> np.ndarray:
    return np.ones(n, dtype=np.int64)


def _x_elements(mp: MatchedPair) -> tuple[np.ndarray, np.ndarray]:
    return np.asarray(mp.G.elements, dtype=np.int64), np.asarray(mp.M.elements, dtype=np.int64)


def _F_tensor(mp: MatchedPair, invert_t: bool) -> Sparse:
    x = mp.X
    n = x.order
    gx, mx = _x_elements(mp)
    xs, t, v = (a.ravel() for a in np.meshgrid(np.arange(n), np.arange(mp.nM), np.arange(mp.nG), indexing="ij"))
    tm = mx[t]
    first = xs * n + (x.inv[tm] if invert_t else tm)
    second = x.table[tm, gx[v]] * n
    return Sparse((n * n, n * n), np.stack([first, second], 1), _ones(len(xs)))


def cocycle_F(mp: MatchedPair) -> AlgebraElement:
    """F = Σ_{x∈X, t∈M, v∈G} δ_x⊗t^{-1} ⊗ δ_{tv}⊗e."""
    dx, _ = build_group_double(mp.X)
    return AlgebraElement(dx.space.power(2), _F_tensor(mp, True))


def cocycle_F_inverse(mp: MatchedPair) -> AlgebraElement:
    """Σ δ_x⊗t ⊗ δ_{tv}⊗e."""
    dx, _ = build_group_double(mp.X)
    return AlgebraElement(dx.space.power(2), _F_tensor(mp, False))


def _pair(e) -> Sparse:
    return e.data if isinstance(e, AlgebraElement) else e


def _regular_inverse(dx: HopfAlgebra, f: Sparse) -> Sparse | None:
    """Inverse of f in D(X)⊗D(X) from its left-regular matrix; small algebras only."""
    from .linalg import BasisSpace, inverse
    d = dx.dim
    basis = Sparse.identity(d * d).reshape((d * d, d, d))
    left = dx.mul(f, basis, 2).reshape((d * d, d * d)).transpose((1, 0))    # (out, in)
    space = BasisSpace.opaque(d * d)
    try:
        inv = inverse(LinearMap(space, space, left))
    except ValueError:
        return None
    one = dx.one(2).reshape((d * d,))
    return contract("ab,b->a", inv.data, one).reshape((d, d))


def verify_2cocycle(f, dx: HopfAlgebra, f_inv=None, regular_cap: int = 1296) -> Report:
    """(1⊗F)(id⊗Δ)F = (F⊗1)(Δ⊗id)F in D(X)⊗³, and F invertible.

    The inverse is the supplied f_inv when given, otherwise it is solved for in the
    left-regular representation when dim(D(X))² <= regular_cap.
    """
    f = _pair(f)
    rep = Report("2-cocycle")
    d = dx.dim
    one = dx.unit
    D = dx.coproduct
    lhs = dx.mul(contract("a,bc->abc", one, f), contract("ab,bcd->acd", f, D), 3)
    rhs = dx.mul(contract("ab,c->abc", f, one), contract("ab,acd->cdb", f, D), 3)
    compare(rep, "(1⊗F)(id⊗Δ)F = (F⊗1)(Δ⊗id)F", lhs, rhs, 3)
    counit = contract("ab,a->b", f, dx.counit) == dx.unit and contract("ab,b->a", f, dx.counit) == dx.unit
    rep.add("(ε⊗id)F = (id⊗ε)F = 1", counit)
    if f_inv is None and d * d <= regular_cap:
        f_inv = _regular_inverse(dx, f)
    if f_inv is None:
        rep.add("F invertible", False, {"reason": "no inverse supplied and none found"})
        return rep
    f_inv = _pair(f_inv)
    one2 = dx.one(2)
    ok = dx.mul(f, f_inv, 2) == one2 and dx.mul(f_inv, f, 2) == one2
    rep.add("F F^-1 = F^-1 F = 1⊗1", ok)
    return rep


# ψ: D(H) -> D(X)

def psi_iso_images(mp: MatchedPair) -> np.ndarray:
    """ψ(δ_s⊗u ⊗ t⊗δ_v) = δ_{u^{-1}s^{-1}(t▷v)u} ⊗ u^{-1}(t◁v) as D(X) indices."""
    x = mp.X
    T, inv = x.table, x.inv
    n = x.order
    gx, mx = _x_elements(mp)
    nG = mp.nG
    s, u, t, v = (a.ravel() for a in np.meshgrid(np.arange(mp.nM), np.arange(nG), np.arange(mp.nM), np.arange(nG),
                                                 indexing="ij"))
    ui = inv[gx[u]]
    first = T[T[T[ui, inv[mx[s]]], gx[mp.act_left[t, v]]], gx[u]]
    second = T[ui, mx[mp.act_right[t, v]]]
    return first * n + second


def psi_inverse_images(mp: MatchedPair, literal: bool = False) -> np.ndarray:
    """Closed-form ψ^{-1}(δ_{su} ⊗ tv), with su and tv split as M·G and
    α = t^{-1}▷(u^{-1}((s^{-1}t)▷v)):

        δ_{s^{-1}◁(t▷v)} ⊗ (t▷v)^{-1} ⊗ t◁(vα^{-1}v) ⊗ δ_{α^{-1}v}.

    ``literal=True`` gives the variant δ_{(s^{-1}◁(t▷v))^{-1}} and δ_{v^{-1}α};
    it is not the inverse once the groups are non-abelian.
    """
    G, gi, M, mi = mp.G_group.table, mp.G_group.inv, mp.M_group.table, mp.M_group.inv
    lt, rt = mp.act_left, mp.act_right
    nG = mp.nG
    d = nG * mp.nM
    n = mp.X.order
    a, b = np.divmod(np.arange(n * n), n)
    s, u = mp.split_mg[a].T
    t, v = mp.split_mg[b].T
    tv = lt[t, v]
    alpha = lt[mi[t], G[gi[u], lt[M[mi[s], t], v]]]
    s_new = rt[mi[s], tv]
    v_new = G[gi[alpha], v]
    if literal:
        s_new = mi[s_new]
        v_new = G[gi[v], alpha]
    t_new = rt[t, G[G[v, gi[alpha]], v]]
    return (s_new * nG + gi[tv]) * d + t_new * nG + v_new


def psi_iso(mp: MatchedPair, dh: HopfAlgebra | None = None, dx: HopfAlgebra | None = None) -> tuple[LinearMap, LinearMap]:
    dh = dh or build_double_bicross(mp)
    dx = dx or build_group_double(mp.X)[0]
    fwd = LinearMap.from_images(dh.space, dx.space, psi_iso_images(mp))
    back = LinearMap.from_images(dx.space, dh.space, psi_inverse_images(mp))
    return fwd, back


def verify_psi_iso(mp: MatchedPair, dh: HopfAlgebra | None = None, dx: HopfAlgebra | None = None,
                   with_module: bool = True) -> Report:
    """ψ and its closed-form inverse compose to the identity both ways, ψ is
    multiplicative and unital on all basis pairs, and χ is the pull-back along ψ
    on the Schrödinger module."""
    dh = dh or build_double_bicross(mp)
    dx = dx or build_group_double(mp.X)[0]
    fwd, back = psi_iso(mp, dh, dx)
    rep = Report("ψ: D(H) -> D(X)")
    rep.add("ψ^-1 ψ = id", (back @ fwd).is_identity())
    rep.add("ψ ψ^-1 = id", (fwd @ back).is_identity())
    phi = fwd.data
    compare(rep, "ψ(ab) = ψ(a)ψ(b)", contract("ijk,lk->ijl", dh.product, phi),
            contract("ai,bj,abl->ijl", phi, phi, dx.product), 2, detail=f"all {dh.dim ** 2} basis pairs")
    compare(rep, "ψ(1) = 1", contract("ru,u->r", phi, dh.unit), dx.unit, 0)
    if with_module:
        w = schrodinger_module(mp)
        verify_bicrossed_bimodule(w, with_double=False)
        images = psi_iso_images(mp)
        act = double_action(w)
        pulled = Sparse(act.shape, np.column_stack([images[act.idx[:, 0]], act.idx[:, 1:]]), act.num, act.den)
        compare(rep, "χ((a⊗h)▷w) = ψ(a⊗h)▷χ(w)", pulled, dx_action(chi_to_DX(w)), 2,
                detail="all basis a⊗h and w of the Schrödinger module")
    return rep


def _push(t: Sparse, images: np.ndarray) -> Sparse:
    """Apply a basis permutation to every axis of t."""
    return Sparse(t.shape, images[t.idx], t.num, t.den)


# twisted coproduct

def twisted_hopf(mp: MatchedPair, dx: HopfAlgebra | None = None) -> tuple[HopfAlgebra, Report]:
    """D(X) with Δ̃ = FΔF^{-1} and S̃ = U S U^{-1}, U = Σ F¹S(F²), U^{-1} = Σ S(F⁻¹¹)F⁻¹²."""
    dx = dx or build_group_double(mp.X)[0]
    f, f_inv = _F_tensor(mp, True), _F_tensor(mp, False)
    P, S = dx.product, dx.antipode
    rep = Report("twist data")
    delta = dx.mul(dx.mul(f, dx.coproduct, 2), f_inv, 2)
    u = contract("ab,cb,acz->z", f, S, P)
    u_inv = contract("ab,ca,cbz->z", f_inv, S, P)
    ok = dx.mul(u, u_inv, 1) == dx.unit and dx.mul(u_inv, u, 1) == dx.unit
    rep.add("U U^-1 = U^-1 U = 1", ok)
    s_new = dx.mul(dx.mul(u, S.transpose((1, 0)), 1), u_inv, 1).transpose((1, 0))
    twisted = HopfAlgebra(dx.space, P, dx.unit, delta, dx.counit, s_new, None, f"{dx.name}^F")
    return twisted, rep


def twisted_coproduct_check(mp: MatchedPair, with_axioms: bool = True) -> Report:
    """FΔ(h)F^{-1} = (ψ⊗ψ)Δ_{D(H)}(ψ^{-1}h) for every basis h of D(X); the twisted
    structure passes the Hopf axioms and ψ is a Hopf isomorphism onto it."""
    dh = build_double_bicross(mp)
    dx = build_group_double(mp.X)[0]
    images = psi_iso_images(mp)
    twisted, rep = twisted_hopf(mp, dx)
    rep.title = "twisted coproduct"
    compare(rep, "FΔ(h)F^-1 = (ψ⊗ψ)Δ_D(H)(ψ^-1 h)", twisted.coproduct, _push(dh.coproduct, images), 1,
            detail=f"all {dx.dim} basis h")
    if with_axioms:
        rep.extend(verify_hopf_axioms(twisted, involutive=True), "D(X)^F: ")
        phi = Sparse.permutation(images)
        rep.extend(verify_hopf_morphism(phi, dh, twisted, name="ψ: D(H) -> D(X)^F"), "ψ: ")
    return rep


# R-matrices

def _swap(t: Sparse) -> Sparse:
    return t.transpose((1, 0))


def reorganized_R(mp: MatchedPair) -> Sparse:
    """Σ_{s,t,u,v} δ_{sv}⊗(s▷u) ⊗ δ_{tu^{-1}}⊗s^{-1} in D(X)⊗D(X)."""
    x = mp.X
    T, inv = x.table, x.inv
    n = x.order
    gx, mx = _x_elements(mp)
    s, t, u, v = (a.ravel() for a in np.meshgrid(np.arange(mp.nM), np.arange(mp.nM), np.arange(mp.nG),
                                                 np.arange(mp.nG), indexing="ij"))
    first = T[mx[s], gx[v]] * n + gx[mp.act_left[s, u]]
    second = T[mx[t], inv[gx[u]]] * n + inv[mx[s]]
    return Sparse((n * n, n * n), np.stack([first, second], 1), _ones(len(s)))


def quasitriangular_transport_check(mp: MatchedPair) -> Report:
    """(τF)(τR^{-1})F^{-1} = (ψ⊗ψ)R_{D(H)}, its reorganized sum, and
    (τ(ψ⊗ψ)R_{D(H)})(τF)RF^{-1} = 1⊗1."""
    h = build_H(mp)
    dh = build_double_bicross(mp, h)
    dx, r = build_group_double(mp.X)
    f, f_inv = _F_tensor(mp, True), _F_tensor(mp, False)
    pushed = _push(double_R(dh, h), psi_iso_images(mp))
    r_inv = contract("ab,ca->cb", r, dx.antipode)          # (S⊗id)R
    rep = Report("quasitriangular transport")
    one2 = dx.one(2)
    rep.add("R (S⊗id)R = 1⊗1", dx.mul(r, r_inv, 2) == one2 and dx.mul(r_inv, r, 2) == one2)
    lhs = dx.mul(dx.mul(_swap(f), _swap(r_inv), 2), f_inv, 2)
    compare(rep, "(τF)(τR^-1)F^-1 = (ψ⊗ψ)R_D(H)", lhs, pushed, 0)
    compare(rep, "(ψ⊗ψ)R_D(H) = Σ δ_{sv}⊗(s▷u) ⊗ δ_{tu^-1}⊗s^-1", pushed, reorganized_R(mp), 0)
    closing = dx.mul(dx.mul(dx.mul(_swap(pushed), _swap(f), 2), r, 2), f_inv, 2)
    compare(rep, "(τ(ψ⊗ψ)R_D(H))(τF)RF^-1 = 1⊗1", closing, one2, 0)
    return rep


# coboundary obstruction

def coboundary_system(mp: MatchedPair, dx: HopfAlgebra | None = None) -> np.ndarray:
    """The equations γ⊗γ = F·Δγ for γ = Σ γ_g e_g, as a table target[p, q] with
    γ_p γ_q = γ_{target[p, q]} (or = 0 where target is -1).

    Derived from the full bilinear system: each F·Δ(e_g) is expanded in D(X)⊗D(X)
    and required to have unit coefficients on pairs hit by no other g.
    """
    dx = dx or build_group_double(mp.X)[0]
    d = dx.dim
    f = _F_tensor(mp, True)
    t = dx.mul(f, dx.coproduct, 2)                        # [g, p, q]
    if t.den != 1 or np.any(t.num != 1):
        raise ShapeError("F·Δ(e_g) has non-unit coefficients; the support argument does not apply")
    pq = t.idx[:, 1] * d + t.idx[:, 2]
    if len(np.unique(pq)) != len(pq):
        raise ShapeError("two basis elements share a pair in F·Δ; the support argument does not apply")
    target = np.full(d * d, -1, np.int64)
    target[pq] = t.idx[:, 0]
    return target.reshape(d, d)


def closed_form_coboundary_system(mp: MatchedPair) -> np.ndarray:
    """Closed form of the same table: F·Δ(δ_x⊗y) = Σ_{ab=x} δ_{t^{-1}at}⊗t^{-1}y ⊗ δ_b⊗y
    with b = tv split as M·G."""
    x = mp.X
    T, inv = x.table, x.inv
    n = x.order
    mx = np.asarray(mp.M.elements)
    d = n * n
    target = np.full((d, d), -1, np.int64)
    a, y, b = (g.ravel() for g in np.meshgrid(np.arange(n), np.arange(n), np.arange(n), indexing="ij"))
    t = mx[mp.split_mg[b][:, 0]]
    p = T[T[inv[t], a], t] * n + T[inv[t], y]
    q = b * n + y
    target[p, q] = T[a, b] * n + y
    return target


def _valid_support(target: np.ndarray, mask: np.ndarray) -> bool:
    """Both γ_p, γ_q nonzero iff the right side term exists and is nonzero."""
    both = mask[:, None] & mask[None, :]
    rhs = (target >= 0) & mask[np.maximum(target, 0)]
    return bool(np.array_equal(both, rhs))


def _maximal_cliques(adj: list[set[int]], vertices) -> list[frozenset]:
    out = []

    def grow(r, p, x):
        if not p and not x:
            out.append(frozenset(r))
            return
        pivot = max(p | x, key=lambda k: len(adj[k] & p))
        for v in sorted(p - adj[pivot]):
            grow(r | {v}, p & adj[v], x & adj[v])
            p = p - {v}
            x = x | {v}

    grow(set(), set(vertices), set())
    return out


def coboundary_obstruction_check(mp: MatchedPair, brute_force_cap: int = 16) -> Report:
    """No invertible γ has γ⊗γ = F·Δγ.

    The bilinear system reads γ_p γ_q = γ_{target[p, q]} or 0.  A support S is
    admissible iff p, q ∈ S exactly when target[p, q] ∈ S.  Admissible supports are
    enumerated exhaustively when dim D(X) <= brute_force_cap; otherwise every one
    is shown to lie in a clique of the graph p ~ q iff target[p, q] exists, after
    removing the vertices forced to zero by the diagonal equations.  Every
    admissible support must sit inside one block {δ_u⊗y0 : u∈G}, and each block
    has a common right annihilator, so every solution is a zero divisor.
    """
    if mp.nG == 1 or mp.nM == 1:
        raise ObstructionVacuous("one factor is trivial, so F = 1⊗1 is a coboundary")
    dx = build_group_double(mp.X)[0]
    d, n = dx.dim, mp.X.order
    gx = np.asarray(mp.G.elements)
    rep = Report("F is not a coboundary")
    target = coboundary_system(mp, dx)
    rep.add("derived equations match the closed form", np.array_equal(target, closed_form_coboundary_system(mp)))

    blocks = {y0: frozenset(int(u) * n + y0 for u in gx) for y0 in range(n)}

    def in_block(support) -> bool:
        return any(support <= b for b in blocks.values())

    if d <= brute_force_cap:
        bits = (np.arange(1 << d)[:, None] >> np.arange(d)[None, :]) & 1
        admissible = [frozenset(np.flatnonzero(row).tolist()) for row in bits.astype(bool)
                      if row.any() and _valid_support(target, row)]
        method = f"all {1 << d} support patterns"
    else:
        diag = target[np.arange(d), np.arange(d)]
        free = [p for p in range(d) if diag[p] >= 0]
        adj = [set() for _ in range(d)]
        for p in free:
            for q in free:
                if p != q and target[p, q] >= 0 and target[q, p] >= 0:
                    adj[p].add(q)
        admissible = _maximal_cliques(adj, free)
        method = f"{len(admissible)} maximal cliques over {len(free)} unforced coordinates"
    bad = next((sorted(s) for s in admissible if not in_block(s)), None)
    rep.add("every admissible support lies in one block {δ_u⊗y0 : u∈G}", bad is None,
            None if bad is None else {"support": bad}, detail=method)

    singular = None
    for y0, block in blocks.items():
        # (δ_u⊗y0)(δ_a⊗b) = 0 unless y0^{-1}u y0 = a; pick a outside y0^{-1}G y0
        conj = {int(mp.X.table[mp.X.table[mp.X.inv[y0], u], y0]) for u in gx}
        a = min(set(range(n)) - conj)
        z = Sparse((d,), [[a * n]], [1])
        elems = Sparse((len(block), d), [[i, p] for i, p in enumerate(sorted(block))], _ones(len(block)))
        if dx.mul(elems, z, 1).nnz:
            singular = {"y0": y0, "reason": "annihilator failed"}
            break
        total = contract("ip->p", elems)
        basis = Sparse.identity(d)
        left = dx.mul(total, basis, 1).transpose((1, 0))
        if rank(left) >= d:
            singular = {"y0": y0, "reason": "left-regular matrix has full rank"}
            break
    rep.add("every block element is a zero divisor", singular is None, singular,
            detail="common right annihilator δ_a⊗e; left-regular rank of Σ_u δ_u⊗y0 < dim")
    return rep


def twist_report(mp: MatchedPair) -> Report:
    dx = build_group_double(mp.X)[0]
    rep = Report("twisting")
    rep.extend(verify_2cocycle(cocycle_F(mp), dx, cocycle_F_inverse(mp)), "F: ")
    rep.extend(verify_psi_iso(mp, dx=dx))
    rep.extend(twisted_coproduct_check(mp))
    rep.extend(quasitriangular_transport_check(mp))
    if mp.nG > 1 and mp.nM > 1:
        rep.extend(coboundary_obstruction_check(mp), "coboundary: ")
    return rep
