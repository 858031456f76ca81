"""Quantum doubles: D(H) for any H, D(H) for a bicrossproduct via its cross relation,
and D(X) for a group, with their R-elements and the anti-automorphism ψ.

D(H) lives on H* ⊗ H with index a·dim(H) + h.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bicrossproduct import build_H, build_Hdual, theta_dual_images, theta_images
from .errors import ShapeError
from .groups import FiniteGroup, GroupIsomorphism
from .hopf import (DoublePair, GroupDouble, HopfAlgebra, compare, coproduct_on_factor, dual_hopf,
                   verify_hopf_morphism)
from .linalg import BasisSpace, LinearMap, inverse
from .matched_pair import MatchedPair
from .report import Report
from .sparse import Sparse, contract


def _ones(n):
    return np.ones(n, np.int64)


# coadjoint actions

def coadjoint_tensors(h: HopfAlgebra) -> tuple[Sparse, Sparse]:
    """Mutual coadjoint actions of H and H* evaluated directly from their defining sums.

    Returns (L, R) with L[h, a, c] the coefficient of f^c in e_h ▷ f^a and
    R[h, a, y] the coefficient of e_y in e_h ◁ f^a, where
    h ◁ a = Σ h2 ⟨a, (S h1) h3⟩ and h ▷ a = Σ a2 ⟨h, (S a1) a3⟩.
    """
    P, D, S = h.product, h.coproduct, h.antipode
    c_h = contract("hiz,ixy->hxyz", D, D)     # Δ² on H
    c_dual = contract("pqk,kra->apqr", P, P)  # Δ² on H*: coefficient of e_a in e_p e_q e_r
    right = contract("hxyz,px,pza->hay", c_h, S, P)
    left = contract("apqr,pk,hkr->haq", c_dual, S, D)
    return left, right


@dataclass
class CoadjointActions:
    """Basis-to-basis coadjoint actions of H = kM ▷◀ k(G) and H* on each other.

    ``h_on_dual[h, b]`` is the index of (h ▷ b) in H*, ``dual_on_h[h, b]`` the
    index of (h ◁ b) in H, and -1 marks a zero result.
    """
    mp: MatchedPair
    h_on_dual: np.ndarray
    dual_on_h: np.ndarray

    def tensors(self) -> tuple[Sparse, Sparse]:
        d = self.h_on_dual.shape[0]
        out = []
        for table in (self.h_on_dual, self.dual_on_h):
            h, b = np.nonzero(table >= 0)
            out.append(Sparse((d, d, d), np.stack([h, b, table[h, b]], 1), _ones(len(h))))
        return out[0], out[1]


def coadjoint_actions(mp: MatchedPair) -> CoadjointActions:
    """Closed forms, with t' = t◁(s▷u)^{-1}:

    (t⊗δ_v) ▷ (δ_s⊗u) = δ_{v,(s▷u)^{-1}u} δ_{t's t'^{-1}}⊗(t'▷u)
    (t⊗δ_v) ◁ (δ_s⊗u) = δ_{t◁v, t(s◁u)} t'⊗δ_{(s▷u)vu^{-1}}
    """
    G, gi, M, mi = mp.G_group.table, mp.G_group.inv, mp.M_group.table, mp.M_group.inv
    lt, rt = mp.act_left, mp.act_right
    nG, nM = mp.nG, mp.nM
    t, v, s, u = (a.ravel() for a in np.meshgrid(np.arange(nM), np.arange(nG), np.arange(nM), np.arange(nG),
                                                  indexing="ij"))
    su = lt[s, u]
    tp = rt[t, gi[su]]
    h_idx = t * nG + v
    b_idx = s * nG + u
    d = nG * nM
    left = np.full((d, d), -1, dtype=np.int64)
    ok = v == G[gi[su], u]
    left[h_idx[ok], b_idx[ok]] = (M[M[tp, s], mi[tp]] * nG + lt[tp, u])[ok]
    right = np.full((d, d), -1, dtype=np.int64)
    ok = rt[t, v] == M[t, rt[s, u]]
    right[h_idx[ok], b_idx[ok]] = (tp * nG + G[G[su, v], gi[u]])[ok]
    return CoadjointActions(mp, left, right)


def verify_coadjoint_actions(mp: MatchedPair, h: HopfAlgebra | None = None) -> Report:
    """Closed forms against direct evaluation of the defining sums, entrywise."""
    h = h or build_H(mp)
    direct_left, direct_right = coadjoint_tensors(h)
    closed_left, closed_right = coadjoint_actions(mp).tensors()
    rep = Report("coadjoint actions")
    compare(rep, "h ▷ a closed form", closed_left, direct_left, 2)
    compare(rep, "h ◁ a closed form", closed_right, direct_right, 2)
    return rep


def verify_mutual_action_identity(h: HopfAlgebra, actions: tuple[Sparse, Sparse] | None = None) -> Report:
    """Σ h1▷a1 ⊗ h2◁a2 = Σ h2▷a2 ⊗ h1◁a1 for all basis h, a."""
    left, right = actions or coadjoint_tensors(h)
    D, P = h.coproduct, h.product
    rep = Report("mutual action identity")
    lhs = contract("hxy,pqa,xpc,yqz->hacz", D, P, left, right)
    rhs = contract("hxy,pqa,yqc,xpz->hacz", D, P, left, right)
    compare(rep, "Σ h1▷a1 ⊗ h2◁a2 = Σ h2▷a2 ⊗ h1◁a1", lhs, rhs, 2)
    return rep


def verify_equivariance(mp: MatchedPair, theta: GroupIsomorphism, actions: CoadjointActions | None = None) -> Report:
    """θ̃(h▷b) = θ̃b ◁ θ̃h and θ̃(h◁b) = θ̃b ▷ θ̃h on all basis pairs."""
    act = actions or coadjoint_actions(mp)
    th = theta_images(mp, theta)        # H -> H*
    tb = theta_dual_images(mp, theta)   # H* -> H
    L, R = act.h_on_dual, act.dual_on_h
    d = len(th)
    h, b = np.meshgrid(np.arange(d), np.arange(d), indexing="ij")
    rep = Report("θ̃-equivariance of the coadjoint actions")
    a_lhs = np.where(L >= 0, tb[np.maximum(L, 0)], -1)
    a_rhs = R[tb[b], th[h]]
    b_lhs = np.where(R >= 0, th[np.maximum(R, 0)], -1)
    b_rhs = L[tb[b], th[h]]
    for name, lhs, rhs in (("θ̃(h▷b) = θ̃b ◁ θ̃h", a_lhs, a_rhs), ("θ̃(h◁b) = θ̃b ▷ θ̃h", b_lhs, b_rhs)):
        bad = np.argwhere(lhs != rhs)
        if len(bad):
            i, j = bad[0]
            rep.add(name, False, {"index": [int(i), int(j)], "lhs": int(lhs[i, j]), "rhs": int(rhs[i, j])})
        else:
            rep.add(name, True)
    return rep


# D(H) from the general product

def _double_space(h: HopfAlgebra, dual: HopfAlgebra) -> BasisSpace:
    return BasisSpace([DoublePair(a, x) for a in dual.labels for x in h.labels], name=f"D({h.name})")


def straighten_tensor(h: HopfAlgebra) -> Sparse:
    """St[h, b, B, H]: (1⊗e_h)(f^b⊗1) = Σ St f^B⊗e_H, i.e. Σ ⟨S b1, h1⟩ b2 ⊗ h2 ⟨b3, h3⟩."""
    P, D, S = h.product, h.coproduct, h.antipode
    c_h = contract("hiz,ixy->hxyz", D, D)
    c_dual = contract("pqk,kra->apqr", P, P)
    return contract("xy,bxBq,hyHq->hbBH", S, c_dual, c_h)


def build_double_general(h: HopfAlgebra) -> HopfAlgebra:
    """D(H) on H*⊗H with (a⊗h)(b⊗g) = Σ ⟨S b1, h1⟩ b2 a ⊗ h2 g ⟨b3, h3⟩."""
    d = h.dim
    dual = dual_hopf(h)
    st = straighten_tensor(h)
    n = d * d
    prod = contract("hbBH,Bac,Hgk->ahbgck", st, dual.product, h.product).reshape((n, n, n))
    unit = contract("a,h->ah", dual.unit, h.unit).reshape((n,))
    counit = contract("a,h->ah", dual.counit, h.counit).reshape((n,))
    cop = contract("apq,hxy->ahpxqy", dual.coproduct, h.coproduct).reshape((n, n, n))
    # S(a⊗h) = (1⊗Sh)(S^{-1}a⊗1)
    s_inv = inverse(LinearMap(dual.space, dual.space, dual.antipode)).data
    anti = contract("Hh,Ba,HBcK->cKah", h.antipode, s_inv, st).reshape((n, n))
    star = None
    if h.star is not None and dual.star is not None:
        # (a⊗h)* = (1⊗h*)((S²a)*⊗1)
        s2 = contract("ij,jk->ik", dual.antipode, dual.antipode)
        a_part = contract("ij,jk->ik", dual.star, s2)
        star = contract("Hh,Ba,HBcK->cKah", h.star, a_part, st).reshape((n, n))
    return HopfAlgebra(_double_space(h, dual), prod, unit, cop, counit, anti, star, f"D({h.name})")


# D(H) from the cross relation

def cross_relation(mp: MatchedPair) -> np.ndarray:
    """X[h, b] = (a', h') with (1⊗t⊗δ_v)(δ_s⊗u⊗1) = a'⊗h', h = t⊗δ_v, b = δ_s⊗u.

    a' = δ_{t' s (t◁vu^{-1})^{-1}} ⊗ (t◁vu^{-1})▷u,  h' = t'⊗δ_{(s▷u)vu^{-1}},  t' = t◁(s▷u)^{-1}
    """
    G, gi, M, mi = mp.G_group.table, mp.G_group.inv, mp.M_group.table, mp.M_group.inv
    lt, rt = mp.act_left, mp.act_right
    nG, nM = mp.nG, mp.nM
    t, v, s, u = np.meshgrid(np.arange(nM), np.arange(nG), np.arange(nM), np.arange(nG), indexing="ij")
    su = lt[s, u]
    tp = rt[t, gi[su]]
    vu = G[v, gi[u]]
    r = rt[t, vu]
    a_new = M[M[tp, s], mi[r]] * nG + lt[r, u]
    h_new = tp * nG + G[su, vu]
    d = nG * nM
    return np.stack([a_new.reshape(d, d), h_new.reshape(d, d)], axis=-1)


def build_double_bicross(mp: MatchedPair, h: HopfAlgebra | None = None, hd: HopfAlgebra | None = None) -> HopfAlgebra:
    """D(H) generated by H* (with opposite product) and H, straightening
    (a⊗h)(b⊗g) = (a⊗1)(1⊗h)(b⊗1)(1⊗g) = b'a ⊗ h'g through the cross relation."""
    h = h or build_H(mp)
    hd = hd or build_Hdual(mp)
    d = h.dim
    n = d * d
    cross = cross_relation(mp)
    # straightening as a 0/1 tensor St[h, b, B, H]
    hh, bb = np.meshgrid(np.arange(d), np.arange(d), indexing="ij")
    st = Sparse((d, d, d, d), np.stack([hh.ravel(), bb.ravel(), cross[..., 0].ravel(), cross[..., 1].ravel()], 1),
                _ones(d * d))
    prod = contract("hbBH,Bac,Hgk->ahbgck", st, hd.product, h.product).reshape((n, n, n))
    unit = contract("a,h->ah", hd.unit, h.unit).reshape((n,))
    counit = contract("a,h->ah", hd.counit, h.counit).reshape((n,))
    cop = contract("apq,hxy->ahpxqy", hd.coproduct, h.coproduct).reshape((n, n, n))
    s_inv = inverse(LinearMap(hd.space, hd.space, hd.antipode)).data
    anti = contract("Hh,Ba,HBcK->cKah", h.antipode, s_inv, st).reshape((n, n))
    s2 = contract("ij,jk->ik", hd.antipode, hd.antipode)
    star = contract("Hh,Ba,HBcK->cKah", h.star, contract("ij,jk->ik", hd.star, s2), st).reshape((n, n))
    return HopfAlgebra(_double_space(h, hd), prod, unit, cop, counit, anti, star, "D(H)")


# D(X)

def build_group_double(x: FiniteGroup) -> tuple[HopfAlgebra, Sparse]:
    """D(X) = k(X) ⋊ kX on δ_x⊗y (index x·|X| + y) and R = Σ_{y,z} δ_y⊗e ⊗ δ_z⊗y."""
    n = x.order
    T, inv = x.table, x.inv
    d = n * n
    ix = lambda a, b: a * n + b  # noqa: E731
    a, y, b = (g.ravel() for g in np.meshgrid(np.arange(n), np.arange(n), np.arange(n), indexing="ij"))
    # (δ_a⊗y)(δ_{y^{-1}ay}⊗b) = δ_a⊗yb
    prod = Sparse((d, d, d), np.stack([ix(a, y), ix(T[T[inv[y], a], y], b), ix(a, T[y, b])], 1), _ones(len(a)))
    # Δ(δ_x⊗y) = Σ_{ab=x} δ_a⊗y ⊗ δ_b⊗y  with b = a^{-1}x
    xx, yy, aa = a, y, b
    cop = Sparse((d, d, d), np.stack([ix(xx, yy), ix(aa, yy), ix(T[inv[aa], xx], yy)], 1), _ones(len(xx)))
    ar = np.arange(n)
    unit = Sparse((d,), ix(ar, 0)[:, None], _ones(n))
    counit = Sparse((d,), ix(0, ar)[:, None], _ones(n))
    xs, ys = (g.ravel() for g in np.meshgrid(ar, ar, indexing="ij"))
    conj = T[T[inv[ys], xs], ys]
    anti = Sparse((d, d), np.stack([ix(inv[conj], inv[ys]), ix(xs, ys)], 1), _ones(d))
    star = Sparse((d, d), np.stack([ix(conj, inv[ys]), ix(xs, ys)], 1), _ones(d))
    space = BasisSpace([GroupDouble(i, j) for i in range(n) for j in range(n)], name=f"D({x.name})")
    dx = HopfAlgebra(space, prod, unit, cop, counit, anti, star, f"D({x.name})")
    r = Sparse((d, d), np.stack([ix(xs, 0), ix(ys, xs)], 1), _ones(d))
    return dx, r


def double_R(dh: HopfAlgebra, h: HopfAlgebra) -> Sparse:
    """R = Σ_a (f^a⊗1) ⊗ (1⊗e_a) in D(H)⊗D(H), for the double dh of h."""
    if not dh.labels or not isinstance(dh.labels[0], DoublePair) or dh.dim != h.dim ** 2:
        raise ShapeError("double_R needs the DoublePair-labelled double of the given H")
    d = h.dim
    # R[(a, u), (c, a')] = δ_{a a'} 1_H[u] ε_H[c], since 1_{H*} = ε_H
    r = contract("aA,u,c->aucA", Sparse.identity(d), h.unit, h.counit)
    return r.reshape((dh.dim, dh.dim))


def verify_quasitriangular(a: HopfAlgebra, r: Sparse, basis: np.ndarray | None = None) -> Report:
    """(Δ⊗id)R = R13 R23, (id⊗Δ)R = R13 R12, R invertible with inverse (S⊗id)R,
    and τΔ(h) R = R Δ(h) on the given basis indices (all by default)."""
    d = a.dim
    rep = Report(f"quasitriangular: {a.name}")
    U = a.unit
    r13 = contract("ik,j->ijk", r, U)
    r23 = contract("i,jk->ijk", U, r)
    r12 = contract("ij,k->ijk", r, U)
    compare(rep, "(Δ⊗id)R = R13 R23", coproduct_on_factor(a, r, 0), a.mul(r13, r23, 3), 0)
    compare(rep, "(id⊗Δ)R = R13 R12", coproduct_on_factor(a, r, 1), a.mul(r13, r12, 3), 0)
    r_inv = contract("ki,ij->kj", a.antipode, r)
    one2 = contract("i,j->ij", U, U)
    compare(rep, "R (S⊗id)R = 1⊗1", a.mul(r, r_inv, 2), one2, 0)
    compare(rep, "(S⊗id)R R = 1⊗1", a.mul(r_inv, r, 2), one2, 0)
    D = a.coproduct
    if basis is not None:
        sel = np.isin(D.idx[:, 0], basis)
        D = Sparse(D.shape, D.idx[sel], D.num[sel], D.den)
    flipped = D.transpose((0, 2, 1))
    compare(rep, "τΔ(h) R = R Δ(h)", a.mul(flipped, r, 2), a.mul(r, D, 2), 1,
            detail="all basis h" if basis is None else f"{len(basis)} sampled basis h")
    return rep


# ψ = τ(θ̃⊗θ̃)

def psi_images(mp: MatchedPair, theta: GroupIsomorphism) -> np.ndarray:
    """Index images of a⊗h ↦ θ̃(h)⊗θ̃(a) on D(H)."""
    th = theta_images(mp, theta)
    tb = theta_dual_images(mp, theta)
    d = len(th)
    a, h = np.divmod(np.arange(d * d), d)
    return th[h] * d + tb[a]


def psi_anti_automorphism(mp: MatchedPair, theta: GroupIsomorphism, dh: HopfAlgebra | None = None) -> LinearMap:
    images = psi_images(mp, theta)
    space = dh.space if dh is not None else BasisSpace.opaque(len(images))
    return LinearMap.from_images(space, space, images)


def verify_psi(mp: MatchedPair, theta: GroupIsomorphism, dh: HopfAlgebra) -> Report:
    """Anti-algebra, coalgebra, unit, counit and antipode checks for ψ on all basis tuples."""
    psi = psi_anti_automorphism(mp, theta, dh)
    rep = verify_hopf_morphism(psi.data, dh, dh, anti_algebra=True, name="ψ = τ(θ̃⊗θ̃)")
    return rep
