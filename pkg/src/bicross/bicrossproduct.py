"""The bicrossproduct H = kM ▷◀ k(G), its dual k(M) ▶◁ kG, and self-duality.

Both use the index s·|G| + u for the basis element labelled by (s, u).
"""

from __future__ import annotations

from itertools import product

import numpy as np

from .errors import NotFactorReversing, ShapeError
from .groups import GroupIsomorphism
from .hopf import BicrossDual, BicrossH, HopfAlgebra, compare, verify_hopf_morphism
from .linalg import BasisSpace, LinearMap, rank
from .matched_pair import MatchedPair, is_factor_reversing
from .report import Report
from .sparse import Sparse, contract


def _tables(mp: MatchedPair):
    return (mp.G_group.table, mp.G_group.inv, mp.M_group.table, mp.M_group.inv,
            mp.act_left, mp.act_right)


def _grid(*sizes):
    return [a.ravel() for a in np.meshgrid(*[np.arange(n, dtype=np.int64) for n in sizes], indexing="ij")]


def _ones(n):
    return np.ones(n, np.int64)


def h_space(mp: MatchedPair) -> BasisSpace:
    return BasisSpace([BicrossH(s, u) for s in range(mp.nM) for u in range(mp.nG)], name="H")


def hdual_space(mp: MatchedPair) -> BasisSpace:
    return BasisSpace([BicrossDual(s, u) for s in range(mp.nM) for u in range(mp.nG)], name="H*")


def build_H(mp: MatchedPair) -> HopfAlgebra:
    """kM ▷◀ k(G) on the basis s⊗δ_u."""
    gt, gi, mt, mi, lt, rt = _tables(mp)
    nG, nM = mp.nG, mp.nM
    d = nG * nM
    ix = lambda s, u: s * nG + u  # noqa: E731

    # (s⊗δ_u)(t⊗δ_v) = δ_{u, t▷v} st⊗δ_v
    s, t, v = _grid(nM, nM, nG)
    u = lt[t, v]
    prod = Sparse((d, d, d), np.stack([ix(s, u), ix(t, v), ix(mt[s, t], v)], 1), _ones(len(s)))

    # Δ(s⊗δ_u) = Σ_{xy=u} s⊗δ_x ⊗ (s◁x)⊗δ_y
    s, u, x = _grid(nM, nG, nG)
    y = gt[gi[x], u]
    cop = Sparse((d, d, d), np.stack([ix(s, u), ix(s, x), ix(rt[s, x], y)], 1), _ones(len(s)))

    gs = np.arange(nG, dtype=np.int64)
    unit = Sparse((d,), ix(0, gs)[:, None], _ones(nG))
    ms = np.arange(nM, dtype=np.int64)
    counit = Sparse((d,), ix(ms, 0)[:, None], _ones(nM))

    s, u = _grid(nM, nG)
    anti = Sparse((d, d), np.stack([ix(mi[rt[s, u]], gi[lt[s, u]]), ix(s, u)], 1), _ones(d))
    star = Sparse((d, d), np.stack([ix(mi[s], lt[s, u]), ix(s, u)], 1), _ones(d))
    return HopfAlgebra(h_space(mp), prod, unit, cop, counit, anti, star, "H")


def build_Hdual(mp: MatchedPair) -> HopfAlgebra:
    """k(M) ▶◁ kG on the basis δ_s⊗u."""
    gt, gi, mt, mi, lt, rt = _tables(mp)
    nG, nM = mp.nG, mp.nM
    d = nG * nM
    ix = lambda s, u: s * nG + u  # noqa: E731

    # (δ_s⊗u)(δ_t⊗v) = δ_{s◁u, t} δ_s⊗uv
    s, u, v = _grid(nM, nG, nG)
    t = rt[s, u]
    prod = Sparse((d, d, d), np.stack([ix(s, u), ix(t, v), ix(s, gt[u, v])], 1), _ones(len(s)))

    # Δ(δ_s⊗u) = Σ_{ab=s} δ_a⊗(b▷u) ⊗ δ_b⊗u
    s, u, a = _grid(nM, nG, nM)
    b = mt[mi[a], s]
    cop = Sparse((d, d, d), np.stack([ix(s, u), ix(a, lt[b, u]), ix(b, u)], 1), _ones(len(s)))

    ms = np.arange(nM, dtype=np.int64)
    unit = Sparse((d,), ix(ms, 0)[:, None], _ones(nM))
    gs = np.arange(nG, dtype=np.int64)
    counit = Sparse((d,), ix(0, gs)[:, None], _ones(nG))

    s, u = _grid(nM, nG)
    anti = Sparse((d, d), np.stack([ix(mi[rt[s, u]], gi[lt[s, u]]), ix(s, u)], 1), _ones(d))
    star = Sparse((d, d), np.stack([ix(rt[s, u], gi[u]), ix(s, u)], 1), _ones(d))
    return HopfAlgebra(hdual_space(mp), prod, unit, cop, counit, anti, star, "H*")


def _require_reversing(mp: MatchedPair, theta: GroupIsomorphism):
    if theta.source is not mp.X or theta.target is not mp.X or not is_factor_reversing(mp, theta):
        raise NotFactorReversing("θ must be an automorphism of X exchanging G and M")


def theta_images(mp: MatchedPair, theta: GroupIsomorphism) -> np.ndarray:
    """Index images of s⊗δ_u ↦ δ_{θ(s▷u)}⊗θ(s◁u)."""
    _require_reversing(mp, theta)
    out = np.empty(mp.nM * mp.nG, dtype=np.int64)
    for s, u in product(range(mp.nM), range(mp.nG)):
        a = mp.M.local(theta(mp.gx(mp.lt(s, u))))
        b = mp.G.local(theta(mp.mx(mp.rt(s, u))))
        out[s * mp.nG + u] = a * mp.nG + b
    return out


def theta_dual_images(mp: MatchedPair, theta: GroupIsomorphism) -> np.ndarray:
    """Index images of δ_s⊗u ↦ θ(s▷u)⊗δ_{θ(s◁u)}, a map H* -> H."""
    return theta_images(mp, theta)


def theta_tilde(mp: MatchedPair, theta: GroupIsomorphism) -> LinearMap:
    """θ̃ : H -> H*."""
    return LinearMap.from_images(h_space(mp), hdual_space(mp), theta_images(mp, theta))


def theta_tilde_dual(mp: MatchedPair, theta: GroupIsomorphism) -> LinearMap:
    """θ̃ : H* -> H, the inverse of the H -> H* map built from θ^{-1}."""
    return LinearMap.from_images(hdual_space(mp), h_space(mp), theta_dual_images(mp, theta))


def theta_tilde_inverse(mp: MatchedPair, theta: GroupIsomorphism) -> LinearMap:
    """δ_s⊗u ↦ θ^{-1}(s▷u)⊗δ_{θ^{-1}(s◁u)}"""
    return theta_tilde_dual(mp, theta.inverse())


def verify_theta_tilde(mp: MatchedPair, theta: GroupIsomorphism, h: HopfAlgebra | None = None,
                       hd: HopfAlgebra | None = None) -> Report:
    """The five isomorphism checks for θ̃, its closed-form inverse, and the pairing symmetry."""
    h = h or build_H(mp)
    hd = hd or build_Hdual(mp)
    tt = theta_tilde(mp, theta)
    rep = verify_hopf_morphism(tt.data, h, hd, name="θ̃ : H -> H*")
    inv = theta_tilde_inverse(mp, theta)
    d = h.dim
    rep.add("closed-form inverse, left", (inv @ tt).is_identity())
    rep.add("closed-form inverse, right", (tt @ inv).is_identity())
    # ⟨θ̃ a, θ̃ h⟩ = ⟨h, a⟩ with θ̃ : H* -> H on the first slot; both are
    # basis bijections, so this says the two index maps coincide
    ta = theta_tilde_dual(mp, theta).permutation_images()
    th = tt.permutation_images()
    bad = np.flatnonzero(ta != th)
    rep.add("pairing symmetry ⟨θ̃a, θ̃h⟩ = ⟨h, a⟩", bad.size == 0,
            {"index": [int(bad[0])] * 2} if bad.size else None)
    return rep


def duality_pairing(mp: MatchedPair, theta: GroupIsomorphism) -> Sparse:
    """B[i, j] = ⟨e_i, e_j⟩ on H with ⟨s⊗δ_u, t⊗δ_v⟩ = δ_{s,θ(t▷v)} δ_{u,θ(t◁v)}."""
    _require_reversing(mp, theta)
    nG, nM = mp.nG, mp.nM
    rows, cols = [], []
    for t, v in product(range(nM), range(nG)):
        s = mp.M.local(theta(mp.gx(mp.lt(t, v))))
        u = mp.G.local(theta(mp.mx(mp.rt(t, v))))
        rows.append(s * nG + u)
        cols.append(t * nG + v)
    d = nG * nM
    return Sparse((d, d), np.stack([rows, cols], 1), _ones(d))


def verify_pairing(h: HopfAlgebra, pairing: Sparse) -> Report:
    """Hopf pairing axioms for a bilinear form on h, checked on all basis tuples."""
    P, D, S, B = h.product, h.coproduct, h.antipode, pairing
    rep = Report("Hopf pairing")
    compare(rep, "⟨ab, c⟩ = ⟨a, c1⟩⟨b, c2⟩", contract("abk,kc->abc", P, B), contract("cpq,ap,bq->abc", D, B, B), 3)
    compare(rep, "⟨a, bc⟩ = ⟨a1, b⟩⟨a2, c⟩", contract("bck,ak->abc", P, B), contract("apq,pb,qc->abc", D, B, B), 3)
    compare(rep, "⟨1, h⟩ = ε(h)", contract("u,uh->h", h.unit, B), h.counit, 1)
    compare(rep, "⟨h, 1⟩ = ε(h)", contract("u,hu->h", h.unit, B), h.counit, 1)
    compare(rep, "⟨Sa, b⟩ = ⟨a, Sb⟩", contract("ka,kb->ab", S, B), contract("kb,ak->ab", S, B), 2)
    r = rank(B)
    rep.add("nondegenerate", r == h.dim, None if r == h.dim else {"rank": r})
    return rep


def verify_antipode_pairing(mp: MatchedPair, h: HopfAlgebra | None = None, hd: HopfAlgebra | None = None) -> Report:
    """⟨S h, S a⟩ = ⟨h, a⟩ for the canonical pairing, and S² = id on H and H*."""
    h = h or build_H(mp)
    hd = hd or build_Hdual(mp)
    rep = Report("antipode and canonical pairing")
    compare(rep, "⟨Sh, Sa⟩ = ⟨h, a⟩", contract("ih,ia->ha", h.antipode, hd.antipode), Sparse.identity(h.dim), 1)
    compare(rep, "S² = id on H", contract("ij,jk->ik", h.antipode, h.antipode), Sparse.identity(h.dim), 1)
    compare(rep, "S² = id on H*", contract("ij,jk->ik", hd.antipode, hd.antipode), Sparse.identity(h.dim), 1)
    return rep


def basis_selfduality_converse_check(mp: MatchedPair, phi) -> tuple[GroupIsomorphism | None, Report]:
    """Recover a factor-reversing θ from a basis-to-basis Hopf isomorphism φ : H -> H*.

    ``phi`` is a LinearMap or an index-image array.  Returns (θ, report); θ is
    None when some relation of the reconstruction fails.
    """
    nG, nM = mp.nG, mp.nM
    d = nG * nM
    images = phi.permutation_images() if isinstance(phi, LinearMap) else np.asarray(phi, dtype=np.int64)
    if images is None or images.shape != (d,) or sorted(images.tolist()) != list(range(d)):
        raise ShapeError("φ must send the basis of H bijectively onto the basis of H*")
    if isinstance(phi, LinearMap) and not phi.data.is_unit_coefficient():
        raise ShapeError("φ must send basis elements to basis elements")
    rep = Report("converse reconstruction")
    # φ^{-1}(δ_s⊗u) = m(s,u)⊗δ_{g(s,u)}
    back = np.empty(d, dtype=np.int64)
    back[images] = np.arange(d)
    m = (back // nG).reshape(nM, nG)
    g = (back % nG).reshape(nM, nG)

    def scan(name, bad, shape):
        hits = np.argwhere(bad)
        if len(hits):
            return rep.add(name, False, {"index": hits[0].tolist(), "axes": shape})
        return rep.add(name, True)

    G, M = mp.G_group.table, mp.M_group.table
    s, u, t, v = np.meshgrid(*(np.arange(n) for n in (nM, nG, nM, nG)), indexing="ij")
    e = t == mp.act_right[s, u]
    f = g[s, u] == mp.act_left[m[t, v], g[t, v]]
    axes = "(s, u, t, v)"
    ok = scan("(e) ⟺ (f)", e != f, axes)
    ok = scan("(g) given (e)", e & (m[s, G[u, v]] != M[m[s, u], m[t, v]]), axes) and ok
    ok = scan("(h) given (e)", e & (g[s, G[u, v]] != g[t, v]), axes) and ok
    if not ok:
        return None, rep
    # ψ(s) = g(s, e) in G, ψ(u) = m(e, u) in M, ψ(su) = ψ(s)ψ(u)
    X = mp.X
    psi = np.empty(X.order, dtype=np.int64)
    for x in range(X.order):
        s, u = mp.split_mg[x]
        psi[x] = X.mul(mp.gx(g[s, 0]), mp.mx(m[0, u]))
    if sorted(psi.tolist()) != list(range(X.order)):
        rep.add("ψ bijective", False, {})
        return None, rep
    rep.add("ψ bijective", True)
    inv = np.empty_like(psi)
    inv[psi] = np.arange(X.order)
    theta = GroupIsomorphism(X, X, inv.tolist())
    rep.add("θ = ψ^{-1} is a group automorphism", theta.is_valid())
    rep.add("θ factor-reversing", is_factor_reversing(mp, theta))
    if not rep.passed:
        return None, rep
    fwd = theta_images(mp, theta)
    a, b = fwd // nG, fwd % nG
    s, u = np.divmod(np.arange(d), nG)
    th = lambda x: mp.M.local(theta(mp.gx(x)))  # noqa: E731  G -> M local
    tm = lambda x: mp.G.local(theta(mp.mx(x)))  # noqa: E731  M -> G local
    c = np.array([th(mp.lt(m[i, j], g[i, j])) for i, j in zip(s, u)])
    dd = np.array([tm(mp.rt(m[i, j], g[i, j])) for i, j in zip(s, u)])
    scan("(a), (b)", (m[a, b] != s) | (g[a, b] != u), "(s·|G| + u,)")
    scan("(c), (d)", (c != s) | (dd != u), "(s·|G| + u,)")
    rep.add("θ̃ reproduces φ", np.array_equal(fwd, images))
    return (theta if rep.passed else None), rep
