"""Representations of D(H): bicrossed bimodules, the Schrödinger module on H,
braidings and the correspondence χ with D(X)-modules.

A bicrossed bimodule W carries a G-grading |w|, an M-grading ⟨w⟩, a left M
action and a right G action.  Gradings are stored per basis index, so every
basis vector is homogeneous.  Action matrices are Sparse (out, in).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bicrossproduct import build_H
from .double import build_double_general, coadjoint_actions
from .errors import ModuleUnverified, NotDecomposable, ShapeError
from .groups import FiniteGroup
from .hopf import HopfAlgebra, compare, dual_hopf
from .linalg import BasisSpace, LinearMap, cycle_structure, rank
from .matched_pair import MatchedPair
from .report import Report
from .sparse import Sparse, contract


def _matmul(a: Sparse, b: Sparse) -> Sparse:
    return contract("ij,jk->ik", a, b)


def _kron(a: Sparse, b: Sparse) -> Sparse:
    return contract("ab,cd->acbd", a, b).reshape((a.shape[0] * b.shape[0], a.shape[1] * b.shape[1]))


def _columns(a: Sparse, keep: np.ndarray) -> Sparse:
    """Entries of a whose column is flagged in keep."""
    sel = keep[a.idx[:, 1]]
    return Sparse(a.shape, a.idx[sel], a.num[sel], a.den)


def _total(parts: list[Sparse], shape) -> Sparse:
    out = Sparse.zeros(shape)
    for p in parts:
        out = out + p
    return out


def _diag(mask: np.ndarray) -> Sparse:
    i = np.flatnonzero(mask)
    return Sparse((len(mask), len(mask)), np.stack([i, i], 1), np.ones(len(i), np.int64))


def _first_bad_column(a: Sparse, b: Sparse) -> int | None:
    diff = a - b
    return None if diff.nnz == 0 else int(diff.idx[np.argmin(diff.idx[:, 1]), 1])


def _graded_images(a: Sparse, grade_out: np.ndarray, expected: np.ndarray) -> int | None:
    """First input index whose image has a component outside the expected grade."""
    rows, cols = a.idx[:, 0], a.idx[:, 1]
    bad = grade_out[rows] != expected[cols]
    return int(cols[bad].min()) if bad.any() else None


@dataclass(eq=False)
class BicrossedBimodule:
    mp: MatchedPair
    space: BasisSpace
    gradeG: np.ndarray
    gradeM: np.ndarray
    actM: list[LinearMap]
    actG: list[LinearMap]
    verified: bool = field(default=False, repr=False)

    def __post_init__(self):
        self.gradeG = np.asarray(self.gradeG, dtype=np.int64)
        self.gradeM = np.asarray(self.gradeM, dtype=np.int64)
        d = self.space.dim
        if len(self.gradeG) != d or len(self.gradeM) != d:
            raise ShapeError("one grade per basis index is required")
        if len(self.actM) != self.mp.nM or len(self.actG) != self.mp.nG:
            raise ShapeError("one action matrix per group element is required")
        for a in (*self.actM, *self.actG):
            if a.shape != (d, d):
                raise ShapeError(f"action matrix of shape {a.shape} on a {d}-dim space")

    @property
    def dim(self) -> int:
        return self.space.dim

    def m(self, t: int) -> Sparse:
        return self.actM[t].data

    def g(self, u: int) -> Sparse:
        return self.actG[u].data

    @classmethod
    def from_images(cls, mp: MatchedPair, space: BasisSpace, gradeG, gradeM, m_images, g_images):
        maps_m = [LinearMap.from_images(space, space, im) for im in m_images]
        maps_g = [LinearMap.from_images(space, space, im) for im in g_images]
        return cls(mp, space, gradeG, gradeM, maps_m, maps_g)

    def to_json(self) -> dict:
        return {"dim": self.dim, "gradeG": self.gradeG.tolist(), "gradeM": self.gradeM.tolist(),
                "actM": [a.to_json() for a in self.actM], "actG": [a.to_json() for a in self.actG]}

    @classmethod
    def from_json(cls, mp: MatchedPair, obj: dict) -> "BicrossedBimodule":
        space = BasisSpace.opaque(int(obj["dim"]))
        return cls(mp, space, obj["gradeG"], obj["gradeM"],
                   [LinearMap.from_json(a, space, space) for a in obj["actM"]],
                   [LinearMap.from_json(a, space, space) for a in obj["actG"]])

    def same_as(self, other: "BicrossedBimodule") -> bool:
        return (np.array_equal(self.gradeG, other.gradeG) and np.array_equal(self.gradeM, other.gradeM)
                and all(a == b for a, b in zip(self.actM, other.actM))
                and all(a == b for a, b in zip(self.actG, other.actG)))


def trivial_module(mp: MatchedPair) -> BicrossedBimodule:
    space = BasisSpace.opaque(1, "trivial")
    return BicrossedBimodule.from_images(mp, space, [0], [0], [[0]] * mp.nM, [[0]] * mp.nG)


def _group_law(rep: Report, name: str, mats: list[Sparse], table: np.ndarray, right: bool) -> None:
    d = mats[0].shape[0]
    if mats[0] != Sparse.identity(d):
        rep.add(name, False, {"element": 0, "reason": "identity does not act trivially"})
        return
    n = len(mats)
    for a in range(n):
        for b in range(n):
            # left: a▷(b▷w) = (ab)▷w ; right: (w◁a)◁b = w◁(ab)
            lhs = _matmul(mats[b], mats[a]) if right else _matmul(mats[a], mats[b])
            if lhs != mats[table[a, b]]:
                rep.add(name, False, {"pair": [a, b], "index": _first_bad_column(lhs, mats[table[a, b]])})
                return
    rep.add(name, True)


def verify_bicrossed_bimodule(w: BicrossedBimodule, with_double: bool = True) -> Report:
    """Conditions (i)-(iv) exhaustively on (t, u, basis index), plus the induced
    D(H)-module checks (compatibility identity and module law) when with_double."""
    mp = w.mp
    G, gi, M, mi = mp.G_group.table, mp.G_group.inv, mp.M_group.table, mp.M_group.inv
    lt, rt = mp.act_left, mp.act_right
    gG, gM = w.gradeG, w.gradeM
    rep = Report("bicrossed bimodule")
    ok = bool(np.all((0 <= gG) & (gG < mp.nG)) and np.all((0 <= gM) & (gM < mp.nM)))
    rep.add("grades in range", ok)
    if not ok:
        return rep

    def graded(name, mats, expect):
        for k, a in enumerate(mats):
            grade_out, want = expect(k)
            bad = _graded_images(a, grade_out, want)
            if bad is not None:
                rep.add(name, False, {"element": k, "index": bad})
                return
        rep.add(name, True)

    ms = [w.m(t) for t in range(mp.nM)]
    gs = [w.g(u) for u in range(mp.nG)]
    _group_law(rep, "(i) left M-action", ms, M, right=False)
    graded("(i) |t▷w| = t▷|w|", ms, lambda t: (gG, lt[t, gG]))
    _group_law(rep, "(ii) right G-action", gs, G, right=True)
    graded("(ii) ⟨w◁u⟩ = ⟨w⟩◁u", gs, lambda u: (gM, rt[gM, u]))
    graded("(iii) ⟨t▷w⟩ = t⟨w⟩(t◁|w|)^-1", ms, lambda t: (gM, M[M[t, gM], mi[rt[t, gG]]]))
    graded("(iii) |w◁u| = (⟨w⟩▷u)^-1|w|u", gs, lambda u: (gG, G[G[gi[lt[gM, u]], gG], u]))

    # (iv) (t◁(⟨w⟩▷u))▷(w◁u) = (t▷w)◁((t◁|w|)▷u)
    bad = None
    for t in range(mp.nM):
        for u in range(mp.nG):
            lhs_t = rt[t, lt[gM, u]]
            rhs_u = lt[rt[t, gG], u]
            lhs = _total([_columns(_matmul(ms[k], gs[u]), lhs_t == k) for k in range(mp.nM)], (w.dim, w.dim))
            rhs = _total([_columns(_matmul(gs[k], ms[t]), rhs_u == k) for k in range(mp.nG)], (w.dim, w.dim))
            col = _first_bad_column(lhs, rhs)
            if col is not None:
                bad = {"t": t, "u": u, "index": col}
                break
        if bad:
            break
    rep.add("(iv) (t◁(⟨w⟩▷u))▷(w◁u) = (t▷w)◁((t◁|w|)▷u)", bad is None, bad)
    if with_double:
        structural = rep.passed
        sub = verify_induced_double_action(w)
        for c in sub:
            detail = c.detail
            if structural and not c.passed:
                detail = "internal inconsistency: (i)-(iv) hold but the induced action fails"
            rep.add(c.name, c.passed, c.counterexample, detail)
    w.verified = rep.passed
    return rep


# induced actions of H, H* and D(H)

def bimodule_actions(w: BicrossedBimodule) -> tuple[Sparse, Sparse]:
    """(A_H, A_dual): A_H[h, w, z] for (t⊗δ_v)▷w = δ_{v,|w|} t▷w and
    A_dual[a, w, z] for w◁(δ_s⊗u) = δ_{s,⟨w⟩} w◁u, with h = t·|G| + v, a = s·|G| + u."""
    mp = w.mp
    nG, nM, d = mp.nG, mp.nM, w.dim
    h_parts, a_parts = [], []
    for t in range(nM):
        for v in range(nG):
            m = _matmul(w.m(t), _diag(w.gradeG == v))
            h_parts.append(_stack_index(t * nG + v, m))
    for s in range(nM):
        for u in range(nG):
            m = _matmul(w.g(u), _diag(w.gradeM == s))
            a_parts.append(_stack_index(s * nG + u, m))
    n = nG * nM
    return _gather(h_parts, (n, d, d)), _gather(a_parts, (n, d, d))


def _stack_index(i: int, m: Sparse):
    """Matrix (out, in) as entries [i, in, out]."""
    return np.column_stack([np.full(m.nnz, i), m.idx[:, 1], m.idx[:, 0]]), m.num, m.den


def _gather(parts, shape) -> Sparse:
    out = Sparse.zeros(shape)
    for idx, num, den in parts:
        out = out + Sparse(shape, idx, num, den)
    return out


def double_action(w: BicrossedBimodule) -> Sparse:
    """ACT[X, w, z] for X = a·dim(H) + h acting by (a⊗h)▷w = (h▷w)◁a."""
    ah, aa = bimodule_actions(w)
    n = ah.shape[0]
    return contract("hwy,ayz->ahwz", ah, aa).reshape((n * n, w.dim, w.dim))


def verify_module_law(dh: HopfAlgebra, act: Sparse) -> Report:
    """(XY)▷w = X▷(Y▷w) and 1▷w = w for the action tensor act[X, w, z]."""
    rep = Report("D(H)-module law")
    d = act.shape[1]
    compare(rep, "(XY)▷w = X▷(Y▷w)", contract("XYZ,Zwz->XYwz", dh.product, act),
            contract("Ywv,Xvz->XYwz", act, act), 3)
    compare(rep, "1▷w = w", contract("X,Xwz->zw", dh.unit, act), Sparse.identity(d), 1)
    return rep


def verify_induced_double_action(w: BicrossedBimodule, h: HopfAlgebra | None = None) -> Report:
    """The compatibility identity h▷(w◁a) = Σ((h1◁a1)▷w)◁(h2▷a2) and the module law
    of (a⊗h)▷w = (h▷w)◁a against the general double."""
    mp = w.mp
    h = h or build_H(mp)
    dual = dual_hopf(h)
    ah, aa = bimodule_actions(w)
    left, right = coadjoint_actions(mp).tensors()   # h▷a in H*, h◁a in H
    rep = Report("induced D(H)-action")
    lhs = contract("awy,hyz->hawz", aa, ah)
    rhs = contract("hxy,apq,xpY,yqc,Ywv,cvz->hawz", h.coproduct, dual.coproduct, right, left, ah, aa)
    compare(rep, "h▷(w◁a) = Σ((h1◁a1)▷w)◁(h2▷a2)", lhs, rhs, 3)
    rep.extend(verify_module_law(build_double_general(h), double_action(w)))
    return rep


def module_from_double_action(mp: MatchedPair, action, space: BasisSpace | None = None) -> BicrossedBimodule:
    """Recover gradings and M, G actions from a D(H)-action given as act[X, w, z] or
    as one LinearMap per basis element X = a·dim(H) + h."""
    nG, nM = mp.nG, mp.nM
    dh = nG * nM
    if not isinstance(action, Sparse):
        mats = list(action)
        d = mats[0].shape[0]
        parts = [_stack_index(i, m.data) for i, m in enumerate(mats)]
        action = _gather(parts, (dh * dh, d, d))
    d = action.shape[1]
    space = space or BasisSpace.opaque(d)

    def element(pairs):
        """Matrix (out, in) of Σ (a⊗h) over the given (a, h) pairs."""
        keys = np.array([a * dh + h for a, h in pairs], dtype=np.int64)
        sel = np.isin(action.idx[:, 0], keys)
        sub = Sparse((d, d), action.idx[sel][:, [2, 1]], action.num[sel], action.den)
        return sub

    def grades(projectors, what):
        grade = np.full(d, -1, np.int64)
        for k, p in enumerate(projectors):
            if p.den != 1 or np.any(p.num != 1) or np.any(p.idx[:, 0] != p.idx[:, 1]):
                raise NotDecomposable(f"{what} projector {k} is not diagonal in the given basis")
            i = p.idx[:, 0]
            if np.any(grade[i] >= 0):
                raise NotDecomposable(f"{what} projectors overlap")
            grade[i] = k
        if np.any(grade < 0):
            raise NotDecomposable(f"{what} projectors do not cover the space")
        return grade

    all_a = [s * nG for s in range(nM)]            # δ_s⊗e, summing to 1 in H*
    all_h = [v for v in range(nG)]                 # e⊗δ_v, summing to 1 in H
    grade_g = grades([element([(a, v) for a in all_a]) for v in range(nG)], "G-grade")
    grade_m = grades([element([(s * nG, h) for h in all_h]) for s in range(nM)], "M-grade")
    act_m = [LinearMap(space, space, element([(a, t * nG + v) for a in all_a for v in range(nG)]))
             for t in range(nM)]
    act_g = [LinearMap(space, space, element([(s * nG + u, h) for s in range(nM) for h in all_h]))
             for u in range(nG)]
    return BicrossedBimodule(mp, space, grade_g, grade_m, act_m, act_g)


# the Schrödinger module

def schrodinger_module(mp: MatchedPair) -> BicrossedBimodule:
    """H itself, with |t⊗δ_v| = (t▷v)v^{-1}, ⟨t⊗δ_v⟩ = t,
    s▷(t⊗δ_v) = st s'^{-1}⊗δ_{s'▷v} for s' = s◁(t▷v)v^{-1}, (t⊗δ_v)◁u = t◁u⊗δ_{u^{-1}v}."""
    from .bicrossproduct import h_space
    G, gi, M, mi = mp.G_group.table, mp.G_group.inv, mp.M_group.table, mp.M_group.inv
    lt, rt = mp.act_left, mp.act_right
    nG = mp.nG
    t, v = np.divmod(np.arange(mp.nM * nG), nG)
    grade_g = G[lt[t, v], gi[v]]
    m_images = []
    for s in range(mp.nM):
        sp = rt[s, grade_g]
        m_images.append(M[M[s, t], mi[sp]] * nG + lt[sp, v])
    g_images = [rt[t, u] * nG + G[gi[u], v] for u in range(nG)]
    return BicrossedBimodule.from_images(mp, h_space(mp), grade_g, t, m_images, g_images)


def regular_actions(h: HopfAlgebra) -> tuple[Sparse, Sparse]:
    """Quantum adjoint action h▷g = Σ h1 g S h2 and right coregular action
    h◁a = Σ ⟨a, h1⟩ h2, as tensors [h, g, z] and [a, g, z]."""
    P, D, S = h.product, h.coproduct, h.antipode
    adj = contract("hxy,xgp,qy,pqz->hgz", D, P, S, P)
    coreg = D.transpose((1, 0, 2))
    return adj, coreg


def closed_form_schrodinger_actions(mp: MatchedPair) -> tuple[Sparse, Sparse]:
    """(s⊗δ_u)▷(t⊗δ_v) = δ_{uv,t▷v} st(s◁u)^{-1}⊗δ_{(s◁u)▷v},
    (t⊗δ_v)◁(δ_s⊗u) = δ_{s,t} t◁u⊗δ_{u^{-1}v}."""
    G, gi, M, mi = mp.G_group.table, mp.G_group.inv, mp.M_group.table, mp.M_group.inv
    lt, rt = mp.act_left, mp.act_right
    nG, nM = mp.nG, mp.nM
    d = nG * nM
    s, u, t, v = (a.ravel() for a in np.meshgrid(np.arange(nM), np.arange(nG), np.arange(nM), np.arange(nG),
                                                 indexing="ij"))
    ok = G[u, v] == lt[t, v]
    su = rt[s, u]
    out = M[M[s, t], mi[su]] * nG + lt[su, v]
    adj = Sparse((d, d, d), np.stack([(s * nG + u)[ok], (t * nG + v)[ok], out[ok]], 1), np.ones(ok.sum(), np.int64))
    ok = s == t
    out = rt[t, u] * nG + G[gi[u], v]
    coreg = Sparse((d, d, d), np.stack([(s * nG + u)[ok], (t * nG + v)[ok], out[ok]], 1), np.ones(ok.sum(), np.int64))
    return adj, coreg


def verify_schrodinger(mp: MatchedPair, w: BicrossedBimodule | None = None, h: HopfAlgebra | None = None) -> Report:
    """Three routes to the same actions: direct evaluation of the quantum adjoint and
    coregular actions, their closed forms, and the gradings and M, G
    actions of schrodinger_module fed through the bimodule-to-D(H) dictionary."""
    h = h or build_H(mp)
    w = w or schrodinger_module(mp)
    direct_h, direct_a = regular_actions(h)
    shown_h, shown_a = closed_form_schrodinger_actions(mp)
    mod_h, mod_a = bimodule_actions(w)
    rep = Report("Schrödinger representation")
    compare(rep, "H action: closed form = quantum adjoint action", shown_h, direct_h, 2)
    compare(rep, "H action: bimodule data = quantum adjoint action", mod_h, direct_h, 2)
    compare(rep, "H* action: closed form = coregular action", shown_a, direct_a, 2)
    compare(rep, "H* action: bimodule data = coregular action", mod_a, direct_a, 2)
    return rep


# braiding

def _require_verified(*mods: BicrossedBimodule, allow_unverified: bool = False):
    if allow_unverified:
        return
    for m in mods:
        if not m.verified:
            raise ModuleUnverified("run verify_bicrossed_bimodule first or pass allow_unverified=True")


def braiding(v: BicrossedBimodule, w: BicrossedBimodule, allow_unverified: bool = False) -> LinearMap:
    """Ψ(v⊗w) = ⟨v⟩▷w ⊗ v◁|w|, from V⊗W (index i·dim W + j) to W⊗V."""
    _require_verified(v, w, allow_unverified=allow_unverified)
    dv, dw = v.dim, w.dim
    parts = []
    for s in range(v.mp.nM):
        for u in range(v.mp.nG):
            a = _columns(w.m(s), w.gradeG == u)          # acts on w with |w| = u
            b = _columns(v.g(u), v.gradeM == s)          # acts on v with ⟨v⟩ = s
            if a.nnz and b.nnz:
                # out (z, y) from in (i, j): a[z, j] b[y, i]
                parts.append(contract("zj,yi->zyij", a, b).reshape((dw * dv, dv * dw)))
    out = _total(parts, (dw * dv, dv * dw))
    return LinearMap(v.space.tensor(w.space), w.space.tensor(v.space), out)


def braiding_from_double(v: BicrossedBimodule, w: BicrossedBimodule) -> LinearMap:
    """Ψ(v⊗w) = Σ_a e_a▷w ⊗ v◁f^a, summed over dual bases of H and H*."""
    ah_w, _ = bimodule_actions(w)
    _, aa_v = bimodule_actions(v)
    dv, dw = v.dim, w.dim
    out = contract("ajz,aiy->zyij", ah_w, aa_v).reshape((dw * dv, dv * dw))
    return LinearMap(v.space.tensor(w.space), w.space.tensor(v.space), out)


def canonical_braiding(h: HopfAlgebra) -> LinearMap:
    """Ψ(h⊗g) = Σ h1 g S h2 ⊗ h3 on H⊗H."""
    P, D, S = h.product, h.coproduct, h.antipode
    d = h.dim
    c3 = contract("hiz,ixy->hxyz", D, D)
    out = contract("hxyz,xgp,qy,pqA->Azhg", c3, P, S, P).reshape((d * d, d * d))
    return LinearMap(h.space.tensor(h.space), h.space.tensor(h.space), out)


def closed_form_schrodinger_braiding(mp: MatchedPair) -> LinearMap:
    """Ψ(s⊗δ_u⊗t⊗δ_v) = st s'^{-1}⊗δ_{s'▷v}⊗s'⊗δ_{v(t▷v)^{-1}u}, s' = s◁(t▷v)v^{-1}."""
    G, gi, M, mi = mp.G_group.table, mp.G_group.inv, mp.M_group.table, mp.M_group.inv
    lt, rt = mp.act_left, mp.act_right
    nG, nM = mp.nG, mp.nM
    d = nG * nM
    s, u, t, v = (a.ravel() for a in np.meshgrid(np.arange(nM), np.arange(nG), np.arange(nM), np.arange(nG),
                                                 indexing="ij"))
    tv = lt[t, v]
    sp = rt[s, G[tv, gi[v]]]
    first = M[M[s, t], mi[sp]] * nG + lt[sp, v]
    second = sp * nG + G[G[v, gi[tv]], u]
    from .bicrossproduct import h_space
    space = h_space(mp)
    return LinearMap.from_images(space.tensor(space), space.tensor(space), first * d + second)


def verify_schrodinger_braiding(mp: MatchedPair, w: BicrossedBimodule | None = None) -> Report:
    """Four routes on H⊗H: the bimodule formula, the dual-basis sum, the canonical
    braiding of H, and the closed form."""
    h = build_H(mp)
    w = w or schrodinger_module(mp)
    via_module = braiding(w, w, allow_unverified=True)
    rep = Report("Schrödinger braiding")
    compare(rep, "⟨v⟩▷w ⊗ v◁|w| = Σ h1 g S h2 ⊗ h3", via_module.data, canonical_braiding(h).data, 0)
    compare(rep, "⟨v⟩▷w ⊗ v◁|w| = Σ e_a▷w ⊗ v◁f^a", via_module.data, braiding_from_double(w, w).data, 0)
    compare(rep, "⟨v⟩▷w ⊗ v◁|w| = closed form", via_module.data, closed_form_schrodinger_braiding(mp).data, 0)
    return rep


def ybe_check(psi: LinearMap, dim: int | None = None) -> Report:
    """(ψ⊗id)(id⊗ψ)(ψ⊗id) = (id⊗ψ)(ψ⊗id)(id⊗ψ) on every basis vector of V⊗V⊗V, and ψ invertible."""
    n = dim or int(round(np.sqrt(psi.shape[0])))
    if psi.shape != (n * n, n * n):
        raise ShapeError("ψ must be square on a tensor square")
    rep = Report("Yang-Baxter")
    one = Sparse.identity(n)
    p12 = _kron(psi.data, one)
    p23 = _kron(one, psi.data)
    lhs = _matmul(p12, _matmul(p23, p12))
    rhs = _matmul(p23, _matmul(p12, p23))
    col = _first_bad_column(lhs, rhs)
    rep.add("(ψ⊗id)(id⊗ψ)(ψ⊗id) = (id⊗ψ)(ψ⊗id)(id⊗ψ)", col is None,
            None if col is None else {"basis": [col // (n * n), col // n % n, col % n]},
            detail=f"{n ** 3} basis vectors")
    images = psi.permutation_images()
    invertible = images is not None or rank(psi) == n * n
    rep.add("ψ invertible", invertible)
    return rep


def flip_map(n: int) -> LinearMap:
    i, j = np.divmod(np.arange(n * n), n)
    space = BasisSpace.opaque(n).power(2)
    return LinearMap.from_images(space, space, j * n + i)


def induced_shift(psi: LinearMap, mp: MatchedPair, s_block, t_block) -> tuple[dict, int]:
    """The map (u, v) -> (u', v') that Ψ induces on G-labels of s⊗δ_u⊗t⊗δ_v for s in
    s_block and t in t_block, and its order.  Raises if it depends on s, t."""
    images = psi.permutation_images()
    if images is None:
        raise ShapeError("Ψ is not a permutation of basis vectors")
    nG = mp.nG
    d = mp.nM * nG
    shift: dict = {}
    for s in s_block:
        for t in t_block:
            for u in range(nG):
                for v in range(nG):
                    out = images[(s * nG + u) * d + t * nG + v]
                    a, b = divmod(int(out), d)
                    target = (a % nG, b % nG)
                    if shift.setdefault((u, v), target) != target:
                        raise ShapeError(f"the induced shift depends on (s, t) at {(u, v)}")
    perm = np.array([shift[(u, v)][0] * nG + shift[(u, v)][1] for u in range(nG) for v in range(nG)])
    order = int(np.lcm.reduce(cycle_structure(LinearMap.from_images(BasisSpace.opaque(nG * nG),
                                                                   BasisSpace.opaque(nG * nG), perm))))
    return shift, order


# D(X)-modules and χ

@dataclass(eq=False)
class DXModule:
    X: FiniteGroup
    space: BasisSpace
    gradeX: np.ndarray
    actX: list[LinearMap]
    verified: bool = field(default=False, repr=False)

    def __post_init__(self):
        self.gradeX = np.asarray(self.gradeX, dtype=np.int64)
        if len(self.gradeX) != self.space.dim or len(self.actX) != self.X.order:
            raise ShapeError("DXModule needs one grade per basis index and one matrix per group element")

    @property
    def dim(self) -> int:
        return self.space.dim

    def act(self, y: int) -> Sparse:
        return self.actX[y].data

    def same_as(self, other: "DXModule") -> bool:
        return np.array_equal(self.gradeX, other.gradeX) and all(a == b for a, b in zip(self.actX, other.actX))


def verify_dx_module(v: DXModule) -> Report:
    """Left X-action and ‖y▷v‖ = y‖v‖y^{-1} on every image component."""
    x = v.X
    T, inv = x.table, x.inv
    rep = Report("D(X)-module")
    mats = [v.act(y) for y in range(x.order)]
    _group_law(rep, "left X-action", mats, T, right=False)
    bad = None
    for y in range(x.order):
        b = _graded_images(mats[y], v.gradeX, T[T[y, v.gradeX], inv[y]])
        if b is not None:
            bad = {"y": y, "index": b}
            break
    rep.add("‖y▷v‖ = y‖v‖y^-1", bad is None, bad)
    v.verified = rep.passed
    return rep


def dx_action(v: DXModule) -> Sparse:
    """ACT[δ_x⊗y, w, z] for (δ_x⊗y)▷v = δ_{x,‖y▷v‖} y▷v."""
    n = v.X.order
    parts = []
    for y in range(n):
        m = v.act(y)
        xs = v.gradeX[m.idx[:, 0]]
        parts.append((np.column_stack([xs * n + y, m.idx[:, 1], m.idx[:, 0]]), m.num, m.den))
    return _gather(parts, (n * n, v.dim, v.dim))


def chi_to_DX(w: BicrossedBimodule, allow_unverified: bool = False) -> DXModule:
    """‖χ(w)‖ = ⟨w⟩^{-1}|w| and us ▷̃ χ(w) = χ(((s◁|w|^{-1})▷w)◁u^{-1})."""
    _require_verified(w, allow_unverified=allow_unverified)
    mp = w.mp
    x = mp.X
    gi = mp.G_group.inv
    gx, mx = np.asarray(mp.G.elements), np.asarray(mp.M.elements)
    grade = x.table[x.inv[mx[w.gradeM]], gx[w.gradeG]]
    acts = []
    for y in range(x.order):
        u, s = mp.split_gm[y]
        m_of = mp.act_right[s, gi[w.gradeG]]       # s◁|w|^{-1} per basis index
        parts = [_columns(_matmul(w.g(gi[u]), w.m(k)), m_of == k) for k in range(mp.nM)]
        acts.append(LinearMap(w.space, w.space, _total(parts, (w.dim, w.dim))))
    return DXModule(x, w.space, grade, acts)


def chi_from_DX(v: DXModule, mp: MatchedPair, allow_unverified: bool = False) -> BicrossedBimodule:
    """Gradings from ‖v‖ = ⟨v⟩^{-1}|v|; t▷v = (t◁|v|)▷̃v and v◁u = u^{-1}▷̃v."""
    if not allow_unverified and not v.verified:
        raise ModuleUnverified("run verify_dx_module first or pass allow_unverified=True")
    mi, gi = mp.M_group.inv, mp.G_group.inv
    m_part, g_part = mp.split_mg[v.gradeX].T     # ‖v‖ = m g
    grade_m, grade_g = mi[m_part], g_part
    gx, mx = mp.G.elements, mp.M.elements
    act_m = []
    for t in range(mp.nM):
        m_of = mp.act_right[t, grade_g]
        parts = [_columns(v.act(mx[k]), m_of == k) for k in range(mp.nM)]
        act_m.append(LinearMap(v.space, v.space, _total(parts, (v.dim, v.dim))))
    act_g = [LinearMap(v.space, v.space, v.act(gx[gi[u]])) for u in range(mp.nG)]
    return BicrossedBimodule(mp, v.space, grade_g, grade_m, act_m, act_g)


# tensor products and c

def tensor_bimodule(w: BicrossedBimodule, w2: BicrossedBimodule) -> BicrossedBimodule:
    """t▷(w⊗w') = t▷w ⊗ (t◁|w|)▷w', |w⊗w'| = |w||w'|,
    (w⊗w')◁u = w◁(⟨w'⟩▷u) ⊗ w'◁u, ⟨w⊗w'⟩ = ⟨w⟩⟨w'⟩."""
    mp = w.mp
    d1, d2 = w.dim, w2.dim
    i, j = np.divmod(np.arange(d1 * d2), d2)
    gG = mp.G_group.table[w.gradeG[i], w2.gradeG[j]]
    gM = mp.M_group.table[w.gradeM[i], w2.gradeM[j]]
    space = w.space.tensor(w2.space)
    act_m, act_g = [], []
    for t in range(mp.nM):
        parts = []
        for g in range(mp.nG):
            left = _columns(w.m(t), w.gradeG == g)
            parts.append(_kron(left, w2.m(mp.act_right[t, g])))
        act_m.append(LinearMap(space, space, _total(parts, (d1 * d2, d1 * d2))))
    for u in range(mp.nG):
        parts = []
        for s in range(mp.nM):
            right = _columns(w2.g(u), w2.gradeM == s)
            parts.append(_kron(w.g(mp.act_left[s, u]), right))
        act_g.append(LinearMap(space, space, _total(parts, (d1 * d2, d1 * d2))))
    return BicrossedBimodule(mp, space, gG, gM, act_m, act_g)


def tensor_dx(v: DXModule, v2: DXModule) -> DXModule:
    """y▷̃(v⊗v') = y▷̃v ⊗ y▷̃v' and ‖v⊗v'‖ = ‖v‖‖v'‖."""
    d2 = v2.dim
    i, j = np.divmod(np.arange(v.dim * d2), d2)
    space = v.space.tensor(v2.space)
    acts = [LinearMap(space, space, _kron(v.act(y), v2.act(y))) for y in range(v.X.order)]
    return DXModule(v.X, space, v.X.table[v.gradeX[i], v2.gradeX[j]], acts)


def c_map(w: BicrossedBimodule, w2: BicrossedBimodule, allow_unverified: bool = False) -> LinearMap:
    """c(χw ⊗ χw') = χ((⟨w'⟩◁|w|^{-1})▷w ⊗ w') on the common space W⊗W'."""
    _require_verified(w, w2, allow_unverified=allow_unverified)
    mp = w.mp
    gi = mp.G_group.inv
    d1, d2 = w.dim, w2.dim
    i, j = np.divmod(np.arange(d1 * d2), d2)
    which = mp.act_right[w2.gradeM[j], gi[w.gradeG[i]]]
    one = Sparse.identity(d2)
    parts = [_columns(_kron(w.m(k), one), which == k) for k in range(mp.nM)]
    space = w.space.tensor(w2.space)
    return LinearMap(space, space, _total(parts, (d1 * d2, d1 * d2)))


def verify_c_map(w: BicrossedBimodule, w2: BicrossedBimodule) -> Report:
    """c is invertible, preserves the X-grading, and intertwines every y ▷̃."""
    c = c_map(w, w2).data
    src = tensor_dx(chi_to_DX(w), chi_to_DX(w2))
    tgt = chi_to_DX(tensor_bimodule(w, w2), allow_unverified=True)
    rep = Report("c: χW⊗χW' -> χ(W⊗W')")
    rep.add("c invertible", LinearMap(src.space, src.space, c).permutation_images() is not None
            or rank(c) == c.shape[0])
    bad = _graded_images(c, tgt.gradeX, src.gradeX)
    rep.add("‖c(·)‖ = ‖·‖", bad is None, None if bad is None else {"index": bad})
    bad = None
    for y in range(w.mp.X.order):
        col = _first_bad_column(_matmul(tgt.act(y), c), _matmul(c, src.act(y)))
        if col is not None:
            bad = {"y": y, "index": col}
            break
    rep.add("y▷̃ c = c y▷̃ for all y in X", bad is None, bad)
    return rep


def dx_braiding(v: DXModule, v2: DXModule, form: str = "matched") -> LinearMap:
    """Braiding of D(X)-modules from V⊗W to W⊗V.

    ``"matched"``: v⊗w ↦ w ⊗ ‖w‖^{-1}▷̃v, the form that χ and c carry Ψ onto.
    ``"R"``: v⊗w ↦ ‖v‖▷̃w ⊗ v, the flip composed with R = Σ δ_y⊗e⊗δ_z⊗y; it is
    the inverse of the matched form after swapping the factors.
    """
    d1, d2 = v.dim, v2.dim
    parts = []
    for x in range(v.X.order):
        if form == "R":
            left = _columns(Sparse.identity(d1), v.gradeX == x)
            if left.nnz:
                parts.append(contract("zj,yi->zyij", v2.act(x), left).reshape((d2 * d1, d1 * d2)))
        elif form == "matched":
            right = _columns(Sparse.identity(d2), v2.gradeX == x)
            if right.nnz:
                parts.append(contract("zj,yi->zyij", right, v.act(v.X.inv[x])).reshape((d2 * d1, d1 * d2)))
        else:
            raise ValueError(f"unknown braiding form {form!r}")
    return LinearMap(v.space.tensor(v2.space), v2.space.tensor(v.space), _total(parts, (d2 * d1, d1 * d2)))


def verify_braiding_naturality(w: BicrossedBimodule, w2: BicrossedBimodule) -> Report:
    """Ψ_{W,W'} ∘ c_{W,W'} = c_{W',W} ∘ B_{χW,χW'} as maps χW⊗χW' -> χ(W'⊗W),
    B the matched D(X) braiding.  Also checks B_{V,W} = (B^R_{W,V})^{-1}."""
    rep = Report("braiding transported through (χ, c)")
    lhs = _matmul(braiding(w, w2).data, c_map(w, w2).data)
    v, v2 = chi_to_DX(w), chi_to_DX(w2)
    b = dx_braiding(v, v2).data
    rhs = _matmul(c_map(w2, w).data, b)
    compare(rep, "Ψ c = c B", lhs.transpose((1, 0)), rhs.transpose((1, 0)), 1)
    round_trip = _matmul(dx_braiding(v2, v, form="R").data, b)
    compare(rep, "B^R_{W,V} B_{V,W} = id", round_trip, Sparse.identity(b.shape[1]), 1)
    return rep


def verify_chi(w: BicrossedBimodule) -> Report:
    """χ(w) is a D(X)-module and χ^{-1}χ(w) = w."""
    rep = Report("χ correspondence")
    v = chi_to_DX(w)
    rep.extend(verify_dx_module(v), "χ(W): ")
    back = chi_from_DX(v, w.mp, allow_unverified=True)
    rep.add("χ^{-1}(χ(W)) = W", back.same_as(w))
    return rep
