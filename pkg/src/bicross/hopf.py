"""Finite-dimensional Hopf algebras as exact sparse structure constants.

Conventions for a basis e_0..e_{d-1}:

* ``product[i, j, k]``   coefficient of e_k in e_i e_j
* ``coproduct[i, j, k]`` coefficient of e_j ⊗ e_k in Δ(e_i)
* ``unit[i]``, ``counit[i]``  the unit element and ε(e_i)
* ``antipode[r, c]``, ``star[r, c]``  matrices acting on column vectors
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, NamedTuple, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .errors import MissingStar
from .groups import FiniteGroup
from .linalg import AlgebraElement, BasisSpace, LinearMap
from .report import Report, fmt_scalar
from .sparse import Sparse, _mul, contract, encode_pair, join


class BicrossH(NamedTuple):
    """s ⊗ δ_u in kM ▷◀ k(G)"""
    s: int
    u: int

    def __str__(self):
        return f"H({self.s},{self.u})"


class BicrossDual(NamedTuple):
    """δ_s ⊗ u in k(M) ▶◁ kG"""
    s: int
    u: int

    def __str__(self):
        return f"Hd({self.s},{self.u})"


class DoublePair(NamedTuple):
    """a ⊗ h in H* ⊗ H"""
    dual: Any
    alg: Any

    def __str__(self):
        return f"[{self.dual}|{self.alg}]"


class GroupDouble(NamedTuple):
    """δ_x ⊗ y in k(X) ⋊ kX"""
    x: int
    y: int

    def __str__(self):
        return f"D({self.x},{self.y})"


class GroupElem(NamedTuple):
    x: int

    def __str__(self):
        return f"g{self.x}"


class Delta(NamedTuple):
    x: int

    def __str__(self):
        return f"d{self.x}"


class Opaque(NamedTuple):
    i: int

    def __str__(self):
        return f"e{self.i}"


class DualOf(NamedTuple):
    label: Any

    def __str__(self):
        return f"dual({self.label})"


_DUALS = {BicrossH: BicrossDual, BicrossDual: BicrossH, GroupElem: Delta, Delta: GroupElem}


def dual_label(label):
    """Label of the dual basis vector under the canonical pairing."""
    if type(label) in _DUALS:
        return _DUALS[type(label)](*label)
    if isinstance(label, DualOf):
        return label.label
    return DualOf(label)


@dataclass(eq=False)
class HopfAlgebra:
    space: BasisSpace
    product: Sparse
    unit: Sparse
    coproduct: Sparse
    counit: Sparse
    antipode: Sparse
    star: Sparse | None = None
    name: str = ""
    _keys: Any = field(default=None, repr=False)
    _keys_done: bool = field(default=False, repr=False)

    def __post_init__(self):
        d = self.space.dim
        for what, t, shape in (("product", self.product, (d, d, d)), ("coproduct", self.coproduct, (d, d, d)),
                               ("unit", self.unit, (d,)), ("counit", self.counit, (d,)),
                               ("antipode", self.antipode, (d, d))):
            if t.shape != shape:
                raise ValueError(f"{what} has shape {t.shape}, expected {shape}")
        if self.star is not None and self.star.shape != (d, d):
            raise ValueError("star has the wrong shape")

    @property
    def dim(self) -> int:
        return self.space.dim

    @property
    def labels(self) -> tuple:
        return self.space.labels

    def __repr__(self) -> str:
        return f"HopfAlgebra({self.name or '?'}, dim={self.dim})"

    def antipode_map(self) -> LinearMap:
        return LinearMap(self.space, self.space, self.antipode)

    def star_map(self) -> LinearMap:
        if self.star is None:
            raise MissingStar(f"{self.name} has no star structure")
        return LinearMap(self.space, self.space, self.star)

    def unit_element(self) -> AlgebraElement:
        return AlgebraElement(self.space, self.unit)

    def basis(self, i: int) -> Sparse:
        return Sparse.ones_at((self.dim,), [[i]])

    def same_structure(self, other: "HopfAlgebra") -> bool:
        return (self.product == other.product and self.coproduct == other.coproduct and self.unit == other.unit
                and self.counit == other.counit and self.antipode == other.antipode
                and (self.star is None or other.star is None or self.star == other.star))

    def differences(self, other: "HopfAlgebra") -> list[str]:
        out = []
        for name in ("product", "coproduct", "unit", "counit", "antipode", "star"):
            a, b = getattr(self, name), getattr(other, name)
            if a is not None and b is not None and a != b:
                out.append(name)
        return out

    # tensor-power multiplication
    def block_keys(self):
        """Keys (rho, lam) with e_i e_j != 0 iff rho[i] == lam[j], when such keys exist.

        They exist whenever the nonzero-product relation is a disjoint union of
        complete bipartite blocks, as for every groupoid-like algebra here.
        """
        if not self._keys_done:
            self._keys = _block_keys(self.product, self.dim)
            self._keys_done = True
        return self._keys

    def mul(self, x: Sparse, y: Sparse, n: int = 1) -> Sparse:
        """Product in H^{⊗n}.  The trailing n axes of x and y are tensor factors;
        leading axes are batch axes, output as (x batch, y batch, factors)."""
        return tensor_power_product(self, x, y, n)

    def element(self, coords: dict, n: int = 1) -> Sparse:
        return Sparse.from_entries((self.dim,) * n, coords.items())

    def one(self, n: int = 1) -> Sparse:
        out = self.unit
        for _ in range(n - 1):
            out = contract("a,b->ab", out, self.unit).reshape(out.shape + (self.dim,))
        return out

    def to_json(self) -> dict:
        def rows(t: Sparse):
            return [[*k, fmt_scalar(v)] for k, v in t.entries()]
        out = {"name": self.name, "dim": self.dim, "basis": [str(l) for l in self.labels],
               "product": rows(self.product), "coproduct": rows(self.coproduct),
               "unit": rows(self.unit), "counit": rows(self.counit), "antipode": rows(self.antipode)}
        if self.star is not None:
            out["star"] = rows(self.star)
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "HopfAlgebra":
        d = int(obj["dim"])

        def tensor(key, shape):
            return Sparse.from_entries(shape, [(tuple(int(i) for i in r[:-1]), Fraction(r[-1])) for r in obj[key]])
        labels = [Opaque(i) for i in range(d)]
        return cls(BasisSpace(labels), tensor("product", (d, d, d)), tensor("unit", (d,)),
                   tensor("coproduct", (d, d, d)), tensor("counit", (d,)), tensor("antipode", (d, d)),
                   tensor("star", (d, d)) if obj.get("star") is not None else None, obj.get("name", ""))


def _block_keys(product: Sparse, d: int):
    pairs = product.idx[:, :2]
    if len(pairs):
        keep = np.r_[True, np.any(pairs[1:] != pairs[:-1], axis=1)]
        pairs = pairs[keep]
    i, j = pairs[:, 0], pairs[:, 1]
    graph = coo_matrix((np.ones(len(i)), (i, j + d)), shape=(2 * d, 2 * d))
    _, comp = connected_components(graph, directed=False)
    ci = comp[i]
    lefts = np.zeros(comp.max() + 1, np.int64)
    rights = np.zeros(comp.max() + 1, np.int64)
    edges = np.bincount(ci, minlength=len(lefts))
    ui = np.unique(i)
    uj = np.unique(j)
    np.add.at(lefts, comp[ui], 1)
    np.add.at(rights, comp[uj + d], 1)
    if not np.array_equal(edges, lefts * rights):
        return None
    rho = np.full(d, -1, np.int64)
    lam = np.full(d, -2, np.int64)
    rho[ui] = comp[ui]
    lam[uj] = comp[uj + d]
    return rho + 2, lam + 2, int(comp.max()) + 3


def tensor_power_product(h: HopfAlgebra, x: Sparse, y: Sparse, n: int) -> Sparse:
    d = h.dim
    xb, yb = x.ndim - n, y.ndim - n
    if xb < 0 or yb < 0 or x.shape[xb:] != (d,) * n or y.shape[yb:] != (d,) * n:
        raise ValueError("operands do not end in the right tensor power")
    xf, yf = x.idx[:, xb:], y.idx[:, yb:]
    keys = h.block_keys()
    if keys is not None:
        rho, lam, radix = keys
        lk, rk = encode_pair(rho[xf], lam[yf], [radix] * n)
        li, ri = join(lk, rk)
    else:
        li = np.repeat(np.arange(x.nnz, dtype=np.int64), y.nnz)
        ri = np.tile(np.arange(y.nnz, dtype=np.int64), x.nnz)
    p = h.product
    pk = p.idx[:, 0] * d + p.idx[:, 1]
    num = _mul(x.num[li], y.num[ri])
    outs = []
    for f in range(n):
        q = xf[li, f] * d + yf[ri, f]
        lo = np.searchsorted(pk, q, "left")
        cnt = np.searchsorted(pk, q, "right") - lo
        sel = np.repeat(np.arange(len(q), dtype=np.int64), cnt)
        pos = np.repeat(lo - (np.cumsum(cnt) - cnt), cnt) + np.arange(len(sel), dtype=np.int64)
        li, ri = li[sel], ri[sel]
        outs = [o[sel] for o in outs] + [p.idx[pos, 2]]
        num = _mul(num[sel], p.num[pos])
    cols = [x.idx[li, :xb], y.idx[ri, :yb]] + [o[:, None] for o in outs]
    idx = np.concatenate(cols, axis=1) if cols else np.zeros((len(num), 0), np.int64)
    return Sparse(x.shape[:xb] + y.shape[:yb] + (d,) * n, idx, num, x.den * y.den * p.den ** n)


def group_hopf(x: FiniteGroup) -> HopfAlgebra:
    """kX: basis x, Δx = x⊗x, Sx = x^{-1}, ε(x) = 1, star x* = x^{-1}."""
    n = x.order
    ar = np.arange(n, dtype=np.int64)
    a, b = np.meshgrid(ar, ar, indexing="ij")
    one = np.ones(n * n, np.int64)
    product = Sparse((n, n, n), np.stack([a.ravel(), b.ravel(), x.table.ravel()], 1), one)
    coproduct = Sparse((n, n, n), np.stack([ar, ar, ar], 1), np.ones(n, np.int64))
    inv = LinearMap.from_images(BasisSpace.opaque(n), BasisSpace.opaque(n), x.inv).data
    return HopfAlgebra(BasisSpace([GroupElem(i) for i in range(n)]), product, Sparse.ones_at((n,), [[0]]),
                       coproduct, Sparse((n,), ar[:, None], np.ones(n, np.int64)), inv, inv, f"k[{x.name}]")


def function_hopf(x: FiniteGroup) -> HopfAlgebra:
    """k(X): basis δ_x, pointwise product, Δδ_x = Σ_{ab=x} δ_a⊗δ_b, ε(δ_x) = δ_{x,e}."""
    n = x.order
    ar = np.arange(n, dtype=np.int64)
    a, b = np.meshgrid(ar, ar, indexing="ij")
    product = Sparse((n, n, n), np.stack([ar, ar, ar], 1), np.ones(n, np.int64))
    coproduct = Sparse((n, n, n), np.stack([x.table.ravel(), a.ravel(), b.ravel()], 1), np.ones(n * n, np.int64))
    inv = LinearMap.from_images(BasisSpace.opaque(n), BasisSpace.opaque(n), x.inv).data
    star = Sparse.identity(n)
    return HopfAlgebra(BasisSpace([Delta(i) for i in range(n)]), product,
                       Sparse((n,), ar[:, None], np.ones(n, np.int64)), coproduct, Sparse.ones_at((n,), [[0]]),
                       inv, star, f"k({x.name})")


def dual_hopf(h: HopfAlgebra) -> HopfAlgebra:
    """The dual on the dual basis f^i: products and coproducts swap roles by transposition."""
    star = None
    if h.star is not None:
        # a*(x) = a((S x)*)
        star = contract("ck,kr->rc", h.star, h.antipode)
    space = BasisSpace([dual_label(l) for l in h.labels])
    return HopfAlgebra(space, h.coproduct.transpose((1, 2, 0)), h.counit, h.product.transpose((2, 0, 1)),
                       h.unit, h.antipode.transpose((1, 0)), star, f"dual({h.name})")


def _slice(t: Sparse, prefix: Sequence[int]) -> dict:
    n = len(prefix)
    if n == 0:
        return {k: v for k, v in t.entries()}
    sel = np.all(t.idx[:, :n] == np.asarray(prefix), axis=1)
    return {tuple(int(i) for i in row[n:]): Fraction(int(v), t.den) for row, v in zip(t.idx[sel], t.num[sel])}


def compare(rep: Report, name: str, lhs: Sparse, rhs: Sparse, n_inputs: int, detail: str = "") -> bool:
    """Record whether two tensors agree; on failure pinpoint the first input tuple."""
    if lhs == rhs:
        return rep.add(name, True, detail=detail)
    where = (lhs - rhs).idx[0][:n_inputs].tolist()
    return rep.add(name, False, {"index": where, "lhs": _slice(lhs, where), "rhs": _slice(rhs, where)}, detail)


def identity_tensor(d: int) -> Sparse:
    return Sparse.identity(d)


def verify_hopf_axioms(h: HopfAlgebra, involutive: bool = False) -> Report:
    """Exhaustive check of every Hopf algebra axiom on basis tuples.

    Each identity is evaluated as a whole sparse tensor indexed by its inputs,
    so all d^2 or d^3 basis tuples are covered while only nonzero supports are
    ever materialized.  ``involutive`` also checks S∘S = id.
    """
    rep = Report(f"Hopf axioms: {h.name}")
    P, D, U, E, S = h.product, h.coproduct, h.unit, h.counit, h.antipode
    d = h.dim
    ident = identity_tensor(d)
    compare(rep, "associativity", contract("abp,pcr->abcr", P, P), contract("bcq,aqr->abcr", P, P), 3)
    compare(rep, "left unit", contract("u,uar->ar", U, P), ident, 1)
    compare(rep, "right unit", contract("u,aur->ar", U, P), ident, 1)
    compare(rep, "coassociativity", contract("aij,ixy->axyj", D, D), contract("aij,jyz->aiyz", D, D), 1)
    compare(rep, "left counit", contract("aij,i->aj", D, E), ident, 1)
    compare(rep, "right counit", contract("aij,j->ai", D, E), ident, 1)
    if h.block_keys() is not None:
        delta_ab = h.mul(D, D, 2)  # Δ(a)Δ(b) in H⊗H, batched over a, b
    else:
        delta_ab = contract("aij,bkl,ikp,jlq->abpq", D, D, P, P)
    compare(rep, "coproduct multiplicative", contract("abk,kpq->abpq", P, D), delta_ab, 2)
    compare(rep, "counit multiplicative", contract("abk,k->ab", P, E), contract("a,b->ab", E, E), 2)
    compare(rep, "coproduct unital", contract("u,uij->ij", U, D), contract("i,j->ij", U, U), 0)
    compare(rep, "counit unital", contract("u,u->", U, E), Sparse((), np.zeros((1, 0)), [1]), 0)
    eu = contract("a,r->ar", E, U)
    compare(rep, "antipode left", contract("aij,ki,kjr->ar", D, S, P), eu, 1)
    compare(rep, "antipode right", contract("aij,kj,ikr->ar", D, S, P), eu, 1)
    if involutive:
        compare(rep, "antipode involutive", contract("ij,jk->ik", S, S), ident, 1)
    return rep


def verify_star(h: HopfAlgebra) -> Report:
    """Conjugation-free star identities: involution, anti-multiplicative, coproduct-compatible."""
    if h.star is None:
        raise MissingStar(f"{h.name} has no star structure")
    T, P, D = h.star, h.product, h.coproduct
    rep = Report(f"star: {h.name}")
    compare(rep, "involution", contract("ij,jk->ik", T, T), identity_tensor(h.dim), 1)
    compare(rep, "anti-multiplicative", contract("abk,rk->abr", P, T), contract("ia,jb,jir->abr", T, T, P), 2)
    compare(rep, "coproduct compatible", contract("ka,kij->aij", T, D), contract("apq,ip,jq->aij", D, T, T), 1)
    return rep


def is_commutative(h: HopfAlgebra) -> bool:
    return h.product == h.product.transpose((1, 0, 2))


def is_cocommutative(h: HopfAlgebra) -> bool:
    return h.coproduct == h.coproduct.transpose((0, 2, 1))


def noncommuting_pair(h: HopfAlgebra) -> tuple[int, int] | None:
    diff = h.product - h.product.transpose((1, 0, 2))
    return None if diff.nnz == 0 else (int(diff.idx[0, 0]), int(diff.idx[0, 1]))


def swap_factors(t: Sparse, batch: int = 0) -> Sparse:
    """τ on the last two tensor factors."""
    axes = list(range(t.ndim))
    axes[-1], axes[-2] = axes[-2], axes[-1]
    return t.transpose(axes)


def apply_on_factor(m: Sparse, t: Sparse, axis: int) -> Sparse:
    """Apply a matrix to one axis of a tensor."""
    letters = "abcdefghij"[: t.ndim]
    new = letters[:axis] + "z" + letters[axis + 1:]
    return contract(f"z{letters[axis]},{letters}->{new}", m, t)


def coproduct_on_factor(h: HopfAlgebra, t: Sparse, axis: int) -> Sparse:
    """Apply Δ to one axis, splitting it into two adjacent axes."""
    letters = "abcdefghij"[: t.ndim]
    new = letters[:axis] + "yz" + letters[axis + 1:]
    return contract(f"{letters[axis]}yz,{letters}->{new}", h.coproduct, t)


def verify_hopf_morphism(phi: Sparse, src: HopfAlgebra, tgt: HopfAlgebra, anti_algebra: bool = False,
                         name: str = "") -> Report:
    """Check that the matrix phi (columns indexed by src) is a Hopf map src -> tgt.

    With ``anti_algebra`` the multiplicativity check becomes phi(ab) = phi(b)phi(a).
    Bijectivity is checked by exact rank.
    """
    from .linalg import rank
    rep = Report(name or f"Hopf map {src.name} -> {tgt.name}")
    lhs = contract("ijk,lk->ijl", src.product, phi)
    if anti_algebra:
        rhs = contract("ai,bj,bal->ijl", phi, phi, tgt.product)
        compare(rep, "anti-multiplicative", lhs, rhs, 2)
    else:
        rhs = contract("ai,bj,abl->ijl", phi, phi, tgt.product)
        compare(rep, "multiplicative", lhs, rhs, 2)
    compare(rep, "unit", contract("ru,u->r", phi, src.unit), tgt.unit, 0)
    compare(rep, "comultiplicative", contract("ka,kij->aij", phi, tgt.coproduct),
            contract("apq,ip,jq->aij", src.coproduct, phi, phi), 1)
    compare(rep, "counit", contract("ka,k->a", phi, tgt.counit), src.counit, 1)
    compare(rep, "antipode", contract("rk,ka->ra", phi, src.antipode).transpose((1, 0)),
            contract("rk,ka->ra", tgt.antipode, phi).transpose((1, 0)), 1)
    r = rank(phi) if phi.shape[0] == phi.shape[1] else -1
    rep.add("bijective", r == src.dim == tgt.dim, None if r == src.dim else {"rank": r})
    return rep
