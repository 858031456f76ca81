"""Exact factorizations X = GM and the matched-pair actions they induce.

For s in M and u in G the product s·u refactors uniquely as (s▷u)(s◁u) with
s▷u in G and s◁u in M.  All tables here use subgroup-local indices.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from .errors import FactorizationError
from .groups import (FiniteGroup, GroupIsomorphism, Subgroup, conjugation_by_permutation, cyclic_subgroup,
                     find_isomorphisms,
                     from_right_action, group_from_generators, perm_from_cycles, subgroups_of)
from .report import Report


def exact_factorizations(x: FiniteGroup) -> list[tuple[Subgroup, Subgroup]]:
    """Ordered pairs (G, M) with |G||M| = |X| and G ∩ M = {e}."""
    subs = subgroups_of(x)
    out = []
    for g in subs:
        for m in subs:
            if g.order * m.order == x.order and set(g.elements) & set(m.elements) == {0}:
                out.append((g, m))
    return out


@dataclass(eq=False)
class MatchedPair:
    X: FiniteGroup
    G: Subgroup
    M: Subgroup
    act_left: np.ndarray   # [s, u] -> local index of s▷u in G
    act_right: np.ndarray  # [s, u] -> local index of s◁u in M

    def __post_init__(self):
        self.act_left = np.asarray(self.act_left, dtype=np.int64)
        self.act_right = np.asarray(self.act_right, dtype=np.int64)
        self.G_group = self.G.as_group()
        self.M_group = self.M.as_group()
        nx = self.X.order
        # x = g m  ->  (g, m)   and   x = m g  ->  (m, g)
        self.split_gm = np.full((nx, 2), -1, dtype=np.int64)
        self.split_mg = np.full((nx, 2), -1, dtype=np.int64)
        for u, gu in enumerate(self.G.elements):
            for s, ms in enumerate(self.M.elements):
                self.split_gm[self.X.mul(gu, ms)] = (u, s)
                self.split_mg[self.X.mul(ms, gu)] = (s, u)

    @property
    def nG(self) -> int:
        return self.G.order

    @property
    def nM(self) -> int:
        return self.M.order

    def lt(self, s: int, u: int) -> int:
        """s ▷ u"""
        return int(self.act_left[s, u])

    def rt(self, s: int, u: int) -> int:
        """s ◁ u"""
        return int(self.act_right[s, u])

    # local group arithmetic
    def gmul(self, *us: int) -> int:
        return self.G_group.mul(*us)

    def ginv(self, u: int) -> int:
        return self.G_group.inverse(u)

    def mmul(self, *ss: int) -> int:
        return self.M_group.mul(*ss)

    def minv(self, s: int) -> int:
        return self.M_group.inverse(s)

    def gx(self, u: int) -> int:
        return self.G.elements[u]

    def mx(self, s: int) -> int:
        return self.M.elements[s]

    def to_dict(self) -> dict:
        return {
            "X": self.X.name,
            "G": list(self.G.elements),
            "M": list(self.M.elements),
            "act_left": self.act_left.tolist(),
            "act_right": self.act_right.tolist(),
        }


def derive_matched_pair(x: FiniteGroup, g: Subgroup, m: Subgroup) -> MatchedPair:
    if g.parent is not x or m.parent is not x:
        raise FactorizationError("subgroups must belong to the given group")
    prods = {x.mul(a, b) for a in g.elements for b in m.elements}
    if len(prods) != x.order or g.order * m.order != x.order:
        raise FactorizationError(f"G (order {g.order}) and M (order {m.order}) do not factorize {x.name}")
    split = {}
    for u, a in enumerate(g.elements):
        for s, b in enumerate(m.elements):
            split[x.mul(a, b)] = (u, s)
    left = np.empty((m.order, g.order), dtype=np.int64)
    right = np.empty((m.order, g.order), dtype=np.int64)
    for s, b in enumerate(m.elements):
        for u, a in enumerate(g.elements):
            left[s, u], right[s, u] = split[x.mul(b, a)]
    return MatchedPair(x, g, m, left, right)


def verify_matched_pair(mp: MatchedPair) -> Report:
    """Exhaustive check of the defining identity and the eight matched-pair laws."""
    rep = Report("matched pair")
    X, nG, nM = mp.X, mp.nG, mp.nM
    lt, rt, gm, mm = mp.lt, mp.rt, mp.gmul, mp.mmul

    def first(name, cases, holds):
        for case in cases:
            ok, lhs, rhs = holds(*case)
            if not ok:
                return rep.add(name, False, {"index": case, "lhs": lhs, "rhs": rhs})
        return rep.add(name, True)

    first("factorization s·u = (s▷u)(s◁u)", product(range(nM), range(nG)),
          lambda s, u: _eq(X.mul(mp.mx(s), mp.gx(u)), X.mul(mp.gx(lt(s, u)), mp.mx(rt(s, u)))))
    first("s◁e = s", product(range(nM)), lambda s: _eq(rt(s, 0), s))
    first("(s◁u)◁v = s◁(uv)", product(range(nM), range(nG), range(nG)),
          lambda s, u, v: _eq(rt(rt(s, u), v), rt(s, gm(u, v))))
    first("e◁u = e", product(range(nG)), lambda u: _eq(rt(0, u), 0))
    first("(st)◁u = (s◁(t▷u))(t◁u)", product(range(nM), range(nM), range(nG)),
          lambda s, t, u: _eq(rt(mm(s, t), u), mm(rt(s, lt(t, u)), rt(t, u))))
    first("e▷u = u", product(range(nG)), lambda u: _eq(lt(0, u), u))
    first("s▷(t▷u) = (st)▷u", product(range(nM), range(nM), range(nG)),
          lambda s, t, u: _eq(lt(s, lt(t, u)), lt(mm(s, t), u)))
    first("s▷e = e", product(range(nM)), lambda s: _eq(lt(s, 0), 0))
    first("s▷(uv) = (s▷u)((s◁u)▷v)", product(range(nM), range(nG), range(nG)),
          lambda s, u, v: _eq(lt(s, gm(u, v)), gm(lt(s, u), lt(rt(s, u), v))))
    return rep


def _eq(a, b):
    return a == b, a, b


def double_cross_product(mp: MatchedPair) -> tuple[FiniteGroup, GroupIsomorphism]:
    """The group on pairs (u, s), index u·|M| + s, with (u,s)(v,t) = (u(s▷v), (s◁v)t)."""
    nG, nM = mp.nG, mp.nM
    n = nG * nM
    table = np.empty((n, n), dtype=np.int64)
    for u, s, v, t in product(range(nG), range(nM), range(nG), range(nM)):
        a = mp.gmul(u, mp.lt(s, v))
        b = mp.mmul(mp.rt(s, v), t)
        table[u * nM + s, v * nM + t] = a * nM + b
    dcp = FiniteGroup(table, f"double_cross<{mp.X.name}>")
    iso = GroupIsomorphism(dcp, mp.X, [mp.X.mul(mp.gx(u), mp.mx(s)) for u in range(nG) for s in range(nM)])
    return dcp, iso


def pair_inverse(mp: MatchedPair, u: int, s: int) -> tuple[int, int]:
    """(u,s)^{-1} = (s^{-1}▷u^{-1}, s^{-1}◁u^{-1})"""
    si, ui = mp.minv(s), mp.ginv(u)
    return mp.lt(si, ui), mp.rt(si, ui)


def maps_factors(mp: MatchedPair, reverse: bool):
    """Partial-map predicate: G lands in M and M in G (reverse) or each in itself."""
    gset, mset = set(mp.G.elements), set(mp.M.elements)
    g_to, m_to = (mset, gset) if reverse else (gset, mset)

    def ok(mapping: dict) -> bool:
        for x, y in mapping.items():
            if x in gset and y not in g_to:
                return False
            if x in mset and y not in m_to:
                return False
        return True

    return ok


def is_factor_reversing(mp: MatchedPair, theta: GroupIsomorphism) -> bool:
    return maps_factors(mp, True)(dict(enumerate(theta.map)))


def find_factor_reversing(mp: MatchedPair, order_shortcut: bool = True) -> list[GroupIsomorphism]:
    """Automorphisms θ of X with θ(G) ⊆ M and θ(M) ⊆ G.

    With ``order_shortcut`` off the search runs even when |G| != |M|.
    """
    if order_shortcut and mp.nG != mp.nM:
        return []
    check = maps_factors(mp, True)
    return find_isomorphisms(mp.X, mp.X, partial=check, constraint=lambda iso: check(dict(enumerate(iso.map))))


def find_factor_preserving_or_reversing(mp: MatchedPair) -> list[GroupIsomorphism]:
    keep, swap = maps_factors(mp, False), maps_factors(mp, True)
    either = lambda m: keep(m) or swap(m)  # noqa: E731
    return find_isomorphisms(mp.X, mp.X, partial=either, constraint=lambda iso: either(dict(enumerate(iso.map))))


def with_generator_labels(mp: MatchedPair, g_gen: int | None = None, m_gen: int | None = None) -> MatchedPair:
    """Relabel cyclic G and M so that local index k is the k-th power of a generator.

    Generators default to the smallest parent index of full order.
    """
    def pick(sub: Subgroup, gen):
        if gen is None:
            orders = mp.X.element_orders()
            full = [x for x in sub.elements if orders[x] == sub.order]
            if not full:
                raise FactorizationError(f"subgroup of order {sub.order} is not cyclic")
            gen = min(full)
        out = cyclic_subgroup(mp.X, gen)
        if not out.same_set(sub):
            raise FactorizationError("generator does not generate the factor")
        return out
    return derive_matched_pair(mp.X, pick(mp.G, g_gen), pick(mp.M, m_gen))


def element_from_cycles(x: FiniteGroup, cycles: str) -> int:
    """Element of a permutation group given in left-to-right cycle notation on points 1..n."""
    return from_right_action(x, perm_from_cycles(cycles, len(x.permutations[0])))


def cycles_conjugation(x: FiniteGroup, cycles: str) -> GroupIsomorphism:
    """x -> P x P^{-1} for P in left-to-right cycle notation; P may lie outside x."""
    return conjugation_by_permutation(x, perm_from_cycles(cycles, len(x.permutations[0])), left_to_right=True)


def z6z6_example() -> MatchedPair:
    """S3×S3 on six points with G = <(123)(45)> and M = <(12)(456)>, both labelled by powers.

    Cycles compose left to right, as permutations acting on objects from the right.
    """
    x = group_from_generators(6, [perm_from_cycles("(123)(45)", 6), perm_from_cycles("(12)(456)", 6)],
                              name="S3xS3 on 6 points")
    mp0 = derive_matched_pair(x, cyclic_subgroup(x, element_from_cycles(x, "(123)(45)")),
                              cyclic_subgroup(x, element_from_cycles(x, "(12)(456)")))
    return mp0


def select_factorization(x: FiniteGroup, selector: str | int) -> MatchedPair:
    """Resolve an index into exact_factorizations(x), or an alias.

    ``z6z6`` is the first factorization with both factors cyclic of order 6,
    relabelled by generator powers.
    """
    facts = exact_factorizations(x)
    if isinstance(selector, int) or str(selector).lstrip("-").isdigit():
        i = int(selector)
        if not 0 <= i < len(facts):
            raise FactorizationError(f"factor index {i} out of range (0..{len(facts) - 1})")
        return derive_matched_pair(x, *facts[i])
    alias = str(selector).lower()
    if alias == "z6z6":
        for g, m in facts:
            if g.order == m.order == 6 and g.is_cyclic() and m.is_cyclic():
                return with_generator_labels(derive_matched_pair(x, g, m))
        raise FactorizationError(f"{x.name} has no factorization into two cyclic groups of order 6")
    raise FactorizationError(f"unknown factor selector {selector!r}")


def matched_pair_to_json(mp: MatchedPair) -> dict:
    """act_left[s][u] = s▷u and act_right[s][u] = s◁u, as G- and M-local indices."""
    from .groups import group_to_json
    return {"X": group_to_json(mp.X), "G": [int(e) for e in mp.G.elements], "M": [int(e) for e in mp.M.elements],
            "act_left": mp.act_left.tolist(), "act_right": mp.act_right.tolist()}
