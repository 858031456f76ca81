"""Finite groups as Cayley tables, subgroups, and isomorphism search.

Permutations are image tables ``p[i]`` and compose as functions on the left:
``(p * q)[i] = p[q[i]]``.  Cycle notation that composes left to right (objects
acted on from the right) translates by reversing products; the resulting groups
are the same up to the inversion anti-isomorphism, and subgroups, element orders
and conjugation automorphisms carry over unchanged.
"""

from __future__ import annotations

import itertools
import re
from collections import Counter, deque
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import OrderCapExceeded, SpecError

DEFAULT_ORDER_CAP = 1024


class FiniteGroup:
    """A finite group given by its full Cayley table; the identity is index 0."""

    def __init__(self, cayley, name: str = "", permutations: Sequence[Sequence[int]] | None = None):
        table = np.array(cayley, dtype=np.int64)
        n = table.shape[0]
        if table.shape != (n, n) or n == 0:
            raise ValueError("Cayley table must be a non-empty square")
        if not (np.array_equal(table[0], np.arange(n)) and np.array_equal(table[:, 0], np.arange(n))):
            raise ValueError("index 0 must be the identity")
        inv = np.argmax(table == 0, axis=1)
        if not np.all(table[np.arange(n), inv] == 0):
            raise ValueError("Cayley table has an element without inverse")
        table.setflags(write=False)
        inv.setflags(write=False)
        self.table = table
        self.inv = inv
        self.name = name
        self.permutations = None if permutations is None else tuple(tuple(int(i) for i in p) for p in permutations)
        self._orders = None

    @property
    def order(self) -> int:
        return self.table.shape[0]

    def __len__(self) -> int:
        return self.order

    def __repr__(self) -> str:
        return f"FiniteGroup({self.name or '?'}, order={self.order})"

    @property
    def cayley(self) -> list[list[int]]:
        return self.table.tolist()

    def mul(self, *xs: int) -> int:
        out = 0
        for x in xs:
            out = int(self.table[out, x])
        return out

    def inverse(self, x: int) -> int:
        return int(self.inv[x])

    def conj(self, y: int, x: int) -> int:
        """y x y^{-1}"""
        return int(self.table[self.table[y, x], self.inv[y]])

    def element_orders(self) -> list[int]:
        if self._orders is None:
            orders = []
            for x in range(self.order):
                k, y = 1, x
                while y != 0:
                    y = int(self.table[y, x])
                    k += 1
                orders.append(k)
            self._orders = orders
        return list(self._orders)

    def element_order(self, x: int) -> int:
        return self.element_orders()[x]

    def index_of_permutation(self, perm: Sequence[int]) -> int:
        if self.permutations is None:
            raise ValueError(f"{self.name} was not built from permutations")
        return self.permutations.index(tuple(perm))

    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.table, self.table.T))

    def check_invariants(self) -> bool:
        """Exhaustive check of identity, inverse, Latin-square and associativity laws."""
        t, n = self.table, self.order
        ar = np.arange(n)
        if not (np.array_equal(t[0], ar) and np.array_equal(t[:, 0], ar)):
            return False
        if not (np.all(t[ar, self.inv] == 0) and np.all(t[self.inv, ar] == 0)):
            return False
        srt = np.sort(t, axis=1)
        if not (np.all(srt == ar) and np.all(np.sort(t, axis=0) == ar[:, None])):
            return False
        # (ij)k == i(jk) for all triples, vectorized over (j, k) per i
        for i in range(n):
            if not np.array_equal(t[t[i]][:, :], t[i][t]):
                return False
        return True

    def closure(self, gens: Iterable[int], cap: int = DEFAULT_ORDER_CAP) -> list[int]:
        """Sorted element list of the subgroup generated by ``gens``."""
        gens = [g for g in gens if g != 0]
        seen = {0}
        frontier = [0]
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = int(self.table[x, g])
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
                        if len(seen) > cap:
                            raise OrderCapExceeded(f"closure exceeds {cap} elements")
            frontier = nxt
        return sorted(seen)


def _compose(p: Sequence[int], q: Sequence[int]) -> tuple[int, ...]:
    return tuple(p[i] for i in q)


def group_from_generators(degree: int, generators: Sequence[Sequence[int]], name: str = "",
                          order_cap: int = DEFAULT_ORDER_CAP) -> FiniteGroup:
    """Close permutation generators under composition.

    Elements are ordered breadth-first: identity, then words ``x * g`` in the
    order they are first reached.
    """
    gens = [tuple(int(i) for i in g) for g in generators]
    for g in gens:
        if len(g) != degree or sorted(g) != list(range(degree)):
            raise ValueError(f"generator {g} is not a permutation of 0..{degree - 1}")
    identity = tuple(range(degree))
    elements = [identity]
    index = {identity: 0}
    queue = deque([identity])
    while queue:
        x = queue.popleft()
        for g in gens:
            y = _compose(x, g)
            if y not in index:
                if len(elements) >= order_cap:
                    raise OrderCapExceeded(f"group generated exceeds order cap {order_cap}")
                index[y] = len(elements)
                elements.append(y)
                queue.append(y)
    n = len(elements)
    if degree == 0:
        return FiniteGroup([[0]], name or "trivial", [()])
    perms = np.array(elements, dtype=np.int64)
    # composite[i, j] = perms[i][perms[j]]
    composite = perms[np.arange(n)[:, None, None], perms[None, :, :]]
    radix = degree ** np.arange(degree, dtype=np.int64)
    codes = perms @ radix
    order = np.argsort(codes)
    pos = np.searchsorted(codes[order], composite @ radix)
    table = order[pos]
    return FiniteGroup(table, name or f"perm{degree}", elements)


def perm_from_cycles(cycles: str, degree: int, one_based: bool = True) -> tuple[int, ...]:
    """Image table of a permutation written in cycle notation, e.g. ``"(1425)(36)"``.

    Digits are single points unless comma-separated inside a cycle.
    """
    images = list(range(degree))
    off = 1 if one_based else 0
    for body in re.findall(r"\(([^)]*)\)", cycles):
        pts = [int(t) for t in body.split(",")] if "," in body else [int(c) for c in body.strip()]
        pts = [p - off for p in pts]
        if any(p < 0 or p >= degree for p in pts) or len(set(pts)) != len(pts):
            raise ValueError(f"bad cycle ({body}) for degree {degree}")
        for a, b in zip(pts, pts[1:] + pts[:1]):
            images[a] = b
    return tuple(images)


def from_right_action(g: FiniteGroup, perm: Sequence[int]) -> int:
    """Element of g representing a permutation from a left-to-right composing convention.

    Under left-to-right composition p·q means "p, then q", which is q∘p here;
    p ↦ p^{-1} turns one product into the other, so this returns the index of p^{-1}.
    """
    inv = [0] * len(perm)
    for i, j in enumerate(perm):
        inv[j] = i
    return g.index_of_permutation(inv)


def cyclic_group(n: int) -> FiniteGroup:
    ar = np.arange(n)
    return FiniteGroup((ar[:, None] + ar[None, :]) % n, f"cyclic:{n}")


def dihedral_group(n: int) -> FiniteGroup:
    """Order 2n, with a^n = b^2 = e and bab = a^{-1}; a^i b^j sits at index i + n j."""
    size = 2 * n
    table = np.empty((size, size), dtype=np.int64)
    for x in range(size):
        i, j = x % n, x // n
        for y in range(size):
            k, l = y % n, y // n
            table[x, y] = (i + (-1) ** j * k) % n + n * ((j + l) % 2)
    return FiniteGroup(table, f"dihedral:{n}")


def symmetric_group(n: int) -> FiniteGroup:
    """All permutations of n points in lexicographic order (identity first)."""
    perms = list(itertools.permutations(range(n)))
    index = {p: i for i, p in enumerate(perms)}
    table = [[index[_compose(p, q)] for q in perms] for p in perms]
    return FiniteGroup(table, f"sym:{n}", perms)


def direct_product(a: FiniteGroup, b: FiniteGroup, name: str = "") -> FiniteGroup:
    """Pairs (x, y) at index x * |b| + y."""
    nb = b.order
    ta, tb = a.table, b.table
    table = (ta[:, None, :, None] * nb + tb[None, :, None, :]).reshape(a.order * nb, a.order * nb)
    return FiniteGroup(table, name or f"product:{a.name},{b.name}")


_TOKEN = re.compile(r"(cyclic|dihedral|sym):(\d+)")


def builtin_group(spec: str) -> FiniteGroup:
    """Parse ``cyclic:n | dihedral:n | sym:n | product:spec,spec``."""
    group, rest = _parse(spec.strip())
    if rest:
        raise SpecError(f"trailing text {rest!r} in group spec {spec!r}")
    return group


def group_to_json(g: FiniteGroup) -> dict:
    return {"name": g.name, "order": g.order, "cayley": g.cayley}


def group_from_json(obj: dict) -> FiniteGroup:
    """Read either {"cayley": ...} or {"degree": n, "permutation_generators": ...}."""
    name = obj.get("name", "")
    try:
        if "cayley" in obj:
            g = FiniteGroup(obj["cayley"], name)
            if "order" in obj and int(obj["order"]) != g.order:
                raise SpecError(f"declared order {obj['order']} does not match the table")
            _check_group_table(g)
            return g
        if "permutation_generators" in obj:
            return group_from_generators(int(obj["degree"]), obj["permutation_generators"], name)
    except (ValueError, TypeError, KeyError) as exc:
        raise SpecError(f"bad group JSON: {exc}") from exc
    raise SpecError("group JSON needs 'cayley' or 'permutation_generators'")


def _check_group_table(g: FiniteGroup) -> None:
    t = g.table
    n = g.order
    for row in (t, t.T):
        if not np.all(np.sort(row, axis=1) == np.arange(n)):
            raise SpecError("Cayley table is not a Latin square")
    # t[t][a, b, c] = (ab)c and t[a, t[b, c]] = a(bc)
    if not np.array_equal(t[t], t[np.arange(n)[:, None, None], t[None, :, :]]):
        raise SpecError("Cayley table is not associative")


def load_group(spec: str) -> FiniteGroup:
    """A builtin spec, or a path to a group JSON file."""
    import json
    import os
    if os.path.exists(spec):
        with open(spec) as fh:
            try:
                obj = json.load(fh)
            except json.JSONDecodeError as exc:
                raise SpecError(f"{spec}: {exc}") from exc
        return group_from_json(obj)
    return builtin_group(spec)


def _parse(text: str) -> tuple[FiniteGroup, str]:
    if text.startswith("product:"):
        left, rest = _parse(text[len("product:"):])
        if not rest.startswith(","):
            raise SpecError("product needs two comma-separated factors")
        right, rest = _parse(rest[1:])
        return direct_product(left, right), rest
    m = _TOKEN.match(text)
    if not m:
        raise SpecError(f"cannot parse group spec at {text!r}")
    kind, n = m.group(1), int(m.group(2))
    if n < 1:
        raise SpecError(f"{kind}:{n} needs n >= 1")
    if kind == "sym" and n > 6:
        raise OrderCapExceeded(f"sym:{n} is beyond desk scale")
    make = {"cyclic": cyclic_group, "dihedral": dihedral_group, "sym": symmetric_group}[kind]
    return make(n), text[m.end():]


class Subgroup:
    """A subgroup, stored as the sorted list of parent indices.

    ``keep_order`` keeps the given listing instead (identity first), which is how
    cyclic subgroups get generator-power local indices.
    """

    def __init__(self, parent: FiniteGroup, elements: Iterable[int], keep_order: bool = False):
        self.parent = parent
        elements = [int(e) for e in elements]
        if keep_order:
            if len(set(elements)) != len(elements) or not elements or elements[0] != 0:
                raise ValueError("an ordered subgroup listing needs distinct elements, identity first")
            self.elements = tuple(elements)
        else:
            self.elements = tuple(sorted(set(elements)))
        self.local_index = {e: i for i, e in enumerate(self.elements)}
        self._group = None

    @property
    def order(self) -> int:
        return len(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def __contains__(self, x: int) -> bool:
        return x in self.local_index

    def __eq__(self, other) -> bool:
        return isinstance(other, Subgroup) and other.parent is self.parent and other.elements == self.elements

    def __hash__(self) -> int:
        return hash(self.elements)

    def same_set(self, other: "Subgroup") -> bool:
        return other.parent is self.parent and set(other.elements) == set(self.elements)

    def __repr__(self) -> str:
        return f"Subgroup(order={self.order}, {list(self.elements)})"

    def local(self, x: int) -> int:
        return self.local_index[x]

    def glob(self, i: int) -> int:
        return self.elements[i]

    def is_closed(self) -> bool:
        """Independent re-check: contains e, closed under product and inverse."""
        if 0 not in self.local_index:
            return False
        sub = np.array(self.elements)
        prods = self.parent.table[np.ix_(sub, sub)]
        return bool(np.all(np.isin(prods, sub)) and np.all(np.isin(self.parent.inv[sub], sub)))

    def as_group(self) -> FiniteGroup:
        """The subgroup as an abstract group in local indices."""
        if self._group is None:
            sub = np.array(self.elements)
            lut = np.full(self.parent.order, -1, dtype=np.int64)
            lut[sub] = np.arange(len(sub))
            self._group = FiniteGroup(lut[self.parent.table[np.ix_(sub, sub)]], f"sub{self.order}<{self.parent.name}>")
        return self._group

    def is_cyclic(self) -> bool:
        return max(self.as_group().element_orders()) == self.order


def cyclic_subgroup(g: FiniteGroup, gen: int) -> Subgroup:
    """<gen> with local index k for gen^k."""
    powers = [0]
    x = gen
    while x != 0:
        powers.append(x)
        x = g.mul(x, gen)
    return Subgroup(g, powers, keep_order=True)


def subgroups_of(g: FiniteGroup, order_filter: int | None = None) -> list[Subgroup]:
    """All subgroups, by joining cyclic subgroups until nothing new appears."""
    cyclic = {frozenset(g.closure([x])) for x in range(g.order)}
    found = set(cyclic)
    frontier = list(found)
    cyclic = sorted(cyclic, key=lambda s: (len(s), sorted(s)))
    while frontier:
        nxt = []
        for h in frontier:
            for c in cyclic:
                if c <= h:
                    continue
                j = frozenset(g.closure(h | c))
                if j not in found:
                    found.add(j)
                    nxt.append(j)
        frontier = nxt
    subs = sorted(found, key=lambda s: (len(s), sorted(s)))
    if order_filter is not None:
        subs = [s for s in subs if len(s) == order_filter]
    return [Subgroup(g, s) for s in subs]


class GroupIsomorphism:
    def __init__(self, source: FiniteGroup, target: FiniteGroup, mapping: Sequence[int]):
        self.source = source
        self.target = target
        self.map = tuple(int(m) for m in mapping)

    def __call__(self, x: int) -> int:
        return self.map[x]

    def __eq__(self, other) -> bool:
        return isinstance(other, GroupIsomorphism) and self.map == other.map

    def __hash__(self) -> int:
        return hash(self.map)

    def __repr__(self) -> str:
        return f"GroupIsomorphism({self.source.name} -> {self.target.name})"

    def inverse(self) -> "GroupIsomorphism":
        inv = [0] * len(self.map)
        for i, m in enumerate(self.map):
            inv[m] = i
        return GroupIsomorphism(self.target, self.source, inv)

    def then(self, other: "GroupIsomorphism") -> "GroupIsomorphism":
        """``other ∘ self``"""
        return GroupIsomorphism(self.source, other.target, [other.map[m] for m in self.map])

    def is_valid(self) -> bool:
        m = np.array(self.map)
        if sorted(self.map) != list(range(self.target.order)):
            return False
        return bool(np.array_equal(m[self.source.table], self.target.table[np.ix_(m, m)]))


def conjugation(g: FiniteGroup, y: int) -> GroupIsomorphism:
    """x -> y x y^{-1}"""
    return GroupIsomorphism(g, g, [g.conj(y, x) for x in range(g.order)])


def conjugation_by_permutation(g: FiniteGroup, perm: Sequence[int], left_to_right: bool = False) -> GroupIsomorphism:
    """x -> P x P^{-1} for a permutation P normalizing g, which need not lie in g.

    With ``left_to_right`` the formula is read in the left-to-right convention of
    ``from_right_action``, which on stored permutations is q -> P^{-1} q P.
    """
    if g.permutations is None:
        raise ValueError(f"{g.name} was not built from permutations")
    p = tuple(int(i) for i in perm)
    pinv = [0] * len(p)
    for i, j in enumerate(p):
        pinv[j] = i
    a, b = (pinv, p) if left_to_right else (p, pinv)
    return GroupIsomorphism(g, g, [g.index_of_permutation(_compose(_compose(a, q), b)) for q in g.permutations])


def generating_set(g: FiniteGroup) -> list[int]:
    """A small generating set, greedily picking elements of largest order first."""
    orders = g.element_orders()
    candidates = sorted(range(1, g.order), key=lambda x: (-orders[x], x))
    gens: list[int] = []
    current = {0}
    for x in candidates:
        if len(current) == g.order:
            break
        if x not in current:
            gens.append(x)
            current = set(g.closure(gens))
    return gens


PartialCheck = Callable[[dict], bool]


def find_isomorphisms(src: FiniteGroup, tgt: FiniteGroup,
                      constraint: Callable[[GroupIsomorphism], bool] | None = None,
                      partial: PartialCheck | None = None) -> list[GroupIsomorphism]:
    """All isomorphisms src -> tgt, by backtracking over images of a generating set.

    ``partial`` sees the homomorphism on the subgroup generated so far (a dict)
    and may prune; ``constraint`` filters complete isomorphisms.
    """
    if src.order != tgt.order:
        return []
    so, to = src.element_orders(), tgt.element_orders()
    if Counter(so) != Counter(to):
        return []
    gens = generating_set(src)
    candidates = [[y for y in range(tgt.order) if to[y] == so[g]] for g in gens]
    results: list[GroupIsomorphism] = []

    def extend(images: list[int]) -> dict | None:
        k = len(images)
        mapping = {0: 0}
        queue = deque([0])
        while queue:
            x = queue.popleft()
            fx = mapping[x]
            for g, img in zip(gens[:k], images):
                y = int(src.table[x, g])
                fy = int(tgt.table[fx, img])
                if y in mapping:
                    if mapping[y] != fy:
                        return None
                else:
                    mapping[y] = fy
                    queue.append(y)
        if len(set(mapping.values())) != len(mapping):
            return None
        return mapping

    def search(images: list[int]) -> None:
        if len(images) == len(gens):
            mapping = extend(images)
            if mapping is None or len(mapping) != src.order:
                return
            iso = GroupIsomorphism(src, tgt, [mapping[x] for x in range(src.order)])
            if constraint is None or constraint(iso):
                results.append(iso)
            return
        for y in candidates[len(images)]:
            mapping = extend(images + [y])
            if mapping is None:
                continue
            if partial is not None and not partial(mapping):
                continue
            search(images + [y])

    if not gens:
        iso = GroupIsomorphism(src, tgt, [0])
        return [iso] if constraint is None or constraint(iso) else []
    search([])
    return results


def automorphism_group(autos: Sequence[GroupIsomorphism], name: str = "") -> FiniteGroup:
    """The group formed by a composition-closed set of automorphisms, with the
    identity first and (a·b)(x) = a(b(x))."""
    maps = [a.map for a in autos]
    ident = tuple(range(len(maps[0]))) if maps else ()
    if ident not in maps:
        raise ValueError("the identity automorphism is missing")
    maps = [ident] + [m for m in maps if m != ident]
    index = {m: i for i, m in enumerate(maps)}
    table = []
    for a in maps:
        row = []
        for b in maps:
            ab = tuple(a[x] for x in b)
            if ab not in index:
                raise ValueError("the automorphisms are not closed under composition")
            row.append(index[ab])
        table.append(row)
    return FiniteGroup(table, name or "automorphisms")
