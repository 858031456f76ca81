"""Exact linear algebra over labeled bases: maps, elements, polynomials."""

from __future__ import annotations

import math
from collections import Counter
from fractions import Fraction
from functools import reduce
from typing import Any, Sequence

import numpy as np

from .errors import NotPermutation, ShapeError
from .report import fmt_scalar
from .sparse import Sparse, contract


class BasisSpace:
    """A vector space with a labeled basis, optionally a tensor product of factors.

    Tensor products use leftmost-major order, so index (i, j) of A⊗B is
    ``i * dim(B) + j``.  Labels of large tensor spaces are produced on demand.
    """

    def __init__(self, labels: Sequence[Any] | None = None, factors: Sequence["BasisSpace"] | None = None,
                 dim: int | None = None, name: str = ""):
        self.factors = tuple(factors) if factors else None
        if self.factors:
            self.dim = math.prod(f.dim for f in self.factors)
            self._labels = None
        elif labels is not None:
            self._labels = tuple(labels)
            self.dim = len(self._labels)
            if len(set(self._labels)) != self.dim:
                raise ValueError("basis labels must be unique")
        else:
            self.dim = int(dim)
            self._labels = None
        self.name = name
        self._index = None

    @classmethod
    def opaque(cls, dim: int, name: str = "") -> "BasisSpace":
        return cls(dim=dim, name=name)

    def tensor(self, *others: "BasisSpace") -> "BasisSpace":
        parts = []
        for s in (self, *others):
            parts.extend(s.factors if s.factors else (s,))
        return BasisSpace(factors=parts)

    def power(self, n: int) -> "BasisSpace":
        return BasisSpace(factors=[self] * n) if n > 1 else self

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(f.dim for f in self.factors) if self.factors else (self.dim,)

    def label(self, i: int):
        if self.factors:
            return tuple(f.label(int(k)) for f, k in zip(self.factors, np.unravel_index(i, self.shape)))
        return self._labels[i] if self._labels is not None else i

    @property
    def labels(self) -> tuple:
        if self._labels is None:
            if self.dim > 100000:
                raise ValueError("too many labels to materialize")
            self._labels = tuple(self.label(i) for i in range(self.dim))
        return self._labels

    def index(self, label) -> int:
        if self._index is None:
            self._index = {lab: i for i, lab in enumerate(self.labels)}
        return self._index[label]

    def same_shape(self, other: "BasisSpace") -> bool:
        return self.dim == other.dim

    def __repr__(self) -> str:
        return f"BasisSpace(dim={self.dim}{', ' + self.name if self.name else ''})"


class LinearMap:
    """A sparse exact matrix; entry (r, c) is the coefficient of e_r in the image of e_c."""

    def __init__(self, domain: BasisSpace, codomain: BasisSpace, data: Sparse):
        if data.shape != (codomain.dim, domain.dim):
            raise ShapeError(f"matrix shape {data.shape} does not fit {codomain.dim}x{domain.dim}")
        self.domain, self.codomain, self.data = domain, codomain, data

    @classmethod
    def from_entries(cls, domain: BasisSpace, codomain: BasisSpace, entries) -> "LinearMap":
        return cls(domain, codomain, Sparse.from_entries((codomain.dim, domain.dim), entries))

    @classmethod
    def identity(cls, space: BasisSpace) -> "LinearMap":
        return cls(space, space, Sparse.identity(space.dim))

    @classmethod
    def from_images(cls, domain: BasisSpace, codomain: BasisSpace, images: Sequence[int]) -> "LinearMap":
        """Basis map e_j -> e_{images[j]}; negative images mean e_j -> 0."""
        images = np.asarray(images, dtype=np.int64)
        cols = np.flatnonzero(images >= 0)
        idx = np.stack([images[cols], cols], 1)
        return cls(domain, codomain, Sparse((codomain.dim, domain.dim), idx, np.ones(len(cols), np.int64)))

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape

    def __eq__(self, other) -> bool:
        return isinstance(other, LinearMap) and self.data == other.data

    def __hash__(self):
        return hash(self.data)

    def __repr__(self) -> str:
        return f"LinearMap({self.shape[0]}x{self.shape[1]}, nnz={self.data.nnz})"

    def __matmul__(self, other: "LinearMap") -> "LinearMap":
        return compose(self, other)

    def __add__(self, other: "LinearMap") -> "LinearMap":
        return LinearMap(self.domain, self.codomain, self.data + other.data)

    def __sub__(self, other: "LinearMap") -> "LinearMap":
        return LinearMap(self.domain, self.codomain, self.data - other.data)

    def scale(self, c) -> "LinearMap":
        return LinearMap(self.domain, self.codomain, self.data.scale(c))

    def transpose(self) -> "LinearMap":
        return LinearMap(self.codomain, self.domain, self.data.transpose((1, 0)))

    def entries(self):
        return self.data.entries()

    def column(self, j: int) -> dict[int, Fraction]:
        sel = self.data.idx[:, 1] == j
        return {int(r): Fraction(int(n), self.data.den) for r, n in zip(self.data.idx[sel, 0], self.data.num[sel])}

    def is_identity(self) -> bool:
        return self.shape[0] == self.shape[1] and self.data == Sparse.identity(self.shape[0])

    def permutation_images(self) -> np.ndarray | None:
        """Images j -> i if this is a permutation matrix, else None."""
        d = self.data
        n, m = d.shape
        if n != m or d.nnz != n or d.den != 1 or not np.all(d.num == 1):
            return None
        rows, cols = d.idx[:, 0], d.idx[:, 1]
        if len(np.unique(rows)) != n or len(np.unique(cols)) != n:
            return None
        images = np.empty(n, dtype=np.int64)
        images[cols] = rows
        return images

    def to_json(self) -> dict:
        return {"rows": self.shape[0], "cols": self.shape[1],
                "entries": [[r, c, fmt_scalar(v)] for (r, c), v in self.data.entries()]}

    @classmethod
    def from_json(cls, obj: dict, domain: BasisSpace | None = None, codomain: BasisSpace | None = None) -> "LinearMap":
        rows, cols = int(obj["rows"]), int(obj["cols"])
        domain = domain or BasisSpace.opaque(cols)
        codomain = codomain or BasisSpace.opaque(rows)
        return cls.from_entries(domain, codomain, [((int(r), int(c)), Fraction(v)) for r, c, v in obj["entries"]])


class AlgebraElement:
    """A sparse exact vector; ``data`` keeps one axis per tensor factor of the space."""

    def __init__(self, space: BasisSpace, data: Sparse):
        if data.shape != space.shape:
            if math.prod(data.shape) != space.dim:
                raise ShapeError(f"element shape {data.shape} does not fit {space}")
            data = data.reshape(space.shape)
        self.space, self.data = space, data

    @classmethod
    def from_dict(cls, space: BasisSpace, coords: dict) -> "AlgebraElement":
        entries = []
        for k, v in coords.items():
            k = (k,) if isinstance(k, (int, np.integer)) else tuple(k)
            if len(k) == 1 and len(space.shape) > 1:
                k = tuple(int(i) for i in np.unravel_index(k[0], space.shape))
            entries.append((k, v))
        return cls(space, Sparse.from_entries(space.shape, entries))

    @property
    def coords(self) -> dict[int, Fraction]:
        """Flat (leftmost-major) index -> coefficient."""
        return {k[0]: v for k, v in self.data.flat().entries()}

    @property
    def nnz(self) -> int:
        return self.data.nnz

    def __eq__(self, other) -> bool:
        return isinstance(other, AlgebraElement) and self.data == other.data

    def __hash__(self):
        return hash(self.data)

    def __repr__(self) -> str:
        return f"AlgebraElement(dim={self.space.dim}, nnz={self.nnz})"

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        return AlgebraElement(self.space, self.data + other.data)

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        return AlgebraElement(self.space, self.data - other.data)

    def scale(self, c) -> "AlgebraElement":
        return AlgebraElement(self.space, self.data.scale(c))

    def to_json(self) -> dict:
        return {"dim": self.space.dim, "shape": list(self.space.shape),
                "entries": [[list(k), fmt_scalar(v)] for k, v in self.data.entries()]}


def tensor(a: LinearMap, b: LinearMap) -> LinearMap:
    """Kronecker product, leftmost-major."""
    k = contract("ij,kl->ikjl", a.data, b.data)
    ra, ca = a.shape
    rb, cb = b.shape
    return LinearMap(a.domain.tensor(b.domain), a.codomain.tensor(b.codomain), k.reshape((ra * rb, ca * cb)))


def compose(a: LinearMap, b: LinearMap) -> LinearMap:
    """a ∘ b"""
    if a.shape[1] != b.shape[0]:
        raise ShapeError(f"cannot compose {a.shape} after {b.shape}")
    return LinearMap(b.domain, a.codomain, contract("ij,jk->ik", a.data, b.data))


def apply(a: LinearMap, v: AlgebraElement) -> AlgebraElement:
    if a.shape[1] != v.space.dim:
        raise ShapeError(f"cannot apply {a.shape} map to a vector of dimension {v.space.dim}")
    return AlgebraElement(a.codomain, contract("ij,j->i", a.data, v.data.flat()))


def power(a: LinearMap, k: int) -> LinearMap:
    out = LinearMap.identity(a.domain)
    base = a
    while k:
        if k & 1:
            out = compose(base, out)
        base = compose(base, base)
        k >>= 1
    return out


def inverse(a: LinearMap) -> LinearMap:
    """Exact inverse; monomial matrices are inverted directly."""
    n, m = a.shape
    if n != m:
        raise ShapeError("only square maps are invertible")
    d = a.data
    rows, cols = d.idx[:, 0], d.idx[:, 1]
    if d.nnz == n and len(np.unique(rows)) == n and len(np.unique(cols)) == n:
        entries = [((c, r), 1 / v) for (r, c), v in d.entries()]
        return LinearMap(a.codomain, a.domain, Sparse.from_entries((n, n), entries))
    inv = _gauss_jordan_inverse(a)
    if inv is None:
        raise ValueError("map is singular")
    return inv


def _row_dicts(a: LinearMap) -> list[dict[int, Fraction]]:
    rows: list[dict[int, Fraction]] = [dict() for _ in range(a.shape[0])]
    for (r, c), v in a.data.entries():
        rows[r][c] = v
    return rows


def _gauss_jordan_inverse(a: LinearMap) -> LinearMap | None:
    n = a.shape[0]
    rows = _row_dicts(a)
    aug = [dict(r) for r in rows]
    for i in range(n):
        aug[i][n + i] = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r].get(col)), None)
        if piv is None:
            return None
        aug[col], aug[piv] = aug[piv], aug[col]
        p = aug[col][col]
        aug[col] = {k: v / p for k, v in aug[col].items()}
        for r in range(n):
            if r != col and aug[r].get(col):
                f = aug[r][col]
                row = aug[r]
                for k, v in aug[col].items():
                    nv = row.get(k, 0) - f * v
                    if nv:
                        row[k] = nv
                    else:
                        row.pop(k, None)
    entries = [((r, k - n), v) for r in range(n) for k, v in aug[r].items() if k >= n]
    return LinearMap(a.codomain, a.domain, Sparse.from_entries((n, n), entries))


def rank(a: LinearMap | Sparse) -> int:
    """Exact rank by Gaussian elimination on sparse rows."""
    data = a.data if isinstance(a, LinearMap) else a
    rows: dict[int, dict[int, Fraction]] = {}
    for (r, c), v in data.entries():
        rows.setdefault(r, {})[c] = v
    pivots: dict[int, dict[int, Fraction]] = {}
    for row in rows.values():
        row = dict(row)
        while row:
            lead = min(row)
            if lead not in pivots:
                pivots[lead] = {k: v / row[lead] for k, v in row.items()}
                break
            f = row[lead]
            for k, v in pivots[lead].items():
                nv = row.get(k, 0) - f * v
                if nv:
                    row[k] = nv
                else:
                    row.pop(k, None)
    return len(pivots)


class Polynomial:
    """Rational polynomial, coefficients lowest degree first."""

    def __init__(self, coeffs: Sequence):
        cs = [Fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)

    @classmethod
    def x_power_minus_one(cls, m: int) -> "Polynomial":
        return cls([-1] + [0] * (m - 1) + [1])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __eq__(self, other) -> bool:
        if isinstance(other, (list, tuple)):
            other = Polynomial(other)
        return isinstance(other, Polynomial) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        if not self or not other:
            return Polynomial([])
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return Polynomial(out)

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        n = max(len(self.coeffs), len(other.coeffs))
        a = list(self.coeffs) + [0] * (n - len(self.coeffs))
        b = list(other.coeffs) + [0] * (n - len(other.coeffs))
        return Polynomial([x - y for x, y in zip(a, b)])

    def divmod(self, other: "Polynomial") -> tuple["Polynomial", "Polynomial"]:
        if not other:
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        q = [Fraction(0)] * max(len(rem) - len(other.coeffs) + 1, 0)
        lead = other.coeffs[-1]
        while len(rem) >= len(other.coeffs) and any(rem):
            shift = len(rem) - len(other.coeffs)
            f = rem[-1] / lead
            q[shift] = f
            for i, c in enumerate(other.coeffs):
                rem[shift + i] -= f * c
            rem.pop()
            while rem and rem[-1] == 0:
                rem.pop()
        return Polynomial(q), Polynomial(rem)

    def monic(self) -> "Polynomial":
        if not self:
            return self
        lead = self.coeffs[-1]
        return Polynomial([c / lead for c in self.coeffs])

    def gcd(self, other: "Polynomial") -> "Polynomial":
        a, b = self, other
        while b:
            a, b = b, a.divmod(b)[1]
        return a.monic()

    def lcm(self, other: "Polynomial") -> "Polynomial":
        if not self or not other:
            return Polynomial([])
        return (self * other).divmod(self.gcd(other))[0].monic()

    def __call__(self, a: LinearMap) -> LinearMap:
        """Evaluate at a square map by Horner's rule."""
        n = a.shape[0]
        out = LinearMap(a.domain, a.codomain, Sparse.zeros((n, n)))
        ident = LinearMap.identity(a.domain)
        for c in reversed(self.coeffs):
            out = compose(a, out) + ident.scale(c)
        return out

    def to_json(self) -> dict:
        return {"coeffs": [fmt_scalar(c) for c in self.coeffs]}

    def int_coeffs(self) -> list:
        return [int(c) if c.denominator == 1 else c for c in self.coeffs]

    def __repr__(self) -> str:
        terms = []
        for k, c in enumerate(self.coeffs):
            if c:
                terms.append(f"{fmt_scalar(c)}*x^{k}" if k else fmt_scalar(c))
        return "Polynomial(" + (" + ".join(terms) or "0") + ")"


def cycle_structure(a: LinearMap) -> list[int]:
    """Sorted cycle lengths of a permutation matrix."""
    images = a.permutation_images()
    if images is None:
        raise NotPermutation("map is not a permutation matrix")
    return sorted(_cycles(images))


def _cycles(images: np.ndarray) -> list[int]:
    n = len(images)
    seen = np.zeros(n, dtype=bool)
    lengths = []
    for start in range(n):
        if seen[start]:
            continue
        k, j = 0, start
        while not seen[j]:
            seen[j] = True
            j = images[j]
            k += 1
        lengths.append(k)
    return lengths


def _columns(a: LinearMap) -> list[list[tuple[int, Fraction]]]:
    cols: list[list[tuple[int, Fraction]]] = [[] for _ in range(a.shape[1])]
    for (r, c), v in a.data.entries():
        cols[c].append((r, v))
    return cols


def _matvec(cols, v: dict[int, Fraction]) -> dict[int, Fraction]:
    out: dict[int, Fraction] = {}
    for j, x in v.items():
        for r, a in cols[j]:
            out[r] = out.get(r, 0) + a * x
    return {k: x for k, x in out.items() if x}


def local_minimal_polynomial(a: LinearMap, v: dict[int, Fraction], cols=None) -> Polynomial:
    """Monic polynomial of least degree with p(a) v = 0, by Krylov elimination."""
    cols = cols if cols is not None else _columns(a)
    basis: list[tuple[int, dict[int, Fraction], dict[int, Fraction]]] = []  # (pivot, vector, combination)
    w = dict(v)
    k = 0
    while True:
        vec, comb = dict(w), {k: Fraction(1)}
        for piv, bvec, bcomb in basis:
            f = vec.get(piv)
            if f:
                for key, x in bvec.items():
                    nv = vec.get(key, 0) - f * x
                    if nv:
                        vec[key] = nv
                    else:
                        vec.pop(key, None)
                for key, x in bcomb.items():
                    comb[key] = comb.get(key, 0) - f * x
        if not vec:
            return Polynomial([comb.get(i, 0) for i in range(k + 1)]).monic()
        piv = min(vec)
        p = vec[piv]
        basis.append((piv, {key: x / p for key, x in vec.items()}, {key: x / p for key, x in comb.items()}))
        w = _matvec(cols, w)
        k += 1


def minimal_polynomial(a: LinearMap, method: str = "auto") -> Polynomial:
    """Monic minimal polynomial over the rationals.

    ``permutation`` takes the lcm of λ^m − 1 over cycle lengths; ``krylov``
    starts from the all-ones vector and adds standard basis vectors not yet
    annihilated.  ``auto`` uses the permutation path when it applies.
    """
    n, m = a.shape
    if n != m:
        raise ShapeError("minimal polynomial needs a square map")
    if method not in ("auto", "permutation", "krylov"):
        raise ValueError(f"unknown method {method!r}")
    if method != "krylov":
        images = a.permutation_images()
        if images is not None:
            return reduce(Polynomial.lcm, (Polynomial.x_power_minus_one(k) for k in sorted(set(_cycles(images)))),
                          Polynomial([1]))
        if method == "permutation":
            raise NotPermutation("map is not a permutation matrix")
    if n == 0:
        return Polynomial([1])
    cols = _columns(a)
    p = local_minimal_polynomial(a, {i: Fraction(1) for i in range(n)}, cols)
    while True:
        residue = p(a)
        if residue.data.nnz == 0:
            return p
        j = int(residue.data.idx[0, 1])
        p = p.lcm(local_minimal_polynomial(a, {j: Fraction(1)}, cols))
