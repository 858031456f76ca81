"""Exact sparse tensors and an einsum-style contraction engine.

A ``Sparse`` stores integer numerators over one shared positive denominator, so
every value is an exact rational.  Numerators live in int64 arrays while their
magnitudes are provably small and switch to Python-int object arrays otherwise,
which keeps the fast path exact.

Index order is leftmost-major everywhere: a multi-index (i0, i1, ...) flattens
to ``ravel_multi_index`` in C order.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import reduce
from typing import Iterable, Iterator, Sequence

import numpy as np

_LIMIT = 1 << 62


def _absmax(a: np.ndarray) -> int:
    if a.size == 0:
        return 0
    if a.dtype == object:
        return max(abs(int(v)) for v in a)
    return int(np.abs(a).max())


def _mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.dtype == object or b.dtype == object or _absmax(a) * _absmax(b) >= _LIMIT:
        return a.astype(object) * b.astype(object)
    return a * b


def _widen(a: np.ndarray, fan: int) -> np.ndarray:
    """Make sure summing up to ``fan`` entries of ``a`` cannot overflow."""
    if a.dtype != object and _absmax(a) * max(fan, 1) >= _LIMIT:
        return a.astype(object)
    return a


def _gcd_all(num: np.ndarray, den: int) -> int:
    if num.size == 0:
        return den
    if num.dtype == object:
        return reduce(math.gcd, (int(v) for v in num), den)
    return math.gcd(int(np.gcd.reduce(np.abs(num))), den)


def _strides(dims: Sequence[int]) -> np.ndarray | None:
    total = 1
    for d in dims:
        total *= max(int(d), 1)
    if total >= _LIMIT:
        return None
    out = np.ones(len(dims), dtype=np.int64)
    for k in range(len(dims) - 2, -1, -1):
        out[k] = out[k + 1] * max(int(dims[k + 1]), 1)
    return out


def _row_keys(idx: np.ndarray, dims: Sequence[int]) -> np.ndarray:
    st = _strides(dims)
    if st is None:
        # too wide for one int64: rank rows lexicographically instead
        _, inv = np.unique(idx, axis=0, return_inverse=True)
        return inv.reshape(-1).astype(np.int64)
    if idx.shape[1] == 0:
        return np.zeros(idx.shape[0], dtype=np.int64)
    return idx @ st


def coalesce(idx: np.ndarray, num: np.ndarray, dims: Sequence[int]) -> tuple[np.ndarray, np.ndarray]:
    """Sort rows, sum duplicates, drop zeros."""
    if idx.shape[0] == 0:
        return idx.reshape(0, len(dims)).astype(np.int64), num[:0]
    keys = _row_keys(idx, dims)
    order = np.argsort(keys, kind="stable")
    keys = keys[order]
    idx = idx[order]
    num = _widen(num[order], len(num))
    starts = np.flatnonzero(np.r_[True, keys[1:] != keys[:-1]])
    if len(starts) != len(keys):
        num = np.add.reduceat(num, starts)
        idx = idx[starts]
    keep = num != 0
    if not keep.all():
        idx, num = idx[keep], num[keep]
    if num.dtype == object and num.size and _absmax(num) < _LIMIT:
        num = num.astype(np.int64)
    return idx, num


def join(left: np.ndarray, right: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """All index pairs (i, j) with left[i] == right[j], ordered by i then j."""
    order = np.argsort(right, kind="stable")
    rs = right[order]
    lo = np.searchsorted(rs, left, "left")
    hi = np.searchsorted(rs, left, "right")
    cnt = hi - lo
    total = int(cnt.sum())
    li = np.repeat(np.arange(len(left), dtype=np.int64), cnt)
    if total == 0:
        return li, li
    offs = np.arange(total, dtype=np.int64) - np.repeat(np.cumsum(cnt) - cnt, cnt)
    ri = order[np.repeat(lo, cnt) + offs]
    return li, ri


def join_count(left: np.ndarray, right: np.ndarray) -> int:
    rs = np.sort(right)
    return int((np.searchsorted(rs, left, "right") - np.searchsorted(rs, left, "left")).sum())


def encode_pair(lcols: np.ndarray, rcols: np.ndarray, dims: Sequence[int]) -> tuple[np.ndarray, np.ndarray]:
    """Consistent int64 keys for multi-column join keys on both sides."""
    st = _strides(dims)
    if st is not None:
        if lcols.shape[1] == 0:
            return np.zeros(len(lcols), np.int64), np.zeros(len(rcols), np.int64)
        return lcols @ st, rcols @ st
    both = np.concatenate([lcols, rcols])
    _, inv = np.unique(both, axis=0, return_inverse=True)
    inv = inv.reshape(-1).astype(np.int64)
    return inv[: len(lcols)], inv[len(lcols):]


class Sparse:
    """Immutable exact sparse tensor in canonical form."""

    __slots__ = ("shape", "idx", "num", "den")

    def __init__(self, shape: Sequence[int], idx, num, den: int = 1, canonical: bool = False):
        self.shape = tuple(int(d) for d in shape)
        nd = len(self.shape)
        num = np.asarray(num)
        idx = np.asarray(idx, dtype=np.int64)
        idx = idx.reshape(num.size, 0) if nd == 0 else idx.reshape(-1, nd)
        if num.dtype != object:
            num = num.astype(np.int64)
        num = num.reshape(-1)
        den = int(den)
        if den <= 0:
            raise ValueError("denominator must be positive")
        if not canonical:
            if idx.size and (idx.min() < 0 or np.any(idx.max(axis=0) >= np.array(self.shape))):
                raise IndexError(f"index out of range for shape {self.shape}")
            idx, num = coalesce(idx, num, self.shape)
            g = _gcd_all(num, den)
            if g > 1:
                num = num // g
                den //= g
            if num.size == 0:
                den = 1
        idx.setflags(write=False)
        num.setflags(write=False)
        self.idx, self.num, self.den = idx, num, den

    # construction
    @classmethod
    def from_entries(cls, shape: Sequence[int], entries: Iterable[tuple[Sequence[int], object]]) -> "Sparse":
        keys, vals = [], []
        for k, v in entries:
            keys.append(tuple(k))
            vals.append(Fraction(v))
        den = reduce(math.lcm, (v.denominator for v in vals), 1)
        num = np.array([v.numerator * (den // v.denominator) for v in vals], dtype=object)
        return cls(shape, np.array(keys, dtype=np.int64).reshape(-1, len(shape)), num, den)

    @classmethod
    def from_dict(cls, shape: Sequence[int], d: dict) -> "Sparse":
        return cls.from_entries(shape, d.items())

    @classmethod
    def from_dense(cls, arr) -> "Sparse":
        arr = np.asarray(arr, dtype=object)
        nz = [(tuple(int(i) for i in ix), arr[ix]) for ix in zip(*np.nonzero(arr != 0))]
        return cls.from_entries(arr.shape, nz)

    @classmethod
    def zeros(cls, shape: Sequence[int]) -> "Sparse":
        return cls(shape, np.zeros((0, len(shape)), np.int64), np.zeros(0, np.int64), 1, canonical=True)

    @classmethod
    def ones_at(cls, shape: Sequence[int], idx) -> "Sparse":
        idx = np.asarray(idx, dtype=np.int64).reshape(-1, len(shape))
        return cls(shape, idx, np.ones(len(idx), np.int64))

    @classmethod
    def identity(cls, d: int) -> "Sparse":
        ar = np.arange(d, dtype=np.int64)
        return cls((d, d), np.stack([ar, ar], 1), np.ones(d, np.int64), 1, canonical=True)

    @classmethod
    def permutation(cls, images: Sequence[int]) -> "Sparse":
        """Matrix with entry (images[j], j) = 1, i.e. e_j -> e_{images[j]}."""
        images = np.asarray(images, dtype=np.int64)
        return cls((len(images), len(images)), np.stack([images, np.arange(len(images))], 1), np.ones(len(images), np.int64))

    # access
    @property
    def ndim(self) -> int:
        return len(self.shape)

    @property
    def nnz(self) -> int:
        return len(self.num)

    def values(self) -> list[Fraction]:
        return [Fraction(int(n), self.den) for n in self.num]

    def entries(self) -> Iterator[tuple[tuple[int, ...], Fraction]]:
        for row, n in zip(self.idx.tolist(), self.num.tolist()):
            yield tuple(row), Fraction(int(n), self.den)

    def to_dict(self) -> dict[tuple[int, ...], Fraction]:
        return dict(self.entries())

    def get(self, index: Sequence[int]) -> Fraction:
        key = int(_row_keys(np.array([index], dtype=np.int64), self.shape)[0])
        keys = _row_keys(self.idx, self.shape)
        pos = np.searchsorted(keys, key)
        if pos < len(keys) and keys[pos] == key:
            return Fraction(int(self.num[pos]), self.den)
        return Fraction(0)

    def is_unit_coefficient(self) -> bool:
        return self.den == 1 and bool(np.all(self.num == 1))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Sparse):
            return NotImplemented
        return (self.shape == other.shape and self.den == other.den and np.array_equal(self.idx, other.idx)
                and np.array_equal(self.num, other.num))

    def __hash__(self):
        return hash((self.shape, self.nnz, self.den))

    def __repr__(self) -> str:
        return f"Sparse(shape={self.shape}, nnz={self.nnz})"

    # arithmetic
    def _rescaled(self, den: int) -> np.ndarray:
        f = den // self.den
        return _mul(self.num, np.array([f], dtype=np.int64)) if f != 1 else self.num

    def __add__(self, other: "Sparse") -> "Sparse":
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")
        den = math.lcm(self.den, other.den)
        a, b = self._rescaled(den), other._rescaled(den)
        if a.dtype == object or b.dtype == object:
            a, b = a.astype(object), b.astype(object)
        return Sparse(self.shape, np.concatenate([self.idx, other.idx]), np.concatenate([a, b]), den)

    def __neg__(self) -> "Sparse":
        return Sparse(self.shape, self.idx, -self.num, self.den, canonical=True)

    def __sub__(self, other: "Sparse") -> "Sparse":
        return self + (-other)

    def scale(self, c) -> "Sparse":
        c = Fraction(c)
        if c == 0:
            return Sparse.zeros(self.shape)
        return Sparse(self.shape, self.idx, _mul(self.num, np.array([c.numerator], dtype=object)),
                      self.den * c.denominator)

    def transpose(self, axes: Sequence[int]) -> "Sparse":
        axes = list(axes)
        return Sparse([self.shape[a] for a in axes], self.idx[:, axes], self.num, self.den)

    def reshape(self, shape: Sequence[int]) -> "Sparse":
        shape = tuple(int(d) for d in shape)
        if math.prod(shape) != math.prod(self.shape):
            raise ValueError(f"cannot reshape {self.shape} to {shape}")
        flat = _row_keys(self.idx, self.shape)
        if len(shape) == 0:
            new = np.zeros((len(flat), 0), np.int64)
        else:
            new = np.stack(np.unravel_index(flat, shape), 1).astype(np.int64)
        return Sparse(shape, new, self.num, self.den, canonical=True)

    def flat(self) -> "Sparse":
        return self.reshape((math.prod(self.shape),))

    def first_difference(self, other: "Sparse"):
        """First index (in canonical order) where two same-shape tensors differ, else None."""
        if self == other:
            return None
        diff = self - other
        return tuple(int(i) for i in diff.idx[0])


def _prepare(t: Sparse, letters: str) -> tuple[list[str], np.ndarray, np.ndarray]:
    if len(letters) != t.ndim:
        raise ValueError(f"subscripts {letters!r} do not match tensor of rank {t.ndim}")
    idx, num = t.idx, t.num
    uniq: list[str] = []
    cols: list[int] = []
    for k, ch in enumerate(letters):
        if ch in uniq:
            j = cols[uniq.index(ch)]
            keep = idx[:, j] == idx[:, k]
            idx, num = idx[keep], num[keep]
        else:
            uniq.append(ch)
            cols.append(k)
    return uniq, idx[:, cols], num


class _Term:
    __slots__ = ("letters", "idx", "num", "den")

    def __init__(self, letters, idx, num, den):
        self.letters, self.idx, self.num, self.den = list(letters), idx, num, den

    def cols(self, letters: Sequence[str]) -> np.ndarray:
        return self.idx[:, [self.letters.index(c) for c in letters]]


def _sum_out(term: _Term, keep: set[str], dims: dict[str, int]) -> _Term:
    kept = [c for c in term.letters if c in keep]
    if len(kept) == len(term.letters):
        return term
    sub = term.cols(kept)
    idx, num = coalesce(sub, term.num, [dims[c] for c in kept])
    return _Term(kept, idx, num, term.den)


def _merge(a: _Term, b: _Term, dims: dict[str, int]) -> _Term:
    shared = [c for c in a.letters if c in b.letters]
    lk, rk = encode_pair(a.cols(shared), b.cols(shared), [dims[c] for c in shared])
    li, ri = join(lk, rk)
    extra = [c for c in b.letters if c not in shared]
    idx = np.concatenate([a.idx[li], b.cols(extra)[ri]], axis=1)
    num = _mul(a.num[li], b.num[ri])
    return _Term(a.letters + extra, idx, num, a.den * b.den)


def _estimate(a: _Term, b: _Term, dims: dict[str, int]) -> int:
    shared = [c for c in a.letters if c in b.letters]
    if not shared:
        return len(a.num) * len(b.num)
    lk, rk = encode_pair(a.cols(shared), b.cols(shared), [dims[c] for c in shared])
    return join_count(lk, rk)


def contract(subscripts: str, *tensors: Sparse) -> Sparse:
    """Exact sparse einsum, e.g. ``contract("ijk,kl->ijl", a, b)``.

    Pairs of operands are joined greedily by exact intermediate size, and every
    index no longer needed is summed out as soon as possible.
    """
    lhs, out = subscripts.replace(" ", "").split("->")
    specs = lhs.split(",")
    if len(specs) != len(tensors):
        raise ValueError("number of subscripts and operands differ")
    dims: dict[str, int] = {}
    terms = []
    for spec, t in zip(specs, tensors):
        for ch, d in zip(spec, t.shape):
            if dims.setdefault(ch, d) != d:
                raise ValueError(f"index {ch!r} has inconsistent sizes {dims[ch]} and {d}")
        letters, idx, num = _prepare(t, spec)
        terms.append(_Term(letters, idx, num, t.den))
    for ch in out:
        if ch not in dims:
            raise ValueError(f"output index {ch!r} does not appear in the inputs")

    def needed(excluding: Sequence[int]) -> set[str]:
        s = set(out)
        for k, t in enumerate(terms):
            if k not in excluding:
                s.update(t.letters)
        return s

    for k in range(len(terms)):
        terms[k] = _sum_out(terms[k], needed([k]), dims)
    while len(terms) > 1:
        best = None
        for i in range(len(terms)):
            for j in range(i + 1, len(terms)):
                shares = bool(set(terms[i].letters) & set(terms[j].letters))
                cost = (not shares, _estimate(terms[i], terms[j], dims))
                if best is None or cost < best[0]:
                    best = (cost, i, j)
        _, i, j = best
        merged = _merge(terms[i], terms[j], dims)
        terms = [t for k, t in enumerate(terms) if k not in (i, j)]
        terms.append(merged)
        terms[-1] = _sum_out(merged, needed([len(terms) - 1]), dims)
    final = _sum_out(terms[0], set(out), dims)
    idx = final.cols(list(out)) if out else np.zeros((len(final.num), 0), np.int64)
    return Sparse([dims[c] for c in out], idx, final.num, final.den)


def outer(a: Sparse, b: Sparse) -> Sparse:
    la = "".join(chr(ord("a") + k) for k in range(a.ndim))
    lb = "".join(chr(ord("a") + a.ndim + k) for k in range(b.ndim))
    return contract(f"{la},{lb}->{la}{lb}", a, b)
