"""Finite-set arithmetic: sumsets, product/ratio sets, the expander set
A(B+1), signed k-fold sums, dilates, and partial sumsets over explicit
bipartite graphs.

FSet instances are immutable, canonically sorted and duplicate-free; all
operations return new sets, so values can be shared freely across threads.
Inner loops work on raw canonical values (ints mod p, Fractions over Q) for
speed and only wrap Elem at the API boundary.
"""
from __future__ import annotations

import json
from fractions import Fraction
from typing import Iterable, Iterator, Sequence, Tuple

from .errors import (
    ContextMismatch,
    DivisionByZero,
    InvalidSetFile,
    ZeroDilation,
)
from .field import KIND_PRIME, Elem, ElemLike, FieldCtx, RawValue

COMBINE_OPS = ("sum", "diff", "prod", "ratio")


class FSet:
    """A finite set of field elements with canonical ordering."""

    __slots__ = ("ctx", "_vals", "_members")

    def __init__(self, ctx: FieldCtx, values: Iterable[ElemLike] = ()):
        canon = ctx.canon
        members = frozenset(canon(v) for v in values)
        object.__setattr__(self, "ctx", ctx)
        object.__setattr__(self, "_vals", tuple(sorted(members)))
        object.__setattr__(self, "_members", members)

    def __setattr__(self, name, value):
        raise AttributeError("FSet is immutable")

    @classmethod
    def _from_canonical(cls, ctx: FieldCtx, members: frozenset) -> "FSet":
        obj = object.__new__(cls)
        object.__setattr__(obj, "ctx", ctx)
        object.__setattr__(obj, "_vals", tuple(sorted(members)))
        object.__setattr__(obj, "_members", members)
        return obj

    @property
    def vals(self) -> Tuple[RawValue, ...]:
        return self._vals

    def elems(self) -> Tuple[Elem, ...]:
        return tuple(Elem(self.ctx, v) for v in self._vals)

    def __len__(self) -> int:
        return len(self._vals)

    def __iter__(self) -> Iterator[RawValue]:
        return iter(self._vals)

    def __contains__(self, x: ElemLike) -> bool:
        try:
            return self.ctx.canon(x) in self._members
        except (ContextMismatch, DivisionByZero):
            return False

    def __eq__(self, other):
        return (
            isinstance(other, FSet)
            and self.ctx == other.ctx
            and self._members == other._members
        )

    def __hash__(self):
        return hash((self.ctx, self._members))

    def __repr__(self):
        body = ", ".join(self.ctx.render(v) for v in self._vals[:12])
        if len(self._vals) > 12:
            body += ", ..."
        return f"FSet[{self.ctx!r}]{{{body}}}"

    def with_values(self, values: Iterable[ElemLike]) -> "FSet":
        return FSet(self.ctx, values)

    def union(self, other: "FSet") -> "FSet":
        _same_ctx(self, other)
        return FSet._from_canonical(self.ctx, self._members | other._members)

    def intersection(self, other: "FSet") -> "FSet":
        _same_ctx(self, other)
        return FSet._from_canonical(self.ctx, self._members & other._members)

    def difference(self, other: "FSet") -> "FSet":
        _same_ctx(self, other)
        return FSet._from_canonical(self.ctx, self._members - other._members)

    def is_subset(self, other: "FSet") -> bool:
        _same_ctx(self, other)
        return self._members <= other._members

    def member_set(self) -> frozenset:
        return self._members

    # -- serialisation ---------------------------------------------------------

    def to_json(self) -> dict:
        if self.ctx.kind == KIND_PRIME:
            return {"field": "fp", "p": self.ctx.p, "elements": list(self._vals)}
        return {"field": "q", "elements": [self.ctx.render(v) for v in self._vals]}

    @classmethod
    def from_json(cls, doc: dict) -> "FSet":
        if not isinstance(doc, dict) or "field" not in doc or "elements" not in doc:
            raise InvalidSetFile("set document needs 'field' and 'elements'")
        field = doc["field"]
        elements = doc["elements"]
        if not isinstance(elements, list):
            raise InvalidSetFile("'elements' must be a list")
        if field == "fp":
            if "p" not in doc:
                raise InvalidSetFile("prime-field set document needs 'p'")
            ctx = FieldCtx.prime(doc["p"])
            for e in elements:
                if isinstance(e, bool) or not isinstance(e, int):
                    raise InvalidSetFile(f"non-integer residue {e!r}")
                if not 0 <= e < ctx.p:
                    raise InvalidSetFile(f"residue {e} out of range [0, {ctx.p})")
            return cls(ctx, elements)
        if field == "q":
            ctx = FieldCtx.rational()
            if not all(isinstance(e, str) for e in elements):
                raise InvalidSetFile("rational elements must be strings")
            return cls(ctx, elements)
        raise InvalidSetFile(f"unknown field tag {field!r}")


def load_set(path) -> FSet:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InvalidSetFile(f"{path}: {exc}") from exc
    return FSet.from_json(doc)


def save_set(fset: FSet, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(fset.to_json(), fh, sort_keys=True)
        fh.write("\n")


def _same_ctx(a: FSet, b: FSet) -> FieldCtx:
    if a.ctx != b.ctx:
        raise ContextMismatch(f"{a.ctx!r} vs {b.ctx!r}")
    return a.ctx


def combine(a: FSet, b: FSet, op: str) -> FSet:
    """All pairwise sums / differences / products / ratios of a and b."""
    ctx = _same_ctx(a, b)
    if op not in COMBINE_OPS:
        raise ValueError(f"unknown combine op {op!r}")
    av, bv = a.vals, b.vals
    if ctx.kind == KIND_PRIME:
        p = ctx.p
        if op == "sum":
            out = {(x + y) % p for x in av for y in bv}
        elif op == "diff":
            out = {(x - y) % p for x in av for y in bv}
        elif op == "prod":
            out = {(x * y) % p for x in av for y in bv}
        else:
            if 0 in b.member_set():
                raise DivisionByZero("ratio set with 0 in the denominator set")
            invs = [pow(y, -1, p) for y in bv]
            out = {(x * iy) % p for x in av for iy in invs}
    else:
        if op == "sum":
            out = {x + y for x in av for y in bv}
        elif op == "diff":
            out = {x - y for x in av for y in bv}
        elif op == "prod":
            out = {x * y for x in av for y in bv}
        else:
            if 0 in b.member_set():
                raise DivisionByZero("ratio set with 0 in the denominator set")
            out = {x / y for x in av for y in bv}
    return FSet._from_canonical(ctx, frozenset(out))


def expander_set(a: FSet, b: FSet) -> FSet:
    """The expander set {x(y+1) : x in a, y in b}."""
    ctx = _same_ctx(a, b)
    if ctx.kind == KIND_PRIME:
        p = ctx.p
        out = {(x * (y + 1)) % p for x in a.vals for y in b.vals}
    else:
        out = {x * (y + 1) for x in a.vals for y in b.vals}
    return FSet._from_canonical(ctx, frozenset(out))


def kfold_sum(a: FSet, k: int, signs: Sequence[int]) -> FSet:
    """The signed k-fold sum {s1*a1 + ... + sk*ak : ai in a}."""
    if k < 1 or k != len(signs):
        raise ValueError("need k = len(signs) >= 1")
    if any(s not in (1, -1) for s in signs):
        raise ValueError("signs must be +1 or -1")
    ctx = a.ctx
    acc = {ctx.zero}
    for s in signs:
        if s == 1:
            acc = {ctx.add(x, y) for x in acc for y in a.vals}
        else:
            acc = {ctx.sub(x, y) for x in acc for y in a.vals}
    return FSet._from_canonical(ctx, frozenset(acc))


def affine_image(a: FSet, x: ElemLike, y: ElemLike) -> FSet:
    """The image x*a + y; bijective, so the size is preserved."""
    ctx = a.ctx
    xv, yv = ctx.canon(x), ctx.canon(y)
    if xv == 0:
        raise ZeroDilation("dilation by zero collapses the set")
    out = frozenset(ctx.add(ctx.mul(xv, v), yv) for v in a.vals)
    return FSet._from_canonical(ctx, out)


def dilate(a: FSet, x: ElemLike) -> FSet:
    return affine_image(a, x, a.ctx.zero)


def negate(a: FSet) -> FSet:
    return FSet._from_canonical(a.ctx, frozenset(a.ctx.neg(v) for v in a.vals))


def translate(a: FSet, y: ElemLike) -> FSet:
    return affine_image(a, a.ctx.one, y)


class PairGraph:
    """An explicit bipartite graph G over left x right, stored as index pairs."""

    __slots__ = ("left", "right", "edges")

    def __init__(self, left: FSet, right: FSet, edges: Iterable[Tuple[int, int]]):
        _same_ctx(left, right)
        edge_set = frozenset((int(i), int(j)) for i, j in edges)
        nl, nr = len(left), len(right)
        for i, j in edge_set:
            if not (0 <= i < nl and 0 <= j < nr):
                raise ValueError(f"edge ({i}, {j}) out of range {nl}x{nr}")
        object.__setattr__(self, "left", left)
        object.__setattr__(self, "right", right)
        object.__setattr__(self, "edges", edge_set)

    def __setattr__(self, name, value):
        raise AttributeError("PairGraph is immutable")

    @classmethod
    def complete(cls, left: FSet, right: FSet) -> "PairGraph":
        return cls(left, right, ((i, j) for i in range(len(left)) for j in range(len(right))))

    @classmethod
    def from_value_pairs(cls, left: FSet, right: FSet, pairs) -> "PairGraph":
        li = {v: i for i, v in enumerate(left.vals)}
        ri = {v: j for j, v in enumerate(right.vals)}
        edges = []
        for a, b in pairs:
            av, bv = left.ctx.canon(a), right.ctx.canon(b)
            if av not in li or bv not in ri:
                raise ValueError(f"pair ({a!r}, {b!r}) not in left x right")
            edges.append((li[av], ri[bv]))
        return cls(left, right, edges)

    def __len__(self) -> int:
        return len(self.edges)

    def __eq__(self, other):
        return (
            isinstance(other, PairGraph)
            and self.left == other.left
            and self.right == other.right
            and self.edges == other.edges
        )

    def __hash__(self):
        return hash((self.left, self.right, self.edges))

    def __repr__(self):
        return f"PairGraph({len(self.left)}x{len(self.right)}, |G|={len(self.edges)})"

    def degree_left(self, i: int) -> int:
        return sum(1 for e in self.edges if e[0] == i)

    def left_degrees(self) -> list:
        degs = [0] * len(self.left)
        for i, _ in self.edges:
            degs[i] += 1
        return degs

    def neighbors_left(self) -> dict:
        """Map of left value -> sorted tuple of right neighbour values."""
        adj = {v: [] for v in self.left.vals}
        lv, rv = self.left.vals, self.right.vals
        for i, j in self.edges:
            adj[lv[i]].append(rv[j])
        return {v: tuple(sorted(ns)) for v, ns in adj.items()}

    def value_edges(self) -> list:
        """Deterministically ordered list of (left value, right value) edges."""
        lv, rv = self.left.vals, self.right.vals
        return sorted((lv[i], rv[j]) for i, j in self.edges)

    def transpose(self) -> "PairGraph":
        return PairGraph(self.right, self.left, ((j, i) for i, j in self.edges))

    def density(self) -> Fraction:
        denom = len(self.left) * len(self.right)
        return Fraction(len(self.edges), denom) if denom else Fraction(0)


def partial_combine(g: PairGraph, op: str) -> FSet:
    """Pairwise results restricted to the edges of g."""
    if op not in COMBINE_OPS:
        raise ValueError(f"unknown combine op {op!r}")
    ctx = g.left.ctx
    if op == "ratio":
        rv = g.right.vals
        if any(rv[j] == 0 for _, j in g.edges):
            raise DivisionByZero("ratio over an edge touching 0 on the right")
    fn = {"sum": ctx.add, "diff": ctx.sub, "prod": ctx.mul, "ratio": ctx.div}[op]
    out = frozenset(fn(a, b) for a, b in g.value_edges())
    return FSet._from_canonical(ctx, out)
