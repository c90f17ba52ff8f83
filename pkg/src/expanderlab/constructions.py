"""Executable proof constructions: popular-ratio graphs, dense-degree
subsets, greedy covering by translates, dense partial triangle extraction,
iterated-sumset witness search, and the injectivity certificate behind the
partial difference-set bound.

Thresholds of the form (1 - k*sqrt(eps)) * scale are irrational; every
comparison against them is decided exactly in rationals by isolating the
square root and squaring (see `ge_one_minus_k_sqrt`).  A failed internal
check raises InvariantViolation rather than degrading the result: each such
check is a theorem on the instance, so a failure is either a bug or news.
"""
from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Tuple

from .errors import (
    BudgetExceeded,
    CollisionFound,
    ContextMismatch,
    EpsilonOutOfRange,
    GraphTooSparse,
    InvariantViolation,
    ZeroElementPresent,
)
from .sets import FSet, PairGraph, _same_ctx, combine, expander_set, partial_combine


def ge_one_minus_k_sqrt(value, scale, eps: Fraction, k: int = 1) -> bool:
    """Exact test of  value >= (1 - k*sqrt(eps)) * scale  for rationals >= 0.

    Rearranged to k*sqrt(eps)*scale >= scale - value; if the right side is
    non-positive the inequality is immediate, otherwise both sides are
    non-negative and squaring decides it.
    """
    value, scale, eps = Fraction(value), Fraction(scale), Fraction(eps)
    rhs = scale - value
    if rhs <= 0:
        return True
    return k * k * eps * scale * scale >= rhs * rhs


def gt_k_sqrt(value, scale, eps: Fraction, k: int = 1) -> bool:
    """Exact test of  value > k*sqrt(eps) * scale  for rationals >= 0."""
    value, scale, eps = Fraction(value), Fraction(scale), Fraction(eps)
    if value <= 0:
        return False
    return value * value > k * k * eps * scale * scale


def _check_density(g: PairGraph, eps: Fraction) -> None:
    full = len(g.left) * len(g.right)
    if Fraction(len(g)) < (1 - eps) * full:
        raise GraphTooSparse(
            f"|G| = {len(g)} below (1 - {eps}) * {full} = {(1 - eps) * full}"
        )


# -- popular ratio graph -------------------------------------------------------

@dataclass(frozen=True)
class PopularRatioResult:
    x_set: FSet                     # popular ratios X
    graph: PairGraph                # G = {(a, b) : a/b in X}
    epsilon: Fraction
    threshold: Fraction             # eps |A||B| / |A/B|
    partial_diff: FSet              # A -_G B
    bound_rhs_shape: Fraction       # |A(B+1)| |B(A+1)| |A/B| / (|A||B|)
    slack: Fraction                 # |A -_G B| / bound_rhs_shape


def popular_ratio_graph(a: FSet, b: FSet, epsilon) -> PopularRatioResult:
    """Keep the ratios x with |A ∩ xB| >= eps|A||B|/|A/B| and take all pairs
    realising them; the kept graph has at least (1 - eps)|A||B| edges."""
    ctx = _same_ctx(a, b)
    eps = Fraction(epsilon)
    if not 0 < eps < 1:
        raise EpsilonOutOfRange(f"epsilon = {eps} outside (0, 1)")
    if 0 in a.member_set() or 0 in b.member_set():
        raise ZeroElementPresent("popular-ratio construction needs 0 excluded")

    ratio_of = ctx.div
    mult: Counter = Counter()
    for x in a.vals:
        for y in b.vals:
            mult[ratio_of(x, y)] += 1
    na, nb = len(a), len(b)
    threshold = eps * na * nb / len(mult)
    popular = {r for r, c in mult.items() if c >= threshold}

    x_set = a.with_values(popular)
    edges = [
        (i, j)
        for i, av in enumerate(a.vals)
        for j, bv in enumerate(b.vals)
        if ratio_of(av, bv) in popular
    ]
    graph = PairGraph(a, b, edges)

    if sum(mult[r] for r in popular) != len(graph):
        raise InvariantViolation("sum of popular multiplicities != |G|")
    if Fraction(len(graph)) < (1 - eps) * na * nb:
        raise InvariantViolation("popular graph lost more than an eps-fraction of pairs")

    pdiff = partial_combine(graph, "diff")
    shape = Fraction(
        len(expander_set(a, b)) * len(expander_set(b, a)) * len(mult), na * nb
    )
    return PopularRatioResult(
        x_set=x_set,
        graph=graph,
        epsilon=eps,
        threshold=threshold,
        partial_diff=pdiff,
        bound_rhs_shape=shape,
        slack=Fraction(len(pdiff)) / shape,
    )


# -- injectivity certificate ---------------------------------------------------

@dataclass(frozen=True)
class InjectionResult:
    s_size: int
    image_bound: int                # |A(B+1)| * |B(A+1)|
    partial_diff: FSet
    lower_bound_lhs: Optional[Fraction]  # eps|A||B|/|A/B| * |A -_G B| when eps given
    representatives: Tuple          # ((xi, a, b), ...) in canonical order


def injection_witness(a: FSet, b: FSet, g: PairGraph, epsilon=None) -> InjectionResult:
    """Enumerate S = {(xi, (c, d)) : c/d = a(xi)/b(xi)} for the edge-borne
    representatives of each partial difference, push it through
    (xi, (c, d)) -> (a(xi)(1+d), b(xi)(1+c)), and certify injectivity by an
    exhaustive collision scan.

    Raises CollisionFound on any collision (which would falsify the bound
    |S| <= |A(B+1)||B(A+1)| on this instance).
    """
    ctx = _same_ctx(a, b)
    if 0 in b.member_set():
        raise ZeroElementPresent("ratios need 0 excluded from the right set")

    # representative edge per partial difference: lexicographically smallest
    reps = {}
    for av, bv in g.value_edges():  # already sorted
        xi = ctx.sub(av, bv)
        if xi not in reps:
            reps[xi] = (av, bv)

    # all (c, d) pairs per ratio
    by_ratio: dict = {}
    for cv in a.vals:
        for dv in b.vals:
            by_ratio.setdefault(ctx.div(cv, dv), []).append((cv, dv))

    one = ctx.one
    image_seen: dict = {}
    s_size = 0
    for xi in sorted(reps):
        av, bv = reps[xi]
        for cv, dv in by_ratio[ctx.div(av, bv)]:
            s_size += 1
            image = (ctx.mul(av, ctx.add(one, dv)), ctx.mul(bv, ctx.add(one, cv)))
            prior = image_seen.get(image)
            if prior is not None:
                raise CollisionFound(
                    f"image {image} reached twice", first=prior, second=(xi, cv, dv)
                )
            image_seen[image] = (xi, cv, dv)

    bound = len(expander_set(a, b)) * len(expander_set(b, a))
    if s_size > bound:
        raise InvariantViolation("injective map into a smaller product set")

    lower = None
    if epsilon is not None:
        eps = Fraction(epsilon)
        ratio_support = len(combine(a, b, "ratio"))
        lower = eps * len(a) * len(b) / ratio_support * len(reps)
        if s_size < lower:
            raise InvariantViolation(
                "fewer ordinates than the popularity threshold guarantees"
            )

    return InjectionResult(
        s_size=s_size,
        image_bound=bound,
        partial_diff=partial_combine(g, "diff"),
        lower_bound_lhs=lower,
        representatives=tuple((xi,) + reps[xi] for xi in sorted(reps)),
    )


# -- dense degree subset ---------------------------------------------------------

def dense_degree_subset(g: PairGraph, epsilon) -> FSet:
    """Left vertices of degree at least (1 - sqrt(eps))|B|.

    Requires |G| >= (1 - eps)|A||B|; the result then provably contains at
    least (1 - sqrt(eps))|A| vertices, which is re-checked exactly.
    """
    eps = Fraction(epsilon)
    if not 0 <= eps < 1:
        raise EpsilonOutOfRange(f"epsilon = {eps} outside [0, 1)")
    _check_density(g, eps)
    nb = len(g.right)
    degs = g.left_degrees()
    kept = [v for v, d in zip(g.left.vals, degs) if ge_one_minus_k_sqrt(d, nb, eps)]
    if not ge_one_minus_k_sqrt(len(kept), len(g.left), eps):
        raise InvariantViolation("dense-degree subset smaller than guaranteed")
    return g.left.with_values(kept)


# -- greedy covering --------------------------------------------------------------

@dataclass(frozen=True)
class CoverResult:
    covered: FSet                   # A': the union of everything discarded
    base: FSet                      # A1: the dense-degree subset iterated on
    translates: Tuple               # shift values t, one per iteration
    sign: str                       # "+" covers by t + B, "-" by t - B
    iterations: int
    per_step: Tuple                 # ((shift, discarded count), ...)


def greedy_cover(a: FSet, b: FSet, g: PairGraph, epsilon, sign: str = "+") -> CoverResult:
    """Greedy covering of most of `a` by translates of b (or -b).

    Repeatedly picks the pair (x, y) in A* x B whose translate covers the
    most of the remainder (ties to the smallest shift), discards the covered
    elements, and stops once the remainder is at most sqrt(eps)|A1|.  Each
    step's discard count is checked exactly against the pigeonhole guarantee
    |A*| (1 - sqrt(eps))^2 |B| / |A -_G B|.
    """
    if sign not in ("+", "-"):
        raise ValueError("sign must be '+' or '-'")
    ctx = _same_ctx(a, b)
    eps = Fraction(epsilon)
    if not 0 < eps < Fraction(1, 4):
        raise EpsilonOutOfRange(f"epsilon = {eps} outside (0, 1/4)")
    _check_density(g, eps)

    a1 = dense_degree_subset(g, eps)
    adj = g.neighbors_left()
    pdiff_size = len(partial_combine(g, "diff"))
    bvals = b.vals
    bset = b.member_set()
    nb = len(b)

    remaining = set(a1.vals)
    n1 = len(a1)
    translates = []
    per_step = []
    while gt_k_sqrt(len(remaining), n1, eps):
        gstar = sum(len(adj[v]) for v in remaining)
        best_cov, best_shift = -1, None
        for x in sorted(remaining):
            for y in bvals:
                shift = ctx.sub(x, y) if sign == "+" else ctx.add(x, y)
                if sign == "+":
                    cov = sum(1 for w in bvals if ctx.add(shift, w) in remaining)
                else:
                    cov = sum(1 for w in bvals if ctx.sub(shift, w) in remaining)
                if cov > best_cov or (cov == best_cov and shift < best_shift):
                    best_cov, best_shift = cov, shift
        # pigeonhole: the best translate covers at least the average, which the
        # Cauchy-Schwarz energy bound pushes up to |G*|^2 / (|A*||B| |A -_G B|)
        nstar = len(remaining)
        if best_cov * nstar * nb * pdiff_size < gstar * gstar:
            raise InvariantViolation("greedy step below the energy guarantee")
        r = Fraction(best_cov * pdiff_size, nstar * nb)
        t = 1 + eps - r
        if t > 0 and 4 * eps < t * t:
            raise InvariantViolation("greedy step below (1 - sqrt(eps))^2 form")
        if sign == "+":
            covered_now = {w for w in (ctx.add(best_shift, y) for y in bvals) if w in remaining}
        else:
            covered_now = {w for w in (ctx.sub(best_shift, y) for y in bvals) if w in remaining}
        remaining -= covered_now
        translates.append(best_shift)
        per_step.append((best_shift, len(covered_now)))

    covered = a1.with_values(set(a1.vals) - remaining)
    # exact containment and size contracts
    for v in covered.vals:
        ok = any(
            (ctx.sub(v, t) in bset) if sign == "+" else (ctx.sub(t, v) in bset)
            for t in translates
        )
        if not ok:
            raise InvariantViolation(f"covered element {v} outside every translate")
    if not ge_one_minus_k_sqrt(len(covered), len(a), eps, k=2):
        raise InvariantViolation("covered fewer than (1 - 2 sqrt(eps))|A| elements")

    return CoverResult(
        covered=covered,
        base=a1,
        translates=tuple(translates),
        sign=sign,
        iterations=len(translates),
        per_step=tuple(per_step),
    )


# -- dense partial triangle (Ruzsa with high-density graphs) ----------------------

@dataclass(frozen=True)
class PartialTriangleResult:
    a_side: FSet                    # A'
    c_side: FSet                    # C'
    y_size: int                     # |Y|, the counted witness pairs
    partial_ab: FSet                # A -_G B
    partial_bc: FSet                # B -_H C
    diff_ac: FSet                   # A' - C'
    slack: Fraction                 # |A' - C'| |B| / (|A -_G B| |B -_H C|)


def partial_ruzsa(g: PairGraph, h: PairGraph, epsilon) -> PartialTriangleResult:
    """Triangle inequality through dense partial difference sets.

    Extracts dense-degree subsets A' and C', verifies the pairwise overlap
    |B_a ∩ B_c| >= (1 - 2 sqrt(eps))|B| exactly, builds the witness set Y and
    its injection into (A -_G B) x (B -_H C), and certifies

        (1 - 2 sqrt(eps)) |B| |A' - C'|  <=  |A -_G B| |B -_H C|

    exactly (squared form).  eps = 0 with complete graphs recovers the plain
    triangle inequality.
    """
    eps = Fraction(epsilon)
    if not 0 <= eps < Fraction(1, 4):
        raise EpsilonOutOfRange(f"epsilon = {eps} outside [0, 1/4)")
    if g.right != h.left:
        raise ContextMismatch("graphs must share the middle set B")
    _check_density(g, eps)
    _check_density(h, eps)
    ctx = g.left.ctx

    a_side = dense_degree_subset(g, eps)
    c_side = dense_degree_subset(h.transpose(), eps)

    b_of_a = {v: frozenset(ns) for v, ns in g.neighbors_left().items()}
    b_of_c = {v: frozenset(ns) for v, ns in h.transpose().neighbors_left().items()}
    nb = len(g.right)
    for av in a_side.vals:
        for cv in c_side.vals:
            if not ge_one_minus_k_sqrt(len(b_of_a[av] & b_of_c[cv]), nb, eps, k=2):
                raise InvariantViolation(
                    f"overlap below (1 - 2 sqrt(eps))|B| at ({av}, {cv})"
                )

    # lexicographically smallest representatives per difference
    reps = {}
    for av in a_side.vals:
        for cv in c_side.vals:
            x = ctx.sub(av, cv)
            if x not in reps:
                reps[x] = (av, cv)

    pab = partial_combine(g, "diff")
    pbc = partial_combine(h, "diff")
    pab_set, pbc_set = pab.member_set(), pbc.member_set()

    y_size = 0
    seen: dict = {}
    for x in sorted(reps):
        av, cv = reps[x]
        common = b_of_a[av] & b_of_c[cv]
        if not ge_one_minus_k_sqrt(len(common), nb, eps, k=2):
            raise InvariantViolation("representative pair lost its overlap")
        for bv in common:
            y_size += 1
            image = (ctx.sub(av, bv), ctx.sub(bv, cv))
            if image[0] not in pab_set or image[1] not in pbc_set:
                raise InvariantViolation("witness image escapes the partial difference sets")
            prior = seen.get(image)
            if prior is not None:
                raise CollisionFound(f"image {image} reached twice", prior, (x, bv))
            seen[image] = (x, bv)

    diff_ac = combine(a_side, c_side, "diff")
    if len(diff_ac) != len(reps):
        raise InvariantViolation("difference-set enumeration mismatch")
    # (1 - 2 sqrt(eps)) |B| |A' - C'| <= |Y| <= |A -_G B| |B -_H C|
    if not ge_one_minus_k_sqrt(y_size, nb * len(diff_ac), eps, k=2):
        raise InvariantViolation("witness count below the overlap guarantee")
    if y_size > len(pab) * len(pbc):
        raise InvariantViolation("injection bound violated")

    return PartialTriangleResult(
        a_side=a_side,
        c_side=c_side,
        y_size=y_size,
        partial_ab=pab,
        partial_bc=pbc,
        diff_ac=diff_ac,
        slack=Fraction(len(diff_ac) * nb, len(pab) * len(pbc)),
    )


# -- iterated sumset witness ---------------------------------------------------

@dataclass(frozen=True)
class PlunneckeResult:
    subset: FSet                    # the minimising A'
    slack: Fraction                 # |A' + X1 + ... + Xk| |A|^(k-1) / prod |A + Xj|
    subset_ratio: Fraction          # |A'| / |A|
    iterated_size: int              # |A' + X1 + ... + Xk|
    single_sizes: Tuple[int, ...]   # (|A + Xj|, ...)


def plunnecke_witness(a: FSet, xs: Sequence[FSet], budget: int = 10) -> PlunneckeResult:
    """Search all subsets A' with |A'| >= |A|/2 for the one minimising the
    iterated-sumset ratio |A' + X1 + ... + Xk| |A|^(k-1) / prod |A + Xj|.

    Exhaustive (2^|A| subsets), so |A| is capped by `budget`.  No pass/fail:
    the inequality this probes carries an absolute constant, so only the
    minimised slack is reported.
    """
    if not xs:
        raise ValueError("need at least one summand set")
    for x in xs:
        _same_ctx(a, x)
    n = len(a)
    if n == 0:
        raise ValueError("empty base set")
    if n > budget:
        raise BudgetExceeded(f"|A| = {n} exceeds subset-search budget {budget}")

    k = len(xs)
    denom = 1
    single = []
    for x in xs:
        size = len(combine(a, x, "sum"))
        single.append(size)
        denom *= size
    scale = n ** (k - 1)

    ctx = a.ctx
    best = None  # (slack, subset values)
    min_size = -(-n // 2)  # ceil(n/2)
    for r in range(min_size, n + 1):
        for sub in itertools.combinations(a.vals, r):
            acc = set(sub)
            for x in xs:
                acc = {ctx.add(u, v) for u in acc for v in x.vals}
            slack = Fraction(len(acc) * scale, denom)
            key = (slack, sub)
            if best is None or key < best[:2]:
                best = (slack, sub, len(acc))

    slack, sub, iterated = best
    return PlunneckeResult(
        subset=a.with_values(sub),
        slack=slack,
        subset_ratio=Fraction(len(sub), n),
        iterated_size=iterated,
        single_sizes=tuple(single),
    )
