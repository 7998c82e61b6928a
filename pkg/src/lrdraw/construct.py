"""Upper-bound construction: spine growth, ruler labels and twists.

The builder grows a spine from the root while the two largest hanging
subtrees stay small in the p-th-power sense (steps left/right).  When
neither step is allowed it either stops at a leaf or performs an i-twist:
the spine is bent into the largest hanging subtrees of the first ``i``
ruler levels, which pulls them below the rest of the path.

Everything works on continuation arrays (see :mod:`lrdraw.decomposition`);
the public functions convert to :class:`Decomposition` at the end.
"""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field, replace
from typing import Callable

from .decomposition import LEFT, RIGHT, Decomposition, from_continuation, spine_widths
from .oracle import optimal_continuation
from .tree import NIL, BinaryTree

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ConstructParams:
    p: float = 0.438
    delta: float = 0.001
    h: int = 7
    n0: int = 32
    refined: bool = False

    def __post_init__(self):
        if not 0 < self.p < 1:
            raise ValueError("p must lie in (0, 1)")
        if not 0 < self.delta < 1:
            raise ValueError("delta must lie in (0, 1)")
        if self.h < 1:
            raise ValueError("h must be at least 1")
        if self.n0 < 2:
            raise ValueError("n0 must be at least 2")


TWIST438 = ConstructParams()
TWIST437 = ConstructParams(p=0.437, refined=True)


@dataclass
class RulerLabels:
    """Largest same-side hanging subtrees per ruler level.

    ``positions[i][j]`` is the spine index holding the j-th level-i subtree
    (``None`` when that segment has none); ``sizes[i][j]`` its size (0 when
    absent).  Every level has exactly ``2**i`` slots in top-down order.
    """

    side: str
    positions: list[list[int | None]]
    sizes: list[list[int]]

    def pulled(self, i: int) -> list[int]:
        """Spine indices of all present entries on levels below ``i``, top-down."""
        return sorted(q for lvl in self.positions[:i] for q in lvl if q is not None)

    def power_sum(self, i: int, p: float) -> float:
        return sum(s ** p for s in self.sizes[i] if s)


@dataclass
class TwistEvent:
    root: int
    path: list[int]
    i: int
    twist: str
    pulled: list[int]
    labels: RulerLabels
    refined: bool


@dataclass
class Diagnostics:
    cases: Counter = field(default_factory=Counter)
    fallbacks: int = 0
    twists: list[TwistEvent] = field(default_factory=list)
    record_twists: bool = False

    def merge(self, other: "Diagnostics") -> None:
        self.cases.update(other.cases)
        self.fallbacks += other.fallbacks
        self.twists.extend(other.twists)


@dataclass
class SpineGrowth:
    path: list[int]
    action: tuple
    trace: list[str]
    fallback: bool = False
    labels: dict = field(default_factory=dict)


def _side_sizes(tree: BinaryTree, path: list[int], side: str) -> list[int]:
    """Size of the ``side`` subtree hanging at each spine index (0 if none)."""
    left, right, size = tree.left, tree.right, tree.size
    out = [0] * (len(path) - 1)
    for j in range(len(path) - 1):
        v, nxt = path[j], path[j + 1]
        if side == LEFT:
            if nxt == right[v] and left[v] != NIL:
                out[j] = size[left[v]]
        elif nxt == left[v] and right[v] != NIL:
            out[j] = size[right[v]]
    return out


def ruler_labels_from_sizes(sizes: list[int], side: str, h: int) -> RulerLabels:
    positions: list[list[int | None]] = []
    level_sizes: list[list[int]] = []
    segments = [(0, len(sizes) - 1)]
    for _ in range(h + 1):
        pos_row: list[int | None] = []
        size_row: list[int] = []
        nxt = []
        for lo, hi in segments:
            if lo > hi:
                pos_row.append(None)
                size_row.append(0)
                nxt.append((lo, hi))
                nxt.append((1, 0))
                continue
            chunk = sizes[lo:hi + 1]
            best = max(chunk)
            if best == 0:
                pos_row.append(None)
                size_row.append(0)
                nxt.append((lo, hi))
                nxt.append((1, 0))
                continue
            q = lo + chunk.index(best)  # topmost on ties
            pos_row.append(q)
            size_row.append(best)
            nxt.append((lo, q - 1))
            nxt.append((q + 1, hi))
        positions.append(pos_row)
        level_sizes.append(size_row)
        segments = nxt
    return RulerLabels(side, positions, level_sizes)


def ruler_labels(tree: BinaryTree, path: list[int], side: str, h: int) -> RulerLabels:
    """Ruler labelling of the ``side`` subtrees hanging off ``path``.

    ``path`` is a list of node ids from a subtree root downward; the
    subtrees of its last node are not part of the labelling.
    """
    return ruler_labels_from_sizes(_side_sizes(tree, path, side), side, h)


def twist_lhs(labels: RulerLabels, i: int, L: int, R: int, params: ConstructParams) -> float:
    """Left-hand side of the twist condition for level ``i``."""
    p = params.p
    if params.refined:
        last = labels.sizes[i][-1]
        if labels.side == LEFT:
            rest = max(L - last, R)
        else:
            rest = max(L, R - last)
    else:
        rest = max(L, R)
    return labels.power_sum(i, p) + rest ** p


def twist_condition(labels: RulerLabels, i: int, L: int, R: int, n: int, params: ConstructParams) -> bool:
    return twist_lhs(labels, i, L, R, params) <= (1 - params.delta) * n ** params.p


def grow_spine(tree: BinaryTree, params: ConstructParams, root: int = 0) -> SpineGrowth:
    """Extend a spine from ``root`` until it hits a leaf or a twist is due.

    ``action`` is ``("plain",)`` or ``("twist", i, "right"|"left")``.  A
    right twist bends the spine into the left hanging subtrees.
    """
    left, right, size = tree.left, tree.right, tree.size
    p = params.p
    n = size[root]
    thr = (1 - params.delta) * n ** p
    path = [root]
    trace: list[str] = []
    amax = bmax = 0  # largest left / right subtree hanging off the path
    fallback = False
    v = root
    while True:
        a, b = left[v], right[v]
        if a == NIL and b == NIL:
            return SpineGrowth(path, ("plain",), trace, fallback)
        if b == NIL:
            trace.append("case1")
            v = a
            path.append(v)
            continue
        if a == NIL:
            trace.append("case2")
            v = b
            path.append(v)
            continue
        L, R = size[a], size[b]
        ap, bp = amax ** p, bmax ** p
        if ap + R ** p <= thr:
            trace.append("case1")
            bmax = max(bmax, R)
            v = a
            path.append(v)
            continue
        if bp + L ** p <= thr:
            trace.append("case2")
            amax = max(amax, L)
            v = b
            path.append(v)
            continue
        lab_left = ruler_labels(tree, path, LEFT, params.h)
        lab_right = ruler_labels(tree, path, RIGHT, params.h)
        labels = {LEFT: lab_left, RIGHT: lab_right}
        for i in range(1, params.h + 1):
            if twist_condition(lab_left, i, L, R, n, params):
                trace.append("case3")
                return SpineGrowth(path, ("twist", i, RIGHT), trace, fallback, labels)
            if twist_condition(lab_right, i, L, R, n, params):
                trace.append("case4")
                return SpineGrowth(path, ("twist", i, LEFT), trace, fallback, labels)
        # no case applies: take the action with the smallest left-hand side
        fallback = True
        options = [(ap + R ** p, 0, "case1"), (bp + L ** p, 1, "case2")]
        for i in range(1, params.h + 1):
            options.append((twist_lhs(lab_left, i, L, R, params), 2 * i, ("case3", i)))
            options.append((twist_lhs(lab_right, i, L, R, params), 2 * i + 1, ("case4", i)))
        _, _, choice = min(options)
        log.debug("fallback at node %d (subtree size %d): %s", v, n, choice)
        if choice == "case1":
            trace.append("fallback-case1")
            bmax = max(bmax, R)
            v = a
            path.append(v)
        elif choice == "case2":
            trace.append("fallback-case2")
            amax = max(amax, L)
            v = b
            path.append(v)
        else:
            kind, i = choice
            trace.append("fallback-" + kind)
            twist = RIGHT if kind == "case3" else LEFT
            return SpineGrowth(path, ("twist", i, twist), trace, fallback, labels)


# ------------------------------------------------------------ spine filling

def _follow(tree: BinaryTree, cont: list[int], path: list[int], lo: int, hi: int, pending: list[int]) -> None:
    """Spine along path[lo..hi]; children off the path go to ``pending``."""
    left, right = tree.left, tree.right
    for j in range(lo, hi):
        v, nxt = path[j], path[j + 1]
        cont[v] = nxt
        other = right[v] if nxt == left[v] else left[v]
        if other != NIL:
            pending.append(other)


def _near_path(near, far, size, cont: list[int], u: int, pending: list[int], cap: int | None) -> None:
    """Spine from ``u`` to a leaf hugging the ``near`` side.

    With ``cap`` set, the spine moves to the far child whenever the near
    subtree has at most ``cap`` nodes (the refined path); otherwise it
    always takes the near child when there is one.
    """
    while True:
        a, b = near[u], far[u]
        if a == NIL and b == NIL:
            return
        go_far = a == NIL or (cap is not None and b != NIL and size[a] <= cap)
        if go_far:
            cont[u] = b
            if a != NIL:
                pending.append(a)
            u = b
        else:
            cont[u] = a
            if b != NIL:
                pending.append(b)
            u = a


def refined_left_path(tree: BinaryTree, cap: int, root: int = 0) -> list[int]:
    """Path from ``root`` stepping right whenever the left subtree has <= cap nodes."""
    cont = [NIL] * tree.n
    _near_path(tree.left, tree.right, tree.size, cont, root, [], cap)
    path = [root]
    while cont[path[-1]] != NIL:
        path.append(cont[path[-1]])
    return path


def _twist_fill(tree: BinaryTree, cont: list[int], path: list[int], labels: RulerLabels, i: int,
                twist: str, refined: bool, pending: list[int]) -> list[int]:
    """Write the i-twist of ``path`` into ``cont``; returns the pulled spine indices."""
    if twist == RIGHT:
        near, far = tree.left, tree.right
        expected = LEFT
    else:
        near, far = tree.right, tree.left
        expected = RIGHT
    if labels.side != expected:
        raise ValueError(f"a {twist} twist needs {expected} labels")
    size = tree.size
    pulled = labels.pulled(i)
    t = len(path) - 1
    start = 0
    for q in pulled:
        vq = path[q]
        pulled_root = near[vq]
        if pulled_root == NIL or path[q + 1] != far[vq]:
            raise AssertionError(f"spine index {q} has no {expected} subtree to pull")
        _follow(tree, cont, path, start, q, pending)
        cont[vq] = pulled_root
        # path[q + 1] starts the next chain spine, hanging on the far side of vq
        _near_path(near, far, size, cont, pulled_root, pending, None)
        start = q + 1
    _follow(tree, cont, path, start, t, pending)
    vt = path[t]
    a, b = near[vt], far[vt]
    if a == NIL:
        # the last node continues into its only child
        if b != NIL:
            cont[vt] = b
            _near_path(near, far, size, cont, b, pending, None)
        return pulled
    cont[vt] = a
    if b != NIL:
        pending.append(b)
    cap = labels.sizes[i][-1] if refined else None
    _near_path(near, far, size, cont, a, pending, cap)
    return pulled


# ------------------------------------------------------------ drivers

def construct_continuation(tree: BinaryTree, params: ConstructParams = TWIST438, root: int = 0,
                           diag: Diagnostics | None = None, cont: list[int] | None = None,
                           recurse: Callable | None = None) -> list[int]:
    """Continuation array for the subtree at ``root``.

    ``recurse(tree, v, cont)`` decomposes a pending subtree; by default the
    builder itself handles it.  Tests substitute other decomposers.
    """
    if diag is None:
        diag = Diagnostics()
    if cont is None:
        cont = [NIL] * tree.n
    size = tree.size
    todo = [root]
    first = True
    while todo:
        r = todo.pop()
        if recurse is not None and not first:
            recurse(tree, r, cont)
            continue
        first = False
        if size[r] <= params.n0:
            optimal_continuation(tree, r, cont)
            diag.cases["base"] += 1
            continue
        growth = grow_spine(tree, params, r)
        diag.cases.update(growth.trace)
        if growth.fallback:
            diag.fallbacks += 1
        pending: list[int] = []
        if growth.action[0] == "plain":
            diag.cases["plain"] += 1
            _follow(tree, cont, growth.path, 0, len(growth.path) - 1, pending)
        else:
            _, i, twist = growth.action
            labels = growth.labels[LEFT if twist == RIGHT else RIGHT]
            pulled = _twist_fill(tree, cont, growth.path, labels, i, twist, params.refined, pending)
            diag.cases[f"twist-{twist}-{i}"] += 1
            if diag.record_twists:
                diag.twists.append(TwistEvent(r, growth.path, i, twist, pulled, labels, params.refined))
        todo.extend(pending)
    return cont


def construct(tree: BinaryTree, params: ConstructParams = TWIST438, diag: Diagnostics | None = None) -> Decomposition:
    return from_continuation(tree, construct_continuation(tree, params, diag=diag))


def twist_continuation(tree: BinaryTree, path: list[int], labels: RulerLabels, i: int, twist: str,
                       params: ConstructParams = TWIST438, recurse: Callable | None = None) -> list[int]:
    """Continuation array of the i-twist of ``path`` (subtree at ``path[0]``).

    Subtrees left hanging by the twist are decomposed with ``recurse``
    (default: :func:`construct_continuation`).
    """
    if recurse is None:
        def recurse(tr, v, cont):
            construct_continuation(tr, params, v, cont=cont)
    cont = [NIL] * tree.n
    pending: list[int] = []
    _twist_fill(tree, cont, path, labels, i, twist, params.refined, pending)
    for v in pending:
        recurse(tree, v, cont)
    return cont


def twist_decomposition(tree: BinaryTree, path: list[int], labels: RulerLabels, i: int, twist: str,
                        params: ConstructParams = TWIST438) -> Decomposition:
    cont = twist_continuation(tree, path, labels, i, twist, params)
    return from_continuation(tree, cont, path[0])


def baseline_continuation(tree: BinaryTree) -> list[int]:
    """Spine always enters the larger child (left on ties)."""
    left, right, size = tree.left, tree.right, tree.size
    cont = [NIL] * tree.n
    for v in range(tree.n):
        a, b = left[v], right[v]
        if a == NIL:
            cont[v] = b
        elif b == NIL or size[a] >= size[b]:
            cont[v] = a
        else:
            cont[v] = b
    return cont


def baseline_construct(tree: BinaryTree) -> Decomposition:
    return from_continuation(tree, baseline_continuation(tree))


ALGORITHMS = ("twist438", "twist437", "baseline", "optimal")


def params_for(algo: str, **overrides) -> ConstructParams:
    base = {"twist438": TWIST438, "twist437": TWIST437}[algo]
    overrides = {k: v for k, v in overrides.items() if v is not None}
    return replace(base, **overrides)


def draw_continuation(tree: BinaryTree, algo: str, diag: Diagnostics | None = None, **overrides) -> list[int]:
    if algo == "baseline":
        return baseline_continuation(tree)
    if algo == "optimal":
        return optimal_continuation(tree)
    if algo in ("twist438", "twist437"):
        return construct_continuation(tree, params_for(algo, **overrides), diag=diag)
    raise ValueError(f"unknown algorithm {algo!r}; expected one of {', '.join(ALGORITHMS)}")


# ------------------------------------------------------------ twist width check

@dataclass
class TwistBound:
    width: int
    bound: int
    label_bound: int
    segment_left: list[int]
    other_max: int


def twist_width_bound(tree: BinaryTree, cont: list[int], event: TwistEvent, widths=None) -> TwistBound:
    """Measured form of the twist width bound for one twist.

    The twisted drawing is a chain of nested spines, one per segment of the
    original path.  Its width is at most the sum over chain spines of the
    widest box on the pulled side, plus the widest other box anywhere in
    the chain, plus one column per chain spine (at most ``2**i``).

    ``label_bound`` uses the widths of the level-i subtrees
    themselves and of the L/R parts instead; it is reported, not asserted,
    since drawing widths need not be monotone in subtree size.
    """
    ml, mr = widths if widths is not None else spine_widths(tree, cont)
    left, right = tree.left, tree.right
    near_is_left = event.twist == RIGHT

    def w(v):
        return ml[v] + 1 + mr[v]

    chain = [event.root] + [event.path[q + 1] for q in event.pulled]
    next_root = set(chain[1:])
    seg_near: list[int] = []
    other = 0
    for r in chain:
        near_max = 0
        v = r
        while cont[v] != NIL:
            c = cont[v]
            o = right[v] if c == left[v] else left[v]
            if o != NIL and o not in next_root:
                on_near = (o == left[v]) == near_is_left
                if on_near:
                    near_max = max(near_max, w(o))
                else:
                    other = max(other, w(o))
            v = c
        seg_near.append(near_max)
    width = w(event.root)
    bound = sum(seg_near) + other + 2 ** event.i

    # widths of the level-i label subtrees, of L's drawing and of R
    path = event.path
    vt = path[-1]
    near_child = left[vt] if near_is_left else right[vt]
    far_child = right[vt] if near_is_left else left[vt]
    label_w = 0
    for q in event.labels.positions[event.i]:
        if q is not None:
            v = path[q]
            label_w += w(left[v] if near_is_left else right[v])
    l_part = 0
    if near_child != NIL:
        # the near child lies on the last chain spine: width of its own stretch
        lo = hi = 0
        v = near_child
        while cont[v] != NIL:
            c = cont[v]
            o = right[v] if c == left[v] else left[v]
            if o != NIL:
                if o == left[v]:
                    lo = max(lo, w(o))
                else:
                    hi = max(hi, w(o))
            v = c
        l_part = lo + 1 + hi
    r_part = w(far_child) if far_child != NIL else 0
    by_labels = label_w + max(l_part, r_part) + 2 ** event.i
    return TwistBound(width, bound, by_labels, seg_near, other)
