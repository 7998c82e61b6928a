"""Exact minimum LR-drawing width.

``wstar`` runs a dynamic program over (widest-left, widest-right) Pareto
sets; ``wstar_bruteforce`` evaluates the min-over-paths formula literally
and is kept as an independent reference.
"""

from __future__ import annotations

from dataclasses import dataclass

from .decomposition import Decomposition, from_continuation
from .tree import NIL, BinaryTree, ENUMERATE_MAX_N, _shape_lists, _shape_to_tree

BRUTEFORCE_MAX_N = 24


@dataclass(frozen=True)
class ParetoSet:
    """Undominated (max_left, max_right) pairs, max_left strictly increasing."""

    pairs: tuple[tuple[int, int], ...]

    def __post_init__(self):
        for (x0, y0), (x1, y1) in zip(self.pairs, self.pairs[1:]):
            if not (x0 < x1 and y0 > y1):
                raise ValueError(f"not an antichain in canonical order: {self.pairs}")

    def best(self) -> int:
        return min(x + y for x, y in self.pairs) + 1

    def __len__(self) -> int:
        return len(self.pairs)


def _merge(from_left: list, from_right: list) -> list:
    """Union of two pair lists (each sorted by x), dominated pairs removed."""
    pairs = sorted(from_left + from_right)
    out = []
    best_y = None
    for x, y in pairs:
        if best_y is None or y < best_y:
            if out and out[-1][0] == x:
                continue
            out.append((x, y))
            best_y = y
    return out


def _clamp_y(pairs, w):
    # pairs sorted by x with y decreasing; raising y to at least w collapses the tail
    if w == 0:
        return pairs
    out = []
    for x, y in pairs:
        if y <= w:
            out.append((x, w))
            break
        out.append((x, y))
    return out


def _clamp_x(pairs, w):
    if w == 0:
        return pairs
    # x raised to at least w: keep the first pair with x >= w, or the last with x < w
    out = []
    last_below = None
    for x, y in pairs:
        if x < w:
            last_below = (w, y)
        else:
            out.append((x, y))
    if last_below is not None and (not out or out[0][0] > w):
        out.insert(0, last_below)
    elif last_below is not None:
        # out[0] has x == w; keep whichever of the two has smaller y
        if last_below[1] < out[0][1]:
            out[0] = last_below
    return out


def pareto_table(tree: BinaryTree, root: int = 0, keep: bool = True):
    """Bottom-up DP over the subtree at ``root``.

    Returns ``(W, sets)`` indexed by ``v - root``: ``W`` holds the minimum
    width of the subtree at ``v``; ``sets`` (kept only when ``keep``) lists
    the undominated (widest left box, widest right box) pairs over spines
    starting at ``v``.
    """
    left, right = tree.left, tree.right
    m = tree.size[root]
    W = [0] * m
    sets: list = [None] * m
    for v in range(root + m - 1, root - 1, -1):
        a, b = left[v], right[v]
        if a == NIL and b == NIL:
            s = [(0, 0)]
        else:
            ia, ib = a - root, b - root
            wa = W[ia] if a != NIL else 0
            wb = W[ib] if b != NIL else 0
            from_a = _clamp_y(sets[ia], wb) if a != NIL else []
            from_b = _clamp_x(sets[ib], wa) if b != NIL else []
            if not from_a:
                s = from_b
            elif not from_b:
                s = from_a
            else:
                s = _merge(from_a, from_b)
            if not keep:
                if a != NIL:
                    sets[ia] = None
                if b != NIL:
                    sets[ib] = None
        best = min(x + y for x, y in s) + 1
        # every x (and y) is the width of a proper subtree, hence <= best
        assert len(s) <= best + 1, (v, s)
        W[v - root] = best
        sets[v - root] = s
    return W, sets


def wstar(tree: BinaryTree, root: int = 0) -> int:
    W, _ = pareto_table(tree, root, keep=False)
    return W[0]


def pareto_set(tree: BinaryTree, v: int = 0) -> ParetoSet:
    _, sets = pareto_table(tree, v)
    return ParetoSet(tuple(sets[0]))


def wstar_bruteforce(tree: BinaryTree) -> int:
    """min over root-to-leaf paths of (widest left + widest right + 1)."""
    if tree.n > BRUTEFORCE_MAX_N:
        raise ValueError(f"brute force is limited to n <= {BRUTEFORCE_MAX_N}")
    left, right = tree.left, tree.right
    memo: dict[int, int] = {}

    def w(v: int) -> int:
        if v == NIL:
            return 0
        if v in memo:
            return memo[v]
        best = None
        # every root-to-leaf path from v, with the subtrees hanging off it
        paths = [(v, 0, 0)]
        while paths:
            u, ml, mr = paths.pop()
            a, b = left[u], right[u]
            if a == NIL and b == NIL:
                val = ml + mr + 1
                if best is None or val < best:
                    best = val
                continue
            if a != NIL:
                paths.append((a, ml, max(mr, w(b))))
            if b != NIL:
                paths.append((b, max(ml, w(a)), mr))
        memo[v] = best
        return best

    return w(0)


def optimal_continuation(tree: BinaryTree, root: int = 0, cont: list[int] | None = None) -> list[int]:
    """Fill ``cont`` for the subtree at ``root`` with a minimum-width choice.

    Bounds (max_left, max_right) are carried down each spine; at every node
    the left child is preferred when it can still meet the bounds.
    """
    left, right = tree.left, tree.right
    if cont is None:
        cont = [NIL] * tree.n
    W, sets = pareto_table(tree, root)

    def feasible(pairs, X, Y):
        # some pair (x, y) with x <= X and y <= Y; pairs sorted by x, y decreasing
        for x, y in pairs:
            if x > X:
                return False
            if y <= Y:
                return True
        return False

    stack = [root]
    while stack:
        v = stack.pop()
        top = sets[v - root]
        best = min(x + y for x, y in top)
        X, Y = min((x, y) for x, y in top if x + y == best)
        while True:
            a, b = left[v], right[v]
            if a == NIL and b == NIL:
                break
            wa = W[a - root] if a != NIL else 0
            wb = W[b - root] if b != NIL else 0
            if a != NIL and wb <= Y and feasible(sets[a - root], X, Y):
                cont[v] = a
                if b != NIL:
                    stack.append(b)
                v = a
            else:
                assert b != NIL and wa <= X and feasible(sets[b - root], X, Y), "bounds lost"
                cont[v] = b
                if a != NIL:
                    stack.append(a)
                v = b
    return cont


def optimal_decomposition(tree: BinaryTree) -> Decomposition:
    return from_continuation(tree, optimal_continuation(tree))


def _shape_pareto(shapes_by_size):
    """Pareto sets for every shape, computed once per shape from its children."""
    info: dict = {None: (0, None)}
    for group in shapes_by_size[1:]:
        for shape in group:
            a, b = shape
            wa, sa = info[a]
            wb, sb = info[b]
            if a is None and b is None:
                s = [(0, 0)]
            elif a is None:
                s = _clamp_x(sb, wa)
            elif b is None:
                s = _clamp_y(sa, wb)
            else:
                s = _merge(_clamp_y(sa, wb), _clamp_x(sb, wa))
            info[shape] = (min(x + y for x, y in s) + 1, s)
    return info


def worst_case_table(n_max: int) -> list[tuple[int, int, BinaryTree]]:
    """``(n, max W*, first maximising tree)`` for n = 1..n_max."""
    if not 1 <= n_max <= ENUMERATE_MAX_N:
        raise ValueError(f"exhaustive search supports 1 <= n <= {ENUMERATE_MAX_N}")
    shapes = _shape_lists(n_max)
    info = _shape_pareto(shapes)
    rows = []
    for n in range(1, n_max + 1):
        best, witness = 0, None
        for shape in shapes[n]:
            w = info[shape][0]
            if w > best:
                best, witness = w, shape
        rows.append((n, best, _shape_to_tree(witness)))
    return rows


def worst_case_width(n: int) -> tuple[int, BinaryTree]:
    """Largest W* over all n-node trees, with the first maximiser in enumeration order."""
    _, width, witness = worst_case_table(n)[-1]
    return width, witness
