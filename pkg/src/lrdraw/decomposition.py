"""Spine decompositions and their compact per-node form.

A :class:`Decomposition` is the nested, tree-independent description: a
spine (directions from a subtree root down to a leaf) and the child
decompositions of everything hanging off it.  Algorithms work on the
equivalent *continuation array*: ``cont[v]`` is the child of ``v`` that
continues ``v``'s spine (``NIL`` for leaves).  Every node lies on exactly
one spine, so the array fixes the decomposition.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .tree import NIL, BinaryTree

LEFT = "left"
RIGHT = "right"


class DecompositionError(ValueError):
    """A decomposition does not fit the tree it is applied to."""

    def __init__(self, message: str, spine_index: int | None = None):
        if spine_index is not None:
            message = f"spine index {spine_index}: {message}"
        super().__init__(message)
        self.spine_index = spine_index


@dataclass
class Decomposition:
    spine: str = ""
    hanging: list[tuple[int, str, "Decomposition"]] = field(default_factory=list)

    def __post_init__(self):
        if isinstance(self.spine, (list, tuple)):
            self.spine = "".join(self.spine)

    def count_spines(self) -> int:
        total = 0
        stack = [self]
        while stack:
            d = stack.pop()
            total += 1
            stack.extend(c for _, _, c in d.hanging)
        return total


def to_continuation(tree: BinaryTree, d: Decomposition, root: int = 0) -> list[int]:
    """Check ``d`` against the subtree at ``root`` and flatten it.

    Returns a full-length array; entries outside the subtree are ``NIL``.
    """
    left, right = tree.left, tree.right
    cont = [NIL] * tree.n
    stack = [(root, d)]
    while stack:
        v, dec = stack.pop()
        if not isinstance(dec, Decomposition):
            raise DecompositionError(f"hanging entry is not a Decomposition: {dec!r}")
        hangs: dict[int, tuple[str, Decomposition]] = {}
        for pos, side, child in dec.hanging:
            if pos in hangs:
                raise DecompositionError("two hanging subtrees at one position", pos)
            hangs[pos] = (side, child)
        for j, step in enumerate(dec.spine):
            if step == "L":
                nxt, other, side = left[v], right[v], RIGHT
            elif step == "R":
                nxt, other, side = right[v], left[v], LEFT
            else:
                raise DecompositionError(f"bad direction {step!r}", j)
            if nxt == NIL:
                raise DecompositionError("spine leaves the tree", j)
            cont[v] = nxt
            entry = hangs.pop(j, None)
            if other != NIL:
                if entry is None:
                    raise DecompositionError(f"{side} subtree not covered", j)
                if entry[0] != side:
                    raise DecompositionError(f"subtree hangs {entry[0]}, expected {side}", j)
                stack.append((other, entry[1]))
            elif entry is not None:
                raise DecompositionError("hanging entry where no subtree exists", j)
            v = nxt
        if left[v] != NIL or right[v] != NIL:
            raise DecompositionError("spine does not end at a leaf", len(dec.spine))
        if hangs:
            raise DecompositionError("hanging entry off the spine", min(hangs))
    return cont


def from_continuation(tree: BinaryTree, cont: list[int], root: int = 0) -> Decomposition:
    left, right = tree.left, tree.right
    top = Decomposition()
    stack = [(root, top)]
    while stack:
        v, dec = stack.pop()
        steps = []
        j = 0
        while True:
            a, b = left[v], right[v]
            if a == NIL and b == NIL:
                break
            c = cont[v]
            if c != NIL and c == a:
                steps.append("L")
                if b != NIL:
                    child = Decomposition()
                    dec.hanging.append((j, RIGHT, child))
                    stack.append((b, child))
            elif c != NIL and c == b:
                steps.append("R")
                if a != NIL:
                    child = Decomposition()
                    dec.hanging.append((j, LEFT, child))
                    stack.append((a, child))
            else:
                raise DecompositionError(f"node {v}: continuation {c} is not a child", j)
            v = c
            j += 1
        dec.spine = "".join(steps)
    return top


def spine_nodes(tree: BinaryTree, cont: list[int], v: int) -> list[int]:
    path = [v]
    while cont[v] != NIL:
        v = cont[v]
        path.append(v)
    return path


def spine_widths(tree: BinaryTree, cont: list[int], root: int = 0):
    """Per-node running maxima of hanging widths along each spine.

    Returns ``(max_left, max_right)``: for a node ``v``, the widest left
    (right) box hanging at ``v`` or further down ``v``'s spine.  The width
    of the spine starting at ``r`` is ``max_left[r] + 1 + max_right[r]``.
    """
    left, right = tree.left, tree.right
    n = tree.n
    ml = [0] * n
    mr = [0] * n
    end = root + tree.size[root]
    for v in range(end - 1, root - 1, -1):
        c = cont[v]
        if c == NIL:
            continue
        x, y = ml[c], mr[c]
        a, b = left[v], right[v]
        if c == a:
            if b != NIL:
                w = ml[b] + 1 + mr[b]
                if w > y:
                    y = w
        elif a != NIL:
            w = ml[a] + 1 + mr[a]
            if w > x:
                x = w
        ml[v] = x
        mr[v] = y
    return ml, mr


def continuation_width(tree: BinaryTree, cont: list[int], root: int = 0) -> int:
    ml, mr = spine_widths(tree, cont, root)
    return ml[root] + 1 + mr[root]


def decomposition_width(tree: BinaryTree, d: Decomposition) -> int:
    """Width: widest left box + spine column + widest right box, recursively."""
    return continuation_width(tree, to_continuation(tree, d))


def mirror_continuation(tree: BinaryTree, cont: list[int]) -> tuple[BinaryTree, list[int]]:
    """Mirror image of (tree, cont): the mirrored tree and its continuation array."""
    m = tree.mirror_map()
    mt = tree.mirror()
    mc = [NIL] * tree.n
    for v, c in enumerate(cont):
        if c != NIL:
            mc[m[v]] = m[c]
    return mt, mc
