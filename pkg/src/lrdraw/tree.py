"""Binary trees: immutable array representation, text format, generators.

Trees are stored with nodes numbered in preorder, so node 0 is the root,
the left subtree of ``v`` occupies ids ``v+1 .. v+size(left)`` and every
child has a larger id than its parent.  Most algorithms in the package rely
on that: a reverse sweep over ids is a valid post-order.
"""

from __future__ import annotations

import random
from typing import Iterator, Sequence

NIL = -1

UNIFORM_MAX_N = 500
ENUMERATE_MAX_N = 13

GENERATOR_KINDS = ("left_path", "right_path", "complete", "uniform", "bst_shape")


class TreeSyntaxError(ValueError):
    """Malformed tree text; ``offset`` is the byte offset of the problem."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class BinaryTree:
    """Rooted ordered binary tree with cached subtree sizes.

    ``left[v]`` / ``right[v]`` hold child ids or ``NIL``.  Construct from
    arbitrary child arrays with :meth:`from_children`; the constructor
    itself expects arrays that are already in preorder.
    """

    __slots__ = ("left", "right", "size", "parent")

    def __init__(self, left: Sequence[int], right: Sequence[int]):
        n = len(left)
        if n == 0:
            raise ValueError("a tree needs at least one node")
        if len(right) != n:
            raise ValueError("left/right arrays differ in length")
        self.left = list(left)
        self.right = list(right)
        parent = [NIL] * n
        for v in range(n):
            for c in (self.left[v], self.right[v]):
                if c == NIL:
                    continue
                if not v < c < n:
                    raise ValueError(f"node {v}: child {c} breaks preorder numbering")
                if parent[c] != NIL:
                    raise ValueError(f"node {c} has two parents")
                parent[c] = v
        size = [1] * n
        for v in range(n - 1, -1, -1):
            a, b = self.left[v], self.right[v]
            if a != NIL:
                size[v] += size[a]
                if a != v + 1:
                    raise ValueError(f"node {v}: left child {a} is not {v + 1}")
            if b != NIL:
                size[v] += size[b]
                if b != v + 1 + (size[a] if a != NIL else 0):
                    raise ValueError(f"node {v}: right child {b} breaks preorder numbering")
        if size[0] != n:
            raise ValueError("nodes unreachable from the root")
        self.size = size
        self.parent = parent

    @classmethod
    def from_children(cls, left: Sequence[int], right: Sequence[int], root: int) -> "BinaryTree":
        """Relabel an arbitrary child-array tree into preorder."""
        order = []
        stack = [root]
        seen = set()
        while stack:
            v = stack.pop()
            if v in seen:
                raise ValueError(f"node {v} reached twice (not a tree)")
            seen.add(v)
            order.append(v)
            if right[v] != NIL:
                stack.append(right[v])
            if left[v] != NIL:
                stack.append(left[v])
        if len(order) != len(left):
            raise ValueError("nodes unreachable from the root")
        new_id = {old: i for i, old in enumerate(order)}
        nl = [NIL if left[o] == NIL else new_id[left[o]] for o in order]
        nr = [NIL if right[o] == NIL else new_id[right[o]] for o in order]
        return cls(nl, nr)

    @property
    def n(self) -> int:
        return len(self.left)

    def __len__(self) -> int:
        return len(self.left)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BinaryTree):
            return NotImplemented
        return self.left == other.left and self.right == other.right

    def __hash__(self) -> int:
        return hash((tuple(self.left), tuple(self.right)))

    def __repr__(self) -> str:
        if self.n <= 40:
            return f"BinaryTree({serialize_tree(self)!r})"
        return f"BinaryTree(n={self.n})"

    def is_leaf(self, v: int) -> bool:
        return self.left[v] == NIL and self.right[v] == NIL

    def subtree_size(self, v: int) -> int:
        """Size of the subtree at ``v``; absent children (NIL) have size 0."""
        return 0 if v == NIL else self.size[v]

    def subtree(self, v: int) -> "BinaryTree":
        """Copy of the subtree rooted at ``v`` (ids shifted by ``-v``)."""
        end = v + self.size[v]
        left = [NIL if c == NIL else c - v for c in self.left[v:end]]
        right = [NIL if c == NIL else c - v for c in self.right[v:end]]
        return BinaryTree(left, right)

    def mirror(self) -> "BinaryTree":
        """Tree with every node's children swapped."""
        return BinaryTree.from_children(self.right, self.left, 0)

    def mirror_map(self) -> list[int]:
        """``m[v]`` = id of node ``v`` inside :meth:`mirror`."""
        m = [0] * self.n
        stack = [(0, 0)]
        while stack:
            v, mv = stack.pop()
            m[v] = mv
            a, b = self.left[v], self.right[v]
            # in the mirror, b becomes the left child and comes first
            nb = self.subtree_size(b)
            if b != NIL:
                stack.append((b, mv + 1))
            if a != NIL:
                stack.append((a, mv + 1 + nb))
        return m

    def height(self) -> int:
        depth = [0] * self.n
        for v in range(1, self.n):
            depth[v] = depth[self.parent[v]] + 1
        return max(depth)


# ---------------------------------------------------------------- text format

def parse_tree(text: str) -> BinaryTree:
    """Parse ``tree := "(" [tree] "," [tree] ")"``; whitespace is ignored."""
    data = text.encode("utf-8") if isinstance(text, str) else bytes(text)
    left: list[int] = []
    right: list[int] = []
    # stack entries: [node id, seen_comma]
    stack: list[list[int]] = []
    root = NIL
    i = 0
    end = len(data)
    while i < end:
        ch = data[i]
        if ch in b" \t\r\n":
            i += 1
            continue
        if ch == 0x28:  # (
            if root != NIL and not stack:
                raise TreeSyntaxError("trailing garbage", i)
            v = len(left)
            left.append(NIL)
            right.append(NIL)
            if stack:
                top = stack[-1]
                if top[1]:
                    if right[top[0]] != NIL:
                        raise TreeSyntaxError("expected ')'", i)
                    right[top[0]] = v
                else:
                    if left[top[0]] != NIL:
                        raise TreeSyntaxError("expected ','", i)
                    left[top[0]] = v
            else:
                root = v
            stack.append([v, 0])
        elif ch == 0x2C:  # ,
            if not stack:
                raise TreeSyntaxError("unexpected ','", i)
            if stack[-1][1]:
                raise TreeSyntaxError("duplicate ','", i)
            stack[-1][1] = 1
        elif ch == 0x29:  # )
            if not stack:
                raise TreeSyntaxError("unbalanced ')'", i)
            if not stack[-1][1]:
                raise TreeSyntaxError("missing ','", i)
            stack.pop()
        else:
            if not stack and root != NIL:
                raise TreeSyntaxError("trailing garbage", i)
            raise TreeSyntaxError(f"unexpected character {chr(ch)!r}", i)
        i += 1
    if root == NIL:
        raise TreeSyntaxError("empty input", end)
    if stack:
        raise TreeSyntaxError("unbalanced '('", end)
    # ids were assigned in document order, which is preorder
    return BinaryTree(left, right)


def serialize_tree(tree: BinaryTree) -> str:
    """Canonical text without whitespace."""
    out: list[str] = []
    stack: list[object] = [0]
    left, right = tree.left, tree.right
    while stack:
        item = stack.pop()
        if isinstance(item, str):
            out.append(item)
            continue
        v = item
        out.append("(")
        stack.append(")")
        if right[v] != NIL:
            stack.append(right[v])
        stack.append(",")
        if left[v] != NIL:
            stack.append(left[v])
    return "".join(out)


def read_tree(path: str) -> BinaryTree:
    with open(path, encoding="utf-8") as fh:
        return parse_tree(fh.read())


def write_tree(tree: BinaryTree, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_tree(tree) + "\n")


# ---------------------------------------------------------------- generators

_CATALAN = [1]


def catalan(n: int) -> int:
    """n-th Catalan number (exact), from the convolution recurrence."""
    while len(_CATALAN) <= n:
        m = len(_CATALAN)
        _CATALAN.append(sum(_CATALAN[i] * _CATALAN[m - 1 - i] for i in range(m)))
    return _CATALAN[n]


def left_path(n: int) -> BinaryTree:
    return BinaryTree([v + 1 for v in range(n - 1)] + [NIL], [NIL] * n)


def right_path(n: int) -> BinaryTree:
    return BinaryTree([NIL] * n, [v + 1 for v in range(n - 1)] + [NIL])


def complete(n: int) -> BinaryTree:
    """Heap-shaped tree: every level full except the last, filled from the left."""
    left = [2 * i + 1 if 2 * i + 1 < n else NIL for i in range(n)]
    right = [2 * i + 2 if 2 * i + 2 < n else NIL for i in range(n)]
    return BinaryTree.from_children(left, right, 0)


def _from_split_sizes(n: int, choose_left) -> BinaryTree:
    """Build a tree top-down; ``choose_left(m)`` picks the left size of an m-node subtree."""
    left = [NIL] * n
    right = [NIL] * n
    # preorder ids can be assigned directly: (id, size) work items
    stack = [(0, n)]
    while stack:
        v, m = stack.pop()
        a = choose_left(m)
        b = m - 1 - a
        if a:
            left[v] = v + 1
            stack.append((v + 1, a))
        if b:
            right[v] = v + 1 + a
            stack.append((v + 1 + a, b))
    return BinaryTree(left, right)


def uniform(n: int, rng: random.Random) -> BinaryTree:
    """Uniformly random shape among the Catalan(n) trees with n nodes."""
    def choose_left(m: int) -> int:
        r = rng.randrange(catalan(m))
        for i in range(m):
            w = catalan(i) * catalan(m - 1 - i)
            if r < w:
                return i
            r -= w
        raise AssertionError("unreachable")

    return _from_split_sizes(n, choose_left)


def bst_shape(n: int, rng: random.Random) -> BinaryTree:
    """Shape of a BST built from a uniformly random permutation.

    The root's rank is uniform in 1..m for every subtree, which gives the
    same distribution as inserting the permutation one key at a time.
    """
    return _from_split_sizes(n, lambda m: rng.randrange(m))


def generate(kind: str, n: int, seed: int = 0) -> BinaryTree:
    if n < 1:
        raise ValueError("n must be at least 1")
    rng = random.Random(seed)
    if kind == "left_path":
        return left_path(n)
    if kind == "right_path":
        return right_path(n)
    if kind == "complete":
        return complete(n)
    if kind == "uniform":
        if n > UNIFORM_MAX_N:
            raise ValueError(
                f"uniform generation is limited to n <= {UNIFORM_MAX_N}; use 'bst_shape' for larger trees"
            )
        return uniform(n, rng)
    if kind == "bst_shape":
        return bst_shape(n, rng)
    raise ValueError(f"unknown tree kind {kind!r}; expected one of {', '.join(GENERATOR_KINDS)}")


def _shape_lists(n: int) -> list[list[tuple]]:
    """All shapes with up to n nodes as nested (left, right) tuples; None is empty."""
    shapes: list[list[tuple]] = [[None]]
    for m in range(1, n + 1):
        cur = []
        for i in range(m):
            for a in shapes[i]:
                for b in shapes[m - 1 - i]:
                    cur.append((a, b))
        shapes.append(cur)
    return shapes


def _shape_to_tree(shape: tuple) -> BinaryTree:
    left: list[int] = []
    right: list[int] = []
    stack = [(shape, NIL, 0)]
    while stack:
        s, par, side = stack.pop()
        v = len(left)
        left.append(NIL)
        right.append(NIL)
        if par != NIL:
            if side == 0:
                left[par] = v
            else:
                right[par] = v
        a, b = s
        if b is not None:
            stack.append((b, v, 1))
        if a is not None:
            stack.append((a, v, 0))
    return BinaryTree(left, right)


def enumerate_trees(n: int) -> Iterator[BinaryTree]:
    """Every n-node shape once, ordered by left-subtree size, then recursively."""
    if not 1 <= n <= ENUMERATE_MAX_N:
        raise ValueError(f"enumerate_trees supports 1 <= n <= {ENUMERATE_MAX_N}")
    for shape in _shape_lists(n)[n]:
        yield _shape_to_tree(shape)
