"""Lower-bound family: trees whose every LR drawing is wide.

``T_n`` is a path ``u_1 v_1 u_2 v_2 ... u_k`` (``k = 2^h``) with left subtrees
``alpha_j`` on ``u_j``, right subtrees ``beta_j`` on ``v_j`` and two large
subtrees ``L``, ``R`` below ``u_k``.  Index ``j`` is at level
``h - 1 - v2(j)``; level ``i < h-1`` subtrees get ``ceil(2^(-i/p) mu n)``
nodes and the last level soaks up whatever is left so the total is exactly
``n``.  Every hanging subtree is itself a family tree.

In preorder the tree reads ``u_1, alpha_1, v_1, u_2, alpha_2, v_2, ..., u_k,
L, R, beta_{k-1}, ..., beta_1``, which lets :func:`build_family` write the
child arrays in one left-to-right pass.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .tree import NIL, BinaryTree

EQ_TOL = 1e-9


def phi_for(p: float, mu: float) -> float:
    """The phi solving the linear constraint for given p and mu."""
    return 0.5 - mu / (1.0 - 2.0 ** (-(1.0 - p) / p))


@dataclass(frozen=True)
class FamilyParams:
    p: float = 0.429
    mu: float = 0.122
    phi: float | None = None
    c0: int = 4
    small_n_threshold: int = 16

    def __post_init__(self):
        if not 0 < self.p < 1:
            raise ValueError("p must lie in (0, 1)")
        if self.mu <= 0:
            raise ValueError("mu must be positive")
        if self.c0 < 1 or self.small_n_threshold < 1:
            raise ValueError("c0 and small_n_threshold must be positive integers")
        if self.phi is None:
            object.__setattr__(self, "phi", phi_for(self.p, self.mu))
        if self.phi <= 0:
            raise ValueError(f"phi={self.phi} is not positive; mu is too large")
        if abs(self.linear_residual()) > EQ_TOL:
            raise ValueError(f"linear constraint violated (residual {self.linear_residual():.3g})")
        if self.power_sum() < 1 - EQ_TOL:
            raise ValueError(f"power constraint violated: phi^p + mu^p = {self.power_sum():.9f} < 1")

    def linear_residual(self) -> float:
        return self.phi + self.mu / (1.0 - 2.0 ** (-(1.0 - self.p) / self.p)) - 0.5

    def power_sum(self) -> float:
        return self.phi ** self.p + self.mu ** self.p


DEFAULT_PARAMS = FamilyParams()


def level_of(j: int, h: int) -> int:
    """Ruler level of index ``j`` in 1..2^h - 1."""
    return h - 1 - ((j & -j).bit_length() - 1)


@dataclass
class FamilySkeleton:
    n: int
    h: int
    k: int
    level: list[int] = field(default_factory=list)       # level[j], j = 1..k-1 (index 0 unused)
    base_size: list[int] = field(default_factory=list)   # before padding
    alpha: list[int] = field(default_factory=list)       # final sizes, index j
    beta: list[int] = field(default_factory=list)
    big: int = 0                                         # |L| = |R|
    deficit: int = 0
    u: list[int] = field(default_factory=list)           # preorder ids of u_1..u_k (index j)
    v: list[int] = field(default_factory=list)           # preorder ids of v_1..v_{k-1}

    @property
    def trivial(self) -> bool:
        return self.h < 1


def family_height(n: int, params: FamilyParams = DEFAULT_PARAMS) -> int:
    if n < params.small_n_threshold:
        return 0
    x = params.mu * n / params.c0
    if x < 1:
        return 0
    h = math.floor(params.p * math.log2(x))
    # guard against log2 rounding right at a power of two
    while 2.0 ** ((h + 1) / params.p) <= x:
        h += 1
    while h > 0 and 2.0 ** (h / params.p) > x:
        h -= 1
    return h


def family_skeleton(n: int, params: FamilyParams = DEFAULT_PARAMS) -> FamilySkeleton:
    """Sizes and ids of the top level of ``T_n`` (h = 0 means: small tree)."""
    if n < 1:
        raise ValueError("n must be positive")
    h = family_height(n, params)
    sk = FamilySkeleton(n=n, h=h, k=2 ** h)
    if h < 1:
        return sk
    k = sk.k
    sk.big = math.ceil(params.phi * n)
    sk.level = [-1] + [level_of(j, h) for j in range(1, k)]
    ratio = 2.0 ** (-1.0 / params.p)
    base = [0] * k
    for j in range(1, k):
        i = sk.level[j]
        base[j] = math.ceil(ratio ** i * params.mu * n) if i <= h - 2 else 1
    sk.base_size = base
    alpha, beta = base[:], base[:]
    last = [j for j in range(1, k) if sk.level[j] == h - 1]
    deficit = n - (2 * k - 1) - 2 * sk.big - 2 * sum(base)
    sk.deficit = deficit
    # round robin over alpha_j, beta_j for the last-level j, one node at a time
    slots = [(arr, j) for j in last for arr in (alpha, beta)]
    m = len(slots)
    if deficit >= 0:
        q, r = divmod(deficit, m)
        for t, (arr, j) in enumerate(slots):
            arr[j] += q + (1 if t < r else 0)
    else:
        need = -deficit
        if need > sum(arr[j] - 1 for arr, j in slots):
            raise ValueError(f"n={n}: planned sizes overshoot by {need}; raise c0")
        while need:
            for arr, j in slots:
                if need and arr[j] > 1:
                    arr[j] -= 1
                    need -= 1
    sk.alpha, sk.beta = alpha, beta
    # preorder ids along the path
    u = [0] * (k + 1)
    v = [0] * k
    pos = 0
    for j in range(1, k):
        u[j] = pos
        v[j] = pos + 1 + alpha[j]
        pos = v[j] + 1
    u[k] = pos
    sk.u, sk.v = u, v
    assert pos + 1 + 2 * sk.big + sum(beta[1:]) == n
    return sk


def _right_path_arrays(n: int):
    left = np.full(n, NIL, dtype=np.int64)
    right = np.arange(1, n + 1, dtype=np.int64)
    right[-1] = NIL
    return left, right


def _family_arrays(n: int, params: FamilyParams, memo: dict):
    if n in memo:
        return memo[n]
    sk = family_skeleton(n, params)
    if sk.trivial:
        out = _right_path_arrays(n)
        memo[n] = out
        return out
    left = np.full(n, NIL, dtype=np.int64)
    right = np.full(n, NIL, dtype=np.int64)

    def place(size: int, at: int) -> None:
        sl, sr = _family_arrays(size, params, memo)
        left[at:at + size] = np.where(sl == NIL, NIL, sl + at)
        right[at:at + size] = np.where(sr == NIL, NIL, sr + at)

    k = sk.k
    for j in range(1, k):
        uj, vj = sk.u[j], sk.v[j]
        place(sk.alpha[j], uj + 1)
        left[uj], right[uj] = uj + 1, vj
        left[vj] = vj + 1  # u_{j+1}
    uk = sk.u[k]
    place(sk.big, uk + 1)
    place(sk.big, uk + 1 + sk.big)
    left[uk], right[uk] = uk + 1, uk + 1 + sk.big
    pos = uk + 1 + 2 * sk.big
    for j in range(k - 1, 0, -1):
        place(sk.beta[j], pos)
        right[sk.v[j]] = pos
        pos += sk.beta[j]
    assert pos == n
    memo[n] = (left, right)
    return left, right


def build_family(n: int, params: FamilyParams = DEFAULT_PARAMS) -> BinaryTree:
    """The lower-bound tree with exactly ``n`` nodes (deterministic)."""
    if n < 1:
        raise ValueError("n must be positive")
    left, right = _family_arrays(n, params, {})
    return BinaryTree(left.tolist(), right.tolist())


def ruler_bound(skeleton: FamilySkeleton, length: int, params: FamilyParams = DEFAULT_PARAMS) -> float:
    return ((length - 1) / skeleton.k) ** (1.0 / params.p) * params.mu * skeleton.n


def check_ruler_property(skeleton: FamilySkeleton, J: range, params: FamilyParams = DEFAULT_PARAMS) -> bool:
    """Largest alpha_j and beta_j over the interval J are at least the ruler bound."""
    if len(J) == 0 or J.step != 1 or J.start < 1 or J.stop > skeleton.k:
        raise ValueError(f"J must be a nonempty consecutive subrange of 1..{skeleton.k - 1}")
    if len(J) == 1:
        return True
    bound = ruler_bound(skeleton, len(J), params)
    return max(skeleton.alpha[j] for j in J) >= bound and max(skeleton.beta[j] for j in J) >= bound


def all_intervals_ok(skeleton: FamilySkeleton, params: FamilyParams = DEFAULT_PARAMS) -> bool:
    k = skeleton.k
    for a in range(1, k):
        ma = mb = 0
        for b in range(a, k):
            ma = max(ma, skeleton.alpha[b])
            mb = max(mb, skeleton.beta[b])
            if b > a:
                bound = ruler_bound(skeleton, b - a + 1, params)
                if ma < bound or mb < bound:
                    return False
    return True


def check_family_recursive(n: int, params: FamilyParams = DEFAULT_PARAMS) -> list[int]:
    """Sizes (over all recursion levels of ``T_n``) whose skeleton breaks the ruler property."""
    bad = []
    seen = set()
    todo = [n]
    while todo:
        m = todo.pop()
        if m in seen:
            continue
        seen.add(m)
        sk = family_skeleton(m, params)
        if sk.trivial:
            continue
        if not all_intervals_ok(sk, params):
            bad.append(m)
        todo.append(sk.big)
        todo.extend(sk.alpha[1:])
        todo.extend(sk.beta[1:])
    return sorted(bad)
