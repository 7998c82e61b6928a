"""Exact integer predicates and the planarity test for straight-line drawings.

Two interchangeable implementations answer "does any edge cross another or
pass through a node it is not attached to": a vectorised all-pairs test
for small drawings and a Shamos-Hoey style sweep over rows for large ones.
Both use only integer arithmetic.
"""

from __future__ import annotations

from collections import defaultdict
from functools import cmp_to_key

import numpy as np

PAIRWISE_MAX_EDGES = 128  # the sweep wins from a few hundred edges up


def orient(ax: int, ay: int, bx: int, by: int, cx: int, cy: int) -> int:
    """Sign of the cross product (b - a) x (c - a)."""
    v = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
    return (v > 0) - (v < 0)


def on_segment(ax: int, ay: int, bx: int, by: int, px: int, py: int) -> bool:
    """True if p lies on the closed segment ab."""
    if orient(ax, ay, bx, by, px, py) != 0:
        return False
    return min(ax, bx) <= px <= max(ax, bx) and min(ay, by) <= py <= max(ay, by)


def segments_intersect(a, b, c, d) -> bool:
    """Closed segments ab and cd share at least one point."""
    o1 = orient(*a, *b, *c)
    o2 = orient(*a, *b, *d)
    o3 = orient(*c, *d, *a)
    o4 = orient(*c, *d, *b)
    if o1 * o2 < 0 and o3 * o4 < 0:
        return True
    return (
        (o1 == 0 and on_segment(*a, *b, *c))
        or (o2 == 0 and on_segment(*a, *b, *d))
        or (o3 == 0 and on_segment(*c, *d, *a))
        or (o4 == 0 and on_segment(*c, *d, *b))
    )


def find_planarity_violation(xs, ys, edges) -> str | None:
    """First violation found, or None when the drawing is plane.

    ``edges`` is a sequence of (u, v) node pairs.  A violation is either a
    proper crossing of two edges or a node lying on an edge it is not an
    endpoint of (which also covers collinear overlaps).
    """
    if not edges:
        return None
    seen: dict[tuple[int, int], int] = {}
    for v in range(len(xs)):
        key = (xs[v], ys[v])
        if key in seen:
            return f"nodes {seen[key]} and {v} share position {key}"
        seen[key] = v
    horizontal = any(ys[u] == ys[v] for u, v in edges)
    if len(edges) <= PAIRWISE_MAX_EDGES or horizontal:
        return pairwise_violation(xs, ys, edges)
    return sweep_violation(xs, ys, edges)


def pairwise_violation(xs, ys, edges, chunk: int = 256) -> str | None:
    """All-pairs O(m^2) check, vectorised with numpy."""
    X = np.asarray(xs, dtype=np.int64)
    Y = np.asarray(ys, dtype=np.int64)
    E = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    ax, ay = X[E[:, 0]], Y[E[:, 0]]
    bx, by = X[E[:, 1]], Y[E[:, 1]]
    m = len(E)

    def sgn(v):
        return np.sign(v)

    for s in range(0, m, chunk):
        t = min(m, s + chunk)
        # segments s..t-1 against every later segment (and themselves, masked)
        Ax, Ay, Bx, By = (z[s:t, None] for z in (ax, ay, bx, by))
        o1 = sgn((Bx - Ax) * (ay[None, :] - Ay) - (By - Ay) * (ax[None, :] - Ax))
        o2 = sgn((Bx - Ax) * (by[None, :] - Ay) - (By - Ay) * (bx[None, :] - Ax))
        o3 = sgn((bx - ax)[None, :] * (Ay - ay[None, :]) - (by - ay)[None, :] * (Ax - ax[None, :]))
        o4 = sgn((bx - ax)[None, :] * (By - ay[None, :]) - (by - ay)[None, :] * (Bx - ax[None, :]))
        cross = (o1 * o2 < 0) & (o3 * o4 < 0)
        hit = np.argwhere(cross)
        if len(hit):
            i, j = hit[0]
            return f"edges {tuple(E[s + i])} and {tuple(E[j])} cross"

    # nodes strictly inside edges they do not belong to
    n = len(X)
    for s in range(0, m, chunk):
        t = min(m, s + chunk)
        Ax, Ay, Bx, By = (z[s:t, None] for z in (ax, ay, bx, by))
        o = (Bx - Ax) * (Y[None, :] - Ay) - (By - Ay) * (X[None, :] - Ax)
        inside = (
            (o == 0)
            & (X[None, :] >= np.minimum(Ax, Bx))
            & (X[None, :] <= np.maximum(Ax, Bx))
            & (Y[None, :] >= np.minimum(Ay, By))
            & (Y[None, :] <= np.maximum(Ay, By))
        )
        ids = np.arange(n)[None, :]
        inside &= ids != E[s:t, 0][:, None]
        inside &= ids != E[s:t, 1][:, None]
        hit = np.argwhere(inside)
        if len(hit):
            i, p = hit[0]
            return f"node {p} lies on edge {tuple(E[s + i])}"
    return None


def sweep_violation(xs, ys, edges) -> str | None:
    """Row sweep checking only neighbouring edges (Shamos-Hoey).

    Requires every edge to span at least one row.  Until the first
    violation the left-to-right order of the edges cut by the sweep line
    cannot change, so comparing neighbours on every insertion and deletion
    finds a violation if one exists.
    """
    m = len(edges)
    tx = [0] * m
    ty = [0] * m
    bx = [0] * m
    by = [0] * m
    tn = [0] * m
    bn = [0] * m
    starts: dict[int, list[int]] = defaultdict(list)
    ends: dict[int, int] = defaultdict(int)
    for s, (u, v) in enumerate(edges):
        if ys[u] > ys[v]:
            u, v = v, u
        tx[s], ty[s], tn[s] = xs[u], ys[u], u
        bx[s], by[s], bn[s] = xs[v], ys[v], v
        starts[u].append(s)
        ends[v] += 1

    def side(s: int, qx: int, qy: int) -> int:
        # sign of (x of segment s at row qy) - qx
        dy = by[s] - ty[s]
        val = (tx[s] - qx) * dy + (bx[s] - tx[s]) * (qy - ty[s])
        return (val > 0) - (val < 0)

    def clash(s: int, t: int) -> str | None:
        a = (tx[s], ty[s])
        b = (bx[s], by[s])
        c = (tx[t], ty[t])
        d = (bx[t], by[t])
        o1 = orient(*a, *b, *c)
        o2 = orient(*a, *b, *d)
        o3 = orient(*c, *d, *a)
        o4 = orient(*c, *d, *b)
        if o1 * o2 < 0 and o3 * o4 < 0:
            return f"edges {(tn[s], bn[s])} and {(tn[t], bn[t])} cross"
        shared = {tn[s], bn[s]} & {tn[t], bn[t]}
        for node, p, (e0, e1) in ((tn[t], c, (a, b)), (bn[t], d, (a, b)), (tn[s], a, (c, d)), (bn[s], b, (c, d))):
            if node not in shared and on_segment(*e0, *e1, *p):
                other = (tn[s], bn[s]) if e0 is a else (tn[t], bn[t])
                return f"node {node} lies on edge {other}"
        return None

    def by_direction(s: int, t: int) -> int:
        # left-to-right order just below a shared top endpoint
        v = (bx[s] - tx[s]) * (by[t] - ty[t]) - (bx[t] - tx[t]) * (by[s] - ty[s])
        return (v > 0) - (v < 0)

    order = sorted(range(len(xs)), key=lambda v: (ys[v], xs[v]))
    active: list[int] = []
    for q in order:
        qx, qy = xs[q], ys[q]
        lo, hi = 0, len(active)
        while lo < hi:
            mid = (lo + hi) >> 1
            if side(active[mid], qx, qy) < 0:
                lo = mid + 1
            else:
                hi = mid
        i = j = lo
        while j < len(active) and side(active[j], qx, qy) == 0:
            s = active[j]
            if bn[s] != q:
                return f"node {q} lies on edge {(tn[s], bn[s])}"
            j += 1
        if j - i != ends.get(q, 0):
            return f"edges ending at node {q} are out of order (crossing above row {qy})"
        del active[i:j]
        new = starts.get(q, ())
        if len(new) > 1:
            new = sorted(new, key=cmp_to_key(by_direction))
            for s, t in zip(new, new[1:]):
                if by_direction(s, t) == 0:
                    msg = clash(s, t)
                    if msg:
                        return msg
        if new:
            active[i:i] = new
            k = i + len(new)
            if i > 0:
                msg = clash(active[i - 1], active[i])
                if msg:
                    return msg
            if k < len(active):
                msg = clash(active[k - 1], active[k])
                if msg:
                    return msg
        elif 0 < i < len(active):
            msg = clash(active[i - 1], active[i])
            if msg:
                return msg
    return None
