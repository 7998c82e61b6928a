"""Grid layouts: assembly from spine decompositions, validation, SVG/TSV output.

Rows grow downward, so the root sits in row 0 and "strictly upward" means
every child is in a larger row than its parent.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from xml.sax.saxutils import escape

from .decomposition import Decomposition, spine_widths, to_continuation
from .geometry import find_planarity_violation
from .tree import NIL, BinaryTree

SVG_UNIT = 24

CHECKS = ("grid", "upward", "order", "planar", "root_top")


@dataclass
class Layout:
    cols: list[int]
    rows: list[int]
    width: int
    height: int

    def position(self, v: int) -> tuple[int, int]:
        return self.cols[v], self.rows[v]


@dataclass
class ValidationReport:
    results: dict[str, bool] = field(default_factory=dict)
    messages: dict[str, str] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.results.get(name, False) for name in CHECKS)

    def fail(self, check: str, message: str) -> None:
        self.results[check] = False
        self.messages.setdefault(check, message)

    def __str__(self) -> str:
        parts = []
        for name in CHECKS:
            status = "ok" if self.results.get(name) else "FAIL"
            msg = self.messages.get(name)
            parts.append(f"{name}={status}" + (f" ({msg})" if msg else ""))
        return ", ".join(parts)


def assemble_continuation(tree: BinaryTree, cont: list[int]) -> Layout:
    """Place every node on the grid according to a continuation array."""
    left, right, size = tree.left, tree.right, tree.size
    ml, mr = spine_widths(tree, cont)
    n = tree.n
    cols = [0] * n
    rows = [0] * n
    # (spine root, left edge of its box, top row of its box)
    stack = [(0, 0, 0)]
    while stack:
        v, x0, y = stack.pop()
        col = x0 + ml[v]
        while True:
            cols[v] = col
            rows[v] = y
            c = cont[v]
            if c == NIL:
                break
            if c == left[v]:
                other = right[v]
                if other != NIL:
                    stack.append((other, col + 1, y + 1))
            else:
                other = left[v]
                if other != NIL:
                    w = ml[other] + 1 + mr[other]
                    stack.append((other, col - w, y + 1))
            y += 1 + (size[other] if other != NIL else 0)
            v = c
    return Layout(cols, rows, ml[0] + 1 + mr[0], n)


def assemble(tree: BinaryTree, d: Decomposition) -> Layout:
    """Layout of ``tree`` drawn along the spines of ``d``.

    Each hanging box sits directly below its spine parent, left boxes
    flush against the column left of the spine and right boxes flush
    against the column to its right.
    """
    return assemble_continuation(tree, to_continuation(tree, d))


def tree_edges(tree: BinaryTree) -> list[tuple[int, int]]:
    return [(tree.parent[v], v) for v in range(1, tree.n)]


def validate(tree: BinaryTree, layout: Layout) -> ValidationReport:
    report = ValidationReport()
    n = tree.n
    xs, ys = layout.cols, layout.rows
    for name in CHECKS:
        report.results[name] = True

    if len(xs) != n or len(ys) != n:
        report.fail("grid", "layout does not cover every node")
        for name in CHECKS[1:]:
            report.fail(name, "skipped: incomplete layout")
        return report

    for v in range(n):
        x, y = xs[v], ys[v]
        if not (isinstance(x, int) and isinstance(y, int)):
            report.fail("grid", f"node {v} has non-integer position")
            break
        if not (0 <= x < layout.width and 0 <= y < layout.height):
            report.fail("grid", f"node {v} at {(x, y)} outside {layout.width}x{layout.height}")
            break
    if report.results["grid"]:
        if len(set(zip(xs, ys))) != n:
            report.fail("grid", "two nodes share a position")
        elif min(xs) != 0 or max(xs) != layout.width - 1 or min(ys) != 0 or max(ys) != layout.height - 1:
            report.fail("grid", "bounding box is not tight")

    edges = tree_edges(tree)
    for u, v in edges:
        if not ys[u] < ys[v]:
            report.fail("upward", f"edge {(u, v)} is not strictly downward from the parent")
            break

    for v in range(n):
        a, b = tree.left[v], tree.right[v]
        if a == NIL or b == NIL:
            continue
        dxl, dyl = xs[a] - xs[v], ys[a] - ys[v]
        dxr, dyr = xs[b] - xs[v], ys[b] - ys[v]
        if not dxl * dyr < dxr * dyl:
            report.fail("order", f"children of node {v} are not in left-right order")
            break

    msg = find_planarity_violation(xs, ys, edges)
    if msg:
        report.fail("planar", msg)

    if ys[0] != min(ys):
        report.fail("root_top", f"root in row {ys[0]}, top row is {min(ys)}")
    return report


def to_tsv(layout: Layout) -> str:
    lines = ["node\tcol\trow"]
    lines.extend(f"{v}\t{c}\t{r}" for v, (c, r) in enumerate(zip(layout.cols, layout.rows)))
    return "\n".join(lines) + "\n"


def to_svg(layout: Layout, tree: BinaryTree, unit: int = SVG_UNIT) -> str:
    pad = unit // 2
    w = (layout.width - 1) * unit + 2 * pad
    h = (layout.height - 1) * unit + 2 * pad
    r = max(2, unit // 5)
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'viewBox="{-pad} {-pad} {w} {h}" width="{w}" height="{h}">',
        '<g stroke="black" stroke-width="1.5">',
    ]
    xs, ys = layout.cols, layout.rows
    for u, v in tree_edges(tree):
        out.append(
            f'<line x1="{xs[u] * unit}" y1="{ys[u] * unit}" x2="{xs[v] * unit}" y2="{ys[v] * unit}"/>'
        )
    out.append("</g>")
    out.append('<g fill="white" stroke="black">')
    for v in range(tree.n):
        out.append(f'<circle cx="{xs[v] * unit}" cy="{ys[v] * unit}" r="{r}"><title>{escape(str(v))}</title></circle>')
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit(layout: Layout, tree: BinaryTree, fmt: str) -> str:
    if fmt == "tsv":
        return to_tsv(layout)
    if fmt == "svg":
        return to_svg(layout, tree)
    raise ValueError(f"unknown format {fmt!r}")
