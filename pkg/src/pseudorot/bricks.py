"""Brick-wall decompositions of the band and brick-chain reachability.

Bricks are closed axis-aligned rectangles.  Row ``j`` covers
``[j/rows, (j+1)/rows]`` and odd rows are shifted right by half a brick,
so each interior vertex of the skeleton meets exactly three edges.  A
lifted brick is addressed by ``(row, col)`` with ``col`` in Z; the unit
translation adds ``cols`` to ``col``.

Internally x-coordinates of skeleton vertices are integers counted in
half-brick widths, which keeps the boundary trace exact.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .arc_geometry import DELTA_IMG, TAU_GEO, EssentialArc
from .band_maps import AnyMap
from .errors import InternalCheckError, InvalidInputError, ResolutionError

log = logging.getLogger(__name__)


class ReachabilityError(ResolutionError):
    """Reached set ran into the left edge of the window."""


@dataclass(frozen=True)
class BrickGrid:
    eps: float
    rows: int
    cols: int

    @property
    def width(self) -> float:
        return 1.0 / self.cols

    @property
    def height(self) -> float:
        return 1.0 / self.rows

    @property
    def diameter(self) -> float:
        return math.hypot(self.width, self.height)

    def offset(self, row) -> np.ndarray | float:
        return (np.asarray(row) % 2) * (self.width / 2)

    def x_min(self, row, col):
        return np.asarray(col) * self.width + self.offset(row)

    def rect(self, row: int, col: int) -> tuple[float, float, float, float]:
        x0 = float(self.x_min(row, col))
        return x0, x0 + self.width, row * self.height, (row + 1) * self.height

    def bricks(self) -> np.ndarray:
        """Rectangles ``(x0, x1, t0, t1)`` of one fundamental strip, row-major."""
        J, I = np.meshgrid(np.arange(self.rows), np.arange(self.cols), indexing="ij")
        x0 = self.x_min(J, I)
        return np.stack([x0, x0 + self.width, J * self.height, (J + 1) * self.height], -1)

    def neighbors(self, row: int, col: int) -> list[tuple[int, int]]:
        """Bricks sharing an edge of positive length."""
        out = [(row, col - 1), (row, col + 1)]
        for r in (row - 1, row + 1):
            if 0 <= r < self.rows:
                # half-brick units; the other row is shifted by +-1
                d = (r % 2) - (row % 2)
                out.extend([(r, col), (r, col - 1)] if d > 0 else [(r, col), (r, col + 1)])
        return out

    def adjacency(self) -> dict[tuple[int, int], list[tuple[int, int]]]:
        """Adjacency of the fundamental strip, columns taken modulo ``cols``."""
        return {(j, i): [(r, c % self.cols) for r, c in self.neighbors(j, i)]
                for j in range(self.rows) for i in range(self.cols)}

    def vertex_degrees(self) -> dict[tuple[int, int], int]:
        """Degree of every skeleton vertex over one period, in (half-width, row) units."""
        deg: dict[tuple[int, int], int] = {}
        period = 2 * self.cols

        def bump(v):
            v = (v[0] % period, v[1])
            deg[v] = deg.get(v, 0) + 1

        for j in range(self.rows):
            for i in range(self.cols):
                X = 2 * i + j % 2
                bump((X, j))
                bump((X, j + 1))
        # horizontal edges: each row line is cut at the vertical edges touching it
        for J in range(self.rows + 1):
            cuts = set()
            for j in (J - 1, J):
                if 0 <= j < self.rows:
                    cuts.update((2 * i + j % 2) % period for i in range(self.cols))
            for X in cuts:
                deg[(X, J)] = deg.get((X, J), 0) + 2
        return deg


def build_grid(eps: float) -> BrickGrid:
    """Brick wall whose bricks have width and height below ``eps / sqrt 2``."""
    if not 0 < eps < 1:
        raise InvalidInputError("eps must lie in (0, 1)")
    n = math.floor(math.sqrt(2) / eps) + 1
    return BrickGrid(eps, max(2, n), max(2, n))


@dataclass
class SuccessorTable:
    """Successors of the fundamental bricks as ``(row, column delta)`` pairs."""

    rows: np.ndarray   # (rows, cols, k) target row, -1 for padding
    dcol: np.ndarray   # (rows, cols, k) column delta
    dilation: np.ndarray  # (rows, cols) radius used per brick


def _brick_samples(grid: BrickGrid, pitch: float):
    kx = max(2, math.ceil(grid.width / pitch) + 1)
    kt = max(2, math.ceil(grid.height / pitch) + 1)
    u = np.linspace(0.0, 1.0, kx)
    v = np.linspace(0.0, 1.0, kt)
    J, I = np.meshgrid(np.arange(grid.rows), np.arange(grid.cols), indexing="ij")
    x0 = grid.x_min(J, I)
    xs = x0[..., None, None] + grid.width * u[:, None]
    ts = (J * grid.height)[..., None, None] + grid.height * v[None, :]
    xs, ts = np.broadcast_arrays(xs, ts)
    return xs.copy(), ts.copy()


def _image_gap(ix: np.ndarray, it: np.ndarray) -> np.ndarray:
    gx = np.hypot(np.diff(ix, axis=2), np.diff(it, axis=2)).max(axis=(2, 3))
    gt = np.hypot(np.diff(ix, axis=3), np.diff(it, axis=3)).max(axis=(2, 3))
    return np.maximum(gx, gt)


def successor_table(grid: BrickGrid, maps: list[AnyMap], pitch: float = DELTA_IMG) -> SuccessorTable:
    """Over-approximate the bricks met by each ``map(D)``.

    ``D`` is sampled on a grid of pitch at most ``pitch``; every image
    sample is dilated by twice the largest gap between images of
    neighbouring samples of the same brick.
    """
    xs, ts = _brick_samples(grid, pitch)
    R, C = grid.rows, grid.cols
    w, h = grid.width, grid.height
    src_ids = np.broadcast_to(np.arange(R * C).reshape(R, C)[..., None, None], xs.shape)
    pairs = []
    radius = np.zeros((R, C))
    for m in maps:
        ix, it = m.apply(xs, ts)
        r = 2 * _image_gap(ix, it)
        radius = np.maximum(radius, r)
        rr = np.broadcast_to(r[..., None, None], xs.shape).ravel()
        X, T, S = ix.ravel(), it.ravel(), src_ids.ravel()
        row_lo = np.clip(np.floor((T - rr) / h).astype(np.int64), 0, R - 1)
        row_hi = np.clip(np.floor((T + rr) / h).astype(np.int64), 0, R - 1)
        span_r = int((row_hi - row_lo).max()) + 1
        for dr in range(span_r):
            rows = row_lo + dr
            ok_r = rows <= row_hi
            off = (rows % 2) * (w / 2)
            col_lo = np.floor((X - rr - off) / w).astype(np.int64)
            col_hi = np.floor((X + rr - off) / w).astype(np.int64)
            span_c = int((col_hi - col_lo).max()) + 1
            for dc in range(span_c):
                cols = col_lo + dc
                ok = ok_r & (cols <= col_hi)
                src = S[ok]
                pairs.append(np.stack([src, rows[ok], cols[ok] - src % C], axis=1))
    allp = np.unique(np.concatenate(pairs), axis=0)
    counts = np.bincount(allp[:, 0], minlength=R * C)
    k = int(counts.max())
    trow = np.full((R * C, k), -1, dtype=np.int64)
    tdc = np.zeros((R * C, k), dtype=np.int64)
    starts = np.concatenate([[0], np.cumsum(counts)[:-1]])
    slot = np.arange(len(allp)) - starts[allp[:, 0]]
    trow[allp[:, 0], slot] = allp[:, 1]
    tdc[allp[:, 0], slot] = allp[:, 2]
    return SuccessorTable(trow.reshape(R, C, k), tdc.reshape(R, C, k), radius)


@dataclass
class ReachSet:
    grid: BrickGrid
    reached: np.ndarray          # (rows, n_window_cols) bool
    col_lo: int                  # lifted column of reached[:, 0]
    window: tuple[float, float]
    dilation: float = 0.0
    leftmost_x: float = field(default=math.inf)

    @property
    def col_hi(self) -> int:
        return self.col_lo + self.reached.shape[1] - 1

    def is_reached(self, row: int, col: int) -> bool:
        if col > self.col_hi:
            return True
        if col < self.col_lo:
            return False
        return bool(self.reached[row, col - self.col_lo])

    def reached_rects(self) -> np.ndarray:
        J, Cw = np.nonzero(self.reached)
        x0 = self.grid.x_min(J, Cw + self.col_lo)
        return np.stack([x0, x0 + self.grid.width, J * self.grid.height,
                         (J + 1) * self.grid.height], -1)


def brick_reachability(grid: BrickGrid, phi1: AnyMap, phi2: AnyMap, M: float,
                       x_hi: float = 3.0, pitch: float = DELTA_IMG,
                       table: SuccessorTable | None = None) -> ReachSet:
    """Union of all brick chains started from bricks right of ``{0} x [0, 1]``."""
    table = table or successor_table(grid, [phi1, phi2], pitch)
    w = grid.width
    x_lo = -M - 2.0
    col_lo = math.floor(x_lo / w)
    col_hi = math.ceil(x_hi / w)
    ncol = col_hi - col_lo + 1
    R = grid.rows
    reached = np.zeros((R, ncol), dtype=bool)
    J, Cw = np.meshgrid(np.arange(R), np.arange(ncol), indexing="ij")
    # seed line snapped to the skeleton: bricks with left edge at x >= 0
    seeds = grid.x_min(J, Cw + col_lo) >= -1e-12
    reached |= seeds
    fj, fc = np.nonzero(seeds)
    fc = fc + col_lo
    k = table.rows.shape[2]
    while len(fj):
        i = fc % grid.cols
        tj = table.rows[fj, i].ravel()
        tc = (fc[:, None] + table.dcol[fj, i]).ravel()
        ok = tj >= 0
        tj, tc = tj[ok], tc[ok]
        if len(tc) and tc.min() < col_lo:
            raise ReachabilityError(
                f"brick chains reach x < {x_lo:.3g}; the constants (M = {M:.3g}) are too small"
            )
        inside = tc <= col_hi
        tj, tc = tj[inside], tc[inside]
        new = ~reached[tj, tc - col_lo]
        tj, tc = tj[new], tc[new]
        if len(tj):
            key = np.unique(tj * (ncol + 1) + (tc - col_lo))
            tj, tcw = key // (ncol + 1), key % (ncol + 1)
            reached[tj, tcw] = True
            tc = tcw + col_lo
        fj, fc = tj, tc
    del k
    rj, rc = np.nonzero(reached)
    leftmost = float(grid.x_min(rj, rc + col_lo).min())
    if leftmost < -M - 1:
        raise ReachabilityError(
            f"reached brick at x = {leftmost:.3g} left of -M - 1 = {-M - 1:.3g}"
        )
    return ReachSet(grid, reached, col_lo, (x_lo, x_hi), float(table.dilation.max()), leftmost)


def _left_component(reach: ReachSet) -> np.ndarray:
    grid = reach.grid
    R, ncol = reach.reached.shape
    left = np.zeros_like(reach.reached)
    stack = [(j, 0) for j in range(R) if not reach.reached[j, 0]]
    if len(stack) != R:
        raise InternalCheckError("left window column is not free")
    for j, c in stack:
        left[j, c] = True
    while stack:
        j, c = stack.pop()
        for r, cc in grid.neighbors(j, c + reach.col_lo):
            cw = cc - reach.col_lo
            if 0 <= cw < ncol and not left[r, cw] and not reach.reached[r, cw]:
                left[r, cw] = True
                stack.append((r, cw))
    return left


def extract_boundary(reach: ReachSet, tol: float = TAU_GEO) -> EssentialArc:
    """Left boundary of the reached set as a skeleton polyline.

    Traces the interface between the free component touching the left
    window edge and the rest; loops around reached islands are dropped,
    and exactly one bottom-to-top component must remain.
    """
    grid = reach.grid
    R = grid.rows
    left = _left_component(reach)
    ncol = left.shape[1]

    def in_left(j, cw):
        return 0 <= cw < ncol and left[j, cw]

    edges: dict[tuple[int, int], list[tuple[int, int]]] = {}

    def add(a, b):
        edges.setdefault(a, []).append(b)
        edges.setdefault(b, []).append(a)

    for j, cw in zip(*np.nonzero(left)):
        c = cw + reach.col_lo
        X = 2 * c + j % 2
        if not in_left(j, cw + 1) and cw + 1 < ncol + 1:
            add((X + 2, j), (X + 2, j + 1))
        if cw > 0 and not in_left(j, cw - 1):
            add((X, j), (X, j + 1))
        for r in (j - 1, j + 1):
            if not 0 <= r < R:
                continue
            J = max(j, r)
            for rr, cc in grid.neighbors(j, c):
                if rr != r or in_left(rr, cc - reach.col_lo):
                    continue
                X2 = 2 * cc + rr % 2
                lo, hi = max(X, X2), min(X + 2, X2 + 2)
                if hi > lo:
                    add((lo, J), (hi, J))
    if any(len(v) > 2 for v in edges.values()):
        raise InternalCheckError("interface is not a 1-manifold")
    seen: set = set()
    essential = []
    loops = 0
    for start in edges:
        if start in seen:
            continue
        comp, stack = [], [start]
        seen.add(start)
        while stack:
            v = stack.pop()
            comp.append(v)
            for u in edges[v]:
                if u not in seen:
                    seen.add(u)
                    stack.append(u)
        levels = {v[1] for v in comp}
        if 0 in levels and R in levels:
            essential.append(comp)
        else:
            loops += 1
    if loops:
        log.info("dropped %d interface loops around reached islands", loops)
    if len(essential) != 1:
        raise InternalCheckError(f"found {len(essential)} bottom-to-top interface components")
    comp = essential[0]
    bottoms = [v for v in comp if v[1] == 0]
    if len(bottoms) != 1 or len(edges[bottoms[0]]) != 1:
        raise InternalCheckError("interface arc does not start cleanly on t = 0")
    path = [bottoms[0]]
    prev = None
    while True:
        nxt = [u for u in edges[path[-1]] if u != prev]
        if not nxt:
            break
        prev = path[-1]
        path.append(nxt[0])
    if path[-1][1] != R:
        raise InternalCheckError("interface arc does not end on t = 1")
    pts = np.array(path, dtype=float)
    keep = np.ones(len(pts), dtype=bool)
    d = np.diff(pts, axis=0)
    cross = d[:-1, 0] * d[1:, 1] - d[:-1, 1] * d[1:, 0]
    keep[1:-1] = cross != 0
    pts = pts[keep]
    verts = np.column_stack([pts[:, 0] * grid.width / 2, pts[:, 1] / R])
    return EssentialArc(verts, tol)
