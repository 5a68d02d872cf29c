"""Collocated finite differences on a two-sided grid.

Every side (plus/minus) is differentiated only with nodes of its own
closure: central differences where both neighbours belong to the side,
second-order 3-point one-sided stencils otherwise. Stencils therefore never
cross Γ and never leave the outer box.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sps

from .geometry import MINUS, PLUS, SIDES, Face, Grid


class StencilError(RuntimeError):
    pass


class DiffOps:
    """Sparse first-derivative matrices ``D[side][axis]`` for one grid."""

    def __init__(self, grid: Grid):
        self.grid = grid
        self.D = {s: [self._derivative(s, d) for d in range(3)] for s in SIDES}

    @classmethod
    def for_grid(cls, grid: Grid) -> "DiffOps":
        ops = getattr(grid, "_diff_ops", None)
        if ops is None:
            ops = cls(grid)
            grid._diff_ops = ops
        return ops

    def _derivative(self, side: str, axis: int) -> sps.csr_matrix:
        g = self.grid
        mask = g.side_mask[side]
        nodes = g.side_nodes[side]
        index = g.side_index[side]
        n = g.n_cells
        ijk = np.array(np.unravel_index(nodes, g.shape))
        pos = ijk[axis]
        stride = int(np.prod(g.shape[axis + 1:]))
        flat_mask = mask.ravel()

        def member(offset):
            ok = (pos + offset >= 0) & (pos + offset <= n)
            out = np.zeros(nodes.size, dtype=bool)
            out[ok] = flat_mask[nodes[ok] + offset * stride]
            return out

        central = member(-1) & member(1)
        forward = ~central & member(1) & member(2)
        backward = ~central & ~forward & member(-1) & member(-2)
        if not np.all(central | forward | backward):
            raise StencilError(f"no admissible stencil on the {side} side along axis {axis}")

        h = g.h[axis]
        rows, cols, vals = [], [], []
        stencils = (
            (central, (-1, 1), (-0.5, 0.5)),
            (forward, (0, 1, 2), (-1.5, 2.0, -0.5)),
            (backward, (0, -1, -2), (1.5, -2.0, 0.5)),
        )
        for sel, offsets, coeffs in stencils:
            r = np.flatnonzero(sel)
            for off, c in zip(offsets, coeffs):
                cidx = index[nodes[r] + off * stride]
                if np.any(cidx < 0):
                    raise StencilError("stencil crosses the interface")
                rows.append(r)
                cols.append(cidx)
                vals.append(np.full(r.size, c / h))
        m = nodes.size
        return sps.csr_matrix(
            (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(m, m)
        )


# ----------------------------------------------------------------------
# grid fields


@dataclass
class GridField:
    """Per-side node values; Γ nodes appear in both sides.

    ``plus`` has shape (n_plus,) or (n_plus, 3), ``minus`` likewise.
    """

    plus: np.ndarray
    minus: np.ndarray

    def __getitem__(self, side: str) -> np.ndarray:
        if side == PLUS:
            return self.plus
        if side == MINUS:
            return self.minus
        raise KeyError(side)

    @classmethod
    def zeros(cls, grid: Grid, ncomp: int | None = None) -> "GridField":
        def z(s):
            shape = (grid.n_side(s),) if ncomp is None else (grid.n_side(s), ncomp)
            return np.zeros(shape, dtype=complex)
        return cls(z(PLUS), z(MINUS))

    @classmethod
    def from_function(cls, grid: Grid, fn) -> "GridField":
        """``fn(side, points) -> values`` sampled on each side's nodes."""
        return cls(*(np.asarray(fn(s, grid.coords(s)), dtype=complex) for s in SIDES))

    def map(self, fn) -> "GridField":
        return GridField(fn(self.plus), fn(self.minus))

    def __add__(self, other):
        return GridField(self.plus + other.plus, self.minus + other.minus)

    def __sub__(self, other):
        return GridField(self.plus - other.plus, self.minus - other.minus)

    def __mul__(self, a):
        return GridField(a * self.plus, a * self.minus)

    __rmul__ = __mul__

    def max_abs(self) -> float:
        return float(max(np.abs(self.plus).max(initial=0.0), np.abs(self.minus).max(initial=0.0)))


def grad_fd(f: GridField, grid: Grid) -> GridField:
    ops = DiffOps.for_grid(grid)
    return GridField(*(np.stack([ops.D[s][d] @ f[s] for d in range(3)], axis=1) for s in SIDES))


def div_fd(F: GridField, grid: Grid) -> GridField:
    ops = DiffOps.for_grid(grid)
    return GridField(*(sum(ops.D[s][d] @ F[s][:, d] for d in range(3)) for s in SIDES))


def curl_fd(F: GridField, grid: Grid) -> GridField:
    ops = DiffOps.for_grid(grid)

    def side_curl(s):
        D, v = ops.D[s], F[s]
        return np.stack([
            D[1] @ v[:, 2] - D[2] @ v[:, 1],
            D[2] @ v[:, 0] - D[0] @ v[:, 2],
            D[0] @ v[:, 1] - D[1] @ v[:, 0],
        ], axis=1)

    return GridField(side_curl(PLUS), side_curl(MINUS))


# ----------------------------------------------------------------------
# surface fields


@dataclass
class SurfaceField:
    """Values on every node of every face rectangle of one surface.

    Face-edge nodes are shared by neighbouring faces and stored once per
    face, each with that face's frame.
    """

    faces: list[Face]
    values: list[np.ndarray] = field(default_factory=list)

    @property
    def surface(self) -> str:
        return self.faces[0].surface

    @classmethod
    def zeros(cls, grid: Grid, surface: str, ncomp: int | None = None) -> "SurfaceField":
        faces = grid.surface_faces(surface)
        extra = () if ncomp is None else (ncomp,)
        return cls(faces, [np.zeros(f.shape + extra, dtype=complex) for f in faces])

    @classmethod
    def from_function(cls, grid: Grid, surface: str, fn) -> "SurfaceField":
        """``fn(face, points) -> values`` with points shaped (m1*m2, 3)."""
        faces = grid.surface_faces(surface)
        vals = []
        for f in faces:
            v = np.asarray(fn(f, grid.points[f.nodes.ravel()]), dtype=complex)
            vals.append(v.reshape(f.shape + v.shape[1:]))
        return cls(faces, vals)

    def _combine(self, other, op):
        if isinstance(other, SurfaceField):
            return SurfaceField(self.faces, [op(a, b) for a, b in zip(self.values, other.values)])
        return SurfaceField(self.faces, [op(a, other) for a in self.values])

    def __add__(self, other):
        return self._combine(other, np.add)

    def __sub__(self, other):
        return self._combine(other, np.subtract)

    def __mul__(self, a):
        return self._combine(a, np.multiply)

    __rmul__ = __mul__

    def __truediv__(self, a):
        return self._combine(a, np.divide)

    def __neg__(self):
        return SurfaceField(self.faces, [-v for v in self.values])

    def owned(self) -> np.ndarray:
        """Values at owned nodes, concatenated in ``Grid.normals`` order."""
        return np.concatenate([v[f.owned] for f, v in zip(self.faces, self.values)])

    def norm(self) -> float:
        """Trapezoidal surface L2 norm."""
        total = 0.0
        for f, v in zip(self.faces, self.values):
            sq = np.abs(v) ** 2
            if sq.ndim == 3:
                sq = sq.sum(axis=-1)
            total += float((f.weights * sq).sum())
        return float(np.sqrt(total))

    def max_abs(self, where: str = "all") -> float:
        out = 0.0
        for f, v in zip(self.faces, self.values):
            a = np.abs(v)
            if a.ndim == 3:
                a = a.max(axis=-1)
            if where == "interior":
                a = a[f.interior]
            out = max(out, float(a.max(initial=0.0)))
        return out


def trace(F: GridField, grid: Grid, surface: str, side: str) -> SurfaceField:
    if surface == "gamma" and side not in SIDES:
        raise ValueError("trace on Γ needs side 'plus' or 'minus'")
    if surface == "boundary":
        if side not in ("outer", PLUS):
            raise ValueError("trace on the outer boundary needs side 'outer'")
        side = PLUS
    faces = grid.surface_faces(surface)
    index = grid.side_index[side]
    return SurfaceField(faces, [F[side][index[f.nodes]] for f in faces])


def jump(F: GridField, grid: Grid) -> SurfaceField:
    """⟦F⟧ on Γ, oriented plus minus minus."""
    return trace(F, grid, "gamma", PLUS) - trace(F, grid, "gamma", MINUS)


def tangential(S: SurfaceField) -> SurfaceField:
    """Rotated tangential part n × F per face."""
    return SurfaceField(S.faces, [np.cross(f.normal, v) for f, v in zip(S.faces, S.values)])


def normal_component(S: SurfaceField) -> SurfaceField:
    return SurfaceField(S.faces, [v @ f.normal for f, v in zip(S.faces, S.values)])


def tangential_div(G: SurfaceField) -> SurfaceField:
    """Surface divergence of a tangential field on flat faces.

    With G = n × F this satisfies n · curl F = -div_τ G. Interior face nodes
    use central differences, face-edge nodes 3-point one-sided ones.
    """
    out = []
    for f, v in zip(G.faces, G.values):
        t1, t2 = f.tangential
        d1 = np.gradient(v[..., t1], f.spacing[0], axis=0, edge_order=2)
        d2 = np.gradient(v[..., t2], f.spacing[1], axis=1, edge_order=2)
        out.append(d1 + d2)
    return SurfaceField(G.faces, out)
