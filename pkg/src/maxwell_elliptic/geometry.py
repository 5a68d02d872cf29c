"""Box-in-box domain and node classification on a uniform collocated grid."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

PLUS, MINUS = "plus", "minus"
SIDES = (PLUS, MINUS)

# node classes
INTERIOR_PLUS, INTERIOR_MINUS, INTERFACE, BOUNDARY = 0, 1, 2, 3
CLASS_NAMES = {
    INTERIOR_PLUS: "interior_plus",
    INTERIOR_MINUS: "interior_minus",
    INTERFACE: "interface",
    BOUNDARY: "boundary",
}

_TOL = 1e-9


class GeometryError(ValueError):
    pass


@dataclass(frozen=True)
class DomainSpec:
    outer_box: tuple[tuple[float, float, float], tuple[float, float, float]]
    inner_box: tuple[tuple[float, float, float], tuple[float, float, float]]
    n_cells: int

    def __post_init__(self):
        lo, hi = (np.asarray(c, dtype=float) for c in self.outer_box)
        ilo, ihi = (np.asarray(c, dtype=float) for c in self.inner_box)
        if int(self.n_cells) != self.n_cells or self.n_cells < 6:
            raise GeometryError(f"n_cells must be an integer >= 6, got {self.n_cells}")
        if np.any(hi <= lo) or np.any(ihi <= ilo):
            raise GeometryError("box corners must be ordered (lower, upper)")
        if np.any(ilo <= lo) or np.any(ihi >= hi):
            raise GeometryError("inner box must lie strictly inside the outer box")

    def refined(self, factor: int = 2) -> "DomainSpec":
        return DomainSpec(self.outer_box, self.inner_box, self.n_cells * factor)


@dataclass(frozen=True)
class Face:
    """One flat face of Γ or ∂Ω, held as the full rectangle of grid nodes on it.

    ``nodes`` holds flat grid indices with shape (m1, m2) over the tangential
    axes ``tangential = (t1, t2)``, t1 < t2. ``owned`` marks nodes whose
    surface conditions are imposed with this face's normal.
    """

    surface: str
    axis: int
    sign: int
    tangential: tuple[int, int]
    nodes: np.ndarray
    owned: np.ndarray
    spacing: tuple[float, float]

    @property
    def normal(self) -> np.ndarray:
        n = np.zeros(3)
        n[self.axis] = self.sign
        return n

    @property
    def shape(self) -> tuple[int, int]:
        return self.nodes.shape

    @cached_property
    def interior(self) -> np.ndarray:
        mask = np.zeros(self.shape, dtype=bool)
        mask[1:-1, 1:-1] = True
        return mask

    @cached_property
    def weights(self) -> np.ndarray:
        """Trapezoidal quadrature weights; they sum to the face area."""
        w1 = np.full(self.shape[0], self.spacing[0])
        w1[[0, -1]] *= 0.5
        w2 = np.full(self.shape[1], self.spacing[1])
        w2[[0, -1]] *= 0.5
        return np.outer(w1, w2)

    @property
    def area(self) -> float:
        return float(self.weights.sum())


class Grid:
    """Uniform node grid over the outer box with Γ/∂Ω classification.

    Side closures: the minus side holds interior-minus and Γ nodes, the plus
    side holds interior-plus, Γ and ∂Ω nodes. Γ nodes therefore carry one
    unknown slot per side.
    """

    def __init__(self, spec: DomainSpec):
        self.spec = spec
        n = int(spec.n_cells)
        self.n_cells = n
        lo, hi = (np.asarray(c, dtype=float) for c in spec.outer_box)
        self.lower, self.upper = lo, hi
        self.h = (hi - lo) / n
        self.shape = (n + 1,) * 3
        self.axes = [lo[d] + self.h[d] * np.arange(n + 1) for d in range(3)]

        ilo, ihi = (np.asarray(c, dtype=float) for c in spec.inner_box)
        lo_idx = (ilo - lo) / self.h
        hi_idx = (ihi - lo) / self.h
        for val in np.concatenate([lo_idx, hi_idx]):
            if abs(val - round(val)) > 1e-8:
                raise GeometryError(
                    f"inner box face at grid coordinate {val:.6g} does not lie on a grid plane"
                )
        self.inner_lo = np.rint(lo_idx).astype(int)
        self.inner_hi = np.rint(hi_idx).astype(int)
        if np.any(self.inner_lo < 2) or np.any(self.inner_hi > n - 2):
            raise GeometryError("clearance between interface and outer boundary must be >= 2 cells")
        if np.any(self.inner_hi - self.inner_lo < 2):
            raise GeometryError("inner box must span at least 2 cells per axis")

        idx = np.indices(self.shape)
        in_closed = np.ones(self.shape, dtype=bool)
        in_open = np.ones(self.shape, dtype=bool)
        on_outer = np.zeros(self.shape, dtype=bool)
        for d in range(3):
            in_closed &= (idx[d] >= self.inner_lo[d]) & (idx[d] <= self.inner_hi[d])
            in_open &= (idx[d] > self.inner_lo[d]) & (idx[d] < self.inner_hi[d])
            on_outer |= (idx[d] == 0) | (idx[d] == n)
        cls = np.full(self.shape, INTERIOR_PLUS, dtype=np.int8)
        cls[on_outer] = BOUNDARY
        cls[in_closed] = INTERFACE
        cls[in_open] = INTERIOR_MINUS
        self.node_class = cls
        self.in_minus_closure = in_closed
        self.in_plus_closure = ~in_open

        self.side_mask = {PLUS: self.in_plus_closure, MINUS: self.in_minus_closure}
        self.side_nodes = {s: np.flatnonzero(m.ravel()) for s, m in self.side_mask.items()}
        self.side_index = {}
        for s in SIDES:
            table = np.full(self.n_nodes, -1, dtype=np.int64)
            table[self.side_nodes[s]] = np.arange(self.side_nodes[s].size)
            self.side_index[s] = table

        self.gamma_faces = self._faces("gamma", self.inner_lo, self.inner_hi)
        self.boundary_faces = self._faces("boundary", np.zeros(3, dtype=int), np.full(3, n))

    # ------------------------------------------------------------------
    @property
    def n_nodes(self) -> int:
        return int(np.prod(self.shape))

    def count(self, node_class: int) -> int:
        return int(np.count_nonzero(self.node_class == node_class))

    @property
    def n_gamma(self) -> int:
        return self.count(INTERFACE)

    def n_side(self, side: str) -> int:
        return int(self.side_nodes[side].size)

    @property
    def n_unknowns(self) -> int:
        return 8 * (self.n_side(PLUS) + self.n_side(MINUS))

    @cached_property
    def points(self) -> np.ndarray:
        """Coordinates of all nodes, shape (n_nodes, 3), C order."""
        mesh = np.meshgrid(*self.axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    def coords(self, side: str) -> np.ndarray:
        return self.points[self.side_nodes[side]]

    def surface_faces(self, surface: str) -> list[Face]:
        if surface == "gamma":
            return self.gamma_faces
        if surface == "boundary":
            return self.boundary_faces
        raise ValueError(f"unknown surface {surface!r}")

    def normals(self, surface: str) -> tuple[np.ndarray, np.ndarray]:
        """Owned node indices of a surface and the normal used at each."""
        nodes, normals = [], []
        for f in self.surface_faces(surface):
            nodes.append(f.nodes[f.owned])
            normals.append(np.tile(f.normal, (int(f.owned.sum()), 1)))
        return np.concatenate(nodes), np.concatenate(normals)

    def _faces(self, surface, lo, hi):
        faces = []
        for axis in range(3):
            t1, t2 = [d for d in range(3) if d != axis]
            for sign, plane in ((-1, lo[axis]), (1, hi[axis])):
                r1 = np.arange(lo[t1], hi[t1] + 1)
                r2 = np.arange(lo[t2], hi[t2] + 1)
                ijk = [None, None, None]
                ijk[axis] = np.full((r1.size, r2.size), plane)
                ijk[t1], ijk[t2] = np.meshgrid(r1, r2, indexing="ij")
                nodes = np.ravel_multi_index(tuple(ijk), self.shape)
                # edge/corner priority: x-faces > y-faces > z-faces
                owned = np.ones(nodes.shape, dtype=bool)
                for t, r, axis_pos in ((t1, r1, 0), (t2, r2, 1)):
                    if t < axis:
                        edge = (r == lo[t]) | (r == hi[t])
                        if axis_pos == 0:
                            owned[edge, :] = False
                        else:
                            owned[:, edge] = False
                faces.append(
                    Face(surface, axis, sign, (t1, t2), nodes, owned,
                         (float(self.h[t1]), float(self.h[t2])))
                )
        return faces

    @cached_property
    def volume_weights(self) -> dict[str, np.ndarray]:
        """Trapezoidal volume weights per side (sum to each side's volume)."""
        out = {}
        for s in SIDES:
            if s == MINUS:
                lo, hi = self.inner_lo, self.inner_hi
            else:
                lo, hi = np.zeros(3, dtype=int), np.full(3, self.n_cells)
            w = np.ones(self.shape)
            idx = np.indices(self.shape)
            for d in range(3):
                w *= self.h[d]
                w = np.where((idx[d] == lo[d]) | (idx[d] == hi[d]), 0.5 * w, w)
            if s == PLUS:
                # subtract the inner box contribution (trapezoid is additive over cells)
                wi = np.ones(self.shape)
                for d in range(3):
                    wi *= self.h[d]
                    wi = np.where((idx[d] == self.inner_lo[d]) | (idx[d] == self.inner_hi[d]),
                                  0.5 * wi, wi)
                wi = np.where(self.in_minus_closure, wi, 0.0)
                w = w - wi
            out[s] = w.ravel()[self.side_nodes[s]]
        return out


def build_grid(spec: DomainSpec) -> Grid:
    return Grid(spec)
