"""Weighted least-squares assembly of the extended 8-unknown system.

Unknowns per node and side: E (3), H (3), alpha, beta. Rows:

* at every node of each side's closure, the eight PDE rows
  curl E + grad alpha - iω μH = K, curl H + grad beta + iω εE = J,
  div(μH) = k, div(εE) = j;
* at every owned Γ node, eight jump conditions;
* at every owned ∂Ω node, four boundary conditions.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
import scipy.sparse as sps

from .discrete_ops import DiffOps, GridField, SurfaceField
from .geometry import MINUS, PLUS, SIDES, Grid
from .media import MediumField, check_admissibility


class AssemblyError(ValueError):
    pass


PDE_GROUPS = ("curl_E", "curl_H", "div_muH", "div_epsE")
GAMMA_GROUPS = ("gamma_E_tau", "gamma_D_nu", "gamma_beta", "gamma_H_tau", "gamma_B_nu", "gamma_alpha")
BOUNDARY_GROUPS = ("boundary_E_tau", "boundary_B_nu", "boundary_beta")
GROUPS = PDE_GROUPS + GAMMA_GROUPS + BOUNDARY_GROUPS

# component slots within a side block
E0, H0, ALPHA, BETA = 0, 3, 6, 7

_LEVI = np.zeros((3, 3, 3))
_LEVI[0, 1, 2] = _LEVI[1, 2, 0] = _LEVI[2, 0, 1] = 1
_LEVI[0, 2, 1] = _LEVI[2, 1, 0] = _LEVI[1, 0, 2] = -1


@dataclass
class ProblemData:
    """Right-hand sides of the extended problem.

    Vector surface data are rotated tangential fields n × (...) stored as
    3-vectors per face node; scalar surface data are plain arrays.
    """

    omega: float
    K: GridField
    J: GridField
    k: GridField
    j: GridField
    E_tau_gamma: SurfaceField
    H_tau_gamma: SurfaceField
    D_nu_gamma: SurfaceField
    B_nu_gamma: SurfaceField
    alpha_gamma: SurfaceField
    beta_gamma: SurfaceField
    E_tau_0: SurfaceField
    B_nu_0: SurfaceField
    beta_0: SurfaceField

    SURFACE_FIELDS = ("E_tau_gamma", "H_tau_gamma", "D_nu_gamma", "B_nu_gamma",
                      "alpha_gamma", "beta_gamma", "E_tau_0", "B_nu_0", "beta_0")
    VOLUME_FIELDS = ("K", "J", "k", "j")

    @classmethod
    def zeros(cls, grid: Grid, omega: float) -> "ProblemData":
        G, B = "gamma", "boundary"
        return cls(
            omega=omega,
            K=GridField.zeros(grid, 3), J=GridField.zeros(grid, 3),
            k=GridField.zeros(grid), j=GridField.zeros(grid),
            E_tau_gamma=SurfaceField.zeros(grid, G, 3), H_tau_gamma=SurfaceField.zeros(grid, G, 3),
            D_nu_gamma=SurfaceField.zeros(grid, G), B_nu_gamma=SurfaceField.zeros(grid, G),
            alpha_gamma=SurfaceField.zeros(grid, G), beta_gamma=SurfaceField.zeros(grid, G),
            E_tau_0=SurfaceField.zeros(grid, B, 3), B_nu_0=SurfaceField.zeros(grid, B),
            beta_0=SurfaceField.zeros(grid, B),
        )

    def replace(self, **changes) -> "ProblemData":
        return replace(self, **changes)

    def __add__(self, other: "ProblemData") -> "ProblemData":
        if self.omega != other.omega:
            raise AssemblyError("cannot add data with different omega")
        kw = {name: getattr(self, name) + getattr(other, name)
              for name in self.VOLUME_FIELDS + self.SURFACE_FIELDS}
        return ProblemData(omega=self.omega, **kw)

    def scaled(self, a: complex) -> "ProblemData":
        kw = {name: getattr(self, name) * a for name in self.VOLUME_FIELDS + self.SURFACE_FIELDS}
        return ProblemData(omega=self.omega, **kw)

    def validate(self, grid: Grid) -> None:
        if not self.omega > 0:
            raise AssemblyError(f"omega must be positive, got {self.omega}")
        for name, ncomp in (("K", 3), ("J", 3), ("k", None), ("j", None)):
            f = getattr(self, name)
            for s in SIDES:
                want = (grid.n_side(s),) if ncomp is None else (grid.n_side(s), 3)
                if f[s].shape != want:
                    raise AssemblyError(f"{name}[{s}] has shape {f[s].shape}, expected {want}")
        for name in self.SURFACE_FIELDS:
            sf = getattr(self, name)
            surface = "boundary" if name.endswith("_0") else "gamma"
            faces = grid.surface_faces(surface)
            vector = "tau" in name
            if len(sf.values) != len(faces):
                raise AssemblyError(f"{name} does not cover every {surface} face")
            for f, v in zip(faces, sf.values):
                want = f.shape + ((3,) if vector else ())
                if v.shape != want:
                    raise AssemblyError(f"{name} has face shape {v.shape}, expected {want}")


@dataclass
class ExtendedState:
    E: GridField
    H: GridField
    alpha: GridField
    beta: GridField

    @classmethod
    def zeros(cls, grid: Grid) -> "ExtendedState":
        return cls(GridField.zeros(grid, 3), GridField.zeros(grid, 3),
                   GridField.zeros(grid), GridField.zeros(grid))

    def to_vector(self) -> np.ndarray:
        parts = []
        for s in SIDES:
            parts += [self.E[s].T.ravel(), self.H[s].T.ravel(), self.alpha[s], self.beta[s]]
        return np.concatenate(parts).astype(complex)

    @classmethod
    def from_vector(cls, grid: Grid, x: np.ndarray) -> "ExtendedState":
        blocks = {}
        offset = 0
        for s in SIDES:
            n = grid.n_side(s)
            blocks[s] = x[offset:offset + 8 * n].reshape(8, n)
            offset += 8 * n
        return cls(
            E=GridField(*(blocks[s][0:3].T.copy() for s in SIDES)),
            H=GridField(*(blocks[s][3:6].T.copy() for s in SIDES)),
            alpha=GridField(*(blocks[s][6].copy() for s in SIDES)),
            beta=GridField(*(blocks[s][7].copy() for s in SIDES)),
        )


@dataclass(frozen=True)
class WeightPolicy:
    pde: float = 1.0
    surface_coefficient: float = 1.0

    def surface_weight(self, grid: Grid) -> float:
        return self.surface_coefficient / np.sqrt(float(np.max(grid.h)))


@dataclass
class SparseLSSystem:
    grid: Grid
    medium: MediumField
    omega: float
    weights: WeightPolicy
    R: sps.csr_matrix
    b: np.ndarray
    w: np.ndarray
    row_group: np.ndarray        # index into GROUPS
    row_node: np.ndarray         # flat grid node index
    row_side: np.ndarray         # 0 plus, 1 minus, -1 surface row
    row_scale: np.ndarray = field(repr=False, default=None)  # cell measure for discrete L2

    @property
    def shape(self):
        return self.R.shape

    @property
    def n_unknowns(self) -> int:
        return self.R.shape[1]

    def weighted_operator(self) -> sps.csr_matrix:
        return sps.diags(self.w) @ self.R

    def weighted_rhs(self) -> np.ndarray:
        return self.w * self.b

    def group_counts(self) -> dict:
        counts = np.bincount(self.row_group, minlength=len(GROUPS))
        return {g: int(c) for g, c in zip(GROUPS, counts)}

    def with_rhs(self, data: ProblemData) -> "SparseLSSystem":
        """Same operator, new right-hand side."""
        return replace(self, b=_rhs(self.grid, data))


# ----------------------------------------------------------------------


def _offsets(grid: Grid) -> dict:
    return {PLUS: 0, MINUS: 8 * grid.n_side(PLUS)}


def _pde_block(grid: Grid, side: str, eps: np.ndarray, mu: np.ndarray, omega: float):
    D = DiffOps.for_grid(grid).D[side]
    n = grid.n_side(side)
    blocks = [[None] * 8 for _ in range(8)]

    def add(r, c, m):
        blocks[r][c] = m if blocks[r][c] is None else blocks[r][c] + m

    for i in range(3):
        for j in range(3):
            for c in range(3):
                if _LEVI[i, j, c]:
                    add(i, E0 + c, _LEVI[i, j, c] * D[j])
                    add(3 + i, H0 + c, _LEVI[i, j, c] * D[j])
        add(i, ALPHA, D[i])
        add(3 + i, BETA, D[i])
        for c in range(3):
            if np.any(mu[:, i, c]):
                add(i, H0 + c, sps.diags(-1j * omega * mu[:, i, c]))
            if np.any(eps[:, i, c]):
                add(3 + i, E0 + c, sps.diags(1j * omega * eps[:, i, c]))
    for c in range(3):
        for d in range(3):
            if np.any(mu[:, d, c]):
                add(6, H0 + c, D[d] @ sps.diags(mu[:, d, c]))
            if np.any(eps[:, d, c]):
                add(7, E0 + c, D[d] @ sps.diags(eps[:, d, c]))
    for r in range(8):
        if blocks[r][r] is None:
            blocks[r][r] = sps.csr_matrix((n, n))
    return sps.bmat(blocks, format="csr")


class _RowBuilder:
    def __init__(self, n_cols):
        self.rows, self.cols, self.vals = [], [], []
        self.group, self.node = [], []
        self.n_rows = 0
        self.n_cols = n_cols

    def add(self, group: str, nodes: np.ndarray, terms):
        """terms: iterable of (column indices, coefficients) aligned with nodes."""
        m = nodes.size
        r = self.n_rows + np.arange(m)
        for cols, coef in terms:
            coef = np.broadcast_to(np.asarray(coef, dtype=complex), (m,))
            keep = coef != 0
            self.rows.append(r[keep])
            self.cols.append(np.asarray(cols)[keep])
            self.vals.append(coef[keep])
        self.group.append(np.full(m, GROUPS.index(group)))
        self.node.append(nodes)
        self.n_rows += m

    def matrix(self):
        if not self.rows:
            return sps.csr_matrix((0, self.n_cols), dtype=complex)
        return sps.csr_matrix(
            (np.concatenate(self.vals), (np.concatenate(self.rows), np.concatenate(self.cols))),
            shape=(self.n_rows, self.n_cols),
        )


def _surface_rows(grid: Grid, eps: dict, mu: dict):
    """Sparse Γ and ∂Ω rows, in face order over owned nodes."""
    off = _offsets(grid)
    builder = _RowBuilder(grid.n_unknowns)

    def col(side, comp, local):
        return off[side] + comp * grid.n_side(side) + local

    for f in grid.gamma_faces:
        nodes = f.nodes[f.owned]
        loc = {s: grid.side_index[s][nodes] for s in SIDES}
        n = f.normal
        cross = np.einsum("tjc,j->tc", _LEVI, n)
        sgn = {PLUS: 1.0, MINUS: -1.0}
        for base, coef, flux_group, tau_group, scalar_slot, scalar_group in (
            (E0, eps, "gamma_D_nu", "gamma_E_tau", BETA, "gamma_beta"),
            (H0, mu, "gamma_B_nu", "gamma_H_tau", ALPHA, "gamma_alpha"),
        ):
            for t in f.tangential:
                builder.add(tau_group, nodes, [
                    (col(s, base + c, loc[s]), sgn[s] * cross[t, c])
                    for s in SIDES for c in range(3) if cross[t, c]
                ])
            terms = []
            for s in SIDES:
                m = coef[s][loc[s]]  # (k, 3, 3)
                nm = np.einsum("d,kdc->kc", n, m)
                terms += [(col(s, base + c, loc[s]), sgn[s] * nm[:, c]) for c in range(3)]
            builder.add(flux_group, nodes, terms)
            builder.add(scalar_group, nodes,
                        [(col(s, scalar_slot, loc[s]), sgn[s]) for s in SIDES])
    for f in grid.boundary_faces:
        nodes = f.nodes[f.owned]
        loc = grid.side_index[PLUS][nodes]
        n = f.normal
        cross = np.einsum("tjc,j->tc", _LEVI, n)
        for t in f.tangential:
            builder.add("boundary_E_tau", nodes,
                        [(col(PLUS, E0 + c, loc), cross[t, c]) for c in range(3) if cross[t, c]])
        nm = np.einsum("d,kdc->kc", n, mu[PLUS][loc])
        builder.add("boundary_B_nu", nodes, [(col(PLUS, H0 + c, loc), nm[:, c]) for c in range(3)])
        builder.add("boundary_beta", nodes, [(col(PLUS, BETA, loc), 1.0)])
    return builder


def _surface_rhs(grid: Grid, data: ProblemData) -> np.ndarray:
    """Right-hand side of the surface rows, in the same order as _surface_rows."""
    out = []
    gamma_order = (
        (data.E_tau_gamma, data.D_nu_gamma, data.beta_gamma),
        (data.H_tau_gamma, data.B_nu_gamma, data.alpha_gamma),
    )
    for fi, f in enumerate(grid.gamma_faces):
        for tau, flux, scalar in gamma_order:
            for t in f.tangential:
                out.append(tau.values[fi][f.owned][:, t])
            out.append(flux.values[fi][f.owned])
            out.append(scalar.values[fi][f.owned])
    for fi, f in enumerate(grid.boundary_faces):
        for t in f.tangential:
            out.append(data.E_tau_0.values[fi][f.owned][:, t])
        out.append(data.B_nu_0.values[fi][f.owned])
        out.append(data.beta_0.values[fi][f.owned])
    return np.concatenate(out)


def _rhs(grid: Grid, data: ProblemData) -> np.ndarray:
    parts = []
    for s in SIDES:
        parts += [data.K[s].T.ravel(), data.J[s].T.ravel(), data.k[s], data.j[s]]
    parts.append(_surface_rhs(grid, data))
    return np.concatenate(parts).astype(complex)


def assemble(grid: Grid, medium: MediumField, data: ProblemData,
             weights: WeightPolicy | None = None, check_medium: bool = True) -> SparseLSSystem:
    weights = weights or WeightPolicy()
    data.validate(grid)
    if check_medium:
        report = check_admissibility(medium, grid)
        if not report.passed:
            raise AssemblyError("inadmissible medium: " + "; ".join(report.violations()))
    omega = float(data.omega)
    eps = {s: medium.sample("eps", s, grid.coords(s)) for s in SIDES}
    mu = {s: medium.sample("mu", s, grid.coords(s)) for s in SIDES}

    pde = sps.block_diag([_pde_block(grid, s, eps[s], mu[s], omega) for s in SIDES], format="csr")
    surf = _surface_rows(grid, eps, mu)
    R = sps.vstack([pde, surf.matrix()], format="csr")

    pde_group, pde_node, pde_side = [], [], []
    for si, s in enumerate(SIDES):
        nodes = grid.side_nodes[s]
        for g, count in zip(PDE_GROUPS, (3, 3, 1, 1)):
            pde_group.append(np.full(count * nodes.size, GROUPS.index(g)))
            pde_node.append(np.tile(nodes, count))
        pde_side.append(np.full(8 * nodes.size, si))
    # PDE rows are ordered by component block: curl_E (3 blocks), curl_H (3), div_muH, div_epsE
    row_group = np.concatenate(pde_group + surf.group)
    row_node = np.concatenate(pde_node + surf.node)
    n_surf = surf.n_rows
    row_side = np.concatenate(pde_side + [np.full(n_surf, -1)])

    hbar = float(np.prod(grid.h) ** (1.0 / 3.0))
    is_surface = row_side < 0
    w = np.where(is_surface, weights.surface_weight(grid), weights.pde)
    row_scale = np.where(is_surface, hbar ** 2, hbar ** 3)
    return SparseLSSystem(grid, medium, omega, weights, R, _rhs(grid, data), w,
                          row_group, row_node, row_side, row_scale)


@dataclass
class ResidualReport:
    groups: dict           # group -> discrete L2 norm (cell-measure scaled)
    groups_max: dict       # group -> max abs row residual
    total_weighted: float  # ||W (R x - b)||_2, the least-squares objective
    total_l2: float        # sqrt of sum of scaled group norms squared

    def as_dict(self) -> dict:
        return {"groups": self.groups, "groups_max": self.groups_max,
                "total_weighted": self.total_weighted, "total_l2": self.total_l2}


def residual(system: SparseLSSystem, state) -> ResidualReport:
    x = state.to_vector() if isinstance(state, ExtendedState) else np.asarray(state)
    if x.shape != (system.n_unknowns,):
        raise AssemblyError(f"state has {x.shape} entries, system needs {system.n_unknowns}")
    r = system.R @ x - system.b
    sq = np.abs(r) ** 2
    per_group = np.bincount(system.row_group, weights=sq * system.row_scale, minlength=len(GROUPS))
    groups = {g: float(np.sqrt(v)) for g, v in zip(GROUPS, per_group)}
    gmax = {}
    for gi, g in enumerate(GROUPS):
        sel = system.row_group == gi
        gmax[g] = float(np.abs(r[sel]).max(initial=0.0))
    return ResidualReport(groups, gmax, float(np.linalg.norm(system.w * r)),
                          float(np.sqrt(per_group.sum())))
