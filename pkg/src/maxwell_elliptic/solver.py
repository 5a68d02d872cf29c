"""Preconditioned CGLS for the weighted least-squares system, plus the
equivalence checks (alpha constant, beta zero, Maxwell residuals)."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sps

from .assembly import ExtendedState, SparseLSSystem, residual
from .data_map import MaxwellData
from .discrete_ops import GridField, curl_fd
from .geometry import SIDES, Grid
from .media import MediumField

log = logging.getLogger(__name__)


class SolverError(RuntimeError):
    pass


@dataclass(frozen=True)
class SolverConfig:
    tol: float = 1e-10
    max_iter: int = 20000
    stagnation_window: int = 2000

    def __post_init__(self):
        if not 0 < self.tol < 1:
            raise ValueError(f"tol must lie in (0, 1), got {self.tol}")
        if self.max_iter < 1 or self.stagnation_window < 1:
            raise ValueError("max_iter and stagnation_window must be positive")


@dataclass
class SolveReport:
    iterations: int = 0
    converged: bool = True
    stagnated: bool = False
    final_residual: float = 0.0          # ||W (R x - b)||
    normal_residual: float = 0.0         # relative ||(WRD^-1)^H r|| / ||(WRD^-1)^H b||
    residual_history: list = field(default_factory=list, repr=False)
    groups: dict = field(default_factory=dict)
    alpha_variation: float = float("nan")
    beta_norm: float = float("nan")
    maxwell_residual: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "iterations": self.iterations, "converged": self.converged,
            "stagnated": self.stagnated, "final_residual": self.final_residual,
            "normal_residual": self.normal_residual, "groups": self.groups,
            "alpha_variation": self.alpha_variation, "beta_norm": self.beta_norm,
            "maxwell_residual": self.maxwell_residual,
        }


def cgls(A: sps.spmatrix, b: np.ndarray, config: SolverConfig, callback=None):
    """Conjugate gradients on the normal equations, column-scaled.

    Minimises ||A x - b|| with x = D^{-1} y, D = diag(column norms of A).
    Stops when ||B^H r|| <= tol ||B^H b|| for B = A D^{-1}; ||r|| is
    non-increasing by construction. Returns (x, info dict).
    """
    A = sps.csr_matrix(A)
    col_norm = np.sqrt(np.asarray(abs(A).power(2).sum(axis=0)).ravel())
    col_norm[col_norm == 0] = 1.0
    dinv = 1.0 / col_norm
    AH = A.conj().T.tocsr()

    y = np.zeros(A.shape[1], dtype=complex)
    r = b.astype(complex).copy()
    s = dinv * (AH @ r)
    s0 = np.linalg.norm(s)
    info = {"iterations": 0, "converged": True, "stagnated": False,
            "history": [float(np.linalg.norm(r))], "normal_residual": 0.0}
    if s0 == 0:
        return dinv * y, info
    p = s.copy()
    gamma = np.vdot(s, s).real
    best, best_at = 1.0, 0
    it = 0
    rel = 1.0
    for it in range(1, config.max_iter + 1):
        q = A @ (dinv * p)
        qq = np.vdot(q, q).real
        if qq == 0:
            break
        a = gamma / qq
        y += a * p
        r -= a * q
        s = dinv * (AH @ r)
        gamma_new = np.vdot(s, s).real
        rel = np.sqrt(gamma_new) / s0
        info["history"].append(float(np.linalg.norm(r)))
        if callback is not None:
            callback(it, rel)
        if rel <= config.tol:
            break
        if rel < best:
            best, best_at = rel, it
        elif it - best_at >= config.stagnation_window:
            info["stagnated"] = True
            break
        p = s + (gamma_new / gamma) * p
        gamma = gamma_new
    info["iterations"] = it
    info["normal_residual"] = float(rel)
    info["converged"] = bool(rel <= config.tol)
    return dinv * y, info


def solve(system: SparseLSSystem, config: SolverConfig | None = None):
    config = config or SolverConfig()
    A = system.weighted_operator()
    b = system.weighted_rhs()
    x, info = cgls(A, b, config)
    if not info["converged"]:
        log.warning("CGLS stopped after %d iterations (relative normal residual %.3e%s)",
                    info["iterations"], info["normal_residual"],
                    ", stagnated" if info["stagnated"] else "")
    state = ExtendedState.from_vector(system.grid, x)
    res = residual(system, x)
    report = SolveReport(
        iterations=info["iterations"], converged=info["converged"], stagnated=info["stagnated"],
        final_residual=res.total_weighted, normal_residual=info["normal_residual"],
        residual_history=info["history"], groups=res.groups,
    )
    return state, report


def dense_lstsq(system: SparseLSSystem) -> np.ndarray:
    """Direct dense least-squares reference for small systems.

    Cholesky on the normal equations. The constant-alpha null vector is
    fixed by a rank-one term, so the result has zero alpha mean in the
    Euclidean sense; compare states after ``remove_alpha_mean``.
    """
    import scipy.linalg

    A = system.weighted_operator()
    N = (A.conj().T @ A).toarray()
    rhs = A.conj().T @ system.weighted_rhs()
    null = ExtendedState.zeros(system.grid)
    null.alpha = null.alpha.map(lambda a: a + 1.0)
    v = null.to_vector()
    N += np.outer(v, v.conj()) / np.vdot(v, v).real
    return scipy.linalg.cho_solve(scipy.linalg.cho_factor(N), rhs)


def remove_alpha_mean(state: ExtendedState, grid: Grid) -> ExtendedState:
    """Shift alpha by its volume-weighted mean (alpha is fixed only up to a constant)."""
    mean = _alpha_mean(state, grid)
    return ExtendedState(state.E, state.H, state.alpha.map(lambda a: a - mean), state.beta)


def _alpha_mean(state, grid):
    w = grid.volume_weights
    num = sum(w[s] @ state.alpha[s] for s in SIDES)
    return num / sum(w[s].sum() for s in SIDES)


def maxwell_residuals(state: ExtendedState, grid: Grid, medium: MediumField,
                      md: MaxwellData) -> tuple[GridField, GridField]:
    """curl E - iω μH - K and curl H + iω εE - J with one-sided stencils."""
    iw = 1j * md.omega
    mu = {s: medium.sample("mu", s, grid.coords(s)) for s in SIDES}
    eps = {s: medium.sample("eps", s, grid.coords(s)) for s in SIDES}
    cE, cH = curl_fd(state.E, grid), curl_fd(state.H, grid)
    rE = GridField(*(cE[s] - iw * np.einsum("kij,kj->ki", mu[s], state.H[s]) - md.K[s] for s in SIDES))
    rH = GridField(*(cH[s] + iw * np.einsum("kij,kj->ki", eps[s], state.E[s]) - md.J[s] for s in SIDES))
    return rE, rH


def verify_equivalence(state: ExtendedState, grid: Grid, medium: MediumField,
                       md: MaxwellData, report: SolveReport | None = None) -> SolveReport:
    report = report or SolveReport()
    mean = _alpha_mean(state, grid)
    report.alpha_variation = float(max(np.abs(state.alpha[s] - mean).max() for s in SIDES))
    report.beta_norm = state.beta.max_abs()
    rE, rH = maxwell_residuals(state, grid, medium, md)
    report.maxwell_residual = {"curl_E": rE.max_abs(), "curl_H": rH.max_abs()}
    return report
