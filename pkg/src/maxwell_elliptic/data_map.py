"""Compatibility maps between Maxwell data and extended elliptic data.

A Maxwell transmission problem with sources K, J, tangential jumps on Γ and
tangential boundary data on ∂Ω corresponds to the extended problem whose
remaining data are fixed by

    K_ν^Γ + iω B_ν^Γ = -div_τ E_τ^Γ,   iω D_ν^Γ - J_ν^Γ = div_τ H_τ^Γ,
    K_ν^0 + iω B_ν^0 = -div_τ E_τ^0,
    iω k = -div K,   iω j = div J,   α^Γ = β^Γ = β^0 = 0.

All derivatives here use the same discrete operators as the rest of the
package, so the relations hold exactly at the discrete level.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .assembly import ProblemData
from .discrete_ops import (GridField, SurfaceField, div_fd, jump, normal_component,
                           tangential_div, trace)
from .geometry import SIDES, Grid


class DataMapError(ValueError):
    pass


@dataclass
class MaxwellData:
    omega: float
    E_tau_gamma: SurfaceField
    H_tau_gamma: SurfaceField
    E_tau_0: SurfaceField
    K: GridField
    J: GridField

    @classmethod
    def zeros(cls, grid: Grid, omega: float) -> "MaxwellData":
        return cls(omega,
                   SurfaceField.zeros(grid, "gamma", 3), SurfaceField.zeros(grid, "gamma", 3),
                   SurfaceField.zeros(grid, "boundary", 3),
                   GridField.zeros(grid, 3), GridField.zeros(grid, 3))

    def __add__(self, other: "MaxwellData") -> "MaxwellData":
        return MaxwellData(self.omega, self.E_tau_gamma + other.E_tau_gamma,
                           self.H_tau_gamma + other.H_tau_gamma, self.E_tau_0 + other.E_tau_0,
                           self.K + other.K, self.J + other.J)

    def scaled(self, a: complex) -> "MaxwellData":
        return MaxwellData(self.omega, self.E_tau_gamma * a, self.H_tau_gamma * a,
                           self.E_tau_0 * a, self.K * a, self.J * a)


def source_traces(K: GridField, J: GridField, grid: Grid) -> dict:
    """Normal traces of K, J on ∂Ω and their normal jumps (plus minus minus) on Γ."""
    return {
        "K_nu_0": normal_component(trace(K, grid, "boundary", "outer")),
        "J_nu_0": normal_component(trace(J, grid, "boundary", "outer")),
        "K_nu_gamma": normal_component(jump(K, grid)),
        "J_nu_gamma": normal_component(jump(J, grid)),
    }


def predicted_fluxes(omega, div_tau_E_gamma, div_tau_H_gamma, div_tau_E_0,
                     K_nu_gamma, J_nu_gamma, K_nu_0, div_K, div_J) -> dict:
    """Elliptic data forced by Maxwell data, given the needed derivatives."""
    iw = 1j * omega
    return {
        "B_nu_gamma": (-div_tau_E_gamma - K_nu_gamma) / iw,
        "D_nu_gamma": (div_tau_H_gamma + J_nu_gamma) / iw,
        "B_nu_0": (-div_tau_E_0 - K_nu_0) / iw,
        "k": div_K * (-1.0 / iw),
        "j": div_J * (1.0 / iw),
    }


def maxwell_to_elliptic(md: MaxwellData, grid: Grid) -> ProblemData:
    if not md.omega > 0:
        raise DataMapError(f"omega must be positive, got {md.omega}")
    tr = source_traces(md.K, md.J, grid)
    pred = predicted_fluxes(
        md.omega,
        tangential_div(md.E_tau_gamma), tangential_div(md.H_tau_gamma), tangential_div(md.E_tau_0),
        tr["K_nu_gamma"], tr["J_nu_gamma"], tr["K_nu_0"],
        div_fd(md.K, grid), div_fd(md.J, grid),
    )
    zeros = ProblemData.zeros(grid, md.omega)
    return zeros.replace(
        K=md.K, J=md.J, k=pred["k"], j=pred["j"],
        E_tau_gamma=md.E_tau_gamma, H_tau_gamma=md.H_tau_gamma, E_tau_0=md.E_tau_0,
        B_nu_gamma=pred["B_nu_gamma"], D_nu_gamma=pred["D_nu_gamma"], B_nu_0=pred["B_nu_0"],
    )


def volume_norm(f: GridField, grid: Grid) -> float:
    total = 0.0
    for s in SIDES:
        sq = np.abs(f[s]) ** 2
        if sq.ndim == 2:
            sq = sq.sum(axis=1)
        total += float(grid.volume_weights[s] @ sq)
    return float(np.sqrt(total))


RELATIONS = ("B_nu_gamma", "D_nu_gamma", "B_nu_0", "k", "j", "alpha_gamma", "beta_gamma", "beta_0")


@dataclass
class CompatibilityReport:
    residuals: dict   # relation -> absolute residual norm
    scale: float      # overall data norm used for relative tolerances
    tol: float

    def relative(self, name: str) -> float:
        return self.residuals[name] / self.scale if self.scale > 0 else self.residuals[name]

    def flagged(self) -> list[str]:
        return [n for n in RELATIONS if self.residuals[n] > self.tol * self.scale]

    @property
    def passed(self) -> bool:
        return not self.flagged()

    def as_dict(self) -> dict:
        return {
            "passed": self.passed,
            "tolerance_relative": self.tol,
            "scale": self.scale,
            "residuals": {n: self.residuals[n] for n in RELATIONS},
            "flagged": self.flagged(),
        }


def data_norm(pd: ProblemData, grid: Grid) -> float:
    total = 0.0
    for name in ProblemData.VOLUME_FIELDS:
        total += volume_norm(getattr(pd, name), grid) ** 2
    for name in ProblemData.SURFACE_FIELDS:
        total += getattr(pd, name).norm() ** 2
    return float(np.sqrt(total))


def check_compatibility(pd: ProblemData, grid: Grid, tol: float = 1e-10) -> CompatibilityReport:
    """Residual of every relation, as datum minus the value the Maxwell data force."""
    tr = source_traces(pd.K, pd.J, grid)
    pred = predicted_fluxes(
        pd.omega,
        tangential_div(pd.E_tau_gamma), tangential_div(pd.H_tau_gamma), tangential_div(pd.E_tau_0),
        tr["K_nu_gamma"], tr["J_nu_gamma"], tr["K_nu_0"],
        div_fd(pd.K, grid), div_fd(pd.J, grid),
    )
    res = {
        "B_nu_gamma": (pd.B_nu_gamma - pred["B_nu_gamma"]).norm(),
        "D_nu_gamma": (pd.D_nu_gamma - pred["D_nu_gamma"]).norm(),
        "B_nu_0": (pd.B_nu_0 - pred["B_nu_0"]).norm(),
        "k": volume_norm(pd.k - pred["k"], grid),
        "j": volume_norm(pd.j - pred["j"], grid),
        "alpha_gamma": pd.alpha_gamma.norm(),
        "beta_gamma": pd.beta_gamma.norm(),
        "beta_0": pd.beta_0.norm(),
    }
    return CompatibilityReport(res, data_norm(pd, grid), tol)
