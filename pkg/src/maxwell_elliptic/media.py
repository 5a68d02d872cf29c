"""Material coefficients ε, μ on each side of the interface."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import sympy as sp

from . import closed_form as cf
from .geometry import MINUS, SIDES, DomainSpec, Grid

SCALAR, MATRIX = "complex-scalar", "real-spd-matrix"


class MediumError(ValueError):
    pass


@dataclass(frozen=True)
class MaterialTensor:
    kind: str
    scalar: complex = 1.0
    matrix: np.ndarray | None = None

    def __post_init__(self):
        if self.kind == SCALAR:
            if not complex(self.scalar).real > 0:
                raise MediumError(f"scalar coefficient needs positive real part, got {self.scalar}")
        elif self.kind == MATRIX:
            m = np.asarray(self.matrix, dtype=float)
            if m.shape != (3, 3) or not np.allclose(m, m.T, atol=1e-12):
                raise MediumError("matrix coefficient must be a symmetric 3x3 matrix")
            if np.linalg.eigvalsh(m).min() <= 0:
                raise MediumError("matrix coefficient must be positive definite")
        else:
            raise MediumError(f"unknown coefficient kind {self.kind!r}")

    def as_matrix(self) -> np.ndarray:
        if self.kind == SCALAR:
            return complex(self.scalar) * np.eye(3, dtype=complex)
        return np.asarray(self.matrix, dtype=complex)


def _coefficient(value):
    """Normalise a user coefficient into a sympy scalar or 3x3 Matrix."""
    if isinstance(value, sp.MatrixBase):
        return sp.Matrix(value)
    if isinstance(value, np.ndarray) and value.shape == (3, 3):
        return sp.Matrix(value.tolist())
    if isinstance(value, (list, tuple)):
        return sp.Matrix(value)
    return sp.sympify(value)


@dataclass(frozen=True)
class MediumField:
    """Per-side ε, μ given as closed-form expressions in (x, y, z).

    Each entry is either a (possibly complex) scalar expression or a real
    symmetric 3x3 sympy Matrix.
    """

    eps_plus: object = 1
    eps_minus: object = 1
    mu_plus: object = 1
    mu_minus: object = 1

    def __post_init__(self):
        for name in ("eps_plus", "eps_minus", "mu_plus", "mu_minus"):
            object.__setattr__(self, name, _coefficient(getattr(self, name)))

    def coefficient(self, quantity: str, side: str):
        if quantity not in ("eps", "mu") or side not in SIDES:
            raise ValueError(f"bad coefficient request {quantity!r}/{side!r}")
        return getattr(self, f"{quantity}_{side}")

    def kind(self, quantity: str, side: str) -> str:
        return MATRIX if isinstance(self.coefficient(quantity, side), sp.MatrixBase) else SCALAR

    def sample(self, quantity: str, side: str, points: np.ndarray) -> np.ndarray:
        """Coefficient values at points as (N, 3, 3) complex matrices."""
        coef = self.coefficient(quantity, side)
        vals = cf.sample(coef, points)
        if vals.ndim == 1:
            return vals[:, None, None] * np.eye(3)
        return vals

    def is_constant(self) -> bool:
        coefs = (self.eps_plus, self.eps_minus, self.mu_plus, self.mu_minus)
        return all(not sp.sympify(c).free_symbols for c in coefs)


def constant_medium(eps_plus=1, eps_minus=1, mu_plus=1, mu_minus=1) -> MediumField:
    return MediumField(eps_plus, eps_minus, mu_plus, mu_minus)


def smooth_perturbation(eps_plus=1.0, eps_minus=2.0, mu_plus=1.0, mu_minus=1.0,
                        amplitude=0.25, wavenumber=1.0) -> MediumField:
    """Constant-per-side background times 1 + a·sin(kx)cos(ky)cos(kz)."""
    x, y, z = cf.X
    bump = 1 + amplitude * sp.sin(wavenumber * x) * sp.cos(wavenumber * y) * sp.cos(wavenumber * z)
    return MediumField(eps_plus * bump, eps_minus * bump, mu_plus, mu_minus)


def _in_side_closure(point, side: str, domain: DomainSpec, tol=1e-12) -> bool:
    p = np.asarray(point, dtype=float)
    lo, hi = (np.asarray(c, dtype=float) for c in domain.outer_box)
    ilo, ihi = (np.asarray(c, dtype=float) for c in domain.inner_box)
    if np.any(p < lo - tol) or np.any(p > hi + tol):
        return False
    in_closed = np.all(p >= ilo - tol) and np.all(p <= ihi + tol)
    in_open = np.all(p > ilo + tol) and np.all(p < ihi - tol)
    return bool(in_closed) if side == MINUS else not in_open


def eval_medium(field: MediumField, point, side: str, domain: DomainSpec,
                quantity: str = "eps") -> MaterialTensor:
    if not _in_side_closure(point, side, domain):
        raise MediumError(f"point {tuple(point)} is outside the closure of the {side} side")
    coef = field.coefficient(quantity, side)
    vals = cf.sample(coef, np.asarray(point, dtype=float).reshape(1, 3))[0]
    if isinstance(coef, sp.MatrixBase):
        if np.abs(vals.imag).max() > 0:
            raise MediumError("matrix coefficients must be real")
        return MaterialTensor(MATRIX, matrix=vals.real)
    return MaterialTensor(SCALAR, scalar=complex(vals))


@dataclass
class AdmissibilityReport:
    positivity: dict          # (quantity, side) -> min Re or min eigenvalue
    derivative_bound: dict    # (quantity, side) -> max |finite difference|
    symmetric: dict           # (quantity, side) -> matrix symmetry/reality holds

    @property
    def passed(self) -> bool:
        return (all(v > 0 for v in self.positivity.values())
                and all(np.isfinite(v) for v in self.derivative_bound.values())
                and all(self.symmetric.values()))

    def violations(self) -> list[str]:
        out = [f"{q}_{s}: min positivity {v:.3g}" for (q, s), v in self.positivity.items() if not v > 0]
        out += [f"{q}_{s}: non-finite derivative" for (q, s), v in self.derivative_bound.items()
                if not np.isfinite(v)]
        out += [f"{q}_{s}: not real symmetric" for (q, s), ok in self.symmetric.items() if not ok]
        return out

    def as_dict(self) -> dict:
        return {
            "passed": self.passed,
            "positivity": {f"{q}_{s}": float(v) for (q, s), v in self.positivity.items()},
            "derivative_bound": {f"{q}_{s}": float(v) for (q, s), v in self.derivative_bound.items()},
        }


def check_admissibility(field: MediumField, grid: Grid) -> AdmissibilityReport:
    from .discrete_ops import DiffOps

    ops = DiffOps.for_grid(grid)
    positivity, bound, symmetric = {}, {}, {}
    for q in ("eps", "mu"):
        for s in SIDES:
            vals = field.sample(q, s, grid.coords(s))
            if field.kind(q, s) == SCALAR:
                positivity[q, s] = float(vals[:, 0, 0].real.min())
                symmetric[q, s] = True
            else:
                sym = np.allclose(vals, np.swapaxes(vals, 1, 2), atol=1e-12)
                real = np.abs(vals.imag).max() <= 1e-14
                symmetric[q, s] = bool(sym and real)
                herm = 0.5 * (vals.real + np.swapaxes(vals.real, 1, 2))
                positivity[q, s] = float(np.linalg.eigvalsh(herm).min())
            flat = vals.reshape(len(vals), 9)
            worst = 0.0
            for d in range(3):
                deriv = ops.D[s][d] @ flat
                worst = max(worst, float(np.abs(deriv).max()))
            bound[q, s] = worst
    return AdmissibilityReport(positivity, bound, symmetric)
