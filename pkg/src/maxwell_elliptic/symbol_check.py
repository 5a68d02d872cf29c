"""Frozen-coefficient ellipticity checks for the extended system.

The interior test evaluates the characteristic determinant of the block
operator [[curl, grad], [div, 0]]. The boundary test freezes coefficients at
a surface point in a rotated frame whose third axis is the normal,
Fourier-transforms in the tangential variables (d/dx_j -> -i sigma_j), and
asks whether the resulting constant-coefficient ODE in x3 admits a nonzero
decaying solution satisfying the homogeneous surface conditions. Each block
(E, alpha) and (H, beta) is tested separately.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
from scipy.spatial.transform import Rotation

INTERFACE, BOUNDARY = "interface", "boundary"
E_BLOCK, H_BLOCK = "E", "H"

SEPARATION = 1e-8
KERNEL_THRESHOLD = 1e-6

_LEVI = np.zeros((3, 3, 3))
_LEVI[0, 1, 2] = _LEVI[1, 2, 0] = _LEVI[2, 0, 1] = 1
_LEVI[0, 2, 1] = _LEVI[2, 1, 0] = _LEVI[1, 0, 2] = -1


class SymbolError(ValueError):
    pass


def operator_coefficients(div_weight: np.ndarray | None = None) -> np.ndarray:
    """Coefficient matrices A_j (j = 1..3) of [[curl, grad], [div, 0]] acting on (F, phi).

    ``div_weight`` replaces div F by div(W F) in the last row.
    """
    W = np.eye(3) if div_weight is None else np.asarray(div_weight)
    A = np.zeros((3, 4, 4), dtype=complex)
    for j in range(3):
        A[j, :3, :3] = _LEVI[:, j, :]
        A[j, j, 3] = 1.0
        A[j, 3, :3] = W[j, :]
    return A


def principal_symbol(sigma3d) -> np.ndarray:
    sigma3d = np.asarray(sigma3d, dtype=float)
    A = operator_coefficients()
    return 1j * np.einsum("j,jab->ab", sigma3d, A)


def principal_symbol_det(sigma3d) -> complex:
    return complex(np.linalg.det(principal_symbol(sigma3d)))


def ode_matrix(sigma, div_weight=None) -> np.ndarray:
    """Matrix G with U' = G U after the tangential Fourier transform."""
    A = operator_coefficients(div_weight)
    s1, s2 = sigma
    rhs = 1j * (s1 * A[0] + s2 * A[1])
    return np.linalg.solve(A[2], rhs)


def stable_subspace(G: np.ndarray, decaying_as: int, sigma_norm: float):
    """Orthonormal basis of solutions decaying as x3 -> decaying_as * infinity.

    Ordered complex Schur form; the leading block collects eigenvalues with
    real part of sign -decaying_as beyond the separation threshold.
    """
    thr = SEPARATION * sigma_norm
    if decaying_as > 0:
        select = lambda lam: lam.real < -thr
    else:
        select = lambda lam: lam.real > thr
    T, Z, sdim = scipy.linalg.schur(G, output="complex", sort=select)
    return Z[:, :sdim], np.diag(T)


@dataclass
class SymbolProblem:
    sigma: tuple
    eps_plus: np.ndarray
    eps_minus: np.ndarray
    mu_plus: np.ndarray
    mu_minus: np.ndarray
    rotation: np.ndarray = field(default_factory=lambda: np.eye(3))
    surface: str = INTERFACE
    anisotropic_divergence: bool = False

    def __post_init__(self):
        M = np.asarray(self.rotation, dtype=float)
        if M.shape != (3, 3) or np.abs(M.T @ M - np.eye(3)).max() > 1e-12:
            raise SymbolError("rotation must be orthogonal to 1e-12")
        if self.surface not in (INTERFACE, BOUNDARY):
            raise SymbolError(f"unknown surface kind {self.surface!r}")
        self.rotation = M
        for name in ("eps_plus", "eps_minus", "mu_plus", "mu_minus"):
            setattr(self, name, _as_tensor(getattr(self, name)))

    @property
    def sigma_norm(self) -> float:
        return float(np.hypot(*self.sigma))

    def rotated(self, name: str) -> np.ndarray:
        """M c M^T; scalar coefficients are unchanged by rotation."""
        M = self.rotation
        return M @ getattr(self, name) @ M.T


def _as_tensor(c) -> np.ndarray:
    c = np.asarray(c, dtype=complex)
    if c.ndim == 0:
        return c * np.eye(3)
    if c.shape != (3, 3):
        raise SymbolError("coefficient must be a scalar or 3x3 matrix")
    return c


@dataclass
class KernelReport:
    surface: str
    block: str
    sigma: tuple
    stable_dims: dict
    singular_values: np.ndarray
    eigenvalues: np.ndarray
    ansatz_residual: float | None = None
    ansatz_C: complex | None = None
    ansatz_a: complex | None = None
    structural_failure: bool = False

    @property
    def min_singular_value(self) -> float:
        return float(self.singular_values[-1]) if self.singular_values.size else 0.0

    @property
    def elliptic(self) -> bool:
        return (not self.structural_failure) and self.min_singular_value > KERNEL_THRESHOLD


def _tangential_rows():
    # rotated tangential part n x F with n = e3: (-F2, F1, 0)
    rows = np.zeros((2, 4))
    rows[0, 1] = -1.0
    rows[1, 0] = 1.0
    return rows


def _flux_row(coef):
    row = np.zeros((1, 4), dtype=complex)
    row[0, :3] = coef[2, :]
    return row


def _scalar_row():
    row = np.zeros((1, 4))
    row[0, 3] = 1.0
    return row


def _ansatz(sigma, side_sign):
    s1, s2 = sigma
    return np.array([1j * s1, 1j * s2, side_sign * np.hypot(s1, s2)])


def _fit_ansatz(Up, Um, sigma):
    """Least-squares C with E^± = C (i s1, i s2, ±|s|); returns residual, C, a."""
    ap, am = _ansatz(sigma, 1), _ansatz(sigma, -1)
    basis = np.concatenate([ap, am])
    target = np.concatenate([Up[:3], Um[:3]])
    C = np.vdot(basis, target) / np.vdot(basis, basis)
    scale = max(np.linalg.norm(np.concatenate([Up, Um])), 1e-300)
    resid = np.linalg.norm(target - C * basis) / scale
    a = 0.5 * (Up[3] + Um[3])
    return float(resid), complex(C), complex(a)


def lopatinsky_test(problem: SymbolProblem, block: str = E_BLOCK) -> KernelReport:
    sigma = tuple(float(v) for v in problem.sigma)
    snorm = problem.sigma_norm
    if snorm == 0:
        raise SymbolError("the test is only defined for nonzero tangential covector")
    if block not in (E_BLOCK, H_BLOCK):
        raise SymbolError(f"unknown block {block!r}")
    name = "eps" if block == E_BLOCK else "mu"
    coef_p = problem.rotated(f"{name}_plus")
    coef_m = problem.rotated(f"{name}_minus")

    def subspace(coef, direction):
        G = ode_matrix(sigma, coef if problem.anisotropic_divergence else None)
        return stable_subspace(G, direction, snorm)

    # the outer boundary sees only the plus medium on the side x3 < 0
    Qm, eig = subspace(coef_p if problem.surface == BOUNDARY else coef_m, -1)
    if problem.surface == BOUNDARY:
        dims = {"minus": Qm.shape[1]}
        if Qm.shape[1] != 2:
            return KernelReport(problem.surface, block, sigma, dims, np.zeros(0), eig,
                                structural_failure=True)
        if block == E_BLOCK:
            rows = _tangential_rows()
        else:
            rows = np.vstack([_flux_row(coef_p), _scalar_row()])
        Mcond = rows @ Qm
        sv = np.linalg.svd(Mcond, compute_uv=False)
        return KernelReport(problem.surface, block, sigma, dims, sv, eig)

    Qp, eig_p = subspace(coef_p, +1)
    dims = {"plus": Qp.shape[1], "minus": Qm.shape[1]}
    if Qp.shape[1] != 2 or Qm.shape[1] != 2:
        return KernelReport(problem.surface, block, sigma, dims, np.zeros(0), eig_p,
                            structural_failure=True)
    tang, scal = _tangential_rows(), _scalar_row()
    top = np.hstack([np.vstack([tang, scal]) @ Qp, -np.vstack([tang, scal]) @ Qm])
    flux = np.hstack([_flux_row(coef_p) @ Qp, -_flux_row(coef_m) @ Qm])
    Mcond = np.vstack([top[:2], flux, top[2:]])
    sv = np.linalg.svd(Mcond, compute_uv=False)

    # one-parameter family left after the tangential and scalar jump conditions
    _, _, vh = np.linalg.svd(top)
    c = vh[-1].conj()
    Up, Um = Qp @ c[:2], Qm @ c[2:]
    resid, C, a = _fit_ansatz(Up, Um, sigma)
    return KernelReport(problem.surface, block, sigma, dims, sv, eig_p,
                        ansatz_residual=resid, ansatz_C=C, ansatz_a=a)


def normal_flux_jump(coef_plus, coef_minus, sigma, C=1.0) -> complex:
    """⟦n · c E⟧ at x3 = 0 for the candidate E^± = C (i s1, i s2, ±|s|)."""
    cp, cm = _as_tensor(coef_plus), _as_tensor(coef_minus)
    return complex(C * (cp[2] @ _ansatz(sigma, 1) - cm[2] @ _ansatz(sigma, -1)))


# ----------------------------------------------------------------------


def random_spd(rng, low=0.1, high=10.0) -> np.ndarray:
    Q = Rotation.random(random_state=rng).as_matrix()
    lam = rng.uniform(low, high, size=3)
    return Q @ np.diag(lam) @ Q.T


def random_complex_scalar(rng) -> complex:
    return complex(rng.uniform(0.1, 10.0), rng.uniform(-10.0, 10.0))


def random_media(rng) -> dict:
    kind = "spd" if rng.random() < 0.5 else "scalar"
    draw = (lambda: random_spd(rng)) if kind == "spd" else (lambda: random_complex_scalar(rng))
    media = {name: draw() for name in ("eps_plus", "eps_minus", "mu_plus", "mu_minus")}
    media["kind"] = kind
    return media


def isotropic_media() -> dict:
    return {"eps_plus": 1.0, "eps_minus": 1.0, "mu_plus": 1.0, "mu_minus": 1.0, "kind": "scalar"}


@dataclass
class SweepRow:
    sample: int
    angle: float
    surface: str
    block: str
    min_singular_value: float
    stable_dims_ok: bool


@dataclass
class SweepReport:
    rows: list
    n_samples: int

    @property
    def min_singular_value(self) -> float:
        return min(r.min_singular_value for r in self.rows)

    @property
    def dims_ok(self) -> bool:
        return all(r.stable_dims_ok for r in self.rows)

    @property
    def elliptic(self) -> bool:
        return self.dims_ok and self.min_singular_value > KERNEL_THRESHOLD

    def verdict(self) -> str:
        return "elliptic" if self.elliptic else "not elliptic"

    def write_csv(self, path) -> None:
        import csv

        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["sample", "sigma_angle", "surface", "block", "min_singular_value",
                        "stable_dims_ok"])
            for r in self.rows:
                w.writerow([r.sample, f"{r.angle:.12g}", r.surface, r.block,
                            f"{r.min_singular_value:.12e}", int(r.stable_dims_ok)])


def media_sweep(n_samples: int, seed: int = 0, n_sigma: int = 64,
                surfaces=(INTERFACE, BOUNDARY), media=None, sigma_scale: float = 1.0,
                anisotropic_divergence: bool = False) -> SweepReport:
    """Lopatinsky test over random admissible media, rotations and sigma directions.

    ``media`` (a list of dicts as from ``random_media``) replaces the random draw.
    """
    if n_samples < 1:
        raise SymbolError("n_samples must be at least 1")
    rng = np.random.default_rng(seed)
    rows = []
    angles = 2 * np.pi * np.arange(n_sigma) / n_sigma
    for i in range(n_samples):
        m = media[i] if media is not None else random_media(rng)
        M = Rotation.random(random_state=rng).as_matrix()
        for theta in angles:
            sigma = (sigma_scale * np.cos(theta), sigma_scale * np.sin(theta))
            for surface in surfaces:
                prob = SymbolProblem(sigma, m["eps_plus"], m["eps_minus"], m["mu_plus"],
                                     m["mu_minus"], rotation=M, surface=surface,
                                     anisotropic_divergence=anisotropic_divergence)
                for block in (E_BLOCK, H_BLOCK):
                    rep = lopatinsky_test(prob, block)
                    rows.append(SweepRow(i, float(theta), surface, block,
                                         rep.min_singular_value, not rep.structural_failure))
    return SweepReport(rows, n_samples)
