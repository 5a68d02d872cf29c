"""Manufactured and exact solutions with closed-form data."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import sympy as sp

from . import closed_form as cf
from .assembly import ExtendedState, ProblemData
from .data_map import MaxwellData, predicted_fluxes
from .discrete_ops import GridField, SurfaceField
from .geometry import MINUS, PLUS, SIDES, Grid
from .media import MediumField, constant_medium


class OracleError(ValueError):
    pass


def _face_side(face, surface_side):
    return PLUS if face.surface == "boundary" else surface_side


@dataclass
class ManufacturedCase:
    """Closed-form (E, H, alpha, beta) per side together with the data they induce.

    Volume sources are read off the extended equations:
    K = curl E + grad alpha - iω μH, J = curl H + grad beta + iω εE,
    k = div(μH), j = div(εE). For alpha = beta = 0 these are Maxwell sources.
    """

    name: str
    omega: float
    medium: MediumField
    E: dict
    H: dict
    alpha: dict
    beta: dict

    def __post_init__(self):
        self.E = {s: cf.as_vector(self.E[s]) for s in SIDES}
        self.H = {s: cf.as_vector(self.H[s]) for s in SIDES}
        self.alpha = {s: sp.sympify(self.alpha[s]) for s in SIDES}
        self.beta = {s: sp.sympify(self.beta[s]) for s in SIDES}

    @classmethod
    def from_fields(cls, name, omega, medium, E, H, alpha=None, beta=None):
        """Build a case; E, H may be one expression for both sides or a side dict."""
        def per_side(v, default):
            if v is None:
                v = default
            return v if isinstance(v, dict) else {PLUS: v, MINUS: v}
        return cls(name, omega, medium, per_side(E, None), per_side(H, None),
                   per_side(alpha, 0), per_side(beta, 0))

    # symbolic quantities ------------------------------------------------
    def eps(self, s):
        return self.medium.coefficient("eps", s)

    def mu(self, s):
        return self.medium.coefficient("mu", s)

    def D(self, s):
        return cf.apply_coefficient(self.eps(s), self.E[s])

    def B(self, s):
        return cf.apply_coefficient(self.mu(s), self.H[s])

    def K(self, s):
        iw = sp.I * sp.nsimplify(self.omega)
        return cf.curl(self.E[s]) + cf.grad(self.alpha[s]) - iw * self.B(s)

    def J(self, s):
        iw = sp.I * sp.nsimplify(self.omega)
        return cf.curl(self.H[s]) + cf.grad(self.beta[s]) + iw * self.D(s)

    def k(self, s):
        return cf.div(self.B(s))

    def j(self, s):
        return cf.div(self.D(s))

    @property
    def maxwell_consistent(self) -> bool:
        return all(self.alpha[s] == 0 and self.beta[s] == 0 for s in SIDES)

    # sampling -------------------------------------------------------------
    def _volume(self, grid: Grid, fn) -> GridField:
        return GridField.from_function(grid, lambda s, p: cf.sample(fn(s), p))

    def _surface(self, grid: Grid, surface: str, fn) -> SurfaceField:
        """fn(face, side) -> expression; Γ data are plus-side minus minus-side."""
        def sample(face, pts):
            if surface == "boundary":
                return cf.sample(fn(face, PLUS), pts)
            return cf.sample(fn(face, PLUS), pts) - cf.sample(fn(face, MINUS), pts)
        return SurfaceField.from_function(grid, surface, sample)

    @staticmethod
    def _rot(face, vec):
        n = sp.Matrix(face.normal.astype(int).tolist())
        return n.cross(vec)

    @staticmethod
    def _dot(face, vec):
        n = sp.Matrix(face.normal.astype(int).tolist())
        return n.dot(vec)

    def exact_state(self, grid: Grid) -> ExtendedState:
        return ExtendedState(
            E=self._volume(grid, lambda s: self.E[s]),
            H=self._volume(grid, lambda s: self.H[s]),
            alpha=self._volume(grid, lambda s: self.alpha[s]),
            beta=self._volume(grid, lambda s: self.beta[s]),
        )

    def maxwell_data(self, grid: Grid) -> MaxwellData:
        return MaxwellData(
            omega=self.omega,
            E_tau_gamma=self._surface(grid, "gamma", lambda f, s: self._rot(f, self.E[s])),
            H_tau_gamma=self._surface(grid, "gamma", lambda f, s: self._rot(f, self.H[s])),
            E_tau_0=self._surface(grid, "boundary", lambda f, s: self._rot(f, self.E[s])),
            K=self._volume(grid, self.K),
            J=self._volume(grid, self.J),
        )

    def problem_data(self, grid: Grid) -> ProblemData:
        """Exact extended data: every datum is an exact trace, jump or derivative."""
        md = self.maxwell_data(grid)
        return ProblemData(
            omega=self.omega, K=md.K, J=md.J,
            k=self._volume(grid, self.k), j=self._volume(grid, self.j),
            E_tau_gamma=md.E_tau_gamma, H_tau_gamma=md.H_tau_gamma,
            D_nu_gamma=self._surface(grid, "gamma", lambda f, s: self._dot(f, self.D(s))),
            B_nu_gamma=self._surface(grid, "gamma", lambda f, s: self._dot(f, self.B(s))),
            alpha_gamma=self._surface(grid, "gamma", lambda f, s: self.alpha[s]),
            beta_gamma=self._surface(grid, "gamma", lambda f, s: self.beta[s]),
            E_tau_0=md.E_tau_0,
            B_nu_0=self._surface(grid, "boundary", lambda f, s: self._dot(f, self.B(s))),
            beta_0=self._surface(grid, "boundary", lambda f, s: self.beta[s]),
        )

    def closed_form_map(self, grid: Grid) -> dict:
        """The Maxwell-to-elliptic map with every derivative taken exactly.

        Tangential divergences are differentiated symbolically from n × E,
        so this path shares no discrete operator with data_map.
        """
        def div_tau(face, vec):
            g = self._rot(face, vec)
            return sum(sp.diff(g[t], cf.X[t]) for t in face.tangential)

        def normal(face, vec):
            return self._dot(face, vec)

        G, B = "gamma", "boundary"
        return predicted_fluxes(
            self.omega,
            self._surface(grid, G, lambda f, s: div_tau(f, self.E[s])),
            self._surface(grid, G, lambda f, s: div_tau(f, self.H[s])),
            self._surface(grid, B, lambda f, s: div_tau(f, self.E[s])),
            self._surface(grid, G, lambda f, s: normal(f, self.K(s))),
            self._surface(grid, G, lambda f, s: normal(f, self.J(s))),
            self._surface(grid, B, lambda f, s: normal(f, self.K(s))),
            self._volume(grid, lambda s: cf.div(self.K(s))),
            self._volume(grid, lambda s: cf.div(self.J(s))),
        )


# ----------------------------------------------------------------------


def plane_wave(eps=1, mu=1, omega=1.0, direction=(0, 0, 1), polarization=(1, 0, 0)) -> ManufacturedCase:
    d = np.asarray(direction, dtype=float)
    p = np.asarray(polarization, dtype=complex)
    if not np.isclose(np.linalg.norm(d), 1.0):
        raise OracleError("direction must be a unit vector")
    if abs(np.dot(p, d)) > 1e-12:
        raise OracleError("polarization must be orthogonal to the propagation direction")
    eps, mu, w = sp.nsimplify(eps), sp.nsimplify(mu), sp.nsimplify(omega)
    kmag = w * sp.sqrt(eps * mu)
    dvec = sp.Matrix([sp.nsimplify(v) for v in d])
    pvec = sp.Matrix([sp.nsimplify(v) for v in p])
    kvec = kmag * dvec
    phase = sp.exp(sp.I * (kvec.T * sp.Matrix(cf.X))[0])
    E = pvec * phase
    H = kvec.cross(pvec) / (w * mu) * phase
    return ManufacturedCase.from_fields("plane_wave", omega, constant_medium(eps, eps, mu, mu), E, H)


def impedance_coefficients(eps_plus, eps_minus, mu=1):
    """Normal-incidence reflection/transmission from wave impedances Z = sqrt(mu/eps)."""
    zp = np.sqrt(complex(mu) / complex(eps_plus))
    zm = np.sqrt(complex(mu) / complex(eps_minus))
    return (zm - zp) / (zm + zp), 2 * zm / (zm + zp)


def layered_wave(eps_plus=1, eps_minus=4, mu=1, omega=1.0, z0=0.0,
                 direction=(0, 0, -1)) -> ManufacturedCase:
    """Wave incident from the plus side onto the plane z = z0 (normal +z into plus).

    Plus side: incident + reflected; minus side: transmitted.
    """
    if tuple(np.asarray(direction, dtype=float)) != (0.0, 0.0, -1.0):
        raise OracleError("only normal incidence along -z is supported")
    ep, em, m = sp.nsimplify(eps_plus), sp.nsimplify(eps_minus), sp.nsimplify(mu)
    w = sp.nsimplify(omega)
    kp, km = w * sp.sqrt(ep * m), w * sp.sqrt(em * m)
    zp, zm = sp.sqrt(m / ep), sp.sqrt(m / em)
    r = (zm - zp) / (zm + zp)
    t = 2 * zm / (zm + zp)
    zeta = cf.z - sp.nsimplify(z0)
    inc, ref = sp.exp(-sp.I * kp * zeta), sp.exp(sp.I * kp * zeta)
    tra = sp.exp(-sp.I * km * zeta)
    E = {PLUS: sp.Matrix([inc + r * ref, 0, 0]), MINUS: sp.Matrix([t * tra, 0, 0])}
    H = {PLUS: sp.Matrix([0, (-inc + r * ref) / zp, 0]), MINUS: sp.Matrix([0, -t * tra / zm, 0])}
    case = ManufacturedCase.from_fields("layered", omega, constant_medium(ep, em, m, m), E, H)
    case.reflection, case.transmission = complex(r), complex(t)
    return case


_MMS_BASIS = None


def _mms_basis():
    global _MMS_BASIS
    if _MMS_BASIS is None:
        x, y, z = cf.X
        _MMS_BASIS = (sp.Integer(1), x, y, z, x * y, sp.sin(x + y), sp.cos(2 * z - y),
                      sp.sin(x) * sp.cos(z))
    return _MMS_BASIS


def default_mms_medium() -> MediumField:
    return constant_medium(eps_plus=1, eps_minus=2, mu_plus=1, mu_minus=sp.Rational(3, 2))


def general_mms(seed: int, omega: float = 1.0, medium: MediumField | None = None,
                scale: float = 1.0) -> ManufacturedCase:
    """Independent smooth fields per side, discontinuous across Γ, alpha = beta = 0.

    Coefficients are seeded integers in [-3, 3] on a fixed trig/polynomial basis.
    """
    rng = np.random.default_rng(seed)
    basis = _mms_basis()
    medium = medium or default_mms_medium()

    def vector():
        coeffs = rng.integers(-3, 4, size=(3, len(basis)))
        return sp.Matrix([sp.nsimplify(scale) * sum(int(c) * b for c, b in zip(row, basis))
                          for row in coeffs])

    E = {PLUS: vector(), MINUS: vector()}
    H = {PLUS: vector(), MINUS: vector()}
    return ManufacturedCase.from_fields(f"mms({seed})", omega, medium, E, H)
