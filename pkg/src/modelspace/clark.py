"""Aleksandrov-Clark measures and the isometric embeddings they induce.

For an inner function b and unimodular alpha the positive measure
sigma_b^alpha is defined by the Herglotz representation

    Re((alpha + b(z)) / (alpha - b(z))) = integral of the Poisson kernel
                                          against sigma_b^alpha.

Only the finitely-atomic case is computed exactly: for a finite Blaschke
product of degree n the measure consists of n boundary atoms located at the
solutions of ``b(xi) = alpha`` with masses ``1/|b'(xi)|``.  Inner functions
with a singular part are refused rather than silently approximated; the
identity checks accept a user-supplied measure instead.

Arc integrals of the Poisson and conjugate-Poisson kernels use closed-form
antiderivatives, which keeps the Volberg scans accurate arbitrarily close to
the boundary.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError
from .geometry import Arc
from .inner import InnerFunction, angular_derivative_modulus, evaluate
from .numerics import TWO_PI, gauss_legendre_arc, unimodular_roots
from .spaces import ModelElement, build_basis, fit_element

_BOUNDARY_TOL = 1e-9


@dataclass(frozen=True)
class MeasureSpec:
    """Finite atoms in the closed disk plus piecewise-constant boundary density."""

    atoms: tuple = ()           # ((complex location, float mass), ...)
    density_pieces: tuple = ()  # ((Arc, float density), ...)

    def __post_init__(self):
        atoms = tuple((complex(x), float(w)) for x, w in self.atoms)
        pieces = tuple((arc, float(d)) for arc, d in self.density_pieces)
        for x, w in atoms:
            if abs(x) > 1.0 + 1e-12:
                raise PreconditionError("atoms must lie in the closed disk")
            if w <= 0.0:
                raise PreconditionError("atom masses must be positive")
        for _, d in pieces:
            if d < 0.0:
                raise PreconditionError("densities must be nonnegative")
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "density_pieces", pieces)

    def total_mass(self) -> float:
        return (sum(w for _, w in self.atoms)
                + sum(d * arc.measure for arc, d in self.density_pieces))

    def scaled(self, c: float) -> "MeasureSpec":
        return MeasureSpec(tuple((x, c * w) for x, w in self.atoms),
                           tuple((arc, c * d) for arc, d in self.density_pieces))

    def is_boundary(self) -> bool:
        return all(abs(abs(x) - 1.0) <= _BOUNDARY_TOL for x, _ in self.atoms)

    def to_json(self) -> str:
        return json.dumps({
            "atoms": [{"re": x.real, "im": x.imag, "mass": w} for x, w in self.atoms],
            "density_pieces": [{"start": a.start, "end": a.start + a.length,
                                "density": d} for a, d in self.density_pieces],
        })

    @classmethod
    def from_dict(cls, data: dict) -> "MeasureSpec":
        allowed = {"atoms", "density_pieces"}
        unknown = set(data) - allowed
        if unknown:
            raise PreconditionError(f"unknown key in measure: {sorted(unknown)[0]!r}")
        atoms = tuple((complex(a["re"], a["im"]), a["mass"]) for a in data.get("atoms", []))
        pieces = tuple((Arc(p["start"], p["end"] - p["start"]), p["density"])
                       for p in data.get("density_pieces", []))
        return cls(atoms, pieces)

    @classmethod
    def from_json(cls, text: str) -> "MeasureSpec":
        return cls.from_dict(json.loads(text))


def lebesgue(density: float = 1.0) -> MeasureSpec:
    """The measure density * dm on the whole circle."""
    return MeasureSpec(density_pieces=((Arc(0.0, TWO_PI), density),))


def arcs_measure(arcs, density: float = 1.0) -> MeasureSpec:
    """chi_Sigma * density * dm for a list of arcs."""
    return MeasureSpec(density_pieces=tuple((a, density) for a in arcs))


# ---------------------------------------------------------------------------
# Poisson / Herglotz machinery with closed-form arc antiderivatives
# ---------------------------------------------------------------------------

def _poisson_antiderivative(s, r):
    """A(s) = (1/2pi) * integral_0^s P_r(u) du, continuous and increasing.

    A(s + 2*pi) = A(s) + 1; the principal piece is
    (1/pi) * arctan(((1+r)/(1-r)) * tan(s/2)).
    """
    s = np.asarray(s, dtype=float)
    k = np.floor((s + np.pi) / TWO_PI)
    srem = s - TWO_PI * k
    return k + np.arctan(np.tan(0.5 * srem) * (1.0 + r) / (1.0 - r)) / np.pi


def _conjugate_antiderivative(s, r):
    """(1/2pi) * integral of the conjugate Poisson kernel; periodic, no branch."""
    s = np.asarray(s, dtype=float)
    return -np.log(1.0 - 2.0 * r * np.cos(s) + r * r) / TWO_PI


def poisson_transform(mu: MeasureSpec, z):
    """Harmonic extension of a boundary measure at interior points.

    Atoms contribute mass * P_z(xi); each density piece contributes the
    closed-form arc integral of the Poisson kernel, so there is no loss of
    accuracy for z near the boundary.
    """
    if not mu.is_boundary():
        raise PreconditionError("Poisson transform requires boundary measure")
    z = np.asarray(z, dtype=complex)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    if np.any(np.abs(z) >= 1.0):
        raise PreconditionError("Poisson transform requires interior points")
    r = np.abs(z)
    phi = np.angle(z)
    out = np.zeros(z.shape, dtype=float)
    for x, w in mu.atoms:
        xi = x / abs(x)
        out += w * (1.0 - r ** 2) / np.abs(xi - z) ** 2
    for arc, d in mu.density_pieces:
        if d == 0.0:
            continue
        hi = _antideriv_masses(arc.start + arc.length - phi, r)
        lo = _antideriv_masses(arc.start - phi, r)
        out += d * (hi - lo)
    return float(out[0]) if scalar else out


def _antideriv_masses(s, r):
    # r may be an array aligned with s
    s = np.asarray(s, dtype=float)
    r = np.asarray(r, dtype=float)
    k = np.floor((s + np.pi) / TWO_PI)
    srem = s - TWO_PI * k
    return k + np.arctan(np.tan(0.5 * srem) * (1.0 + r) / (1.0 - r)) / np.pi


def herglotz_transform(mu: MeasureSpec, z):
    """H(z) = integral of (zeta + z)/(zeta - z) d mu(zeta) for boundary mu."""
    if not mu.is_boundary():
        raise PreconditionError("Herglotz transform requires boundary measure")
    z = np.asarray(z, dtype=complex)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    r = np.abs(z)
    phi = np.angle(z)
    out = np.zeros(z.shape, dtype=complex)
    for x, w in mu.atoms:
        xi = x / abs(x)
        out += w * (xi + z) / (xi - z)
    for arc, d in mu.density_pieces:
        if d == 0.0:
            continue
        real = _antideriv_masses(arc.start + arc.length - phi, r) \
            - _antideriv_masses(arc.start - phi, r)
        imag = _conjugate_antiderivative(arc.start + arc.length - phi, r) \
            - _conjugate_antiderivative(arc.start - phi, r)
        out += d * (real + 1j * imag)
    return complex(out[0]) if scalar else out


def herglotz_inversion(mu: MeasureSpec, z):
    """The function b in the closed unit ball with (1+b)/(1-b) = Herglotz(mu)."""
    h = herglotz_transform(mu, z)
    return (h - 1.0) / (h + 1.0)


# ---------------------------------------------------------------------------
# Clark measures of finite Blaschke products
# ---------------------------------------------------------------------------

def clark_measure(b: InnerFunction, alpha: complex) -> MeasureSpec:
    """sigma_b^alpha for finite Blaschke b: atoms at the solutions of b = alpha.

    Each atom at xi carries mass 1/|b'(xi)| (Ahern-Clark).  Inner functions
    with a singular part are refused: their Clark measures have a continuous
    singular component this package does not approximate.
    """
    if not b.is_blaschke:
        raise PreconditionError("exact Clark measures require finite Blaschke")
    angles = unimodular_roots(b, alpha)
    atoms = tuple((np.exp(1j * t), 1.0 / angular_derivative_modulus(b, t))
                  for t in angles)
    return MeasureSpec(atoms=atoms)


def cauchy_embed(b: InnerFunction, alpha: complex, h) -> ModelElement:
    """Clark's unitary embedding of L^2(sigma_b^alpha) onto the model space.

    ``(omega h)(z) = (1 - conj(alpha) b(z)) * sum_j h_j m_j / (1 - conj(xi_j) z)``
    returned in the Takenaka-Malmquist basis; in the finite atomic case the
    map is a full isometry, ``||omega h||_2 = ||h||_{L^2(sigma)}``.
    """
    sigma = clark_measure(b, alpha)
    h = np.asarray(h, dtype=complex)
    if h.shape != (len(sigma.atoms),):
        raise PreconditionError("value vector must match the Clark atoms")
    locations = np.array([x for x, _ in sigma.atoms])
    masses = np.array([w for _, w in sigma.atoms])

    def image(z):
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        cauchy = (h * masses) @ (1.0 / (1.0 - np.conj(locations)[:, None] * z[None, :]))
        return (1.0 - np.conj(alpha) * evaluate(b, z)) * cauchy

    return fit_element(build_basis(b), image)


def kapustin_partition(b: InnerFunction, target: Arc):
    """Boundary preimage b^{-1}(A) as a list of ``degree`` arcs.

    Endpoints are the boundary roots at the endpoints of A, paired along the
    increasing boundary argument of b, so the measure of the preimage is
    exact in the endpoints.
    """
    from .numerics import boundary_phase
    if not b.is_blaschke:
        raise PreconditionError("partition requires finite Blaschke")
    if target.length >= TWO_PI:
        raise PreconditionError("partition requires a proper sub-arc")
    starts = unimodular_roots(b, np.exp(1j * target.start))
    ends = unimodular_roots(b, np.exp(1j * (target.start + target.length)))
    arcs = []
    phi_starts = boundary_phase(b, starts)
    phi_ends = boundary_phase(b, ends)
    wrap = TWO_PI * b.degree
    for theta0, p0 in zip(starts, phi_starts):
        # the matching endpoint continues the argument by exactly the target
        # length; near the top of the phase range it wraps by 2*pi*degree
        want = p0 + target.length
        gap = np.minimum(np.abs(phi_ends - want), np.abs(phi_ends - want + wrap))
        theta1 = ends[int(np.argmin(gap))]
        arcs.append(Arc(float(theta0), float(np.mod(theta1 - theta0, TWO_PI))))
    return arcs


def aleksandrov_identity_residual(theta: InnerFunction, mu: MeasureSpec,
                                  probes=None) -> float:
    """Deviation from the isometric-embedding identity, over probe points.

    For each probe z the identity requires

        integral |(1 - conj(Theta(z)) Theta(zeta)) / (1 - conj(z) zeta)|^2 dmu(zeta)
            = (1 - |Theta(z)|^2) / (1 - |z|^2),

    and the reported residual is max over probes of |LHS - RHS| * (1 - |z|^2).
    Zero at probe resolution iff the embedding is isometric there.
    """
    if not mu.is_boundary():
        raise PreconditionError("identity check requires boundary measure")
    if probes is None:
        probes = default_probes()
    worst = 0.0
    for z in np.asarray(probes, dtype=complex):
        tz = evaluate(theta, z)
        lhs = 0.0
        for x, w in mu.atoms:
            xi = x / abs(x)
            lhs += w * abs((1.0 - np.conj(tz) * evaluate(theta, xi))
                           / (1.0 - np.conj(z) * xi)) ** 2
        for arc, d in mu.density_pieces:
            if d == 0.0:
                continue
            lhs += d * _arc_kernel_mass(theta, z, tz, arc)
        rhs = (1.0 - abs(tz) ** 2) / (1.0 - abs(z) ** 2)
        worst = max(worst, abs(lhs - rhs) * (1.0 - abs(z) ** 2))
    return worst


def _arc_kernel_mass(theta, z, tz, arc, tol=1e-11):
    """Adaptive arc integral of |k_z|^2 dm over one density arc."""
    panels = 4
    prev = None
    while panels <= 512:
        total = 0.0
        edges = arc.start + arc.length * np.linspace(0.0, 1.0, panels + 1)
        for lo, hi in zip(edges[:-1], edges[1:]):
            nodes, weights = gauss_legendre_arc(16, lo, hi)
            zeta = np.exp(1j * nodes)
            vals = np.abs((1.0 - np.conj(tz) * evaluate(theta, zeta))
                          / (1.0 - np.conj(z) * zeta)) ** 2
            total += float(np.sum(vals * weights)) / TWO_PI
        if prev is not None and abs(total - prev) <= tol * max(1.0, abs(total)):
            return total
        prev = total
        panels *= 2
    return prev


def default_probes():
    """100 interior probes: radii 1 - 2^-j (j=1..10) x 10 uniform angles."""
    radii = 1.0 - 2.0 ** (-np.arange(1, 11, dtype=float))
    angles = TWO_PI * np.arange(10) / 10.0
    return (radii[:, None] * np.exp(1j * angles)[None, :]).ravel()
