"""Self-contained numerical kernel.

Three ingredients the rest of the package relies on:

* periodic trapezoidal quadrature on the unit circle (with respect to the
  normalized measure ``dm = dtheta / 2*pi``),
* a cyclic Jacobi eigensolver for small dense Hermitian matrices,
* localization of boundary solutions of ``B(xi) = alpha`` for finite
  Blaschke products, by tracking the strictly increasing boundary argument.

All functions are pure; nothing here keeps state between calls.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericalError, PreconditionError

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class QuadratureRule:
    """Equispaced nodes on [0, 2*pi) with uniform weights summing to 1."""

    node_count: int
    nodes: np.ndarray
    weights: np.ndarray

    @classmethod
    def uniform(cls, node_count: int = 2048) -> "QuadratureRule":
        if node_count < 1:
            raise PreconditionError("node count must be positive")
        nodes = TWO_PI * np.arange(node_count) / node_count
        weights = np.full(node_count, 1.0 / node_count)
        return cls(node_count, nodes, weights)


def integrate_circle(f, rule: QuadratureRule | None = None) -> complex:
    """Mean of f over the unit circle, i.e. the integral against dm.

    ``f`` is either a callable evaluated at ``exp(i * nodes)`` or an array of
    samples matching the rule's nodes.  Trapezoidal on a periodic domain, so
    spectrally accurate for smooth integrands.
    """
    if rule is None:
        rule = QuadratureRule.uniform()
    if callable(f):
        samples = np.asarray(f(np.exp(1j * rule.nodes)))
    else:
        samples = np.asarray(f)
        if samples.shape != rule.nodes.shape:
            raise PreconditionError("sample array does not match quadrature nodes")
    if not np.all(np.isfinite(samples.real)) or not np.all(np.isfinite(samples.imag)):
        raise PreconditionError("non-finite integrand")
    return complex(np.sum(samples * rule.weights))


def integrate_circle_adaptive(f, tol: float = 1e-8, start: int = 2048,
                              cap: int = 2 ** 20) -> complex:
    """Circle integral with node doubling until two results agree within tol.

    Needed when the integrand has jump discontinuities (piecewise boundary
    densities); plain doubling halves the error per step there.
    """
    n = start
    prev = integrate_circle(f, QuadratureRule.uniform(n))
    while n < cap:
        n *= 2
        cur = integrate_circle(f, QuadratureRule.uniform(n))
        if abs(cur - prev) <= tol:
            return cur
        prev = cur
    return prev


def adaptive_simpson(f, a: float, b: float, tol: float = 1e-10,
                     max_depth: int = 40) -> float:
    """Adaptive Simpson rule for a real scalar function on [a, b].

    Used for the arc integrals of the Whitney sweep where the integrand is
    piecewise smooth (distance to a discrete cell set has kinks).
    """
    fa, fb = f(a), f(b)
    m = 0.5 * (a + b)
    fm = f(m)
    whole = (b - a) * (fa + 4.0 * fm + fb) / 6.0
    return _simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth)


def _simpson_rec(f, a, b, fa, fm, fb, whole, tol, depth):
    m = 0.5 * (a + b)
    lm, rm = 0.5 * (a + m), 0.5 * (m + b)
    flm, frm = f(lm), f(rm)
    left = (m - a) * (fa + 4.0 * flm + fm) / 6.0
    right = (b - m) * (fm + 4.0 * frm + fb) / 6.0
    if depth <= 0 or abs(left + right - whole) <= 15.0 * tol:
        return left + right + (left + right - whole) / 15.0
    return (_simpson_rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
            + _simpson_rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1))


def gauss_legendre_arc(n: int, a: float, b: float):
    """Gauss-Legendre nodes/weights transplanted to the interval [a, b]."""
    x, w = np.polynomial.legendre.leggauss(n)
    nodes = 0.5 * (b - a) * x + 0.5 * (a + b)
    weights = 0.5 * (b - a) * w
    return nodes, weights


# ---------------------------------------------------------------------------
# Hermitian eigenproblem (cyclic Jacobi)
# ---------------------------------------------------------------------------

_HERM_TOL = 1e-12


def check_hermitian(a: np.ndarray) -> np.ndarray:
    """Validate Hermitian symmetry (within 1e-12 relative) and return a copy."""
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise PreconditionError("not Hermitian: matrix must be square")
    scale = max(1.0, float(np.max(np.abs(a))))
    if np.max(np.abs(a - a.conj().T)) > _HERM_TOL * scale:
        raise PreconditionError("not Hermitian")
    return 0.5 * (a + a.conj().T)


def hermitian_eigensystem(a: np.ndarray):
    """Eigenvalues (ascending) and eigenvectors of a Hermitian matrix.

    Cyclic Jacobi with complex rotations; sweeps run until the off-diagonal
    Frobenius mass drops below 1e-14 * ||A||_F.  Dimensions in this package
    stay small (<= 64), where Jacobi is simple and backward stable.

    Returns ``(values, vectors)`` with ``vectors[:, i]`` the eigenvector for
    ``values[i]``.
    """
    a = check_hermitian(a)
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    norm = np.linalg.norm(a)
    if n == 1 or norm == 0.0:
        return np.array([a[0, 0].real]) if n == 1 else np.zeros(n), v

    target = 1e-14 * norm
    for _ in range(60):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off <= target:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                z = a[p, q]
                if abs(z) <= 1e-300:
                    continue
                app, aqq = a[p, p].real, a[q, q].real
                u = z / abs(z)
                tau = (aqq - app) / (2.0 * abs(z))
                t = np.sign(tau) / (abs(tau) + np.hypot(1.0, tau)) if tau != 0.0 else 1.0
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                # R acts on columns (p, q): [[c, s*u], [-s*conj(u), c]]
                col_p = c * a[:, p] - s * np.conj(u) * a[:, q]
                col_q = s * u * a[:, p] + c * a[:, q]
                a[:, p], a[:, q] = col_p, col_q
                row_p = c * a[p, :] - s * u * a[q, :]
                row_q = s * np.conj(u) * a[p, :] + c * a[q, :]
                a[p, :], a[q, :] = row_p, row_q
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                vp = c * v[:, p] - s * np.conj(u) * v[:, q]
                vq = s * u * v[:, p] + c * v[:, q]
                v[:, p], v[:, q] = vp, vq
    else:
        raise NumericalError("Jacobi iteration did not converge")

    values = np.real(np.diag(a))
    order = np.argsort(values, kind="stable")
    return values[order], v[:, order]


def hermitian_eigenvalues(a: np.ndarray) -> np.ndarray:
    """Ascending real eigenvalues of a Hermitian matrix."""
    values, _ = hermitian_eigensystem(a)
    return values


# ---------------------------------------------------------------------------
# Boundary argument tracking for finite Blaschke products
# ---------------------------------------------------------------------------

def _factor_phases(theta, angles):
    """Continuous boundary phase of each Blaschke factor at given angles.

    For a zero a = rho * exp(i*psi) the normalized factor
    ``(|a|/a)(a - z)/(1 - conj(a) z)`` has boundary argument

        pi + psi - theta + 2 * G(theta - psi),

    where G is the continuous increasing branch of arg(exp(it) - rho) with
    G(0) = 0.  A zero at the origin contributes theta itself.
    """
    angles = np.asarray(angles, dtype=float)
    total = np.zeros_like(angles)
    for a, mult in theta.zeros:
        rho = abs(a)
        if rho < 1e-300:
            total += mult * angles
            continue
        psi = np.angle(a)
        t = angles - psi
        k = np.floor(t / TWO_PI)
        s = t - TWO_PI * k
        g = np.mod(np.arctan2(np.sin(s), np.cos(s) - rho), TWO_PI)
        big_g = TWO_PI * k + g
        total += mult * (np.pi + psi - angles + 2.0 * big_g)
    return total


def boundary_phase(theta, angles):
    """Continuous increasing argument of a finite Blaschke product on T.

    Increases by ``2*pi*degree`` over one revolution.  Raises for inner
    functions with a singular part, whose boundary argument is not
    continuous.
    """
    if theta.singular_atoms:
        raise PreconditionError("argument tracking requires finite Blaschke")
    return theta.phase + _factor_phases(theta, angles)


def boundary_phase_derivative(theta, angles):
    """d/dtheta of the boundary phase: the Ahern-Clark sum on the circle."""
    angles = np.asarray(angles, dtype=float)
    total = np.zeros_like(angles)
    for a, mult in theta.zeros:
        rho = abs(a)
        psi = np.angle(a) if rho > 0 else 0.0
        denom = 1.0 - 2.0 * rho * np.cos(angles - psi) + rho * rho
        total += mult * (1.0 - rho * rho) / denom
    return total


def unimodular_roots(theta, alpha: complex, angular_tol: float = 1e-12) -> np.ndarray:
    """All boundary angles where a finite Blaschke product equals alpha.

    Exactly ``degree`` strictly increasing angles in [0, 2*pi).  Brackets are
    located on a uniform mesh of ``64 * degree`` points and refined by
    bisection (ties at mesh points go to the left half-open cell), then
    polished by Newton on the phase function.
    """
    if abs(abs(alpha) - 1.0) > 1e-10:
        raise PreconditionError("alpha must be unimodular")
    if theta.singular_atoms:
        raise PreconditionError("argument tracking requires finite Blaschke")
    n = theta.degree
    if n < 1:
        raise PreconditionError("degree must be at least 1")

    mesh = np.linspace(0.0, TWO_PI, 64 * n + 1)
    phi = boundary_phase(theta, mesh)
    a_target = float(np.angle(alpha))

    k0 = np.ceil((phi[0] - a_target) / TWO_PI)
    targets = a_target + TWO_PI * (k0 + np.arange(n))

    lo = np.empty(n)
    hi = np.empty(n)
    idx = np.searchsorted(phi, targets, side="left")
    exact = phi[np.minimum(idx, 64 * n)] == targets
    for j in range(n):
        i = int(idx[j])
        if exact[j]:
            # root sits on a mesh point: assign to the left half-open cell
            lo[j], hi[j] = mesh[max(i - 1, 0)], mesh[i]
        else:
            lo[j], hi[j] = mesh[i - 1], mesh[i]

    flo = boundary_phase(theta, lo)
    while np.max(hi - lo) > angular_tol:
        mid = 0.5 * (lo + hi)
        fmid = boundary_phase(theta, mid)
        take_left = fmid >= targets
        hi = np.where(take_left, mid, hi)
        lo = np.where(take_left, lo, mid)
        flo = np.where(take_left, flo, fmid)

    roots = 0.5 * (lo + hi)
    for _ in range(4):
        roots -= (boundary_phase(theta, roots) - targets) / boundary_phase_derivative(theta, roots)
    roots = np.mod(roots, TWO_PI)
    roots.sort()

    residual = np.abs(theta(np.exp(1j * roots)) - alpha)
    if np.max(residual) > 1e-10:
        raise NumericalError("boundary root residual exceeds 1e-10")
    return roots
