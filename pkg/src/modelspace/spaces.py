"""Finite-dimensional model spaces (B H^2)^perp for finite Blaschke B.

The space attached to a degree-n Blaschke product is spanned by the
Takenaka-Malmquist system

    e_k(z) = sqrt(1 - |a_k|^2) / (1 - conj(a_k) z) * prod_{j<k} b_{a_j}(z),

which is orthonormal in L^2(m) by construction, so every Gram eigenvalue
computed against it is directly a norm-equivalence constant.  Elements are
coefficient vectors in that basis; repeated zeros appear as confluent
factors in the chain.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import NumericalError, PreconditionError
from .inner import (InnerFunction, angular_derivative_modulus, evaluate,
                    expanded_zeros, frostman_shift)

_BOUNDARY_TOL = 1e-12


def kernel_eval(theta: InnerFunction, lam: complex, z: complex) -> complex:
    """Reproducing kernel k_lam(z) = (1 - conj(Theta(lam)) Theta(z)) / (1 - conj(lam) z).

    ``lam`` may sit on the boundary provided the angular derivative there is
    finite; the diagonal values are the squared kernel norms
    ``(1 - |Theta(lam)|^2)/(1 - |lam|^2)`` inside and ``|Theta'(lam)|`` on T.
    """
    lam = complex(lam)
    z = complex(z)
    lam_boundary = abs(lam) > 1.0 - _BOUNDARY_TOL
    if lam_boundary:
        if not np.isfinite(angular_derivative_modulus(theta, np.angle(lam))):
            raise PreconditionError("kernel undefined at boundary point")
        lam = lam / abs(lam)
    if abs(1.0 - np.conj(lam) * z) < _BOUNDARY_TOL:
        if lam_boundary:
            return complex(angular_derivative_modulus(theta, np.angle(lam)))
        return (1.0 - abs(evaluate(theta, lam)) ** 2) / (1.0 - abs(lam) ** 2)
    return (1.0 - np.conj(evaluate(theta, lam)) * evaluate(theta, z)) / (1.0 - np.conj(lam) * z)


@dataclass(frozen=True)
class ModelBasis:
    """Orthonormal Takenaka-Malmquist basis of (B H^2)^perp."""

    generator: InnerFunction
    ordering: tuple  # zeros with multiplicity expanded, chain order

    @property
    def dimension(self) -> int:
        return len(self.ordering)

    def eval_matrix(self, z) -> np.ndarray:
        """Basis values e_k(z): shape (dimension, len(z))."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        n = self.dimension
        out = np.empty((n, z.size), dtype=complex)
        running = np.ones(z.size, dtype=complex)
        for k, a in enumerate(self.ordering):
            out[k] = np.sqrt(1.0 - abs(a) ** 2) / (1.0 - np.conj(a) * z) * running
            if abs(a) < 1e-300:
                running = running * z
            else:
                running = running * (abs(a) / a) * (a - z) / (1.0 - np.conj(a) * z)
        return out


def build_basis(b: InnerFunction) -> ModelBasis:
    """Takenaka-Malmquist basis for a finite Blaschke product of degree >= 1."""
    if not b.is_blaschke:
        raise PreconditionError("finite-dimensional basis requires finite Blaschke")
    if b.degree < 1:
        raise PreconditionError("degree must be at least 1")
    return ModelBasis(generator=b, ordering=tuple(expanded_zeros(b)))


@dataclass(frozen=True)
class ModelElement:
    """Coefficient vector of an element of (B H^2)^perp."""

    basis: ModelBasis
    coefficients: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coefficients, dtype=complex)
        if c.shape != (self.basis.dimension,):
            raise PreconditionError("coefficient length must match basis dimension")
        object.__setattr__(self, "coefficients", c)

    def norm(self) -> float:
        return float(np.linalg.norm(self.coefficients))

    def __call__(self, z):
        return evaluate_element(self, z)

    def to_json(self) -> str:
        return json.dumps({
            "generator": json.loads(self.basis.generator.to_json()),
            "coefficients": [{"re": c.real, "im": c.imag} for c in self.coefficients],
        })

    @classmethod
    def from_json(cls, text: str) -> "ModelElement":
        data = json.loads(text)
        basis = build_basis(InnerFunction.from_dict(data["generator"]))
        coeffs = np.array([complex(c["re"], c["im"]) for c in data["coefficients"]])
        return cls(basis, coeffs)


def evaluate_element(f: ModelElement, z):
    """Pointwise value sum_k c_k e_k(z)."""
    z = np.asarray(z, dtype=complex)
    scalar = z.ndim == 0
    values = f.coefficients @ f.basis.eval_matrix(np.atleast_1d(z))
    return complex(values[0]) if scalar else values


_FIT_NODE_RADIUS = 0.5


def fit_nodes(n: int) -> np.ndarray:
    """Deterministic interpolation nodes 0.5 * exp(2*pi*i*j/(2n)), j < n."""
    return _FIT_NODE_RADIUS * np.exp(1j * np.pi * np.arange(n) / n)


def fit_element(basis: ModelBasis, fn) -> ModelElement:
    """Coefficients of a function known to lie in the span, by interpolation.

    Solves the square system e_k(z_j) c_k = fn(z_j) at the deterministic
    interior node set; raises when the node matrix is ill-conditioned.
    """
    n = basis.dimension
    nodes = fit_nodes(n)
    matrix = basis.eval_matrix(nodes).T
    values = np.atleast_1d(np.asarray(fn(nodes), dtype=complex))
    if np.linalg.cond(matrix) > 1e12:
        raise NumericalError("resample nodes")
    coeffs = np.linalg.solve(matrix, values)
    return ModelElement(basis, coeffs)


def kernel_element(basis: ModelBasis, lam: complex) -> ModelElement:
    """The reproducing kernel k_lam expanded in the basis.

    Uses conj(e_k(lam)) as coefficients, which is exact: <k_lam, e_k> =
    conj(<e_k, k_lam>) = conj(e_k(lam)).
    """
    lam = complex(lam)
    if abs(lam) > 1.0 - _BOUNDARY_TOL:
        lam = lam / abs(lam)
        if not np.isfinite(angular_derivative_modulus(basis.generator, np.angle(lam))):
            raise PreconditionError("kernel undefined at boundary point")
    coeffs = np.conj(basis.eval_matrix(np.array([lam]))[:, 0])
    return ModelElement(basis, coeffs)


def crofoot(theta: InnerFunction, a: complex, f: ModelElement) -> ModelElement:
    """Crofoot transform: unitary map onto the model space of the shifted product.

    Pointwise ``(U f)(z) = sqrt(1-|a|^2) f(z) / (1 - conj(a) Theta(z))``; the
    result is returned in the Takenaka-Malmquist basis of the degree-preserving
    shift of Theta by a (the two candidate target spaces differ by a
    unimodular constant and therefore coincide).
    """
    a = complex(a)
    if abs(a) >= 1.0:
        raise PreconditionError("Crofoot parameter must lie inside the disk")
    if not theta.is_blaschke:
        raise PreconditionError("Crofoot transform requires finite Blaschke")
    if f.basis.generator != theta:
        raise PreconditionError("element does not belong to the model space of Theta")
    if a == 0.0:
        return ModelElement(f.basis, f.coefficients.copy())
    target = build_basis(frostman_shift(theta, a))
    scale = np.sqrt(1.0 - abs(a) ** 2)

    def image(z):
        return scale * evaluate_element(f, z) / (1.0 - np.conj(a) * evaluate(theta, z))

    return fit_element(target, image)
