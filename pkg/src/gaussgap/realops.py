"""Algebra of real-linear operators on C^d.

A real-linear operator A acts as ``A z = a1 @ z + a2 @ conj(z)`` with complex
matrices a1, a2.  Identifying C^d with R^{2d} through z -> [Re z; Im z] turns
A into a real 2d x 2d matrix (its *realization*), and the same matrix read
with complex scalars is the complexification of A.  All spectral work in this
package happens on realizations; the (a1, a2) pairs are kept only as the
faithful parametrization of the model data.

The sharp adjoint is the adjoint with respect to the real scalar product
Re<., .>; on realizations it is the plain transpose.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .errors import DimensionMismatch

__all__ = [
    "RealLinearPair",
    "SymplecticForm",
    "realize",
    "realize_blocks",
    "sharp_adjoint",
    "pair_exp",
    "pair_from_matrix",
    "compose",
    "jmat",
    "vec2d",
    "unvec2d",
]


def vec2d(z):
    """Coordinates [Re z; Im z] in R^{2d} of a complex vector z."""
    z = np.asarray(z, dtype=complex).ravel()
    return np.concatenate([z.real, z.imag])


def unvec2d(x):
    """Inverse of :func:`vec2d`."""
    x = np.asarray(x, dtype=float).ravel()
    if x.size % 2:
        raise DimensionMismatch("2d coordinate vector has odd length")
    d = x.size // 2
    return x[:d] + 1j * x[d:]


def realize_blocks(a1, a2):
    """Real block matrix of the real-linear map z -> a1 z + a2 conj(z).

    Accepts rectangular m x d blocks (maps C^d -> C^m) and returns the
    2m x 2d realization
    ``[[Re a1 + Re a2, Im a2 - Im a1], [Im a1 + Im a2, Re a1 - Re a2]]``.
    """
    a1 = np.atleast_2d(np.asarray(a1, dtype=complex))
    a2 = np.atleast_2d(np.asarray(a2, dtype=complex))
    if a1.shape != a2.shape:
        raise DimensionMismatch(f"block shapes differ: {a1.shape} vs {a2.shape}")
    top = np.hstack([a1.real + a2.real, a2.imag - a1.imag])
    bot = np.hstack([a1.imag + a2.imag, a1.real - a2.real])
    return np.vstack([top, bot])


def jmat(d):
    """Realization [[0, I], [-I, 0]] of the multiplication z -> -i z."""
    j = np.zeros((2 * d, 2 * d))
    j[:d, d:] = np.eye(d)
    j[d:, :d] = -np.eye(d)
    return j


@dataclass(frozen=True)
class RealLinearPair:
    """A real-linear operator on C^d stored as its (a1, a2) pair."""

    dim_d: int
    a1: np.ndarray
    a2: np.ndarray

    def __post_init__(self):
        a1 = np.asarray(self.a1, dtype=complex)
        a2 = np.asarray(self.a2, dtype=complex)
        d = self.dim_d
        if d < 1:
            raise DimensionMismatch("dim_d must be a positive integer")
        if a1.shape != (d, d) or a2.shape != (d, d):
            raise DimensionMismatch(
                f"expected {d}x{d} blocks, got {a1.shape} and {a2.shape}"
            )
        object.__setattr__(self, "a1", a1)
        object.__setattr__(self, "a2", a2)

    @classmethod
    def zero(cls, d):
        return cls(d, np.zeros((d, d)), np.zeros((d, d)))

    @classmethod
    def identity(cls, d):
        return cls(d, np.eye(d), np.zeros((d, d)))

    @classmethod
    def conjugation_j(cls, d):
        """The operator z -> -i z."""
        return cls(d, -1j * np.eye(d), np.zeros((d, d)))

    def apply(self, z):
        z = np.asarray(z, dtype=complex).ravel()
        if z.size != self.dim_d:
            raise DimensionMismatch("vector length does not match dim_d")
        return self.a1 @ z + self.a2 @ np.conj(z)

    def realize(self):
        return realize_blocks(self.a1, self.a2)

    def sharp(self):
        """Adjoint for Re<., .>; its realization is the transpose."""
        return RealLinearPair(self.dim_d, self.a1.conj().T, self.a2.T)

    def compose(self, other: "RealLinearPair") -> "RealLinearPair":
        """Composition self o other as real-linear maps."""
        if other.dim_d != self.dim_d:
            raise DimensionMismatch("cannot compose pairs of different dimension")
        a1 = self.a1 @ other.a1 + self.a2 @ np.conj(other.a2)
        a2 = self.a1 @ other.a2 + self.a2 @ np.conj(other.a1)
        return RealLinearPair(self.dim_d, a1, a2)

    def __add__(self, other: "RealLinearPair") -> "RealLinearPair":
        if other.dim_d != self.dim_d:
            raise DimensionMismatch("cannot add pairs of different dimension")
        return RealLinearPair(self.dim_d, self.a1 + other.a1, self.a2 + other.a2)


@dataclass(frozen=True)
class SymplecticForm:
    """The symplectic form of the 2d phase space, j2d = [[0, I], [-I, 0]]."""

    dim_d: int
    j2d: np.ndarray

    @classmethod
    def standard(cls, d):
        return cls(d, jmat(d))


def realize(pair: RealLinearPair):
    """Real 2d x 2d realization of a pair (complexification when read over C)."""
    return pair.realize()


def sharp_adjoint(pair: RealLinearPair) -> RealLinearPair:
    """Adjoint with respect to Re<., .>: (a1, a2) -> (a1*, a2^T)."""
    return pair.sharp()


def pair_exp(pair: RealLinearPair, t: float):
    """Matrix exponential exp(t * realization(pair))."""
    if not np.isfinite(t):
        raise ValueError("time parameter must be finite")
    return expm(float(t) * pair.realize())


def pair_from_matrix(mat2d) -> RealLinearPair:
    """Recover the (a1, a2) pair from a 2d x 2d realization.

    Inverse of :func:`realize`; realizations determine pairs uniquely.
    """
    m = np.asarray(mat2d, dtype=float)
    n = m.shape[0]
    if m.shape != (n, n) or n % 2:
        raise DimensionMismatch("realization must be a square matrix of even size")
    d = n // 2
    b11, b12 = m[:d, :d], m[:d, d:]
    b21, b22 = m[d:, :d], m[d:, d:]
    re1, re2 = (b11 + b22) / 2.0, (b11 - b22) / 2.0
    im1, im2 = (b21 - b12) / 2.0, (b21 + b12) / 2.0
    return RealLinearPair(d, re1 + 1j * im1, re2 + 1j * im2)


def compose(a: RealLinearPair, b: RealLinearPair) -> RealLinearPair:
    return a.compose(b)
