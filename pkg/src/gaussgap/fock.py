"""Brute-force oracle on a truncated Fock space.

Everything here is deliberately independent of the closed-form machinery:
operators are dense matrices on the occupation-number basis truncated at a
cutoff, the generator is assembled directly from the Hamiltonian and jump
operators, and traces are evaluated literally.  The closed-form modules are
validated against these numbers, never the other way round.

The gap oracle is restricted to the single-mode, number-conserving-
Hamiltonian family (kappa = 0, jumps mu*a and lambda*adag) whose stationary
density is exactly diagonal in the number basis, so the weighted inner
products of both embeddings are diagonal and free of uncontrolled
approximation.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import reduce

import numpy as np
from scipy.linalg import expm

from .errors import (
    ConsistencyError,
    DimensionTooLarge,
    NonDiagonalDensityWarning,
    OutsideEnvelope,
)
from .model import GklsModel, validate

__all__ = [
    "TruncatedSpace",
    "Superoperator",
    "build_space",
    "build_superoperator",
    "build_hamiltonian",
    "build_kraus",
    "weyl_matrix",
    "thermal_density",
    "steady_state",
    "oracle_char_fn",
    "oracle_kms_trace",
    "oracle_gap",
    "leakage_norm",
]

MAX_SPACE_DIM = 4096
MAX_SUPEROP_DIM = 64  # dense superoperator eigensolves stay below 4096^2 entries


@dataclass(frozen=True)
class TruncatedSpace:
    """Occupation-number basis with per-mode cutoff.

    a_ops[j] annihilates mode j; the canonical commutator holds exactly on
    states with occupation below the cutoff.
    """

    d: int
    cutoff: int
    dim: int
    a_ops: tuple

    def adag_ops(self):
        return tuple(a.conj().T for a in self.a_ops)

    def q_op(self, j):
        a = self.a_ops[j]
        return (a + a.conj().T) / np.sqrt(2.0)

    def p_op(self, j):
        a = self.a_ops[j]
        return 1j * (a.conj().T - a) / np.sqrt(2.0)

    def occupations(self):
        """Array (dim, d) of occupation numbers per basis state."""
        grids = np.meshgrid(
            *[np.arange(self.cutoff + 1)] * self.d, indexing="ij"
        )
        return np.column_stack([g.ravel() for g in grids])


def build_space(d: int, cutoff: int) -> TruncatedSpace:
    """Dense mode operators for d modes truncated at the given occupation."""
    if d < 1 or cutoff < 1:
        raise ValueError("need at least one mode and cutoff >= 1")
    dim = (cutoff + 1) ** d
    if dim > MAX_SPACE_DIM:
        raise DimensionTooLarge(
            f"truncated dimension {dim} exceeds the dense cap {MAX_SPACE_DIM}"
        )
    local = np.diag(np.sqrt(np.arange(1, cutoff + 1)), k=1).astype(complex)
    eye = np.eye(cutoff + 1, dtype=complex)
    a_ops = []
    for j in range(d):
        factors = [eye] * d
        factors[j] = local
        a_ops.append(reduce(np.kron, factors))
    return TruncatedSpace(d=d, cutoff=cutoff, dim=dim, a_ops=tuple(a_ops))


def build_hamiltonian(model: GklsModel, space: TruncatedSpace):
    """Quadratic Hamiltonian matrix from (omega, kappa, zeta)."""
    h = np.zeros((space.dim, space.dim), dtype=complex)
    a = space.a_ops
    ad = space.adag_ops()
    for j in range(model.d):
        for k in range(model.d):
            if model.omega[j, k] != 0:
                h += model.omega[j, k] * (ad[j] @ a[k])
            if model.kappa[j, k] != 0:
                h += 0.5 * model.kappa[j, k] * (ad[j] @ ad[k])
                h += 0.5 * np.conj(model.kappa[j, k]) * (a[j] @ a[k])
        if model.zeta[j] != 0:
            h += 0.5 * model.zeta[j] * ad[j] + 0.5 * np.conj(model.zeta[j]) * a[j]
    return h


def build_kraus(model: GklsModel, space: TruncatedSpace):
    """Jump operator matrices L_l = sum_k conj(v_lk) a_k + u_lk adag_k."""
    a = space.a_ops
    ad = space.adag_ops()
    ops = []
    for ell in range(model.m):
        mat = np.zeros((space.dim, space.dim), dtype=complex)
        for k in range(model.d):
            if model.v_mat[ell, k] != 0:
                mat += np.conj(model.v_mat[ell, k]) * a[k]
            if model.u_mat[ell, k] != 0:
                mat += model.u_mat[ell, k] * ad[k]
        ops.append(mat)
    return ops


@dataclass
class Superoperator:
    """Vectorized generator (column stacking) in both pictures."""

    space: TruncatedSpace
    predual: np.ndarray
    heisenberg: np.ndarray
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def trace_preservation_residual(self) -> float:
        """Norm of vec(1)^dagger applied to the predual generator; exact
        trace preservation holds even at truncation."""
        vec_id = np.eye(self.space.dim, dtype=complex).reshape(-1, order="F")
        return float(np.linalg.norm(vec_id.conj() @ self.predual))

    def apply_predual(self, rho):
        out = self.predual @ np.asarray(rho, dtype=complex).reshape(-1, order="F")
        return out.reshape((self.space.dim, self.space.dim), order="F")

    def apply_heisenberg(self, x):
        out = self.heisenberg @ np.asarray(x, dtype=complex).reshape(-1, order="F")
        return out.reshape((self.space.dim, self.space.dim), order="F")


def build_superoperator(model: GklsModel, space: TruncatedSpace) -> Superoperator:
    """Assemble the GKLS generator and its predual as dense matrices.

    The two pictures are built independently and checked against each other
    through the duality pairing tr(predual(rho) x) = tr(rho heisenberg(x))
    on pseudo-random matrices.
    """
    validate(model, strict=True)
    if space.dim > MAX_SUPEROP_DIM:
        raise DimensionTooLarge(
            f"superoperator for dim {space.dim} exceeds the dense cap "
            f"{MAX_SUPEROP_DIM}"
        )
    h = build_hamiltonian(model, space)
    kraus = build_kraus(model, space)
    dim = space.dim
    eye = np.eye(dim, dtype=complex)

    heis = 1j * (np.kron(eye, h) - np.kron(h.T, eye))
    pred = -1j * (np.kron(eye, h) - np.kron(h.T, eye))
    for ell in kraus:
        ldl = ell.conj().T @ ell
        anti = 0.5 * (np.kron(eye, ldl) + np.kron(ldl.T, eye))
        heis += np.kron(ell.T, ell.conj().T) - anti
        pred += np.kron(ell.conj(), ell) - anti

    rng = np.random.default_rng(31)
    for _ in range(2):
        rho = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        x = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        lhs = np.trace(
            (pred @ rho.reshape(-1, order="F")).reshape((dim, dim), order="F") @ x
        )
        rhs = np.trace(
            rho @ (heis @ x.reshape(-1, order="F")).reshape((dim, dim), order="F")
        )
        scale = max(1.0, abs(lhs), abs(rhs))
        if abs(lhs - rhs) > 1e-8 * scale:
            raise ConsistencyError(
                f"duality pairing violated: {lhs:.6e} vs {rhs:.6e}"
            )
    return Superoperator(space=space, predual=pred, heisenberg=heis)


def steady_state(superop: Superoperator):
    """Stationary density of the truncated generator: least-squares solve of
    the predual kernel with unit-trace constraint, then Hermitized."""
    dim = superop.space.dim
    vec_id = np.eye(dim).reshape(-1, order="F")
    system = np.vstack([superop.predual, vec_id[None, :]])
    rhs = np.zeros(dim * dim + 1, dtype=complex)
    rhs[-1] = 1.0
    sol, *_ = np.linalg.lstsq(system, rhs, rcond=None)
    rho = sol.reshape((dim, dim), order="F")
    rho = 0.5 * (rho + rho.conj().T)
    return rho / np.trace(rho).real


def thermal_density(space: TruncatedSpace, nbar: float):
    """Truncated single-mode thermal state diag((1-q) q^n), q = nbar/(1+nbar),
    renormalized to unit trace on the truncation."""
    if space.d != 1:
        raise OutsideEnvelope("thermal density helper is single mode only")
    if nbar < 0:
        raise ValueError("mean occupation must be non-negative")
    q = nbar / (1.0 + nbar)
    weights = q ** np.arange(space.dim, dtype=float)
    weights /= weights.sum()
    return np.diag(weights).astype(complex)


def weyl_matrix(space: TruncatedSpace, z):
    """exp(sum_j z_j adag_j - conj(z_j) a_j) on the truncated space."""
    z = np.asarray(z, dtype=complex).ravel()
    if z.shape[0] != space.d:
        raise OutsideEnvelope("argument length must match the number of modes")
    gen = np.zeros((space.dim, space.dim), dtype=complex)
    for j, (a, ad) in enumerate(zip(space.a_ops, space.adag_ops())):
        gen += z[j] * ad - np.conj(z[j]) * a
    return expm(gen)


def oracle_char_fn(space: TruncatedSpace, rho, z) -> complex:
    """tr(rho W(z)) by literal matrix evaluation."""
    return complex(np.trace(np.asarray(rho, dtype=complex) @ weyl_matrix(space, z)))


def _psd_sqrt(rho):
    evals, evecs = np.linalg.eigh(0.5 * (rho + rho.conj().T))
    clipped = np.clip(evals, 0.0, None)
    return (evecs * np.sqrt(clipped)) @ evecs.conj().T


def oracle_kms_trace(space: TruncatedSpace, rho, z, w) -> complex:
    """tr(rho^1/2 W(z) rho^1/2 W(w)) by explicit square root.

    Densities that are not number-basis diagonal lie outside the validated
    envelope; a warning is emitted and the value computed anyway.
    """
    rho = np.asarray(rho, dtype=complex)
    off = np.linalg.norm(rho - np.diag(np.diag(rho)))
    if off > 1e-10 * max(1.0, np.linalg.norm(rho)):
        warnings.warn(
            "density is not number-basis diagonal; split-trace oracle is "
            "outside its validated envelope",
            NonDiagonalDensityWarning,
            stacklevel=2,
        )
    root = _psd_sqrt(rho)
    return complex(
        np.trace(root @ weyl_matrix(space, z) @ root @ weyl_matrix(space, w))
    )


def leakage_norm(space: TruncatedSpace, mat) -> float:
    """Norm of the rows/columns of a matrix touching the top occupation
    level; measures how strongly truncation boundary terms act."""
    occ = space.occupations()
    top = np.any(occ == space.cutoff, axis=1)
    mat = np.asarray(mat)
    sub_rows = mat[top, :]
    sub_cols = mat[:, top]
    return float(np.sqrt(np.linalg.norm(sub_rows) ** 2 + np.linalg.norm(sub_cols) ** 2))


def _thermal_envelope(model: GklsModel):
    """Check the gap-oracle envelope and return (mu2, lambda2).

    Envelope: d = 1, kappa = 0, every jump operator proportional to a or to
    adag, and net damping (lambda2 < mu2).
    """
    if model.d != 1:
        raise OutsideEnvelope("gap oracle is single mode only")
    if np.max(np.abs(model.kappa)) > 1e-12:
        raise OutsideEnvelope("gap oracle requires kappa = 0 (thermal-diagonal family)")
    mu2 = 0.0
    lambda2 = 0.0
    for ell in range(model.m):
        u = complex(model.u_mat[ell, 0])
        v = complex(model.v_mat[ell, 0])
        if abs(u) > 1e-14 and abs(v) > 1e-14:
            raise OutsideEnvelope(
                "gap oracle requires each jump to be a pure raising or "
                "lowering operator"
            )
        mu2 += abs(v) ** 2
        lambda2 += abs(u) ** 2
    if lambda2 >= mu2:
        raise OutsideEnvelope("gap oracle requires net damping (lambda2 < mu2)")
    return mu2, lambda2


def oracle_gap(model: GklsModel, space: TruncatedSpace, mode="gns") -> float:
    """Spectral gap of the truncated embedded generator.

    The exactly-diagonal thermal stationary weights make both weighted inner
    products diagonal; the generator is conjugated into the corresponding
    orthonormal basis, symmetrized, projected off the invariant direction,
    and its least-negative remaining eigenvalue returned (sign flipped).
    """
    if mode not in ("gns", "kms"):
        raise ValueError(f"unknown mode {mode!r}")
    mu2, lambda2 = _thermal_envelope(model)
    nbar = lambda2 / (mu2 - lambda2)
    rho = thermal_density(space, nbar)
    pops = np.diag(rho).real
    superop = build_superoperator(model, space)

    dim = space.dim
    # diagonal metric weights at vec index l + m*dim (column stacking):
    # tr(rho x* y) weights by pops[m], tr(rho^1/2 x* rho^1/2 y) by the
    # geometric mean of row and column populations
    l_idx = np.tile(np.arange(dim), dim)
    m_idx = np.repeat(np.arange(dim), dim)
    if mode == "gns":
        w = pops[m_idx]
    else:
        w = np.sqrt(pops[m_idx] * pops[l_idx])
    w_root = np.sqrt(w)
    gmat = (w_root[:, None] / w_root[None, :]) * superop.heisenberg
    gsym = 0.5 * (gmat + gmat.conj().T)
    u = w_root * np.eye(dim).reshape(-1, order="F")
    u = u / np.linalg.norm(u)
    gsym = gsym - np.outer(u, u.conj() @ gsym)
    gsym = gsym - np.outer(gsym @ u, u.conj())
    gsym = 0.5 * (gsym + gsym.conj().T)
    evals = np.linalg.eigvalsh(gsym)
    # the projection pins one eigenvalue at zero (the invariant direction);
    # the gap is the distance from zero of the remaining spectrum
    return -float(evals[-2])
