"""Spectral gaps of the embedded semigroup, closed forms and diagnostics.

For a stable drift with faithful invariant state the contraction semigroup
obtained by right multiplication with the square root of the invariant
density has decay rate g = -omega0/2, where omega0 is the greatest eigenvalue
of the Hermitian matrix

    B = T^{1/2} Z T^{-1/2} + T^{-1/2} Z^T T^{1/2},      T = s_tilde,

equivalently -omega0 is the smallest eigenvalue of cz T^{-1}.  The symmetric
split embedding (density root on both sides) obeys the same construction
with the real covariance s_breve in place of s_tilde.  Both routes are always
computed and must agree; disagreements raise, they are never averaged away.

When the drift is unstable or cz is singular there is no gap in the
one-sided embedding; no_gap_diagnosis produces a checkable witness for the
failing condition.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ConsistencyError, NoFaithfulState, NotFaithful
from .model import DriftDiffusion, kraus_rank_full
from .stationary import StationaryData, is_stable, solve_stationary

__all__ = [
    "GapReport",
    "Finding",
    "optimal_growth_rate",
    "gns_gap",
    "kms_gap",
    "one_dim_closed_forms",
    "OneDimClosedForms",
    "no_gap_diagnosis",
    "analyze",
    "hermitian_root_pair",
    "fix_phase",
]

ROUTE_TOL = 1e-10


def fix_phase(v):
    """Normalize a vector and rotate its global phase so the largest-modulus
    entry is real positive (first such entry on ties)."""
    v = np.asarray(v, dtype=complex).ravel()
    nrm = np.linalg.norm(v)
    if nrm == 0:
        return v
    v = v / nrm
    idx = int(np.argmax(np.abs(v)))
    pivot = v[idx]
    if abs(pivot) > 0:
        v = v * (abs(pivot) / pivot)
    out = v.copy()
    out[idx] = abs(out[idx])
    return out


def hermitian_root_pair(mat, clip=1e-13):
    """Square root and inverse square root of a Hermitian PD matrix.

    Eigenvalues below clip * lambda_max mean the state is effectively on the
    pure boundary; that raises NotFaithful instead of being regularized,
    since regularization would fabricate a gap.
    """
    mat = np.asarray(mat)
    herm = 0.5 * (mat + mat.conj().T)
    evals, evecs = np.linalg.eigh(herm)
    if evals[0] <= clip * max(evals[-1], 0.0):
        raise NotFaithful(
            f"covariance is singular at working precision (min eig {evals[0]:.3e})"
        )
    root = (evecs * np.sqrt(evals)) @ evecs.conj().T
    inv_root = (evecs / np.sqrt(evals)) @ evecs.conj().T
    return root, inv_root


def optimal_growth_rate(y) -> float:
    """Largest eigenvalue of y + y*; the least omega with
    ||exp(t y) v||^2 <= exp(t omega) ||v||^2 for all t >= 0 and all v."""
    y = np.asarray(y)
    h = y + y.conj().T
    return float(np.linalg.eigvalsh(h)[-1])


@dataclass(frozen=True)
class GapComputation:
    omega0: float
    g: float
    witness: np.ndarray
    #: smallest eigenvalue of the dissipation form (route-b matrix)
    dissipation_min_eig: float


def gns_gap(dd: DriftDiffusion, st: StationaryData) -> GapComputation:
    """Decay rate of the one-sided embedding.

    omega0 is computed by the Hermitian similarity route and by the
    cz-quadratic-form route; both must agree to ROUTE_TOL.  When cz is
    singular the gap is reported as exactly zero.
    """
    if not st.faithful:
        raise NotFaithful("one-sided gap needs a faithful invariant state")
    root, inv_root = hermitian_root_pair(st.s_tilde)
    zc = dd.z2d.astype(complex)
    sim = root @ zc @ inv_root
    h1 = sim + sim.conj().T
    h1 = 0.5 * (h1 + h1.conj().T)
    evals, evecs = np.linalg.eigh(h1)
    omega0 = float(evals[-1])
    k_form = inv_root @ dd.cz @ inv_root
    k_form = 0.5 * (k_form + k_form.conj().T)
    k_min = float(np.linalg.eigvalsh(k_form)[0])
    if abs(omega0 + k_min) > ROUTE_TOL * max(1.0, abs(omega0)):
        raise ConsistencyError(
            f"gap routes disagree: similarity {omega0:.3e} vs form {-k_min:.3e}"
        )
    g = 0.0 if not kraus_rank_full(dd) else -omega0 / 2.0
    return GapComputation(
        omega0=omega0,
        g=g,
        witness=fix_phase(evecs[:, -1]),
        dissipation_min_eig=k_min,
    )


@dataclass(frozen=True)
class KmsGapComputation:
    omega0: float
    g: float
    witness: np.ndarray
    #: smallest eigenvalue of kbreve = -(Z^T s_breve + s_breve Z)
    kbreve_min_eig: float
    #: kernel condition of the gap theorem: kbreve strictly positive
    kernel_condition_ok: bool


def kms_gap(dd: DriftDiffusion, st: StationaryData) -> KmsGapComputation:
    """Decay rate of the split embedding, all in real arithmetic.

    Also reports the smallest eigenvalue of
    kbreve = -(Z^T s_breve + s_breve Z); a singular kbreve means the
    sharpness hypothesis of the split-embedding gap theorem fails and the
    returned rate is only an upper-bound candidate.
    """
    if not st.faithful or st.s_breve is None:
        raise NotFaithful("split-embedding gap needs a faithful invariant state")
    root, inv_root = hermitian_root_pair(st.s_breve)
    root, inv_root = root.real, inv_root.real
    z2d = dd.z2d
    b = root @ z2d @ inv_root + inv_root @ z2d.T @ root
    b = 0.5 * (b + b.T)
    evals, evecs = np.linalg.eigh(b)
    omega0 = float(evals[-1])
    kbreve = -(z2d.T @ st.s_breve + st.s_breve @ z2d)
    kbreve = 0.5 * (kbreve + kbreve.T)
    kb_min = float(np.linalg.eigvalsh(kbreve)[0])
    # cross-check: B = -inv_root kbreve inv_root is an algebraic identity
    alt = -float(np.linalg.eigvalsh(inv_root @ kbreve @ inv_root)[0])
    if abs(omega0 - alt) > ROUTE_TOL * max(1.0, abs(omega0)):
        raise ConsistencyError(
            f"split-gap routes disagree: {omega0:.3e} vs {alt:.3e}"
        )
    scale = max(1.0, float(np.linalg.norm(kbreve, 2)))
    return KmsGapComputation(
        omega0=omega0,
        g=-omega0 / 2.0,
        witness=fix_phase(evecs[:, -1]).real,
        kbreve_min_eig=kb_min,
        kernel_condition_ok=bool(kb_min > 1e-10 * scale),
    )


@dataclass(frozen=True)
class OneDimClosedForms:
    gamma: float
    g: float
    g_breve: float
    sigma: float
    exists_faithful: bool


def one_dim_closed_forms(mu2, lambda2, omega_h, kappa_h) -> OneDimClosedForms:
    """Closed forms for the single-mode family (jumps mu*a, lambda*adag,
    Hamiltonian omega*adag*a + kappa*(adag^2+a^2)/2), 0 <= lambda2 < mu2.

    gamma = (mu2 - lambda2)/2, and with D = gamma^2 + omega^2 - kappa^2 > 0:

        g       = gamma * (1 - |kappa| (mu2+lambda2)
                            / (2 sqrt(mu2 lambda2 (gamma^2+omega^2) + gamma^2 kappa^2)))
        g_breve = gamma * (1 - |kappa| / sqrt(omega^2 + gamma^2))
        sigma   = (mu2+lambda2)/(2 gamma) * sqrt((gamma^2+omega^2)/D)

    g is one half of the smallest eigenvalue of cz s_tilde^{-1}; at
    lambda = 0 the noise form is singular and g vanishes identically.
    Faithfulness additionally needs lambda and kappa not both zero (else the
    invariant state is the pure vacuum); that boundary raises too.
    """
    mu2 = float(mu2)
    lambda2 = float(lambda2)
    omega_h = float(omega_h)
    kappa_h = float(kappa_h)
    if not 0 <= lambda2 < mu2:
        raise ValueError("family requires 0 <= lambda2 < mu2")
    gamma = 0.5 * (mu2 - lambda2)
    disc = gamma**2 + omega_h**2 - kappa_h**2
    if disc <= 0:
        raise NoFaithfulState(
            f"gamma^2 + omega^2 - kappa^2 = {disc:.6g} <= 0: "
            "no faithful invariant state"
        )
    if lambda2 == 0.0 and kappa_h == 0.0:
        # pure damping relaxes to the vacuum: sigma = 1, pure boundary
        raise NoFaithfulState(
            "lambda = kappa = 0 drives the system to the pure vacuum state"
        )
    denom = 2.0 * np.sqrt(mu2 * lambda2 * (gamma**2 + omega_h**2) + gamma**2 * kappa_h**2)
    g = gamma * (1.0 - abs(kappa_h) * (mu2 + lambda2) / denom)
    g_breve = gamma * (1.0 - abs(kappa_h) / np.sqrt(omega_h**2 + gamma**2))
    sigma = (mu2 + lambda2) / (2.0 * gamma) * np.sqrt((gamma**2 + omega_h**2) / disc)
    return OneDimClosedForms(
        gamma=gamma,
        g=float(g),
        g_breve=float(g_breve),
        sigma=float(sigma),
        exists_faithful=True,
    )


@dataclass(frozen=True)
class Finding:
    """One no-gap diagnostic with its numerically checkable witness."""

    kind: str  # "GapExists" | "Unstable" | "CZKernel"
    message: str
    eigenvalue: Optional[complex] = None
    eigenvector: Optional[np.ndarray] = None
    case: Optional[int] = None
    kernel_vector: Optional[np.ndarray] = None
    residual: Optional[float] = None


def _krylov_span(z2d, seeds, tol=1e-10):
    """Orthonormal basis of the smallest Z-invariant subspace containing the
    seed vectors."""
    n = z2d.shape[0]
    basis = []

    def add(vec):
        w = vec.astype(float).copy()
        for b in basis:
            w -= (b @ w) * b
        nrm = np.linalg.norm(w)
        if nrm > tol * max(1.0, np.linalg.norm(vec)):
            basis.append(w / nrm)
            return True
        return False

    frontier = [s for s in seeds if add(s)]
    while frontier and len(basis) < n:
        nxt = []
        for vec in frontier:
            img = z2d @ vec
            if add(img):
                nxt.append(img)
        frontier = nxt
    return np.column_stack(basis) if basis else np.zeros((n, 0))


def no_gap_diagnosis(dd: DriftDiffusion) -> Finding:
    """Classify why the one-sided embedding has no gap, or report GapExists.

    Unstable drift: returns the offending eigenpair and distinguishes
    case 1 (the unstable invariant real subspace is annihilated by the
    diffusion, so observables survive unchanged) from case 2 (the damping
    integral diverges).  Stable drift with singular cz: returns a unit
    kernel vector of cz.
    """
    info = is_stable(dd)
    z2d = dd.z2d
    if not info.stable:
        idx = int(np.argmax(info.eigenvalues.real))
        lam = complex(info.eigenvalues[idx])
        w = info.eigenvectors[:, idx]
        w = w / np.linalg.norm(w)
        c2d = dd.c2d
        span = _krylov_span(z2d, [w.real, w.imag])
        c_scale = max(1.0, float(np.linalg.norm(c2d, 2)))
        in_kernel = bool(
            span.shape[1] > 0
            and np.linalg.norm(c2d @ span, 2) <= 1e-10 * c_scale
        )
        case = 1 if in_kernel else 2
        resid = float(np.linalg.norm(z2d @ w - lam * w))
        return Finding(
            kind="Unstable",
            message=(
                f"drift eigenvalue {lam:.6g} has Re >= 0; "
                + (
                    "its invariant subspace is diffusion-free (case 1)"
                    if case == 1
                    else "the damping integral diverges on it (case 2)"
                )
            ),
            eigenvalue=lam,
            eigenvector=w,
            case=case,
            residual=resid,
        )
    if not kraus_rank_full(dd):
        evals, evecs = np.linalg.eigh(dd.cz)
        v = fix_phase(evecs[:, 0])
        resid = float(np.linalg.norm(dd.cz @ v))
        return Finding(
            kind="CZKernel",
            message="cz is singular: the noise form vanishes on a direction",
            kernel_vector=v,
            residual=resid,
        )
    return Finding(kind="GapExists", message="drift stable and cz positive definite")


@dataclass
class GapReport:
    """Aggregated gap data for one model."""

    has_gns_gap: bool
    omega0: Optional[float] = None
    g: Optional[float] = None
    omega0_breve: Optional[float] = None
    g_breve: Optional[float] = None
    gns_witness: Optional[np.ndarray] = None
    kms_witness: Optional[np.ndarray] = None
    kbreve_min_eig: Optional[float] = None
    kms_kernel_condition_ok: Optional[bool] = None
    stationary: Optional[StationaryData] = None
    stability: Optional[object] = None
    diagnostics: list = field(default_factory=list)


def analyze(dd: DriftDiffusion, zeta=None) -> GapReport:
    """Run the full gap pipeline on a built model, degrading gracefully.

    Unstable or unfaithful models produce a report whose unavailable fields
    stay None and whose diagnostics say why.
    """
    info = is_stable(dd)
    finding = no_gap_diagnosis(dd)
    report = GapReport(
        has_gns_gap=bool(info.stable and kraus_rank_full(dd)),
        stability=info,
    )
    if finding.kind != "GapExists":
        report.diagnostics.append(finding)
    if not info.stable:
        return report
    st = solve_stationary(dd, zeta)
    report.stationary = st
    if not st.faithful:
        report.diagnostics.append(
            Finding(
                kind="NotFaithful",
                message="invariant state is not faithful; embeddings undefined",
            )
        )
        return report
    gns = gns_gap(dd, st)
    report.omega0 = gns.omega0
    report.g = gns.g
    report.gns_witness = gns.witness
    kms = kms_gap(dd, st)
    report.omega0_breve = kms.omega0
    report.g_breve = kms.g
    report.kms_witness = kms.witness
    report.kbreve_min_eig = kms.kbreve_min_eig
    report.kms_kernel_condition_ok = kms.kernel_condition_ok
    if not kms.kernel_condition_ok:
        report.diagnostics.append(
            Finding(
                kind="KbreveSingular",
                message=(
                    "Z^T s_breve + s_breve Z is singular; the split-embedding "
                    "rate is an upper-bound candidate only"
                ),
            )
        )
    return report
