"""Model validation and the drift/diffusion triple."""

import numpy as np
import pytest

from conftest import random_model
from gaussgap.errors import (
    DependentKraus,
    DimensionMismatch,
    NotHermitian,
)
from gaussgap.model import (
    GklsModel,
    appendix_cz,
    appendix_z_realization,
    build_drift_diffusion,
    kraus_rank_full,
    one_dim_family,
    validate,
)
from gaussgap.realops import realize_blocks


def test_model_a_is_valid():
    report = validate(one_dim_family(3, 1))
    assert report.ok
    assert report.kraus_rank == 2


def test_dependent_kraus_rejected():
    model = GklsModel(
        d=1,
        m=1,
        omega=np.zeros((1, 1)),
        kappa=np.zeros((1, 1)),
        u_mat=np.zeros((1, 1)),
        v_mat=np.zeros((1, 1)),
        zeta=np.zeros(1),
    )
    with pytest.raises(DependentKraus):
        validate(model)
    report = validate(model, strict=False)
    assert not report.ok


def test_non_hermitian_omega_rejected():
    model = GklsModel(
        d=1,
        m=1,
        omega=np.array([[1j]]),
        kappa=np.array([[1j]]),  # symmetric, allowed
        u_mat=np.zeros((1, 1)),
        v_mat=np.ones((1, 1)),
        zeta=np.zeros(1),
    )
    with pytest.raises(NotHermitian):
        validate(model)


def test_m_above_2d_rejected():
    model = GklsModel(
        d=1,
        m=3,
        omega=np.zeros((1, 1)),
        kappa=np.zeros((1, 1)),
        u_mat=np.array([[1.0], [0.0], [1.0]]),
        v_mat=np.array([[0.0], [1.0], [1.0]]),
        zeta=np.zeros(1),
    )
    with pytest.raises(DimensionMismatch):
        validate(model)


def test_shape_mismatch_rejected():
    with pytest.raises(DimensionMismatch):
        GklsModel(
            d=2,
            m=1,
            omega=np.zeros((1, 1)),
            kappa=np.zeros((2, 2)),
            u_mat=np.zeros((1, 2)),
            v_mat=np.ones((1, 2)),
            zeta=np.zeros(2),
        )


def test_model_a_triple(model_a):
    _, dd, _ = model_a
    assert np.allclose(dd.z2d, -np.eye(2), atol=1e-14)
    assert np.allclose(dd.c2d, 4 * np.eye(2), atol=1e-14)
    expected_cz = np.array([[4.0, 2.0j], [-2.0j, 4.0]])
    assert np.allclose(dd.cz, expected_cz, atol=1e-13)
    assert np.allclose(np.linalg.eigvalsh(dd.cz), [2.0, 6.0], atol=1e-12)
    assert kraus_rank_full(dd)


def test_model_b_drift(model_b):
    _, dd, _ = model_b
    assert np.allclose(dd.z2d, np.array([[-1.0, -1.0], [3.0, -1.0]]), atol=1e-14)


def test_model_c_singular_noise_form(model_c):
    _, dd, _ = model_c
    assert abs(np.linalg.det(dd.cz)) < 1e-12
    assert abs(dd.cz_min_eig) < 1e-12
    assert not kraus_rank_full(dd)


def test_single_lowering_channel_not_full_rank():
    # one jump operator can never span the 2d noise directions
    dd = build_drift_diffusion(one_dim_family(1.0, 0.0))
    assert not kraus_rank_full(dd)


def test_diffusion_gram_factorization():
    # C = sqrtC^sharp sqrtC with sqrtC z = conj(U) z + V conj(z)
    rng = np.random.default_rng(21)
    for _ in range(25):
        d = int(rng.integers(1, 5))
        m = int(rng.integers(1, 2 * d + 1))
        model = random_model(rng, d, m)
        try:
            dd = build_drift_diffusion(model)
        except DependentKraus:
            continue
        root = realize_blocks(model.u_mat.conj(), model.v_mat)
        resid = np.linalg.norm(dd.c2d - root.T @ root)
        assert resid < 1e-10 * max(1.0, np.linalg.norm(dd.c2d))
        # positive semidefinite as a consequence
        assert np.linalg.eigvalsh(dd.c2d)[0] > -1e-12 * np.linalg.norm(dd.c2d)


def test_cz_hermitian_psd_on_fuzz():
    rng = np.random.default_rng(22)
    for _ in range(25):
        d = int(rng.integers(1, 5))
        m = int(rng.integers(1, 2 * d + 1))
        try:
            dd = build_drift_diffusion(random_model(rng, d, m))
        except DependentKraus:
            continue
        assert np.linalg.norm(dd.cz - dd.cz.conj().T) < 1e-12
        scale = np.linalg.norm(dd.cz, 2)
        assert dd.cz_min_eig >= -1e-10 * scale


def test_definition_matches_block_formulas():
    rng = np.random.default_rng(23)
    for _ in range(25):
        d = int(rng.integers(1, 5))
        m = int(rng.integers(1, 2 * d + 1))
        model = random_model(rng, d, m)
        try:
            dd = build_drift_diffusion(model)
        except DependentKraus:
            continue
        assert np.linalg.norm(dd.z2d - appendix_z_realization(model)) < 1e-12 * max(
            1.0, np.linalg.norm(dd.z2d)
        )
        assert np.linalg.norm(dd.cz - appendix_cz(model)) < 1e-12 * max(
            1.0, np.linalg.norm(dd.cz)
        )


def test_kraus_rank_matches_m_and_rank():
    # full rank iff m = 2d and the stacked coefficient matrix has rank 2d
    rng = np.random.default_rng(24)
    for _ in range(20):
        d = int(rng.integers(1, 4))
        m = int(rng.integers(1, 2 * d + 1))
        model = random_model(rng, d, m)
        try:
            dd = build_drift_diffusion(model)
        except DependentKraus:
            continue
        m_stack = np.hstack(
            [
                model.u_mat + model.v_mat.conj(),
                -1j * (model.u_mat - model.v_mat.conj()),
            ]
        )
        rank = np.linalg.matrix_rank(m_stack, tol=1e-10)
        assert kraus_rank_full(dd) == (m == 2 * d and rank == 2 * d)


def test_zeta_stored_but_gap_independent():
    base = one_dim_family(3, 1, 2, 1)
    driven = GklsModel(
        d=1,
        m=2,
        omega=base.omega,
        kappa=base.kappa,
        u_mat=base.u_mat,
        v_mat=base.v_mat,
        zeta=np.array([0.7 - 0.2j]),
    )
    from gaussgap.gap import analyze

    rep0 = analyze(build_drift_diffusion(base), base.zeta)
    rep1 = analyze(build_drift_diffusion(driven), driven.zeta)
    assert abs(rep0.g - rep1.g) < 1e-14
    assert abs(rep0.g_breve - rep1.g_breve) < 1e-14
    assert np.linalg.norm(rep1.stationary.mu) > 0
