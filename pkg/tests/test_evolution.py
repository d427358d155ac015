"""Nonunitary evolution and dual-eigenstate preparation."""

import numpy as np
import pytest
from scipy.linalg import expm as scipy_expm

from nhcirc import evolution, linalg
from nhcirc.errors import DomainError, ExceptionalPointError, PreparationError


def random_matrix(rng, dim=2):
    return rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))


def test_evolve_matches_exact_propagator():
    rng = np.random.default_rng(40)
    for _ in range(10):
        h = random_matrix(rng)
        psi0 = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        psi0 = psi0 / np.linalg.norm(psi0)
        res = evolution.evolve(h, psi0, t_final=2.0, steps=64)
        for j, t in enumerate(res.times):
            exact = scipy_expm(-1j * h * t) @ psi0
            nrm = np.linalg.norm(exact)
            assert np.abs(res.states[j] - exact / nrm).max() < 1e-9
            assert res.log_norms[j] == pytest.approx(np.log(nrm), abs=1e-9)


def test_evolve_hermitian_preserves_norm():
    rng = np.random.default_rng(41)
    a = random_matrix(rng)
    h = (a + a.conj().T) / 2
    psi0 = np.array([1.0, 0.0], dtype=complex)
    res = evolution.evolve(h, psi0, t_final=5.0, steps=50)
    assert np.abs(res.log_norms).max() < 1e-12
    assert np.abs(res.populations.sum(axis=1) - 1).max() < 1e-12


def test_evolve_populations_and_fidelity():
    h = np.diag([1.0, -1.0]).astype(complex)
    psi0 = np.array([1.0, 1.0], dtype=complex) / np.sqrt(2)
    res = evolution.evolve(h, psi0, t_final=1.0, steps=10, target=[1, 0])
    assert np.abs(res.populations - 0.5).max() < 1e-12
    assert np.abs(res.fidelities - 0.5).max() < 1e-12


def test_evolve_rejects_bad_grid():
    h = np.eye(2, dtype=complex)
    with pytest.raises(DomainError):
        evolution.evolve(h, [1, 0], t_final=0.0, steps=5)
    with pytest.raises(DomainError):
        evolution.evolve(h, [1, 0], t_final=1.0, steps=0)


def test_select_alpha_reference_cases():
    assert evolution.select_alpha(1j, -1j) == pytest.approx(1.0)
    assert evolution.select_alpha(1.0, -1.0) == pytest.approx(1j)
    assert evolution.select_alpha(-1j, 1j) == pytest.approx(-1.0)


def test_select_alpha_maximizes_imaginary_gap():
    rng = np.random.default_rng(42)
    for _ in range(50):
        e_plus = complex(*rng.standard_normal(2))
        e_minus = complex(*rng.standard_normal(2))
        if abs(e_plus - e_minus) < 1e-3:
            continue
        alpha = evolution.select_alpha(e_plus, e_minus)
        assert abs(abs(alpha) - 1) < 1e-12
        got = (alpha * (e_plus - e_minus)).imag
        for phi in rng.uniform(0, 2 * np.pi, 20):
            other = (np.exp(1j * phi) * (e_plus - e_minus)).imag
            assert got >= other - 1e-12


def test_select_alpha_degenerate():
    with pytest.raises(ExceptionalPointError):
        evolution.select_alpha(1.0, 1.0)


def test_prepare_dual_pair_matches_eigenvectors():
    rng = np.random.default_rng(43)
    for _ in range(20):
        h = random_matrix(rng)
        dec = linalg.eig(h)
        if dec.degenerate or abs(dec.values[0] - dec.values[1]) < 0.3:
            continue
        pair, res_r, res_l = evolution.prepare_dual_pair(h, t_final=80.0, steps=1)
        # biorthogonal expectation reproduces the targeted eigenvalue
        num = np.vdot(pair.psi_l, h @ pair.psi_r)
        den = np.vdot(pair.psi_l, pair.psi_r)
        assert abs(num / den - pair.eigenvalue) < 1e-8
        assert res_r.fidelities[-1] > 1 - 1e-10
        assert res_l.fidelities[-1] > 1 - 1e-10


def test_prepare_dual_pair_left_is_adjoint_eigenvector():
    h = np.array([[0.3, 1.0], [0.2, -0.4 + 0.5j]])
    pair, _, _ = evolution.prepare_dual_pair(h, t_final=60.0)
    resid = h.conj().T @ pair.psi_l - np.conj(pair.eigenvalue) * pair.psi_l
    assert np.linalg.norm(resid) < 1e-9


def test_prepare_dual_pair_explicit_alpha():
    h = np.diag([1.0, -1.0]).astype(complex)  # real spectrum needs a rotation
    pair, _, _ = evolution.prepare_dual_pair(
        h, t_final=40.0, alpha=1j, psi0=[1.0, 0.3]
    )
    assert pair.eigenvalue == pytest.approx(1.0)
    assert abs(pair.psi_r[0]) > 1 - 1e-12


def test_prepare_dual_pair_rejects_orthogonal_start():
    h = np.diag([1.0 + 1j, -1.0 - 1j])
    with pytest.raises(PreparationError):
        evolution.prepare_dual_pair(h, t_final=10.0, alpha=1.0, psi0=[0.0, 1.0])


def test_prepare_dual_pair_rejects_ambiguous_target():
    h = np.diag([1.0, -1.0]).astype(complex)
    with pytest.raises(ExceptionalPointError):
        evolution.prepare_dual_pair(h, t_final=10.0, alpha=1.0)


def test_prepare_dual_pair_auto_requires_2x2():
    h = np.diag([1.0 + 1j, 2.0, -1.0 - 1j])
    with pytest.raises(DomainError):
        evolution.prepare_dual_pair(h, t_final=10.0, alpha="auto")


def test_evolution_result_csv(tmp_path):
    h = np.diag([0.5j, -0.5j])
    res = evolution.evolve(h, [1.0, 1.0], t_final=1.0, steps=4, target=[1, 0])
    path = tmp_path / "traj.csv"
    res.write_csv(path, header="demo")
    lines = path.read_text().splitlines()
    assert lines[0] == "# demo"
    assert lines[1].split(",") == ["t", "pop_0", "pop_1", "fidelity", "norm_factor_log"]
    assert len(lines) == 2 + 5
