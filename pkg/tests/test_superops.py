import numpy as np
import pytest
from numpy.polynomial.hermite_e import hermegauss

from sme_correlate.core.linalg import devectorize, vectorize
from sme_correlate.errors import SuperoperatorError
from sme_correlate.models import Detector, DetectorKind, QuantumModel
from sme_correlate.services.superops import (
    deformed_generator,
    diff_insertion,
    diffusive_backaction,
    dissipator,
    identity_map,
    insertion,
    jump_backaction,
    jump_insertion,
    kraus_map_diffusive,
    kraus_maps_jump,
    lindbladian,
)
from tests.conftest import random_model, random_state


def _random_input(rng, d):
    return rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))


@pytest.mark.parametrize("dim", [2, 4])
def test_lindbladian_is_trace_preserving_and_hermiticity_preserving(rng, dim):
    model = random_model(dim, rng)
    gen = lindbladian(model)
    ones = vectorize(np.eye(dim))
    np.testing.assert_allclose(ones @ gen.matrix, 0.0, atol=1e-12)
    rho = random_state(dim, rng).matrix
    out = gen.apply(rho)
    np.testing.assert_allclose(out, out.conj().T, atol=1e-12)


def test_lindbladian_of_decay(decay):
    model, rho0 = decay
    out = lindbladian(model).apply(rho0.matrix)
    # excited population decays at rate gamma = 1
    np.testing.assert_allclose(out, np.diag([-1.0, 1.0]), atol=1e-14)


def test_matrix_and_matrix_free_forms_agree(rng):
    model = random_model(3, rng)
    gen = lindbladian(model)
    assert gen.verify(n_samples=10) < 1e-12
    x = _random_input(rng, 3)
    np.testing.assert_allclose(gen.matvec(vectorize(x)), vectorize(gen.apply(x)), atol=1e-12)


def test_matrix_free_path_above_materialize_limit(rng, override_settings):
    model = random_model(3, rng)
    x = _random_input(rng, 3)
    dense = lindbladian(model).matvec(vectorize(x))
    override_settings(matrix_free_min_dim=3)
    gen = lindbladian(model)
    assert not gen.materialized
    np.testing.assert_allclose(gen.matvec(vectorize(x)), dense, atol=1e-12)
    rows = np.stack([vectorize(x), vectorize(2 * x)])
    np.testing.assert_allclose(gen.apply_vectors(rows)[1], 2 * dense, atol=1e-12)


def test_matrix_free_from_dimension_64():
    assert identity_map(63).materialized
    # d = 64 acts matrix-free; the 4096×4096 matrix is never built
    big = identity_map(64)
    assert not big.materialized
    x = np.arange(64 * 64, dtype=np.complex128)
    np.testing.assert_array_equal(big.matvec(x), x)
    assert "matrix" not in big.__dict__


def test_dissipator_and_identity(rng):
    L = _random_input(rng, 2)
    rho = random_state(2, rng).matrix
    expected = L @ rho @ L.conj().T - 0.5 * (L.conj().T @ L @ rho + rho @ L.conj().T @ L)
    np.testing.assert_allclose(dissipator(L).apply(rho), expected, atol=1e-12)
    np.testing.assert_allclose(identity_map(2).matrix, np.eye(4))
    with pytest.raises(SuperoperatorError):
        dissipator(np.zeros((2, 3)))
    with pytest.raises(SuperoperatorError):
        dissipator(np.eye(2), dim=3)


def test_superoperator_addition_and_scaling(rng):
    a, b = identity_map(2), dissipator(_random_input(rng, 2))
    np.testing.assert_allclose((a + b.scaled(2.0)).matrix, a.matrix + 2.0 * b.matrix, atol=1e-12)
    with pytest.raises(SuperoperatorError):
        _ = a + identity_map(3)


def test_insertions(rng, mixed):
    model, _ = mixed
    jump, diff = model.detectors
    rho = random_state(2, rng).matrix
    v = jump.operator
    np.testing.assert_allclose(
        jump_insertion(jump).apply(rho), jump.theta * rho + jump.eta * v @ rho @ v.conj().T, atol=1e-12
    )
    L = diff.operator
    np.testing.assert_allclose(
        diff_insertion(diff).apply(rho), np.sqrt(diff.eta) * (L @ rho + rho @ L.conj().T), atol=1e-12
    )
    assert insertion(jump).label == "J[d0]"
    with pytest.raises(SuperoperatorError):
        jump_insertion(diff)
    with pytest.raises(SuperoperatorError):
        diff_insertion(jump)


def _jump_kraus_defect(model, rho, dt):
    det = model.detectors[0]
    k0, k1 = kraus_maps_jump(det, model.hamiltonian, dt)
    total = k0.apply(rho) + k1.apply(rho)
    return np.linalg.norm(total - rho - lindbladian(model).apply(rho) * dt)


def _diffusive_kraus_defect(model, rho, dt, nodes=12):
    det = model.detectors[0]
    x, w = hermegauss(nodes)
    w = w / w.sum()
    total = sum(wk * kraus_map_diffusive(det, model.hamiltonian, dt, np.sqrt(dt) * xk).apply(rho) for xk, wk in zip(x, w))
    return np.linalg.norm(total - rho - lindbladian(model).apply(rho) * dt)


def _single_detector(rng, dim, kind):
    h = _random_input(rng, dim)
    op = 0.5 * _random_input(rng, dim)
    theta = 0.3 if kind is DetectorKind.JUMP else 0.0
    return QuantumModel(
        dim=dim,
        hamiltonian=0.5 * (h + h.conj().T),
        detectors=(Detector("d0", kind, op, eta=0.75, theta=theta),),
    )


@pytest.mark.parametrize("dim", [2, 4])
@pytest.mark.parametrize("kind", [DetectorKind.JUMP, DetectorKind.DIFFUSIVE])
def test_kraus_maps_reproduce_lindbladian_to_first_order(rng, dim, kind):
    defect = _jump_kraus_defect if kind is DetectorKind.JUMP else _diffusive_kraus_defect
    for _ in range(10):
        model = _single_detector(rng, dim, kind)
        rho = random_state(dim, rng).matrix
        coarse = defect(model, rho, 1e-3)
        fine = defect(model, rho, 5e-4)
        assert coarse / fine >= 3.5


def test_kraus_map_argument_checks(mixed):
    model, _ = mixed
    jump, diff = model.detectors
    with pytest.raises(SuperoperatorError):
        kraus_maps_jump(diff, model.hamiltonian, 1e-3)
    with pytest.raises(SuperoperatorError):
        kraus_maps_jump(jump, model.hamiltonian, 0.0)
    with pytest.raises(SuperoperatorError):
        kraus_map_diffusive(jump, model.hamiltonian, 1e-3, 0.0)


def test_jump_kraus_maps_are_completely_positive(decay):
    model, _ = decay
    k0, k1 = kraus_maps_jump(model.detectors[0], model.hamiltonian, 1e-2)
    for k in (k0, k1):
        # Choi matrix of a CP map is positive semidefinite
        d = 2
        choi = sum(
            np.kron(np.outer(np.eye(d)[i], np.eye(d)[j]), k.apply(np.outer(np.eye(d)[i], np.eye(d)[j])))
            for i in range(d)
            for j in range(d)
        )
        assert np.linalg.eigvalsh(choi).min() >= -1e-14


def test_deformed_generator_at_zero_is_lindbladian(mixed):
    model, _ = mixed
    np.testing.assert_allclose(deformed_generator(model, [0.0, 0.0]).matrix, lindbladian(model).matrix)


@pytest.mark.parametrize("index", [0, 1])
def test_deformed_generator_derivative_is_insertion(mixed, index):
    model, _ = mixed
    h = 1e-6
    j = [0.0, 0.0]
    j[index] = h
    plus = deformed_generator(model, j).matrix
    j[index] = -h
    minus = deformed_generator(model, j).matrix
    derivative = (plus - minus) / (2 * h)
    np.testing.assert_allclose(derivative, insertion(model.detectors[index]).matrix, atol=1e-8)


def test_deformed_generator_accepts_label_mapping(mixed):
    model, _ = mixed
    by_label = deformed_generator(model, {"d1": 0.3}).matrix
    by_order = deformed_generator(model, [0.0, 0.3]).matrix
    np.testing.assert_allclose(by_label, by_order)
    with pytest.raises(SuperoperatorError):
        deformed_generator(model, {"d9": 1.0})
    with pytest.raises(SuperoperatorError):
        deformed_generator(model, [0.1])


def test_jump_backaction(decay, rng):
    model, _ = decay
    det = model.detectors[0]
    rho = random_state(2, rng).matrix[None]
    back, rate = jump_backaction(det, rho)
    v = det.operator
    inserted = det.theta * rho[0] + det.eta * v @ rho[0] @ v.conj().T
    assert rate[0] == pytest.approx(np.trace(inserted).real)
    np.testing.assert_allclose(back[0], inserted / rate[0] - rho[0], atol=1e-12)
    assert abs(np.trace(back[0])) < 1e-12


def test_jump_backaction_vanishes_without_clicks():
    det = Detector("d0", DetectorKind.JUMP, np.zeros((2, 2)), eta=1.0, theta=0.0)
    back, rate = jump_backaction(det, np.eye(2)[None] / 2)
    assert rate[0] == 0.0
    np.testing.assert_array_equal(back, 0.0)


def test_diffusive_backaction_is_traceless(rng):
    L = _random_input(rng, 3)
    rho = np.stack([random_state(3, rng).matrix for _ in range(4)])
    out = diffusive_backaction(L, rho)
    np.testing.assert_allclose(np.trace(out, axis1=1, axis2=2), 0.0, atol=1e-12)


def test_vectorized_insertion_round_trip(rng, homodyne):
    model, rho0 = homodyne
    ins = insertion(model.detectors[0])
    out = devectorize(ins.matvec(vectorize(rho0.matrix)))
    np.testing.assert_allclose(out, -2.0 * rho0.matrix, atol=1e-14)
