import json
from pathlib import Path

import numpy as np
import pytest

from sme_correlate.errors import ModelError
from sme_correlate.models import (
    ZOO,
    DensityMatrix,
    Detector,
    DetectorKind,
    QuantumModel,
    build_operator,
    check_state,
    ensure_valid,
    model_zoo,
    validate_model,
)
from sme_correlate.models.operators import annihilation, parse_complex, sigma_minus
from sme_correlate.schemas.model_file import dump_model_file, load_model_file, matrix_from_data

MODEL_FILES = Path(__file__).resolve().parent.parent / "model_files"


def _qubit(**detector):
    params = {"label": "d0", "kind": DetectorKind.JUMP, "operator": sigma_minus(), "eta": 1.0, "theta": 0.0}
    params.update(detector)
    return QuantumModel(dim=2, hamiltonian=np.zeros((2, 2)), detectors=(Detector(**params),))


@pytest.mark.parametrize("name", sorted(ZOO))
def test_every_zoo_model_is_valid(name):
    model, rho0 = model_zoo(name)
    assert validate_model(model) == []
    assert check_state(rho0, model.dim) == []


def test_unknown_zoo_model():
    with pytest.raises(ModelError) as info:
        model_zoo("laser")
    assert "decay_photodetect" in info.value.detail["known"]


def test_zoo_overrides_are_validated():
    with pytest.raises(ModelError):
        model_zoo("decay_photodetect", eta=1.5)
    with pytest.raises(ModelError):
        model_zoo("decay_photodetect", colour="red")


def test_non_hermitian_hamiltonian_is_reported():
    model = QuantumModel(dim=2, hamiltonian=np.array([[0, 1], [0, 0]]), detectors=_qubit().detectors)
    violations = validate_model(model)
    assert [v.field for v in violations] == ["hamiltonian"]


@pytest.mark.parametrize(
    "detector, field",
    [
        ({"eta": 0.0}, "detectors[0].eta"),
        ({"eta": 1.2}, "detectors[0].eta"),
        ({"theta": -0.1}, "detectors[0].theta"),
        ({"kind": DetectorKind.DIFFUSIVE, "theta": 0.1}, "detectors[0].theta"),
        ({"operator": np.eye(3)}, "detectors[0].operator"),
        ({"label": ""}, "detectors[0].label"),
    ],
)
def test_detector_violations(detector, field):
    violations = validate_model(_qubit(**detector))
    assert field in [v.field for v in violations]


def test_duplicate_labels_and_empty_detector_list():
    det = _qubit().detectors[0]
    dup = QuantumModel(dim=2, hamiltonian=np.zeros((2, 2)), detectors=(det, det))
    assert any("duplicate" in v.message for v in validate_model(dup))
    empty = QuantumModel(dim=2, hamiltonian=np.zeros((2, 2)), detectors=())
    assert validate_model(empty)[0].field == "detectors"


def test_ensure_valid_raises_with_all_violations():
    bad = QuantumModel(
        dim=2,
        hamiltonian=np.array([[0, 1], [0, 0]]),
        detectors=(Detector("d0", DetectorKind.JUMP, sigma_minus(), eta=2.0, theta=-1.0),),
    )
    with pytest.raises(ModelError) as info:
        ensure_valid(bad)
    assert len(info.value.detail["violations"]) == 3


def test_detector_lookup():
    model, _ = model_zoo("mixed_two_detector")
    assert model.labels == ("d0", "d1")
    assert model.index_of("d1") == 1
    assert [d.label for d in model.jump_detectors] == ["d0"]
    assert [d.label for d in model.diffusive_detectors] == ["d1"]
    with pytest.raises(ModelError):
        model.detector("d7")


def test_density_matrix_checks():
    assert DensityMatrix.from_ket([1, 1j]).population(0) == pytest.approx(0.5)
    assert check_state(DensityMatrix(np.diag([0.6, 0.6]))) != []
    assert check_state(DensityMatrix(np.diag([1.2, -0.2]))) != []
    assert check_state(DensityMatrix(np.array([[0.5, 0.5], [0.0, 0.5]]))) != []
    assert check_state(DensityMatrix.maximally_mixed(3), dim=2) != []
    with pytest.raises(ModelError):
        DensityMatrix.basis(2, 2)
    with pytest.raises(ModelError):
        DensityMatrix.from_ket([0, 0])


def test_operator_expressions():
    a = build_operator({"op": "annihilation", "dim": 3})
    np.testing.assert_allclose(a, annihilation(3))
    n = build_operator({"product": [{"adjoint": {"op": "annihilation", "dim": 3}}, {"op": "annihilation", "dim": 3}]})
    np.testing.assert_allclose(np.diag(n).real, [0, 1, 2])
    x = build_operator({"sum": [{"op": "sigma_minus"}, {"adjoint": {"op": "sigma_minus"}}]})
    np.testing.assert_allclose(x, build_operator({"op": "pauli_x"}))
    half_i = build_operator({"scale": [0, 0.5], "of": {"op": "identity", "dim": 2}})
    np.testing.assert_allclose(half_i, 0.5j * np.eye(2))
    assert parse_complex([1, -2]) == 1 - 2j


@pytest.mark.parametrize(
    "expr",
    [
        {"op": "laser"},
        {"op": "annihilation"},
        {"sum": []},
        {"scale": 2},
        {"product": [{"op": "pauli_x"}, {"op": "identity", "dim": 3}]},
        {"product": 3},
        {"sum": {"op": "pauli_x"}},
        {"sum": "pauli_x"},
        [1, 2],
    ],
)
def test_bad_operator_expressions(expr):
    with pytest.raises(ModelError):
        build_operator(expr)


def test_model_file_round_trip(tmp_path, mixed):
    model, rho0 = mixed
    path = dump_model_file(tmp_path / "mixed.json", model, rho0, description="round trip")
    loaded, loaded_rho = load_model_file(path)
    assert loaded.labels == model.labels
    np.testing.assert_allclose(loaded.hamiltonian, model.hamiltonian)
    for a, b in zip(loaded.detectors, model.detectors):
        assert (a.kind, a.eta, a.theta) == (b.kind, b.eta, b.theta)
        np.testing.assert_allclose(a.operator, b.operator)
    np.testing.assert_allclose(loaded_rho.matrix, rho0.matrix)


def test_model_file_with_expressions(tmp_path):
    path = tmp_path / "cavity.json"
    path.write_text(
        json.dumps(
            {
                "dim": 3,
                "hamiltonian": {"scale": 0.5, "of": {"sum": [{"op": "annihilation", "dim": 3},
                                                            {"adjoint": {"op": "annihilation", "dim": 3}}]}},
                "detectors": [{"label": "out", "kind": "diffusive", "operator": {"op": "annihilation", "dim": 3}}],
                "initial_state": {"ket": [1, 0, 0]},
            }
        )
    )
    model, rho0 = load_model_file(path)
    assert model.detector("out").eta == 1.0
    assert rho0.population(0) == pytest.approx(1.0)


def test_model_file_errors(tmp_path):
    with pytest.raises(ModelError) as info:
        load_model_file(tmp_path / "missing.json")
    assert "missing.json" in str(info.value)

    broken = tmp_path / "broken.json"
    broken.write_text("{not json")
    with pytest.raises(ModelError):
        load_model_file(broken)

    bad_eta = tmp_path / "bad_eta.json"
    bad_eta.write_text(
        json.dumps(
            {
                "dim": 2,
                "hamiltonian": [[0, 0], [0, 0]],
                "detectors": [{"label": "d0", "kind": "jump", "operator": {"op": "sigma_minus"}, "eta": 0}],
                "initial_state": {"basis": 0},
            }
        )
    )
    with pytest.raises(ModelError) as info:
        load_model_file(bad_eta)
    assert any("eta" in v for v in info.value.detail["violations"])


def test_shipped_model_files_load():
    for name in ("decay", "decay_no_dark", "noise", "homodyne", "fluorescence"):
        model, rho0 = load_model_file(MODEL_FILES / f"{name}.json")
        assert validate_model(model) == []
        assert rho0.dim == model.dim


@pytest.mark.parametrize("data", [[[0, 0], [0]], [[0, ["a", 0]], [0, 0]], [1, 2], 3])
def test_malformed_matrix_data(data):
    with pytest.raises(ModelError) as info:
        matrix_from_data(data, 2, "hamiltonian")
    assert str(info.value).startswith("hamiltonian")
