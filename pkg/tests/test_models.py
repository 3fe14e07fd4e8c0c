import json
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gaussib.errors import ConfigError, ModelError
from gaussib.models import (
    ar1_model_dict,
    flat_model_dict,
    halfband_model_dict,
    load_model,
    load_pf_instance,
    model_from_dict,
    random_model,
)
from gaussib.spectra import snr_spectrum

MODELS = Path(__file__).resolve().parent.parent / "models"


@pytest.mark.parametrize("name, builder", [("flat", flat_model_dict), ("ar1", ar1_model_dict),
                                           ("halfband", halfband_model_dict)])
def test_shipped_models_match_builders(name, builder):
    shipped = load_model(MODELS / f"{name}.json")
    built = model_from_dict(builder())
    np.testing.assert_array_equal(shipped.s_y.values, built.s_y.values)
    np.testing.assert_array_equal(shipped.s_xy.values, built.s_xy.values)


def test_flat_gamma():
    np.testing.assert_allclose(snr_spectrum(model_from_dict(flat_model_dict(64))).values, 3.0,
                               rtol=1e-12)


def test_tabulated_cross_with_imag():
    n = 8
    doc = {
        "grid_points": n,
        "s_x": {"type": "tabulated", "values": [1.0] * n},
        "s_y": {"type": "tabulated", "values": [1.0] * n},
        "s_xy": {"type": "tabulated", "values": [0.1] * n, "imag": [-0.2] * 4 + [0.2] * 4},
    }
    src = model_from_dict(doc)
    assert src.s_xy.values[0] == pytest.approx(0.1 - 0.2j)


def test_grid_override():
    src = model_from_dict(ar1_model_dict(), grid_points=128)
    assert src.grid.n_points == 128


@pytest.mark.parametrize("doc, path", [
    ({"s_x": {}}, []),
    ({"grid_points": 4, "s_x": {"type": "tabulated", "values": [1, 1]},
      "s_y": {"type": "tabulated", "values": [1] * 4},
      "s_xy": {"type": "tabulated", "values": [0] * 4}}, ["s_x", "values"]),
    ({"grid_points": 4, "s_x": {"type": "rational", "variance": 1},
      "s_xy": {"type": "tabulated", "values": [0] * 4}}, ["s_y"]),
    ({"grid_points": 0, "s_x": {"type": "rational", "variance": 1},
      "s_xy": {"type": "rational", "variance": 0}}, ["grid_points"]),
])
def test_malformed_models(doc, path):
    with pytest.raises(ConfigError) as info:
        model_from_dict(doc)
    assert info.value.path == path


def test_invariant_violation_is_model_error():
    doc = {"grid_points": 4, "s_x": {"type": "rational", "variance": 1},
           "s_y": {"type": "rational", "variance": 1},
           "s_xy": {"type": "rational", "variance": 2}}
    with pytest.raises(ModelError):
        model_from_dict(doc)


def test_inconsistent_s_y_rejected():
    doc = ar1_model_dict(64)
    doc["s_y"] = {"type": "rational", "variance": 5.0}
    with pytest.raises(ModelError) as info:
        model_from_dict(doc)
    assert info.value.path == ["s_y"]


def test_missing_file():
    with pytest.raises(ConfigError):
        load_model("/nonexistent/model.json")


@given(seed=st.integers(0, 2 ** 31))
def test_random_models_are_valid(seed):
    src = random_model(np.random.default_rng(seed), 64)
    g = snr_spectrum(src).values
    assert np.all(np.isfinite(g)) and np.all(g >= 0)


def test_pf_instance_file(tmp_path):
    p = tmp_path / "inst.json"
    p.write_text(json.dumps({"n": 2, "psi": [0.9, 0.0], "v2": [[1, 0], [0, 1]]}))
    inst = load_pf_instance(p, 1.0)
    assert inst.n == 2
    p.write_text(json.dumps({"n": 3, "psi": [0.9, 0.0], "v2": [[1, 0], [0, 1]]}))
    with pytest.raises(ConfigError):
        load_pf_instance(p, 1.0)
    p.write_text(json.dumps({"n": 2, "psi": [0.9]}))
    with pytest.raises(ConfigError):
        load_pf_instance(p, 1.0)
