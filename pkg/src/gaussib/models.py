"""Source-model files, output schemas and the canonical example sources.

A model file is a JSON object::

    {"grid_points": 4096,
     "s_x":  {"type": "rational", "ar": [0.9], "ma": [], "variance": 0.19},
     "s_y":  {"type": "tabulated", "values": [...]},
     "s_xy": {"type": "tabulated", "values": [...], "imag": [...]}}

Spectra are ``tabulated`` (one value per grid point, in grid order) or
``rational`` (ARMA: x_t = sum ar_k x_{t-k} + e_t + sum ma_k e_{t-k}, with
innovation ``variance``). The cross-spectrum may instead be a
``linear_form`` ``{"h": <filter>, "s_w": <spectrum>}`` meaning Y = h * X + W;
``s_y`` is then derived and may be omitted. A filter is ``tabulated``
(complex frequency response via ``values``/``imag``), ``fir`` (``taps``
with optional zero-lag index ``delay``) or ``rational`` (``ar``, ``ma``,
``gain``).
"""

from __future__ import annotations

import json
from pathlib import Path

import jsonschema
import numpy as np

from .errors import ConfigError, GaussIBError, ModelError
from .spectra import (
    BivariateSpectra,
    CrossSpectrum,
    FrequencyGrid,
    Spectrum,
    fir_response,
    from_linear_form,
    rational_response,
    rational_spectrum,
)

SCHEMA_VERSION = 1

_NUMBERS = {"type": "array", "items": {"type": "number"}}

_TABULATED = {
    "type": "object",
    "properties": {"type": {"const": "tabulated"}, "values": _NUMBERS},
    "required": ["type", "values"],
    "additionalProperties": False,
}
_TABULATED_COMPLEX = {
    "type": "object",
    "properties": {"type": {"const": "tabulated"}, "values": _NUMBERS, "imag": _NUMBERS},
    "required": ["type", "values"],
    "additionalProperties": False,
}
_RATIONAL = {
    "type": "object",
    "properties": {
        "type": {"const": "rational"},
        "ar": _NUMBERS,
        "ma": _NUMBERS,
        "variance": {"type": "number", "minimum": 0},
    },
    "required": ["type", "variance"],
    "additionalProperties": False,
}
_FILTER = {
    "oneOf": [
        _TABULATED_COMPLEX,
        {
            "type": "object",
            "properties": {
                "type": {"const": "fir"},
                "taps": {**_NUMBERS, "minItems": 1},
                "delay": {"type": "integer", "minimum": 0},
            },
            "required": ["type", "taps"],
            "additionalProperties": False,
        },
        {
            "type": "object",
            "properties": {
                "type": {"const": "rational"},
                "ar": _NUMBERS,
                "ma": _NUMBERS,
                "gain": {"type": "number"},
            },
            "required": ["type"],
            "additionalProperties": False,
        },
    ]
}
_SPECTRUM = {"oneOf": [_TABULATED, _RATIONAL]}
_LINEAR_FORM = {
    "type": "object",
    "properties": {"type": {"const": "linear_form"}, "h": _FILTER, "s_w": _SPECTRUM},
    "required": ["type", "h", "s_w"],
    "additionalProperties": False,
}

MODEL_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "gaussib source model",
    "type": "object",
    "properties": {
        "grid_points": {"type": "integer", "minimum": 1},
        "s_x": _SPECTRUM,
        "s_y": _SPECTRUM,
        "s_xy": {"oneOf": [_TABULATED_COMPLEX, _RATIONAL, _LINEAR_FORM]},
    },
    "required": ["grid_points", "s_x", "s_xy"],
    "additionalProperties": False,
}

PF_INSTANCE_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "gaussib privacy-funnel instance",
    "type": "object",
    "properties": {
        "n": {"type": "integer", "minimum": 1},
        "psi": _NUMBERS,
        "v2": {"type": "array", "items": _NUMBERS},
        "sigma_y": {"type": "array", "items": _NUMBERS},
        "sigma_z": {"type": "array", "items": _NUMBERS},
        "sigma_zy": {"type": "array", "items": _NUMBERS},
        "c1": {"type": "number", "minimum": 0},
    },
    "oneOf": [
        {"required": ["psi", "v2"]},
        {"required": ["sigma_y", "sigma_z", "sigma_zy"]},
    ],
}

_NUM_OR_NULL = {"type": ["number", "null"]}

_RESULT_BASE = {
    "schema_version": {"const": SCHEMA_VERSION},
    "command": {"type": "string"},
    "units": {"const": "bits"},
}

RESULT_SCHEMAS = {
    "ib-rate": {
        "required": ["theta", "c_bits", "rate_bits", "grid_points", "mi_rate_bits"],
        "properties": {"theta": _NUM_OR_NULL, "rate_bits": {"type": "number"}},
    },
    "sweep": {
        "required": ["grid_points", "rows"],
        "properties": {"rows": {"type": "array", "items": {
            "type": "object", "required": ["C_bits", "theta", "R_bits"]}}},
    },
    "filters": {
        "required": ["grid_points", "theta", "taps", "delays", "linf_error"],
        "properties": {"taps": {"type": "object"}, "linf_error": {"type": "object"}},
    },
    "audit": {
        "required": ["grid_points", "c_target", "c_achieved", "r_target", "r_achieved",
                     "wiener_max_error"],
    },
    "simulate": {
        "required": ["grid_points", "c_hat", "c_se", "r_hat", "r_se", "theta", "order",
                     "length", "seed", "identity_residual"],
    },
    "comib": {
        "required": ["c1", "c2", "rate_bits", "gamma", "lambda"],
        "properties": {"saddle_check": {"type": "object"}},
    },
    "pf": {
        "required": ["n", "c1", "value_bits", "phi", "rates", "u1", "grad_norm", "relaxed"],
    },
    "szego": {
        "required": ["grid_points", "rate_bits", "rows"],
    },
}


def result_schema(command: str) -> dict:
    spec = RESULT_SCHEMAS[command]
    return {
        "$schema": "https://json-schema.org/draft/2020-12/schema",
        "type": "object",
        "required": ["schema_version", "command", "units", *spec["required"]],
        "properties": {**_RESULT_BASE, **spec.get("properties", {})},
    }


def _validate(doc, schema):
    validator = jsonschema.Draft202012Validator(schema)
    error = jsonschema.exceptions.best_match(validator.iter_errors(doc))
    if error is not None:
        raise ConfigError(error.message, error.absolute_path)


def _tabulated(values, grid, path, imag=None):
    v = np.asarray(values, dtype=float)
    if v.shape != (grid.n_points,):
        raise ConfigError(f"expected {grid.n_points} values, got {v.size}", [*path, "values"])
    if imag is not None:
        im = np.asarray(imag, dtype=float)
        if im.shape != v.shape:
            raise ConfigError("imag must match values in length", [*path, "imag"])
        v = v + 1j * im
    return v


def _spectrum(spec, grid, path):
    try:
        if spec["type"] == "tabulated":
            return Spectrum(grid, _tabulated(spec["values"], grid, path))
        return rational_spectrum(grid, spec.get("ar", []), spec.get("ma", []), spec["variance"])
    except ModelError as exc:
        raise ModelError(str(exc), path) from None


def _filter(spec, grid, path):
    kind = spec["type"]
    if kind == "tabulated":
        return _tabulated(spec["values"], grid, path, spec.get("imag"))
    if kind == "fir":
        return fir_response(grid, spec["taps"], spec.get("delay", 0))
    return spec.get("gain", 1.0) * rational_response(grid, spec.get("ar", []), spec.get("ma", []))


def model_from_dict(doc: dict, grid_points: int | None = None) -> BivariateSpectra:
    """Validate a model document and evaluate it on the grid."""
    _validate(doc, MODEL_SCHEMA)
    grid = FrequencyGrid(grid_points or doc["grid_points"])
    s_x = _spectrum(doc["s_x"], grid, ["s_x"])
    xy = doc["s_xy"]
    try:
        if xy["type"] == "linear_form":
            h = _filter(xy["h"], grid, ["s_xy", "h"])
            s_w = _spectrum(xy["s_w"], grid, ["s_xy", "s_w"])
            src = from_linear_form(s_x, h, s_w)
            if "s_y" in doc:
                given = _spectrum(doc["s_y"], grid, ["s_y"]).values
                if not np.allclose(given, src.s_y.values, rtol=1e-9, atol=1e-12):
                    raise ModelError("s_y disagrees with the linear form", ["s_y"])
            return src
        if "s_y" not in doc:
            raise ConfigError("s_y is required unless s_xy is a linear_form", ["s_y"])
        s_y = _spectrum(doc["s_y"], grid, ["s_y"])
        if xy["type"] == "tabulated":
            cross = CrossSpectrum(grid, _tabulated(xy["values"], grid, ["s_xy"], xy.get("imag")))
        else:
            cross = CrossSpectrum(grid, _spectrum(xy, grid, ["s_xy"]).values)
        return BivariateSpectra(s_x, s_y, cross)
    except ModelError as exc:
        if exc.path:
            raise
        raise ModelError(str(exc), ["s_xy"]) from None


def load_model(path, grid_points: int | None = None) -> BivariateSpectra:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"model file not found: {path}", ["model"])
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"model is not valid JSON: {exc}", []) from None
    return model_from_dict(doc, grid_points)


def load_pf_instance(path, c1: float):
    from .pf import PfInstance

    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"instance file not found: {path}", ["instance"])
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"instance is not valid JSON: {exc}", []) from None
    _validate(doc, PF_INSTANCE_SCHEMA)
    try:
        if "psi" in doc:
            inst = PfInstance(doc["psi"], doc["v2"], c1)
        else:
            inst = PfInstance.from_covariances(doc["sigma_y"], doc["sigma_z"], doc["sigma_zy"], c1)
    except (ValueError, GaussIBError) as exc:
        raise ModelError(str(exc), []) from None
    if "n" in doc and doc["n"] != inst.n:
        raise ConfigError(f"n = {doc['n']} but psi has {inst.n} entries", ["n"])
    return inst


# canonical sources -------------------------------------------------------

FLAT_SNR = 3.0


def flat_model_dict(grid_points: int = 4096) -> dict:
    """Unit white X and Y with correlation sqrt(3/4): Gamma = 3 everywhere."""
    rho = float(np.sqrt(FLAT_SNR / (1 + FLAT_SNR)))
    white = {"type": "rational", "ar": [], "ma": [], "variance": 1.0}
    return {
        "grid_points": grid_points,
        "s_x": white,
        "s_y": white,
        "s_xy": {"type": "rational", "ar": [], "ma": [], "variance": rho},
    }


def ar1_model_dict(grid_points: int = 4096, a: float = 0.9) -> dict:
    """Unit-variance AR(1) X observed in unit white noise: Gamma(f) = S_X(f)."""
    return {
        "grid_points": grid_points,
        "s_x": {"type": "rational", "ar": [a], "ma": [], "variance": 1 - a * a},
        "s_xy": {
            "type": "linear_form",
            "h": {"type": "fir", "taps": [1.0]},
            "s_w": {"type": "rational", "ar": [], "ma": [], "variance": 1.0},
        },
    }


def halfband_model_dict(grid_points: int = 4096, level: float = 15.0) -> dict:
    """Gamma = ``level`` on |f| < 1/4 and 0 elsewhere."""
    f = FrequencyGrid(grid_points).frequencies
    h = np.where(np.abs(f) < 0.25, np.sqrt(level), 0.0)
    return {
        "grid_points": grid_points,
        "s_x": {"type": "rational", "ar": [], "ma": [], "variance": 1.0},
        "s_xy": {
            "type": "linear_form",
            "h": {"type": "tabulated", "values": h.tolist()},
            "s_w": {"type": "rational", "ar": [], "ma": [], "variance": 1.0},
        },
    }


def flat_model(grid_points: int = 4096) -> BivariateSpectra:
    return model_from_dict(flat_model_dict(grid_points))


def ar1_model(grid_points: int = 4096, a: float = 0.9) -> BivariateSpectra:
    return model_from_dict(ar1_model_dict(grid_points, a))


def halfband_model(grid_points: int = 4096, level: float = 15.0) -> BivariateSpectra:
    return model_from_dict(halfband_model_dict(grid_points, level))


def random_model(rng, grid_points: int = 256) -> BivariateSpectra:
    """Random valid source: ARMA X, short random FIR h with delay, ARMA W."""
    grid = FrequencyGrid(grid_points)
    poles = rng.uniform(-0.8, 0.8, 2)
    ar = [poles.sum(), -poles.prod()]
    s_x = rational_spectrum(grid, ar, [rng.uniform(-0.7, 0.7)], rng.uniform(0.2, 2.0))
    taps = rng.standard_normal(rng.integers(1, 5))
    h = fir_response(grid, taps, int(rng.integers(0, len(taps))))
    s_w = rational_spectrum(grid, [rng.uniform(-0.6, 0.6)], [rng.uniform(-0.6, 0.6)],
                            rng.uniform(0.05, 1.0))
    return from_linear_form(s_x, h, s_w)
