"""JSON (de)serialization shared across modules.

Complex matrices serialize as nested arrays of [re, im] pairs:

    [[[1.0, 0.0], [0.0, 0.0]],
     [[0.0, 0.0], [1.0, 0.0]]]

Channels:   {"dim_in": int, "dim_out": int, "kraus": [matrix, ...]}
Ensembles:  {"p_x": [...], "p_y_given_x": [[...]], "rho_xy": [[matrix, ...], ...]}
"""

from __future__ import annotations

import numpy as np

from .errors import ValidationError
from .qcore import DensityOperator


def matrix_to_json(m: np.ndarray) -> list:
    m = np.asarray(m, dtype=np.complex128)
    return [[[float(v.real), float(v.imag)] for v in row] for row in m]


def matrix_from_json(data) -> np.ndarray:
    try:
        arr = np.asarray(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"malformed complex matrix: {exc}") from exc
    if arr.ndim != 3 or arr.shape[-1] != 2:
        raise ValidationError(f"complex matrix must be nested [re, im] pairs, got shape {arr.shape}")
    return arr[..., 0] + 1j * arr[..., 1]


def channel_to_json(ch) -> dict:
    return {
        "dim_in": ch.dim_in,
        "dim_out": ch.dim_out,
        "kraus": [matrix_to_json(k) for k in ch.kraus],
    }


def channel_from_json(data) -> "QuantumChannel":
    from .channels import QuantumChannel

    if not isinstance(data, dict) or "kraus" not in data:
        raise ValidationError("channel JSON needs a 'kraus' field")
    kraus = [matrix_from_json(k) for k in data["kraus"]]
    ch = QuantumChannel.from_kraus(kraus)
    for key in ("dim_in", "dim_out"):
        if key in data and int(data[key]) != getattr(ch, key):
            raise ValidationError(f"channel JSON {key}={data[key]} contradicts kraus shape {getattr(ch, key)}")
    return ch


def ensemble_to_json(ens) -> dict:
    return {
        "p_x": [float(v) for v in ens.p_x],
        "p_y_given_x": [[float(v) for v in row] for row in ens.p_y_given_x],
        "rho_xy": [[matrix_to_json(ens.rho_xy[x][y].matrix) for y in range(ens.size_y)] for x in range(ens.size_x)],
    }


def ensemble_from_json(data) -> "InputEnsemble":
    from .entropics import InputEnsemble

    try:
        p_x = np.asarray(data["p_x"], dtype=float)
        p_y_given_x = np.asarray(data["p_y_given_x"], dtype=float)
        rho = [[DensityOperator(matrix_from_json(m)) for m in row] for row in data["rho_xy"]]
    except KeyError as exc:
        raise ValidationError(f"ensemble JSON missing field {exc}") from exc
    return InputEnsemble(p_x=p_x, p_y_given_x=p_y_given_x, rho_xy=rho)
