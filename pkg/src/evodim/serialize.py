"""JSON file formats.

Complex matrices are row-major nested arrays of ``[re, im]`` pairs; real
matrices are plain nested arrays.  Loading runs the full type validation,
so malformed or invalid objects raise :class:`ValidationError` naming the
violated invariant.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .classical import StochasticModel
from .dilation import QuantumRealization
from .errors import ValidationError
from .quantum import DensityMatrix, KrausChannel, Observable
from .realization import LinearRealization
from .spectral import SpectralReport


def complex_to_json(arr) -> list:
    arr = np.asarray(arr, dtype=complex)
    if arr.ndim == 0:
        return [float(arr.real), float(arr.imag)]
    return [complex_to_json(x) for x in arr]


def complex_from_json(obj, ndim: int, what: str) -> np.ndarray:
    try:
        arr = np.asarray(obj, dtype=float)
    except (TypeError, ValueError):
        raise ValidationError(f"{what}: expected nested arrays of [re, im] pairs",
                              invariant="schema") from None
    if arr.ndim != ndim + 1 or arr.shape[-1] != 2:
        raise ValidationError(f"{what}: expected a {ndim}-d array of [re, im] pairs, "
                              f"got shape {arr.shape}", invariant="schema")
    return arr[..., 0] + 1j * arr[..., 1]


def _require(obj: dict, key: str, what: str):
    if not isinstance(obj, dict) or key not in obj:
        raise ValidationError(f"{what}: missing field {key!r}", invariant="schema")
    return obj[key]


def _check_d(obj: dict, key: str, mat: np.ndarray, what: str) -> None:
    d = _require(obj, key, what)
    if not isinstance(d, int) or mat.shape[-1] != d or mat.shape[-2] != d:
        raise ValidationError(f"{what}: declared {key}={d} does not match matrix shape "
                              f"{mat.shape}", invariant="matching dimension")


# -- quantum objects -------------------------------------------------------------


def channel_to_json(channel: KrausChannel) -> dict:
    return {"d": channel.d, "kraus": [complex_to_json(k) for k in channel.kraus]}


def channel_from_json(obj: dict) -> KrausChannel:
    ops = _require(obj, "kraus", "channel")
    if not isinstance(ops, list) or not ops:
        raise ValidationError("channel: 'kraus' must be a nonempty list", invariant="schema")
    mats = [complex_from_json(k, 2, "channel") for k in ops]
    for m in mats:
        _check_d(obj, "d", m, "channel")
    return KrausChannel(tuple(mats))


def state_to_json(rho: DensityMatrix) -> dict:
    return {"d": rho.d, "rho": complex_to_json(rho.mat)}


def state_from_json(obj: dict) -> DensityMatrix:
    mat = complex_from_json(_require(obj, "rho", "state"), 2, "state")
    _check_d(obj, "d", mat, "state")
    return DensityMatrix(mat)


def observable_to_json(a: Observable) -> dict:
    return {"d": a.d, "a": complex_to_json(a.mat)}


def observable_from_json(obj: dict) -> Observable:
    mat = complex_from_json(_require(obj, "a", "observable"), 2, "observable")
    _check_d(obj, "d", mat, "observable")
    return Observable(mat)


def quantum_realization_to_json(qr: QuantumRealization) -> dict:
    return {
        "dim": qr.dim,
        "channel": channel_to_json(qr.channel),
        "rho": state_to_json(qr.rho),
        "a": observable_to_json(qr.a),
    }


def quantum_realization_from_json(obj: dict) -> QuantumRealization:
    qr = QuantumRealization(
        channel=channel_from_json(_require(obj, "channel", "quantum realization")),
        rho=state_from_json(_require(obj, "rho", "quantum realization")),
        a=observable_from_json(_require(obj, "a", "quantum realization")),
    )
    dim = _require(obj, "dim", "quantum realization")
    if dim != qr.dim or qr.rho.d != dim or qr.a.d != dim:
        raise ValidationError(f"quantum realization: declared dim={dim} does not match parts",
                              invariant="matching dimension")
    return qr


# -- classical model -------------------------------------------------------------


def stochastic_to_json(model: StochasticModel) -> dict:
    return {"dc": model.dc, "s": model.s.tolist(), "p": model.p.tolist(), "a": model.a_out.tolist()}


def stochastic_from_json(obj: dict) -> StochasticModel:
    try:
        s = np.asarray(_require(obj, "s", "stochastic model"), dtype=float)
        p = np.asarray(_require(obj, "p", "stochastic model"), dtype=float)
        a = np.asarray(_require(obj, "a", "stochastic model"), dtype=float)
    except (TypeError, ValueError):
        raise ValidationError("stochastic model: entries must be real numbers",
                              invariant="schema") from None
    dc = _require(obj, "dc", "stochastic model")
    if s.shape != (dc, dc):
        raise ValidationError(f"stochastic model: declared dc={dc} but S has shape {s.shape}",
                              invariant="matching dimension")
    return StochasticModel(s=s, p=p, a_out=a)


# -- realization and spectrum ----------------------------------------------------


def realization_to_json(real: LinearRealization) -> dict:
    return {
        "r": real.r,
        "m": complex_to_json(real.m),
        "l": complex_to_json(real.l_vec),
        "rvec": complex_to_json(real.r_vec),
        "norm": real.contraction_norm,
    }


def realization_from_json(obj: dict) -> LinearRealization:
    m = complex_from_json(_require(obj, "m", "realization"), 2, "realization")
    real = LinearRealization(
        m=m,
        l_vec=complex_from_json(_require(obj, "l", "realization"), 1, "realization"),
        r_vec=complex_from_json(_require(obj, "rvec", "realization"), 1, "realization"),
    )
    if _require(obj, "r", "realization") != real.r:
        raise ValidationError("realization: declared r does not match m",
                              invariant="matching dimension")
    return real


def spectral_report_to_json(report: SpectralReport) -> dict:
    return {
        "poles": complex_to_json(report.poles),
        "min_dc": report.min_classical_dimension,
        "tol": report.tolerance,
    }


# -- files -----------------------------------------------------------------------


def load_json(path) -> dict:
    path = Path(path)
    try:
        return json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: invalid JSON ({exc})", invariant="JSON syntax") from None


def dump_json(obj: dict, path) -> None:
    Path(path).write_text(json.dumps(obj, indent=1) + "\n")
