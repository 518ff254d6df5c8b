"""JSON persistence for every model kind plus a uniform prediction wrapper.

Saved files carry an envelope with the model kind and the physical input /
output ranges so a loaded model can score raw (unnormalized) situations.
All numeric values serialize through Python floats, whose repr round-trips
exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import cart as cart_mod
from . import tace
from .anfis import AnfisModel, forward_batch
from .fuzzy import MamdaniModel
from .mlp import MlpModel, mlp_forward_batch

FORMAT_TAG = "softdss-model"


def model_kind(model) -> str:
    if isinstance(model, AnfisModel):
        return "anfis"
    if isinstance(model, MamdaniModel):
        return "mamdani"
    if isinstance(model, MlpModel):
        return "mlp"
    if isinstance(model, cart_mod.TreeNode):
        return "cart"
    raise TypeError(f"unknown model type {type(model).__name__}")


def model_to_dict(model) -> dict:
    kind = model_kind(model)
    body = {"tree": model.to_dict()} if kind == "cart" else model.to_dict()
    return {"kind": kind, **body}


def model_from_dict(d: dict):
    kind = d.get("kind")
    if kind == "anfis":
        return AnfisModel.from_dict(d)
    if kind == "mamdani":
        return MamdaniModel.from_dict(d)
    if kind == "mlp":
        return MlpModel.from_dict(d)
    if kind == "cart":
        return cart_mod.TreeNode.from_dict(d["tree"])
    raise ValueError(f"unknown model kind {kind!r}")


def predict_normalized(model, X) -> np.ndarray:
    """Model output on [0, 1]-normalized inputs, uniformly across kinds."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    kind = model_kind(model)
    if kind == "anfis":
        return forward_batch(model, X)[0]
    if kind == "mamdani":
        return model.infer_batch(X)[0]
    if kind == "mlp":
        return mlp_forward_batch(model, X)
    return cart_mod.predict_batch(model, X)


@dataclass
class LoadedModel:
    """A deserialized model plus the physical ranges it was trained against."""

    kind: str
    model: object
    input_ranges: tuple
    output_range: tuple

    def predict_normalized(self, X) -> np.ndarray:
        return predict_normalized(self.model, X)

    def predict_score(self, x_physical) -> float:
        """Crisp decision score in physical units, clipped into the output range."""
        xn = tace.normalize_inputs(np.atleast_2d(x_physical))
        yn = float(self.predict_normalized(xn)[0])
        lo, hi = self.output_range
        return float(np.clip(yn * (hi - lo) + lo, lo, hi))


def save_model(model, path, input_ranges=tace.FIELD_RANGES, output_range=tace.SCORE_RANGE) -> None:
    payload = {
        "format": FORMAT_TAG,
        "input_ranges": [list(r) for r in input_ranges],
        "output_range": list(output_range),
        "model": model_to_dict(model),
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=1, sort_keys=True)
        fh.write("\n")


def load_model(path) -> LoadedModel:
    with open(path) as fh:
        payload = json.load(fh)
    if payload.get("format") != FORMAT_TAG:
        raise ValueError(f"{path}: not a {FORMAT_TAG} file")
    model = model_from_dict(payload["model"])
    return LoadedModel(
        kind=payload["model"]["kind"],
        model=model,
        input_ranges=tuple(tuple(r) for r in payload["input_ranges"]),
        output_range=tuple(payload["output_range"]),
    )
