from typing import List

import numpy as np

from ..constants import FORMAT_VERSION, JsonDict
from ..errors import DataError
from ..nn import Activation, DenseNet, LayerSpec
from .deep_svdd import DeepSvddModel

# Floats are stored as hex strings so a save/load round trip is value-exact


def _hex_list(values: np.ndarray) -> List[str]:
    return [float(v).hex() for v in np.ravel(values)]


def _from_hex(values: List[str]) -> np.ndarray:
    return np.array([float.fromhex(v) for v in values], dtype=np.float64)


def model_to_dict(model: DeepSvddModel) -> JsonDict:
    return {
        "format_version": FORMAT_VERSION,
        "dims": model.encoder.dims,
        "activations": [layer.activation.value for layer in model.encoder.layers],
        # Row-major, one flat list per layer
        "weights": [_hex_list(layer.weight) for layer in model.encoder.layers],
        "center": None if model.center is None else _hex_list(model.center),
        "radius": float(model.radius).hex(),
        "weight_decay": float(model.weight_decay).hex(),
        "nu": float(model.nu).hex(),
        "seed": model.seed,
    }


def model_from_dict(data: JsonDict) -> DeepSvddModel:
    if data.get("format_version") != FORMAT_VERSION:
        raise DataError(
            f"Unsupported model format version {data.get('format_version')!r}"
        )
    try:
        dims = data["dims"]
        layers = []
        for k, (flat, activation) in enumerate(zip(data["weights"], data["activations"])):
            weight = _from_hex(flat).reshape(dims[k + 1], dims[k])
            layers.append(LayerSpec(weight=weight, activation=Activation(activation)))
        return DeepSvddModel(
            encoder=DenseNet(layers),
            center=None if data["center"] is None else _from_hex(data["center"]),
            radius=float.fromhex(data["radius"]),
            weight_decay=float.fromhex(data["weight_decay"]),
            nu=float.fromhex(data["nu"]),
            seed=data.get("seed"),
        )
    except (KeyError, TypeError, ValueError) as e:
        raise DataError(f"Malformed model file ({type(e).__name__}: {e})") from e
