import enum
import itertools
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..errors import ContractError, ShapeError, TrainingError
from .rng import SeededRng

logger = logging.getLogger(__name__)

LEAKY_RELU_ALPHA = 0.01

# (path) -> array; shared by parameters, gradients and Adam moments
ParameterGradients = Dict[str, np.ndarray]

_net_tokens = itertools.count()


class Activation(str, enum.Enum):
    LEAKY_RELU = "leaky_relu"
    IDENTITY = "identity"

    def apply(self, z: np.ndarray) -> np.ndarray:
        if self is Activation.LEAKY_RELU:
            return np.where(z > 0, z, LEAKY_RELU_ALPHA * z)
        return z

    def derivative(self, z: np.ndarray) -> np.ndarray:
        if self is Activation.LEAKY_RELU:
            # Subgradient at 0 is alpha
            return np.where(z > 0, 1.0, LEAKY_RELU_ALPHA)
        return np.ones_like(z)


@dataclass(eq=False)
class LayerSpec:
    weight: np.ndarray
    bias: Optional[np.ndarray] = None
    activation: Activation = Activation.LEAKY_RELU

    def __post_init__(self):
        self.weight = np.array(self.weight, dtype=np.float64)
        if self.weight.ndim != 2:
            raise ShapeError(f"Layer weight must be a matrix, got shape {self.weight.shape}")
        if self.bias is not None:
            self.bias = np.array(self.bias, dtype=np.float64)
            if self.bias.shape != (self.out_dim,):
                raise ShapeError(
                    f"Layer bias must have shape ({self.out_dim},), got {self.bias.shape}"
                )
        self.activation = Activation(self.activation)

    @property
    def in_dim(self) -> int:
        return self.weight.shape[1]

    @property
    def out_dim(self) -> int:
        return self.weight.shape[0]

    @property
    def has_bias(self) -> bool:
        return self.bias is not None


@dataclass(eq=False)
class DenseNet:
    layers: List[LayerSpec]
    # Bumped on every parameter write; forward caches remember the version they saw
    version: int = 0
    token: int = field(default_factory=lambda: next(_net_tokens), compare=False)

    def __post_init__(self):
        if not self.layers:
            raise ShapeError("A DenseNet needs at least one layer")
        for k, (a, b) in enumerate(zip(self.layers, self.layers[1:])):
            if a.out_dim != b.in_dim:
                raise ShapeError(
                    f"Layer {k} outputs {a.out_dim} values but layer {k + 1} "
                    f"expects {b.in_dim}"
                )

    @classmethod
    def build(
        cls,
        dims: Sequence[int],
        rng: SeededRng,
        has_bias: bool = False,
        final_activation: Activation = Activation.IDENTITY,
    ) -> "DenseNet":
        """Glorot-uniform initialized MLP with leaky ReLU hidden layers."""
        if len(dims) < 2 or any(d < 1 for d in dims):
            raise ShapeError(f"Invalid layer dims {list(dims)}")

        layers = []
        for k, (in_dim, out_dim) in enumerate(zip(dims, dims[1:])):
            limit = np.sqrt(6.0 / (in_dim + out_dim))
            weight = rng.uniform(-limit, limit, (out_dim, in_dim))
            bias = np.zeros(out_dim) if has_bias else None
            last = k == len(dims) - 2
            layers.append(
                LayerSpec(
                    weight=weight,
                    bias=bias,
                    activation=final_activation if last else Activation.LEAKY_RELU,
                )
            )
        return cls(layers)

    @property
    def dims(self) -> List[int]:
        return [self.layers[0].in_dim] + [layer.out_dim for layer in self.layers]

    @property
    def in_dim(self) -> int:
        return self.layers[0].in_dim

    @property
    def out_dim(self) -> int:
        return self.layers[-1].out_dim

    def parameters(self) -> ParameterGradients:
        params = {}
        for k, layer in enumerate(self.layers):
            params[f"layers.{k}.weight"] = layer.weight
            if layer.has_bias:
                params[f"layers.{k}.bias"] = layer.bias
        return params

    def load_parameters(self, params: ParameterGradients):
        for path, value in params.items():
            _, k, name = path.split(".")
            layer = self.layers[int(k)]
            current = getattr(layer, name)
            if current is None or current.shape != value.shape:
                raise ShapeError(f"Cannot load '{path}' with shape {value.shape}")
            if not np.all(np.isfinite(value)):
                raise TrainingError("Non-finite parameter after update", path=path)
            setattr(layer, name, np.array(value, dtype=np.float64))
        self.version += 1

    def copy(self) -> "DenseNet":
        return DenseNet(
            [
                LayerSpec(
                    weight=layer.weight.copy(),
                    bias=None if layer.bias is None else layer.bias.copy(),
                    activation=layer.activation,
                )
                for layer in self.layers
            ]
        )

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return forward(self, x)[0]


@dataclass(frozen=True)
class ForwardCache:
    net_token: int
    net_version: int
    single: bool
    # Per layer: the layer input and its pre-activation
    inputs: Tuple[np.ndarray, ...]
    pre_activations: Tuple[np.ndarray, ...]


def _as_batch(x) -> Tuple[np.ndarray, bool]:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 1:
        return x[None, :], True
    if x.ndim == 2:
        return x, False
    raise ShapeError(f"Expected a vector or a batch of vectors, got shape {x.shape}")


def forward(net: DenseNet, x) -> Tuple[np.ndarray, ForwardCache]:
    """Run ``x`` (one vector or a batch of row vectors) through ``net``."""
    h, single = _as_batch(x)
    inputs = []
    pre_activations = []
    for k, layer in enumerate(net.layers):
        if h.shape[1] != layer.in_dim:
            raise ShapeError(
                f"Layer {k} expects inputs of length {layer.in_dim}, got {h.shape[1]}"
            )
        z = h @ layer.weight.T
        if layer.has_bias:
            z = z + layer.bias
        inputs.append(h)
        pre_activations.append(z)
        h = layer.activation.apply(z)

    cache = ForwardCache(
        net_token=net.token,
        net_version=net.version,
        single=single,
        inputs=tuple(inputs),
        pre_activations=tuple(pre_activations),
    )
    return (h[0] if single else h), cache


def backward(
    net: DenseNet, cache: ForwardCache, output_gradient
) -> Tuple[ParameterGradients, np.ndarray]:
    """Gradients of a scalar loss given dLoss/dOutput.

    For a batch, parameter gradients are summed over rows.
    """
    if cache.net_token != net.token or cache.net_version != net.version:
        raise ContractError("Forward cache does not belong to this network state")

    delta, _ = _as_batch(output_gradient)
    expected = cache.pre_activations[-1].shape
    if delta.shape != expected:
        raise ShapeError(
            f"Output gradient has shape {delta.shape}, expected {expected}"
        )

    grads = {}
    for k in reversed(range(len(net.layers))):
        layer = net.layers[k]
        dz = delta * layer.activation.derivative(cache.pre_activations[k])
        grads[f"layers.{k}.weight"] = dz.T @ cache.inputs[k]
        if layer.has_bias:
            grads[f"layers.{k}.bias"] = dz.sum(axis=0)
        delta = dz @ layer.weight

    return grads, (delta[0] if cache.single else delta)
