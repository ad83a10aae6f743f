import logging
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from ..errors import ContractError, ShapeError, TrainingError
from ..nn import AdamState, DenseNet, SeededRng, adam_update, backward, forward

logger = logging.getLogger(__name__)

DEFAULT_ENCODER_DIMS = (384, 128, 32)
DEFAULT_EPOCHS = 100
DEFAULT_BATCH_SIZE = 64


@dataclass(eq=False)
class AutoencoderModel:
    encoder: DenseNet
    decoder: DenseNet

    def __post_init__(self):
        if self.decoder.dims != self.encoder.dims[::-1]:
            raise ShapeError(
                f"Decoder dims {self.decoder.dims} do not mirror encoder dims "
                f"{self.encoder.dims}"
            )
        for net in (self.encoder, self.decoder):
            if any(layer.has_bias for layer in net.layers):
                raise ContractError("Autoencoder layers must be bias-free")

    @classmethod
    def build(cls, dims: Sequence[int], rng: SeededRng) -> "AutoencoderModel":
        dims = list(dims)
        return cls(
            encoder=DenseNet.build(dims, rng.derive(0)),
            decoder=DenseNet.build(dims[::-1], rng.derive(1)),
        )

    def copy(self) -> "AutoencoderModel":
        return AutoencoderModel(encoder=self.encoder.copy(), decoder=self.decoder.copy())


def encode(model: AutoencoderModel, vectors) -> np.ndarray:
    return forward(model.encoder, vectors)[0]


def reconstruction_loss(model: AutoencoderModel, vectors) -> float:
    x = np.atleast_2d(np.asarray(vectors, dtype=np.float64))
    reconstructed = forward(model.decoder, encode(model, x))[0]
    return float(np.mean((reconstructed - x) ** 2))


def _batch_step(
    model: AutoencoderModel, batch: np.ndarray, state: AdamState
) -> Tuple[float, AdamState]:
    code, encoder_cache = forward(model.encoder, batch)
    reconstructed, decoder_cache = forward(model.decoder, code)
    error = reconstructed - batch
    loss = float(np.mean(error**2))

    # d/d(reconstructed) of mean over batch and dims of the squared error
    output_gradient = 2.0 * error / error.size
    decoder_grads, code_gradient = backward(model.decoder, decoder_cache, output_gradient)
    encoder_grads, _ = backward(model.encoder, encoder_cache, code_gradient)

    params = {f"encoder.{k}": v for k, v in model.encoder.parameters().items()}
    params.update({f"decoder.{k}": v for k, v in model.decoder.parameters().items()})
    grads = {f"encoder.{k}": v for k, v in encoder_grads.items()}
    grads.update({f"decoder.{k}": v for k, v in decoder_grads.items()})

    updated, state = adam_update(params, grads, state)
    model.encoder.load_parameters(
        {k[len("encoder."):]: v for k, v in updated.items() if k.startswith("encoder.")}
    )
    model.decoder.load_parameters(
        {k[len("decoder."):]: v for k, v in updated.items() if k.startswith("decoder.")}
    )
    return loss, state


def pretrain(
    model: AutoencoderModel,
    vectors,
    epochs: int = DEFAULT_EPOCHS,
    batch_size: int = DEFAULT_BATCH_SIZE,
    rng: SeededRng = None,
    learning_rate: float = 1e-3,
) -> Tuple[AutoencoderModel, List[float]]:
    """Train ``model`` in place to reconstruct ``vectors``.

    Returns the model and the per-epoch mean batch reconstruction loss. No label
    information is involved; only the encoder is meant to be reused afterwards.
    """
    x = np.asarray(vectors, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] == 0:
        raise ContractError("Pretraining needs at least one vector")
    if x.shape[1] != model.encoder.in_dim:
        raise ShapeError(
            f"Vectors have dimension {x.shape[1]}, encoder expects {model.encoder.in_dim}"
        )
    if batch_size < 1:
        raise ContractError("batch_size must be positive")
    if rng is None:
        rng = SeededRng(0)

    state = AdamState(learning_rate=learning_rate)
    trace = []
    for epoch in range(epochs):
        order = rng.permutation(x.shape[0])
        losses = []
        for start in range(0, x.shape[0], batch_size):
            try:
                loss, state = _batch_step(model, x[order[start : start + batch_size]], state)
            except TrainingError as e:
                raise TrainingError(str(e), epoch=epoch) from e
            losses.append(loss)
        epoch_loss = float(np.mean(losses))
        if not np.isfinite(epoch_loss):
            raise TrainingError("Reconstruction loss is not finite", epoch=epoch)
        trace.append(epoch_loss)
        logger.debug(f"Autoencoder epoch {epoch}: loss {epoch_loss:.6g}")

    return model, trace
