import numpy as np
import pytest

from ..errors import ContractError, ShapeError
from ..models import AutoencoderModel, encode, pretrain, reconstruction_loss
from ..nn import SeededRng


def test_rank_one_dataset_is_learned():
    x = np.tile(np.linspace(-1.0, 1.0, 8), (64, 1))
    model = AutoencoderModel.build([8, 4, 2], SeededRng(0))
    _, trace = pretrain(model, x, epochs=30, batch_size=8, rng=SeededRng(1), learning_rate=1e-2)
    assert len(trace) == 30
    assert trace[-1] < 0.1 * trace[0]


def test_zero_epochs_leaves_model_unchanged():
    model = AutoencoderModel.build([6, 3], SeededRng(0))
    before = {k: v.copy() for k, v in model.encoder.parameters().items()}
    same, trace = pretrain(model, np.ones((4, 6)), epochs=0)
    assert same is model
    assert trace == []
    for path, value in model.encoder.parameters().items():
        np.testing.assert_array_equal(value, before[path])


def test_pretraining_is_deterministic():
    x = SeededRng(5).normal(size=(40, 6))
    traces = []
    for _ in range(2):
        model = AutoencoderModel.build([6, 4, 2], SeededRng(2))
        traces.append(pretrain(model, x, epochs=5, batch_size=16, rng=SeededRng(3))[1])
    assert traces[0] == traces[1]


def test_empty_input_is_rejected():
    model = AutoencoderModel.build([6, 3], SeededRng(0))
    with pytest.raises(ContractError):
        pretrain(model, np.zeros((0, 6)), epochs=1)


def test_encode_zero_vector_is_zero():
    model = AutoencoderModel.build([6, 4, 2], SeededRng(0))
    assert not encode(model, np.zeros(6)).any()


def test_encode_is_consistent_and_checks_dimension():
    model = AutoencoderModel.build([6, 4, 2], SeededRng(0))
    x = np.arange(6.0)
    np.testing.assert_array_equal(encode(model, x), encode(model, x))
    assert encode(model, x).shape == (2,)
    with pytest.raises(ShapeError):
        encode(model, np.ones(5))


def test_decoder_must_mirror_encoder():
    a = AutoencoderModel.build([6, 4, 2], SeededRng(0))
    b = AutoencoderModel.build([6, 3, 2], SeededRng(0))
    with pytest.raises(ShapeError):
        AutoencoderModel(encoder=a.encoder, decoder=b.decoder)


@pytest.mark.slow
def test_low_rank_embeddings_reconstruct_well():
    rng = SeededRng(8)
    basis = rng.normal(size=(8, 384))
    x = rng.derive(1).normal(size=(256, 8)) @ basis
    x /= np.linalg.norm(x, axis=1, keepdims=True)

    model = AutoencoderModel.build([384, 128, 32], SeededRng(0))
    _, trace = pretrain(model, x, epochs=200, batch_size=64, rng=SeededRng(1))
    assert trace[-1] < trace[0]
    assert reconstruction_loss(model, x) < 0.05
