from .adam import AdamState, adam_update
from .net import (
    Activation,
    DenseNet,
    ForwardCache,
    LayerSpec,
    ParameterGradients,
    backward,
    forward,
)
from .rng import SeededRng
