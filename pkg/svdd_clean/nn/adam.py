from dataclasses import dataclass, field
from typing import Tuple

import numpy as np

from ..errors import ShapeError, TrainingError
from .net import ParameterGradients


@dataclass
class AdamState:
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    step_count: int = 0
    first_moment: ParameterGradients = field(default_factory=dict)
    second_moment: ParameterGradients = field(default_factory=dict)

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if not (0 < self.beta1 < 1 and 0 < self.beta2 < 1):
            raise ValueError("beta1 and beta2 must lie in (0, 1)")


def adam_update(
    params: ParameterGradients, grads: ParameterGradients, state: AdamState
) -> Tuple[ParameterGradients, AdamState]:
    """One bias-corrected Adam step. Returns new arrays; inputs are not mutated."""
    if set(params) != set(grads):
        raise ShapeError(
            f"Gradient paths {sorted(grads)} do not match parameters {sorted(params)}"
        )

    step = state.step_count + 1
    first = {}
    second = {}
    updated = {}
    for path, param in params.items():
        grad = grads[path]
        if grad.shape != param.shape:
            raise ShapeError(
                f"Gradient for '{path}' has shape {grad.shape}, expected {param.shape}"
            )
        if not np.all(np.isfinite(grad)):
            raise TrainingError("Non-finite gradient", path=path)

        m = state.first_moment.get(path, np.zeros_like(param))
        v = state.second_moment.get(path, np.zeros_like(param))
        m = state.beta1 * m + (1.0 - state.beta1) * grad
        v = state.beta2 * v + (1.0 - state.beta2) * grad * grad
        m_hat = m / (1.0 - state.beta1**step)
        v_hat = v / (1.0 - state.beta2**step)

        new_param = param - state.learning_rate * m_hat / (np.sqrt(v_hat) + state.epsilon)
        if not np.all(np.isfinite(new_param)):
            raise TrainingError("Non-finite parameter after update", path=path)

        first[path] = m
        second[path] = v
        updated[path] = new_param

    new_state = AdamState(
        learning_rate=state.learning_rate,
        beta1=state.beta1,
        beta2=state.beta2,
        epsilon=state.epsilon,
        step_count=step,
        first_moment=first,
        second_moment=second,
    )
    return updated, new_state
