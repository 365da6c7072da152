import numpy as np

from biaffine_net.models import PAD_ID, ModelParams, TrainConfig

from .models import OptimizerState


def learning_rate_at(step: int, base_rate: float, total_steps: int, warmup_ratio: float) -> float:
    """Linear warmup from 0 over warmup_ratio·total_steps, then linear decay to 0 at total_steps."""
    warmup = warmup_ratio * total_steps
    if step >= total_steps:
        return 0.0
    if step < warmup:
        return base_rate * step / warmup
    return base_rate * (total_steps - step) / (total_steps - warmup)


def _decay_masks(params: ModelParams):
    masks = []
    for name, array in params.named_arrays():
        mask = np.ones_like(array)
        if name == 'embeddings':
            mask[PAD_ID] = 0.0
        masks.append(mask)
    return masks


def optimizer_step(params: ModelParams, grads: ModelParams, state: OptimizerState, config: TrainConfig) -> float:
    """
    One AdamW update, in place on `params` and `state`; returns the rate used.

    Weight decay is decoupled: θ ← θ − ηλθ, applied outside the moments. The
    PAD embedding row is never decayed.
    """
    rate = learning_rate_at(state.step, config.learning_rate, state.total_steps, state.warmup_ratio)
    state.step += 1
    k = state.step
    correction1 = 1.0 - config.beta1 ** k
    correction2 = 1.0 - config.beta2 ** k
    for param, grad, m, v, decay in zip(params.arrays(), grads.arrays(), state.first_moment.arrays(),
                                        state.second_moment.arrays(), _decay_masks(params)):
        if param.shape != grad.shape:
            raise ValueError(f"Gradient shape {grad.shape} does not match parameter shape {param.shape}.")
        m *= config.beta1
        m += (1.0 - config.beta1) * grad
        v *= config.beta2
        v += (1.0 - config.beta2) * grad * grad
        param -= rate * config.weight_decay * decay * param
        param -= rate * (m / correction1) / (np.sqrt(v / correction2) + config.epsilon)
    return rate
