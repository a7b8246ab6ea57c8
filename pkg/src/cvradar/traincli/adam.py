"""Bias-corrected Adam over named complex parameters.

Each parameter is two independent real planes, so the optimizer runs the
standard real recurrence twice per parameter. A plane whose gradient is
exactly zero (or absent, the tape's encoding of a structural zero) is
skipped outright: its values and moments stay untouched. That keeps
provably-real planes (attention weights, classifier heads) exactly real
forever instead of letting stale momentum drift them.
"""

from dataclasses import dataclass

import numpy as np

from ..ctensor import ComplexTensor

__all__ = ["OptimizerError", "AdamState", "init_adam_state", "adam_step"]


class OptimizerError(ValueError):
    """Raised on non-finite gradients; the message names the parameter."""


@dataclass(frozen=True)
class AdamState:
    step: int
    moments: dict  # (name, plane) -> (m, v) float arrays

    def __post_init__(self):
        if self.step < 0:
            raise ValueError(f"step counter must be >= 0, got {self.step}")


def init_adam_state():
    return AdamState(step=0, moments={})


def _plane_update(value, grad, key, moments, lr, beta1, beta2, eps, t):
    m, v = moments.get(key, (None, None))
    if m is None:
        m = np.zeros_like(value)
        v = np.zeros_like(value)
    m = beta1 * m + (1.0 - beta1) * grad
    v = beta2 * v + (1.0 - beta2) * grad * grad
    moments[key] = (m, v)
    m_hat = m / (1.0 - beta1 ** t)
    v_hat = v / (1.0 - beta2 ** t)
    return value - lr * m_hat / (np.sqrt(v_hat) + eps)


def adam_step(params, grads, state, config):
    """One optimizer step.

    params: ordered (name, ComplexTensor) pairs. grads: name -> object with
    .re/.im real arrays (a tape Gradient), or None for a parameter that got
    no gradient at all. Returns (updated pairs in the same order, new state).
    """
    t = state.step + 1
    lr, b1, b2, eps = config.learning_rate, config.beta1, config.beta2, config.eps
    moments = dict(state.moments)
    updated = []
    for name, p in params:
        g = grads.get(name)
        new_re, new_im = p.re, p.im
        changed = False
        for plane in ("re", "im"):
            grad = None if g is None else getattr(g, plane)
            if grad is None or not np.any(grad):
                continue
            if not np.all(np.isfinite(grad)):
                raise OptimizerError(f"non-finite gradient for parameter {name!r} ({plane} plane)")
            value = getattr(p, plane)
            out = _plane_update(value, grad, (name, plane), moments, lr, b1, b2, eps, t)
            if plane == "re":
                new_re = out
            else:
                new_im = out
            changed = True
        updated.append((name, ComplexTensor(new_re, new_im) if changed else p))
    return updated, AdamState(step=t, moments=moments)
