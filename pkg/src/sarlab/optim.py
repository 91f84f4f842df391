"""Adam optimizer and exponential-moving-average target updates."""

from __future__ import annotations

import warnings

import numpy as np

from .layers import ParamSet


class Adam:
    """Standard Adam with bias correction over one ParamSet.

    Parameters missing from a grads map are skipped with a warning:
    frozen parameters are legal.
    """

    def __init__(self, params: ParamSet, lr: float = 5e-4,
                 beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        self.params = params
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.m = {n: np.zeros_like(t.data) for n, t in params.items()}
        self.v = {n: np.zeros_like(t.data) for n, t in params.items()}

    def step(self, grads: dict[str, np.ndarray]):
        self.t += 1
        b1, b2 = self.beta1, self.beta2
        bc1 = 1.0 - b1 ** self.t
        bc2 = 1.0 - b2 ** self.t
        for name, p in self.params.items():
            g = grads.get(name)
            if g is None:
                warnings.warn(f"adam: no gradient for '{name}', skipping", stacklevel=2)
                continue
            if g.shape != p.data.shape:
                raise ValueError(f"adam: gradient shape {g.shape} != param {p.data.shape} for {name}")
            m = self.m[name]
            v = self.v[name]
            m *= b1
            m += (1.0 - b1) * g
            v *= b2
            v += (1.0 - b2) * (g * g)
            p.data -= self.lr * (m / bc1) / (np.sqrt(v / bc2) + self.eps)

    def state_arrays(self, prefix: str) -> dict[str, np.ndarray]:
        out = {f"{prefix}/t": np.array([float(self.t)])}
        for n in self.params.names():
            out[f"{prefix}/m/{n}"] = self.m[n]
            out[f"{prefix}/v/{n}"] = self.v[n]
        return out

    def load_state_arrays(self, prefix: str, arrays: dict[str, np.ndarray]):
        self.t = int(arrays[f"{prefix}/t"][0])
        for n, p in self.params.items():
            self.m[n] = np.asarray(arrays[f"{prefix}/m/{n}"], dtype=p.data.dtype).reshape(p.data.shape).copy()
            self.v[n] = np.asarray(arrays[f"{prefix}/v/{n}"], dtype=p.data.dtype).reshape(p.data.shape).copy()


def ema_update(target: ParamSet, online: ParamSet, tau: float):
    """target <- tau * online + (1 - tau) * target, elementwise in place."""
    if set(target.names()) != set(online.names()):
        raise ValueError("ema_update: parameter name sets differ")
    for name, t in target.items():
        o = online[name]
        if o.data.shape != t.data.shape:
            raise ValueError(f"ema_update: shape mismatch for {name}: {o.data.shape} vs {t.data.shape}")
        t.data *= 1.0 - tau
        t.data += tau * o.data
