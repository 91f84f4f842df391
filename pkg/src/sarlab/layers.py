"""Parameter containers, layer set, and the seeded network builder.

Networks are described as flat lists of layer specs (convolution, affine,
activations, flatten, layer normalization). ``build_network`` validates the
chain, initializes weights orthogonally (zero biases) from an explicit rng,
and returns a ``Network`` whose forward pass runs on the autodiff tape when
``record=True``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import autodiff as ad
from .autodiff import Tensor


class ConfigurationError(ValueError):
    pass


class ParamSet:
    """Named parameter tensors with a role tag. Names are unique."""

    def __init__(self, role: str):
        self.role = role
        self._params: dict[str, Tensor] = {}

    def add(self, name: str, tensor: Tensor):
        if name in self._params:
            raise ValueError(f"duplicate parameter name: {name}")
        tensor.requires_grad = True
        self._params[name] = tensor

    def __getitem__(self, name: str) -> Tensor:
        return self._params[name]

    def __contains__(self, name: str) -> bool:
        return name in self._params

    def __iter__(self):
        return iter(self._params)

    def __len__(self):
        return len(self._params)

    def names(self):
        return list(self._params)

    def items(self):
        return self._params.items()

    def tensors(self):
        return self._params.values()

    def num_values(self) -> int:
        return sum(t.data.size for t in self._params.values())

    def zero_grad(self):
        for t in self._params.values():
            t.grad = None

    def grads(self) -> dict[str, np.ndarray]:
        """Collected gradients for parameters that received one."""
        return {n: t.grad for n, t in self._params.items() if t.grad is not None}

    def copy(self, role: str | None = None) -> "ParamSet":
        out = ParamSet(role or self.role)
        for n, t in self._params.items():
            out.add(n, Tensor(t.data.copy()))
        return out

    def load_values(self, values: dict[str, np.ndarray]):
        for n, t in self._params.items():
            v = np.asarray(values[n], dtype=t.data.dtype)
            if v.shape != t.data.shape:
                raise ValueError(f"shape mismatch loading {n}: {v.shape} vs {t.data.shape}")
            t.data = v.copy()


def orthogonal(rng: np.random.Generator, shape, gain: float, dtype) -> np.ndarray:
    """Orthogonal matrix init (QR with sign fix), scaled by gain."""
    rows, cols = shape
    flat = rng.standard_normal((max(rows, cols), min(rows, cols)))
    q, r = np.linalg.qr(flat)
    q *= np.sign(np.diag(r))  # make decomposition unique
    if rows < cols:
        q = q.T
    return np.ascontiguousarray(gain * q[:rows, :cols], dtype=dtype)


# layer specs ----------------------------------------------------------------

@dataclass(frozen=True)
class Affine:
    in_dim: int
    out_dim: int
    gain: float = 1.0


@dataclass(frozen=True)
class Conv:
    in_channels: int
    out_channels: int
    kernel: int = 3
    stride: int = 1
    gain: float = 1.0


@dataclass(frozen=True)
class Relu:
    pass


@dataclass(frozen=True)
class Tanh:
    pass


@dataclass(frozen=True)
class Flatten:
    pass


@dataclass(frozen=True)
class LayerNorm:
    dim: int
    eps: float = 1e-5


LayerSpec = Affine | Conv | Relu | Tanh | Flatten | LayerNorm


def _validate_chain(specs):
    """Static check of channel / width compatibility between adjacent layers."""
    out_width = None  # last known feature width (None when unknown, e.g. after Flatten)
    out_channels = None
    for i, spec in enumerate(specs):
        if isinstance(spec, Conv):
            if out_channels is not None and spec.in_channels != out_channels:
                raise ConfigurationError(
                    f"layer {i} (Conv): expects {spec.in_channels} channels, "
                    f"previous layer yields {out_channels}"
                )
            out_channels, out_width = spec.out_channels, None
        elif isinstance(spec, Affine):
            if out_width is not None and spec.in_dim != out_width:
                raise ConfigurationError(
                    f"layer {i} (Affine): expects width {spec.in_dim}, "
                    f"previous layer yields {out_width}"
                )
            out_width, out_channels = spec.out_dim, None
        elif isinstance(spec, LayerNorm):
            if out_width is not None and spec.dim != out_width:
                raise ConfigurationError(
                    f"layer {i} (LayerNorm): dim {spec.dim} does not match width {out_width}"
                )
            out_width = spec.dim
        elif isinstance(spec, Flatten):
            out_width, out_channels = None, None
        # activations keep shape


class Network:
    """A parameterized composition of layers sharing one ParamSet."""

    def __init__(self, specs, params: ParamSet):
        self.specs = list(specs)
        self.params = params

    def forward(self, x, record: bool = True) -> Tensor:
        if not record:
            with ad.no_grad():
                return self._apply(x)
        return self._apply(x)

    __call__ = forward

    def _apply(self, x) -> Tensor:
        h = ad.as_tensor(x)
        for i, spec in enumerate(self.specs):
            try:
                h = self._layer(i, spec, h)
            except ValueError as e:
                raise ValueError(f"layer {i} ({type(spec).__name__}): {e}") from None
        return h

    def _layer(self, i, spec, h: Tensor) -> Tensor:
        p = self.params
        if isinstance(spec, Affine):
            if h.data.ndim != 2 or h.data.shape[1] != spec.in_dim:
                raise ValueError(f"input shape {h.data.shape} incompatible with in_dim {spec.in_dim}")
            return ad.matmul(h, p[f"{i}.w"]) + p[f"{i}.b"]
        if isinstance(spec, Conv):
            return ad.conv2d(h, p[f"{i}.w"], stride=spec.stride) + ad.reshape(
                p[f"{i}.b"], (1, spec.out_channels, 1, 1)
            )
        if isinstance(spec, Relu):
            return ad.relu(h)
        if isinstance(spec, Tanh):
            return ad.tanh(h)
        if isinstance(spec, Flatten):
            return ad.reshape(h, (h.data.shape[0], -1))
        if isinstance(spec, LayerNorm):
            mu = ad.mean_(h, axis=-1, keepdims=True)
            centered = h - mu
            var = ad.mean_(ad.square(centered), axis=-1, keepdims=True)
            norm = centered / ad.sqrt(var + spec.eps)
            return norm * p[f"{i}.g"] + p[f"{i}.b"]
        raise ConfigurationError(f"unknown layer spec {spec!r}")


def build_network(specs, rng: np.random.Generator, role: str = "net",
                  dtype=np.float64) -> Network:
    """Initialize a network from layer specs; deterministic given rng state.

    An empty spec list yields the identity function with zero parameters.
    """
    specs = list(specs)
    _validate_chain(specs)
    params = ParamSet(role)
    for i, spec in enumerate(specs):
        if isinstance(spec, Affine):
            w = orthogonal(rng, (spec.in_dim, spec.out_dim), spec.gain, dtype)
            params.add(f"{i}.w", Tensor(w))
            params.add(f"{i}.b", Tensor(np.zeros(spec.out_dim, dtype=dtype)))
        elif isinstance(spec, Conv):
            fan = spec.in_channels * spec.kernel * spec.kernel
            w = orthogonal(rng, (spec.out_channels, fan), spec.gain, dtype)
            w = w.reshape(spec.out_channels, spec.in_channels, spec.kernel, spec.kernel)
            params.add(f"{i}.w", Tensor(w))
            params.add(f"{i}.b", Tensor(np.zeros(spec.out_channels, dtype=dtype)))
        elif isinstance(spec, LayerNorm):
            params.add(f"{i}.g", Tensor(np.ones(spec.dim, dtype=dtype)))
            params.add(f"{i}.b", Tensor(np.zeros(spec.dim, dtype=dtype)))
    return Network(specs, params)


def mlp_specs(in_dim: int, hidden: list[int], out_dim: int,
              out_gain: float = 1.0) -> list:
    """Rectifier MLP spec: hidden affines get gain sqrt(2), output gets out_gain."""
    specs: list = []
    d = in_dim
    for h in hidden:
        specs.append(Affine(d, h, gain=np.sqrt(2.0)))
        specs.append(Relu())
        d = h
    specs.append(Affine(d, out_dim, gain=out_gain))
    return specs
