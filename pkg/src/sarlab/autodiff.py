"""Reverse-mode automatic differentiation over dense numpy arrays.

A ``Tensor`` wraps an ndarray and, while gradient recording is enabled,
remembers how it was produced. ``backward(loss)`` walks the recorded graph
in reverse topological order and accumulates gradients into every tensor
that participated with ``requires_grad=True``. Only the operations the
rest of the package needs are provided; broadcasting is limited to what
the layer set uses (bias rows, scalars).
"""

from __future__ import annotations

import numpy as np

_grad_enabled = True


class no_grad:
    """Context manager that suspends graph recording."""

    def __enter__(self):
        global _grad_enabled
        self._prev = _grad_enabled
        _grad_enabled = False
        return self

    def __exit__(self, *exc):
        global _grad_enabled
        _grad_enabled = self._prev
        return False


def grad_enabled() -> bool:
    return _grad_enabled


class Tensor:
    __slots__ = ("data", "grad", "requires_grad", "_parents", "_backward")

    def __init__(self, data, requires_grad: bool = False, dtype=None):
        arr = np.asarray(data)
        if dtype is not None and arr.dtype != dtype:
            arr = arr.astype(dtype)
        if arr.dtype not in (np.float64, np.float32):
            arr = arr.astype(np.float64)
        self.data = arr
        self.grad = None
        self.requires_grad = bool(requires_grad)
        self._parents = ()
        self._backward = None

    @property
    def shape(self):
        return self.data.shape

    @property
    def dtype(self):
        return self.data.dtype

    def detach(self) -> "Tensor":
        return Tensor(self.data)

    def item(self) -> float:
        return float(self.data)

    def zero_grad(self):
        self.grad = None

    def __repr__(self):
        return f"Tensor(shape={self.data.shape}, requires_grad={self.requires_grad})"

    # operator sugar -------------------------------------------------
    def __add__(self, other):
        return add(self, other)

    def __radd__(self, other):
        return add(other, self)

    def __sub__(self, other):
        return sub(self, other)

    def __rsub__(self, other):
        return sub(other, self)

    def __mul__(self, other):
        return mul(self, other)

    def __rmul__(self, other):
        return mul(other, self)

    def __truediv__(self, other):
        return div(self, other)

    def __rtruediv__(self, other):
        return div(other, self)

    def __neg__(self):
        return neg(self)

    def __matmul__(self, other):
        return matmul(self, other)

    def __getitem__(self, key):
        return slice_(self, key)

    def sum(self, axis=None, keepdims=False):
        return sum_(self, axis=axis, keepdims=keepdims)

    def mean(self, axis=None, keepdims=False):
        return mean_(self, axis=axis, keepdims=keepdims)

    def reshape(self, *shape):
        return reshape(self, shape if len(shape) > 1 else shape[0])


def as_tensor(x, dtype=None) -> Tensor:
    if isinstance(x, Tensor):
        return x
    return Tensor(np.asarray(x), dtype=dtype)


def _result(data, parents, backward_fn) -> Tensor:
    """Build an op result; record the edge only if a parent wants gradients."""
    out = Tensor(data)
    if _grad_enabled and any(p.requires_grad for p in parents):
        out.requires_grad = True
        out._parents = tuple(parents)
        out._backward = backward_fn
    return out


def _accum(t: Tensor, g):
    if not t.requires_grad:
        return
    if t.grad is None:
        # own a copy: the same buffer may have been handed to several parents
        t.grad = np.array(g, dtype=t.data.dtype)
    else:
        t.grad += g


def _unbroadcast(grad: np.ndarray, shape) -> np.ndarray:
    """Reduce a broadcast gradient back to the original operand shape."""
    if grad.shape == tuple(shape):
        return grad
    extra = grad.ndim - len(shape)
    if extra > 0:
        grad = grad.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, s in enumerate(shape) if s == 1 and grad.shape[i] != 1)
    if axes:
        grad = grad.sum(axis=axes, keepdims=True)
    return grad.reshape(shape)


# elementwise arithmetic --------------------------------------------------

def add(a, b):
    a, b = as_tensor(a), as_tensor(b)
    data = a.data + b.data

    def back(g):
        _accum(a, _unbroadcast(g, a.data.shape))
        _accum(b, _unbroadcast(g, b.data.shape))

    return _result(data, (a, b), back)


def sub(a, b):
    a, b = as_tensor(a), as_tensor(b)
    data = a.data - b.data

    def back(g):
        _accum(a, _unbroadcast(g, a.data.shape))
        _accum(b, _unbroadcast(-g, b.data.shape))

    return _result(data, (a, b), back)


def mul(a, b):
    a, b = as_tensor(a), as_tensor(b)
    data = a.data * b.data

    def back(g):
        _accum(a, _unbroadcast(g * b.data, a.data.shape))
        _accum(b, _unbroadcast(g * a.data, b.data.shape))

    return _result(data, (a, b), back)


def div(a, b):
    a, b = as_tensor(a), as_tensor(b)
    data = a.data / b.data

    def back(g):
        _accum(a, _unbroadcast(g / b.data, a.data.shape))
        _accum(b, _unbroadcast(-g * data / b.data, b.data.shape))

    return _result(data, (a, b), back)


def neg(a):
    a = as_tensor(a)

    def back(g):
        _accum(a, -g)

    return _result(-a.data, (a,), back)


def square(a):
    a = as_tensor(a)

    def back(g):
        _accum(a, g * 2.0 * a.data)

    return _result(a.data * a.data, (a,), back)


def sqrt(a):
    a = as_tensor(a)
    data = np.sqrt(a.data)

    def back(g):
        _accum(a, g * 0.5 / data)

    return _result(data, (a,), back)


def exp(a):
    a = as_tensor(a)
    data = np.exp(a.data)

    def back(g):
        _accum(a, g * data)

    return _result(data, (a,), back)


def log(a):
    a = as_tensor(a)

    def back(g):
        _accum(a, g / a.data)

    return _result(np.log(a.data), (a,), back)


def tanh(a):
    a = as_tensor(a)
    data = np.tanh(a.data)

    def back(g):
        _accum(a, g * (1.0 - data * data))

    return _result(data, (a,), back)


def relu(a):
    a = as_tensor(a)
    data = np.maximum(a.data, 0.0)

    def back(g):
        _accum(a, g * (a.data > 0.0))

    return _result(data, (a,), back)


def softplus(a):
    """log(1 + exp(x)), computed stably; gradient is the logistic sigmoid."""
    a = as_tensor(a)
    data = np.logaddexp(0.0, a.data)

    def back(g):
        sig = 1.0 / (1.0 + np.exp(-a.data))
        _accum(a, g * sig)

    return _result(data, (a,), back)


def sin(a):
    a = as_tensor(a)

    def back(g):
        _accum(a, g * np.cos(a.data))

    return _result(np.sin(a.data), (a,), back)


def cos(a):
    a = as_tensor(a)

    def back(g):
        _accum(a, -g * np.sin(a.data))

    return _result(np.cos(a.data), (a,), back)


def clip(a, lo, hi):
    """Clamp values; interior points pass gradient, clamped points block it."""
    a = as_tensor(a)
    data = np.clip(a.data, lo, hi)

    def back(g):
        _accum(a, g * ((a.data > lo) & (a.data < hi)))

    return _result(data, (a,), back)


def minimum(a, b):
    """Elementwise min; gradient follows the smaller operand (ties go to a)."""
    a, b = as_tensor(a), as_tensor(b)
    take_a = a.data <= b.data
    data = np.where(take_a, a.data, b.data)

    def back(g):
        _accum(a, _unbroadcast(g * take_a, a.data.shape))
        _accum(b, _unbroadcast(g * ~take_a, b.data.shape))

    return _result(data, (a, b), back)


# shape and reduction ------------------------------------------------------

def sum_(a, axis=None, keepdims=False):
    a = as_tensor(a)
    data = a.data.sum(axis=axis, keepdims=keepdims)

    def back(g):
        g = np.asarray(g)
        if axis is not None and not keepdims:
            axes = axis if isinstance(axis, tuple) else (axis,)
            g = np.expand_dims(g, axes)
        _accum(a, np.broadcast_to(g, a.data.shape))

    return _result(data, (a,), back)


def mean_(a, axis=None, keepdims=False):
    a = as_tensor(a)
    n = a.data.size if axis is None else np.prod(
        [a.data.shape[ax] for ax in (axis if isinstance(axis, tuple) else (axis,))]
    )
    return mul(sum_(a, axis=axis, keepdims=keepdims), 1.0 / float(n))


def reshape(a, shape):
    a = as_tensor(a)
    old = a.data.shape

    def back(g):
        _accum(a, g.reshape(old))

    return _result(a.data.reshape(shape), (a,), back)


def slice_(a, key):
    a = as_tensor(a)
    data = a.data[key]

    def back(g):
        full = np.zeros_like(a.data)
        full[key] = g
        _accum(a, full)

    return _result(data, (a,), back)


def take_rows(a, idx):
    """Select rows along axis 0 by integer index; backward scatter-adds."""
    a = as_tensor(a)
    idx = np.asarray(idx, dtype=np.intp)
    data = a.data[idx]

    def back(g):
        full = np.zeros_like(a.data)
        np.add.at(full, idx, g)
        _accum(a, full)

    return _result(data, (a,), back)


def concat(parts, axis=-1):
    parts = [as_tensor(p) for p in parts]
    data = np.concatenate([p.data for p in parts], axis=axis)
    sizes = [p.data.shape[axis] for p in parts]

    def back(g):
        offsets = np.cumsum([0] + sizes)
        for p, lo, hi in zip(parts, offsets[:-1], offsets[1:]):
            sl = [slice(None)] * g.ndim
            sl[axis] = slice(lo, hi)
            _accum(p, g[tuple(sl)])

    return _result(data, tuple(parts), back)


def repeat_rows(a, k: int):
    """Repeat each row k times along axis 0: (B, ...) -> (B*k, ...)."""
    a = as_tensor(a)
    data = np.repeat(a.data, k, axis=0)

    def back(g):
        _accum(a, g.reshape(a.data.shape[0], k, *a.data.shape[1:]).sum(axis=1))

    return _result(data, (a,), back)


# linear algebra -----------------------------------------------------------

def matmul(a, b):
    a, b = as_tensor(a), as_tensor(b)
    if a.data.ndim != 2 or b.data.ndim != 2:
        raise ValueError(
            f"matmul expects 2-d operands, got {a.data.shape} @ {b.data.shape}"
        )
    if a.data.shape[1] != b.data.shape[0]:
        raise ValueError(
            f"matmul inner dimensions differ: {a.data.shape} @ {b.data.shape}"
        )
    data = a.data @ b.data

    def back(g):
        _accum(a, g @ b.data.T)
        _accum(b, a.data.T @ g)

    return _result(data, (a, b), back)


def conv2d(x, w, stride: int = 1):
    """Valid-padding 2-d convolution. x: (B, C, H, W), w: (OC, C, kh, kw)."""
    x, w = as_tensor(x), as_tensor(w)
    B, C, H, W = x.data.shape
    OC, Cw, kh, kw = w.data.shape
    if C != Cw:
        raise ValueError(f"conv2d channel mismatch: input {C}, weight {Cw}")
    if H < kh or W < kw:
        raise ValueError(f"conv2d input {H}x{W} smaller than kernel {kh}x{kw}")
    windows = np.lib.stride_tricks.sliding_window_view(x.data, (kh, kw), axis=(2, 3))
    windows = windows[:, :, ::stride, ::stride]  # (B, C, OH, OW, kh, kw)
    data = np.tensordot(windows, w.data, axes=((1, 4, 5), (1, 2, 3)))
    data = np.ascontiguousarray(data.transpose(0, 3, 1, 2))  # (B, OC, OH, OW)
    OH, OW = data.shape[2], data.shape[3]

    def back(g):
        if w.requires_grad:
            gw = np.tensordot(g, windows, axes=((0, 2, 3), (0, 2, 3)))
            _accum(w, gw)  # (OC, C, kh, kw)
        if x.requires_grad:
            gx = np.zeros_like(x.data)
            for i in range(kh):
                for j in range(kw):
                    # each kernel offset contributes a strided slab
                    contrib = np.tensordot(g, w.data[:, :, i, j], axes=((1,), (0,)))
                    gx[:, :, i : i + stride * OH : stride,
                       j : j + stride * OW : stride] += contrib.transpose(0, 3, 1, 2)
            _accum(x, gx)

    return _result(data, (x, w), back)


# graph traversal ----------------------------------------------------------

def backward(loss: Tensor):
    """Accumulate d(loss)/d(t) into ``t.grad`` for every recorded tensor."""
    if not isinstance(loss, Tensor):
        raise TypeError("backward expects a Tensor")
    if loss.data.size != 1:
        raise ValueError(f"backward requires a scalar loss, got shape {loss.data.shape}")
    topo: list[Tensor] = []
    seen: set[int] = set()
    stack: list[tuple[Tensor, bool]] = [(loss, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            topo.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for p in node._parents:
            if p.requires_grad and id(p) not in seen:
                stack.append((p, False))
    loss.grad = np.ones_like(loss.data)
    for node in reversed(topo):
        if node._backward is not None:
            node._backward(node.grad)
        if node is not loss and node._parents:
            node.grad = None  # free intermediate storage
