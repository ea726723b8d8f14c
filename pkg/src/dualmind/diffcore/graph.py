"""Reverse-mode differentiation on small dense matrices.

Every node in the computation graph is a `Value` wrapping a 2-D float64
array.  Vectors are row vectors, batches are stacked rows.  Operations
record vector-Jacobian closures; `backward` replays them in reverse
topological order.  Each backward pass is computed in a scratch buffer and
added into `.grad` at the end, so running backward twice on the same graph
accumulates exactly twice the gradient.
"""

from __future__ import annotations

import itertools

import numpy as np

from ..errors import ContractError, DimensionError, DomainError, NumericError

_ids = itertools.count()


class Value:
    """One node of the recorded computation graph."""

    __slots__ = ("data", "_grad", "_edges", "_id")

    def __init__(self, data, edges=()):
        arr = np.array(data, dtype=np.float64)
        self.data = _as_matrix(arr)
        self._grad = None
        self._edges = tuple(edges)
        self._id = next(_ids)

    @classmethod
    def _make(cls, arr, edges=()):
        # internal fast path: arr is a freshly computed float64 matrix
        v = cls.__new__(cls)
        v.data = arr
        v._grad = None
        v._edges = tuple(edges)
        v._id = next(_ids)
        return v

    @property
    def grad(self):
        if self._grad is None:
            self._grad = np.zeros_like(self.data)
        return self._grad

    @property
    def shape(self):
        return self.data.shape

    def item(self):
        if self.data.size != 1:
            raise ContractError(f"item() on non-scalar value of shape {self.shape}")
        return float(self.data.reshape(()))

    def zero_grad(self):
        if self._grad is not None:
            self._grad[...] = 0.0

    def detach(self):
        """Copy of this value cut off from the graph."""
        return Value._make(self.data.copy())

    # arithmetic sugar; scalars and arrays are promoted to constants
    def __add__(self, other):
        return add(self, _coerce(other))

    def __radd__(self, other):
        return add(_coerce(other), self)

    def __sub__(self, other):
        return sub(self, _coerce(other))

    def __rsub__(self, other):
        return sub(_coerce(other), self)

    def __mul__(self, other):
        return mul(self, _coerce(other))

    def __rmul__(self, other):
        return mul(_coerce(other), self)

    def __truediv__(self, other):
        return div(self, _coerce(other))

    def __rtruediv__(self, other):
        return div(_coerce(other), self)

    def __neg__(self):
        return neg(self)

    def __matmul__(self, other):
        return matmul(self, _coerce(other))

    def __repr__(self):
        return f"Value(shape={self.shape}, id={self._id})"


def _as_matrix(arr):
    if arr.ndim == 0:
        return arr.reshape(1, 1)
    if arr.ndim == 1:
        return arr.reshape(1, -1)
    if arr.ndim == 2:
        return arr
    raise DimensionError(f"values must be at most 2-D, got shape {arr.shape}")


def _coerce(x):
    return x if isinstance(x, Value) else Value(x)


def constant(data):
    """Graph leaf that never receives gradient updates of its own."""
    return Value(data)


def parameter(data):
    """Trainable graph leaf (same node type; optimizers own the distinction)."""
    return Value(data)


def _unbroadcast(g, shape):
    if g.shape == shape:
        return g
    out = g
    if shape[0] == 1 and g.shape[0] != 1:
        out = out.sum(axis=0, keepdims=True)
    if shape[1] == 1 and g.shape[1] != 1:
        out = out.sum(axis=1, keepdims=True)
    return out


def _check_broadcast(a, b, opname):
    (m, n), (p, q) = a.data.shape, b.data.shape
    if (m != p and 1 not in (m, p)) or (n != q and 1 not in (n, q)):
        raise DimensionError(f"{opname}: shapes {a.shape} and {b.shape} do not broadcast")


def add(a, b):
    _check_broadcast(a, b, "add")
    return Value._make(
        a.data + b.data,
        [
            (a, lambda g: _unbroadcast(g, a.data.shape)),
            (b, lambda g: _unbroadcast(g, b.data.shape)),
        ],
    )


def sub(a, b):
    _check_broadcast(a, b, "sub")
    return Value._make(
        a.data - b.data,
        [
            (a, lambda g: _unbroadcast(g, a.data.shape)),
            (b, lambda g: _unbroadcast(-g, b.data.shape)),
        ],
    )


def neg(a):
    return Value._make(-a.data, [(a, lambda g: -g)])


def mul(a, b):
    _check_broadcast(a, b, "mul")
    return Value._make(
        a.data * b.data,
        [
            (a, lambda g: _unbroadcast(g * b.data, a.data.shape)),
            (b, lambda g: _unbroadcast(g * a.data, b.data.shape)),
        ],
    )


def div(a, b):
    _check_broadcast(a, b, "div")
    return Value._make(
        a.data / b.data,
        [
            (a, lambda g: _unbroadcast(g / b.data, a.data.shape)),
            (b, lambda g: _unbroadcast(-g * a.data / (b.data * b.data), b.data.shape)),
        ],
    )


def matmul(a, b):
    if a.data.shape[1] != b.data.shape[0]:
        raise DimensionError(f"matmul: inner dims {a.shape} @ {b.shape}")
    return Value._make(
        a.data @ b.data,
        [
            (a, lambda g: g @ b.data.T),
            (b, lambda g: a.data.T @ g),
        ],
    )


def transpose(a):
    return Value._make(np.ascontiguousarray(a.data.T), [(a, lambda g: g.T)])


def tanh(a):
    out = np.tanh(a.data)
    return Value._make(out, [(a, lambda g: g * (1.0 - out * out))])


def sigmoid(a):
    out = 1.0 / (1.0 + np.exp(-a.data))
    return Value._make(out, [(a, lambda g: g * out * (1.0 - out))])


def relu(a):
    mask = a.data > 0.0
    return Value._make(np.where(mask, a.data, 0.0), [(a, lambda g: g * mask)])


def exp(a):
    out = np.exp(a.data)
    return Value._make(out, [(a, lambda g: g * out)])


def log(a):
    if np.any(a.data <= 0.0):
        raise DomainError("log of non-positive value")
    return Value._make(np.log(a.data), [(a, lambda g: g / a.data)])


def sqrt(a):
    if np.any(a.data <= 0.0):
        raise DomainError("sqrt of non-positive value")
    out = np.sqrt(a.data)
    return Value._make(out, [(a, lambda g: g * 0.5 / out)])


def square(a):
    return Value._make(a.data * a.data, [(a, lambda g: g * 2.0 * a.data)])


def vsum(a, axis=None):
    """Sum of entries; axis in {None, 0, 1}, reduced axes kept with size 1."""
    if axis is None:
        out = a.data.sum().reshape(1, 1)
    elif axis in (0, 1):
        out = a.data.sum(axis=axis, keepdims=True)
    else:
        raise DimensionError(f"vsum: bad axis {axis}")
    shape = a.data.shape
    return Value._make(out, [(a, lambda g: np.broadcast_to(g, shape))])


def vmean(a, axis=None):
    n = a.data.size if axis is None else a.data.shape[axis]
    return vsum(a, axis) * (1.0 / n)


def concat_cols(parts):
    """Join values along the feature axis; all must share the row count."""
    rows = parts[0].data.shape[0]
    for p in parts:
        if p.data.shape[0] != rows:
            raise DimensionError("concat_cols: row counts differ")
    widths = [p.data.shape[1] for p in parts]
    offsets = np.cumsum([0] + widths)
    edges = []
    for p, lo, hi in zip(parts, offsets[:-1], offsets[1:]):
        edges.append((p, (lambda l, h: lambda g: g[:, l:h])(lo, hi)))
    return Value._make(np.concatenate([p.data for p in parts], axis=1), edges)


def slice_cols(a, start, stop):
    """Contiguous column slice [start, stop)."""
    n = a.data.shape[1]
    if not (0 <= start < stop <= n):
        raise DimensionError(f"slice_cols: [{start}:{stop}) of width {n}")

    def vjp(g):
        full = np.zeros(a.data.shape)
        full[:, start:stop] = g
        return full

    return Value._make(a.data[:, start:stop].copy(), [(a, vjp)])


def clamp(a, lo, hi):
    """Clip entries to [lo, hi]; gradient passes only where unclipped."""
    mask = (a.data >= lo) & (a.data <= hi)
    return Value._make(np.clip(a.data, lo, hi), [(a, lambda g: g * mask)])


def maximum_scalar(a, floor):
    """Elementwise max(a, floor); gradient flows only above the floor."""
    mask = a.data > floor
    return Value._make(np.maximum(a.data, floor), [(a, lambda g: g * mask)])


def softmax_rows(a):
    shifted = a.data - a.data.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    out = e / e.sum(axis=1, keepdims=True)

    def vjp(g):
        dot = (g * out).sum(axis=1, keepdims=True)
        return out * (g - dot)

    return Value._make(out, [(a, vjp)])


def categorical_sample_st(logits, u):
    """Straight-through categorical sample over rows of `logits`.

    Forward output is an exact one-hot draw per row (inverse-CDF on the
    uniform variates `u`, one per row).  The backward pass routes gradients
    through the softmax probabilities, as if the output were the softmax
    itself.
    """
    if not np.all(np.isfinite(logits.data)):
        raise NumericError("categorical_sample_st: non-finite logits")
    u = np.asarray(u, dtype=np.float64).reshape(-1)
    rows, n = logits.data.shape
    if u.shape[0] != rows:
        raise DimensionError(f"categorical_sample_st: {rows} rows need {rows} variates")
    shifted = logits.data - logits.data.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    p = e / e.sum(axis=1, keepdims=True)
    cdf = np.cumsum(p, axis=1)
    idx = np.minimum((u[:, None] > cdf).sum(axis=1), n - 1)
    onehot = np.zeros((rows, n))
    onehot[np.arange(rows), idx] = 1.0

    def vjp(g):
        dot = (g * p).sum(axis=1, keepdims=True)
        return p * (g - dot)

    return Value._make(onehot, [(logits, vjp)])


def backward(root):
    """Accumulate d(root)/d(node) into every reachable node's grad."""
    if root.data.size != 1:
        raise ContractError(f"backward root must be scalar, got shape {root.shape}")
    order = _reverse_topo(root)
    scratch = {root._id: np.ones((1, 1))}
    for node in order:
        g = scratch.get(node._id)
        if g is None:
            continue
        for parent, vjp in node._edges:
            contrib = vjp(g)
            prev = scratch.get(parent._id)
            scratch[parent._id] = contrib if prev is None else prev + contrib
    for node in order:
        g = scratch.get(node._id)
        if g is not None:
            node.grad[...] += g


def _reverse_topo(root):
    seen = {root._id}
    order = []
    stack = [(root, iter(root._edges))]
    while stack:
        node, it = stack[-1]
        advanced = False
        for parent, _ in it:
            if parent._id not in seen:
                seen.add(parent._id)
                stack.append((parent, iter(parent._edges)))
                advanced = True
                break
        if not advanced:
            order.append(node)
            stack.pop()
    order.reverse()
    return order


def zero_grads(values):
    for v in values:
        v.zero_grad()
