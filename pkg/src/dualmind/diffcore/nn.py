"""Dense layers, a gated recurrent cell, and Gaussian heads on the graph."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import DimensionError
from . import graph as g
from .graph import Value

LOG_STD_MIN = -5.0
LOG_STD_MAX = 2.0


@dataclass
class DenseParams:
    """Affine layer y = x W^T + b with W of shape (out, in)."""

    w: Value
    b: Value

    @property
    def in_dim(self):
        return self.w.data.shape[1]

    @property
    def out_dim(self):
        return self.w.data.shape[0]

    def params(self):
        return [self.w, self.b]


def dense_init(rng, n_in, n_out, scale=None):
    k = scale if scale is not None else 1.0 / math.sqrt(n_in)
    w = g.parameter(rng.uniform(-k, k, size=(n_out, n_in)))
    b = g.parameter(np.zeros((1, n_out)))
    return DenseParams(w, b)


def dense_forward(p, x):
    """Apply the layer to a batch of row vectors."""
    if x.data.shape[1] != p.in_dim:
        raise DimensionError(f"dense_forward: input width {x.shape} vs ({p.out_dim}, {p.in_dim})")
    return g.matmul(x, g.transpose(p.w)) + p.b


def dense_relu(p, x):
    return g.relu(dense_forward(p, x))


@dataclass
class GruParams:
    """Update/reset/candidate gates for one recurrent cell."""

    wz: Value
    uz: Value
    bz: Value
    wr: Value
    ur: Value
    br: Value
    wc: Value
    uc: Value
    bc: Value

    @property
    def in_dim(self):
        return self.wz.data.shape[1]

    @property
    def hidden_dim(self):
        return self.wz.data.shape[0]

    def params(self):
        return [self.wz, self.uz, self.bz, self.wr, self.ur, self.br, self.wc, self.uc, self.bc]


def gru_init(rng, n_in, n_hidden):
    k_in = 1.0 / math.sqrt(n_in)
    k_h = 1.0 / math.sqrt(n_hidden)

    def w():
        return g.parameter(rng.uniform(-k_in, k_in, size=(n_hidden, n_in)))

    def u():
        return g.parameter(rng.uniform(-k_h, k_h, size=(n_hidden, n_hidden)))

    def b():
        return g.parameter(np.zeros((1, n_hidden)))

    return GruParams(w(), u(), b(), w(), u(), b(), w(), u(), b())


def gru_step(p, h_prev, x):
    """One gated recurrent update.

    h' = (1 - z) * h_prev + z * tanh(candidate), so zero parameters leave
    h' = 0.5 * h_prev, and outputs stay inside (-1, 1) whenever h_prev does.
    """
    if h_prev.data.shape[1] != p.hidden_dim:
        raise DimensionError(f"gru_step: hidden width {h_prev.shape} vs {p.hidden_dim}")
    if x.data.shape[1] != p.in_dim:
        raise DimensionError(f"gru_step: input width {x.shape} vs {p.in_dim}")
    z = g.sigmoid(g.matmul(x, g.transpose(p.wz)) + g.matmul(h_prev, g.transpose(p.uz)) + p.bz)
    r = g.sigmoid(g.matmul(x, g.transpose(p.wr)) + g.matmul(h_prev, g.transpose(p.ur)) + p.br)
    c = g.tanh(g.matmul(x, g.transpose(p.wc)) + g.matmul(g.mul(r, h_prev), g.transpose(p.uc)) + p.bc)
    one = g.constant(np.ones((1, 1)))
    return g.mul(one - z, h_prev) + g.mul(z, c)


@dataclass
class GaussianHead:
    """Diagonal Gaussian given by mean and log standard deviation rows."""

    mean: Value
    log_std: Value

    def __post_init__(self):
        if self.mean.data.shape != self.log_std.data.shape:
            raise DimensionError(
                f"GaussianHead: mean {self.mean.shape} vs log_std {self.log_std.shape}"
            )

    @property
    def dim(self):
        return self.mean.data.shape[1]

    def detach(self):
        return GaussianHead(self.mean.detach(), self.log_std.detach())


def gaussian_head(mean, log_std, lo=LOG_STD_MIN, hi=LOG_STD_MAX):
    """Build a head with the log-std clamped to a safe range."""
    return GaussianHead(mean, g.clamp(log_std, lo, hi))


def kl_gaussian(q, p):
    """KL(q || p) for diagonal Gaussians, one value per batch row."""
    if q.dim != p.dim:
        raise DimensionError(f"kl_gaussian: dims {q.dim} vs {p.dim}")
    var_ratio = g.exp((q.log_std - p.log_std) * 2.0)
    mean_term = g.square(q.mean - p.mean) * g.exp(p.log_std * -2.0)
    per_dim = (p.log_std - q.log_std) + (var_ratio + mean_term) * 0.5 - 0.5
    return g.vsum(per_dim, axis=1)


def reparam_sample(head, noise):
    """mean + std * noise with gradients into mean and log-std."""
    noise = np.asarray(noise, dtype=np.float64)
    if noise.ndim == 1:
        noise = noise.reshape(1, -1)
    if noise.shape != head.mean.data.shape:
        raise DimensionError(f"reparam_sample: noise {noise.shape} vs head {head.mean.shape}")
    return head.mean + g.mul(g.exp(head.log_std), g.constant(noise))


def gaussian_nll_unit(mean, target):
    """Negative log density of `target` under N(mean, I), per batch row."""
    target = np.asarray(target, dtype=np.float64)
    if target.ndim == 1:
        target = target.reshape(1, -1)
    d = mean.data.shape[1]
    const = 0.5 * d * math.log(2.0 * math.pi)
    sq = g.vsum(g.square(mean - g.constant(target)), axis=1)
    return sq * 0.5 + const
