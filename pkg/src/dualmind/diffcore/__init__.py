"""Minimal reverse-mode differentiation and network primitives."""

from .graph import (
    Value,
    backward,
    categorical_sample_st,
    clamp,
    concat_cols,
    constant,
    exp,
    log,
    matmul,
    maximum_scalar,
    mul,
    parameter,
    relu,
    sigmoid,
    slice_cols,
    softmax_rows,
    sqrt,
    square,
    tanh,
    transpose,
    vmean,
    vsum,
    zero_grads,
)
from .nn import (
    DenseParams,
    GaussianHead,
    GruParams,
    dense_forward,
    dense_init,
    dense_relu,
    gaussian_head,
    gaussian_nll_unit,
    gru_init,
    gru_step,
    kl_gaussian,
    reparam_sample,
)
from .optim import Adam, Sgd

__all__ = [
    "Adam",
    "DenseParams",
    "GaussianHead",
    "GruParams",
    "Sgd",
    "Value",
    "backward",
    "categorical_sample_st",
    "clamp",
    "concat_cols",
    "constant",
    "dense_forward",
    "dense_init",
    "dense_relu",
    "exp",
    "gaussian_head",
    "gaussian_nll_unit",
    "gru_init",
    "gru_step",
    "kl_gaussian",
    "log",
    "matmul",
    "maximum_scalar",
    "mul",
    "parameter",
    "relu",
    "reparam_sample",
    "sigmoid",
    "slice_cols",
    "softmax_rows",
    "sqrt",
    "square",
    "tanh",
    "transpose",
    "vmean",
    "vsum",
    "zero_grads",
]
