"""Plain gradient descent and Adam over lists of graph parameters."""

from __future__ import annotations

import numpy as np

from ..errors import DimensionError


class Sgd:
    """param <- param - lr * grad"""

    def __init__(self, params, lr):
        self.params = list(params)
        self.lr = float(lr)
        self.steps = 0

    def zero_grad(self):
        for p in self.params:
            p.zero_grad()

    def step(self):
        for p in self.params:
            p.data -= self.lr * p.grad
        self.steps += 1


class Adam:
    """Adaptive moments with bias correction."""

    def __init__(self, params, lr, beta1=0.9, beta2=0.999, eps=1e-4):
        self.params = list(params)
        self.lr = float(lr)
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.steps = 0
        self.m = [np.zeros_like(p.data) for p in self.params]
        self.v = [np.zeros_like(p.data) for p in self.params]

    def zero_grad(self):
        for p in self.params:
            p.zero_grad()

    def step(self):
        self.steps += 1
        b1, b2 = self.beta1, self.beta2
        c1 = 1.0 - b1**self.steps
        c2 = 1.0 - b2**self.steps
        for p, m, v in zip(self.params, self.m, self.v):
            grad = p.grad
            if grad.shape != m.shape:
                raise DimensionError("Adam: gradient shape changed under the optimizer")
            m *= b1
            m += (1.0 - b1) * grad
            v *= b2
            v += (1.0 - b2) * grad * grad
            p.data -= self.lr * (m / c1) / (np.sqrt(v / c2) + self.eps)
