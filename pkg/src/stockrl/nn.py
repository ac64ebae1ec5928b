"""Minimal multilayer perceptron on numpy: tanh hidden layers, scalar identity
output, squared loss, plain SGD, and a finite-difference gradient oracle."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError


@dataclass
class MlpParams:
    weights: list[np.ndarray]  # one (n_in, n_out) matrix per layer
    biases: list[np.ndarray]  # one (n_out,) vector per layer

    @property
    def sizes(self) -> list[int]:
        return [self.weights[0].shape[0]] + [w.shape[1] for w in self.weights]

    def copy(self) -> "MlpParams":
        return MlpParams(
            weights=[w.copy() for w in self.weights],
            biases=[b.copy() for b in self.biases],
        )


@dataclass
class Gradients:
    weights: list[np.ndarray]
    biases: list[np.ndarray]


@dataclass
class ForwardCache:
    activations: list[np.ndarray]  # layer inputs: x, then each hidden output


def _check_sizes(sizes: list[int]) -> None:
    if len(sizes) < 2:
        raise ConfigError(f"need at least input and output sizes, got {sizes}")
    if any(n < 1 for n in sizes):
        raise ConfigError(f"all layer sizes must be >= 1, got {sizes}")
    if sizes[-1] != 1:
        raise ConfigError(f"output layer must be scalar, got {sizes[-1]}")


def init_mlp(sizes: list[int], seed: int | np.random.Generator = 0) -> MlpParams:
    """Weights uniform in +-1/sqrt(fan_in), biases zero, reproducible from seed."""
    _check_sizes(list(sizes))
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    weights, biases = [], []
    for n_in, n_out in zip(sizes, sizes[1:]):
        bound = 1.0 / np.sqrt(n_in)
        weights.append(rng.uniform(-bound, bound, size=(n_in, n_out)))
        biases.append(np.zeros(n_out))
    return MlpParams(weights=weights, biases=biases)


def forward(params: MlpParams, x: np.ndarray) -> tuple[float, ForwardCache]:
    """Affine+tanh chain with an identity output layer; pure in ``params``."""
    x = np.asarray(x, dtype=float)
    if x.shape != (params.weights[0].shape[0],):
        raise ConfigError(
            f"input shape {x.shape} does not match layer size {params.weights[0].shape[0]}"
        )
    activations = [x]
    a = x
    last = len(params.weights) - 1
    for i, (w, b) in enumerate(zip(params.weights, params.biases)):
        z = a @ w + b
        a = z if i == last else np.tanh(z)
        activations.append(a)
    return float(a[0]), ForwardCache(activations=activations)


def backward(params: MlpParams, cache: ForwardCache, target: float) -> Gradients:
    """Gradients of (output - target)^2 for every weight and bias."""
    output = cache.activations[-1]
    delta = 2.0 * (output - target)  # identity output layer
    grad_w: list[np.ndarray] = [np.empty(0)] * len(params.weights)
    grad_b: list[np.ndarray] = [np.empty(0)] * len(params.biases)
    for layer in range(len(params.weights) - 1, -1, -1):
        a_in = cache.activations[layer]
        grad_w[layer] = np.outer(a_in, delta)
        grad_b[layer] = delta.copy()
        if layer > 0:
            # a_in is the tanh output of the previous layer
            delta = (delta @ params.weights[layer].T) * (1.0 - a_in**2)
    return Gradients(weights=grad_w, biases=grad_b)


def sgd_step(params: MlpParams, grads: Gradients, lr: float) -> MlpParams:
    """One elementwise descent step ``p <- p - lr*g``; returns fresh arrays."""
    if not lr > 0:
        raise ConfigError(f"learning rate must be positive, got {lr}")
    if len(grads.weights) != len(params.weights):
        raise ConfigError("gradient/parameter layer counts differ")
    weights, biases = [], []
    for w, b, gw, gb in zip(params.weights, params.biases, grads.weights, grads.biases):
        if gw.shape != w.shape or gb.shape != b.shape:
            raise ConfigError("gradient/parameter shapes differ")
        weights.append(w - lr * gw)
        biases.append(b - lr * gb)
    return MlpParams(weights=weights, biases=biases)


def loss(params: MlpParams, x: np.ndarray, target: float) -> float:
    output, _ = forward(params, x)
    return (output - target) ** 2


def finite_diff(
    params: MlpParams, x: np.ndarray, target: float, step: float = 1e-5
) -> Gradients:
    """Central-difference estimate of the same loss gradient (test oracle)."""
    if not step > 0:
        raise ConfigError(f"step must be positive, got {step}")
    probe = params.copy()

    def estimate(array: np.ndarray) -> np.ndarray:
        grad = np.zeros_like(array)
        flat = array.reshape(-1)
        grad_flat = grad.reshape(-1)
        for i in range(flat.size):
            original = flat[i]
            flat[i] = original + step
            up = loss(probe, x, target)
            flat[i] = original - step
            down = loss(probe, x, target)
            flat[i] = original
            grad_flat[i] = (up - down) / (2.0 * step)
        return grad

    return Gradients(
        weights=[estimate(w) for w in probe.weights],
        biases=[estimate(b) for b in probe.biases],
    )
