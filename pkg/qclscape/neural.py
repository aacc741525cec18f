"""Small fully connected networks trained by hand-written backpropagation and Adam."""
import logging

from dataclasses import dataclass, field
from typing import List

import numpy as np

from qclscape import constants
from qclscape.errors import DimensionMismatchError, InvalidArgumentError, MissingForwardCacheError

log = logging.getLogger(__name__)


def relu(x):
    return np.maximum(x, 0.0)


def log_softmax(logits):
    shifted = logits - np.max(logits, axis=-1, keepdims=True)
    return shifted - np.log(np.sum(np.exp(shifted), axis=-1, keepdims=True))


def softmax(logits):
    return np.exp(log_softmax(logits))


class Mlp:
    """Affine layers with rectified-linear hidden activations and a linear output.

    Weights are stored input-major, so a layer computes x @ W + b.
    """

    def __init__(self, weights, biases):
        if len(weights) != len(biases) or not weights:
            raise InvalidArgumentError('layers', len(weights), "weights and biases must pair up")
        self.weights = [np.array(w, dtype=float) for w in weights]
        self.biases = [np.array(b, dtype=float) for b in biases]
        self._cache = None

    @classmethod
    def create(cls, sizes, rng):
        """Uniform initialization in [-1/sqrt(fan_in), 1/sqrt(fan_in)] for weights and biases."""
        if len(sizes) < 2 or min(sizes) < 1:
            raise InvalidArgumentError('layer sizes', list(sizes), "need at least input and output widths")
        weights = []
        biases = []
        for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
            bound = 1.0 / np.sqrt(fan_in)
            weights.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)))
            biases.append(rng.uniform(-bound, bound, size=fan_out))
        return cls(weights, biases)

    @property
    def sizes(self):
        return [self.weights[0].shape[0]] + [w.shape[1] for w in self.weights]

    @property
    def params(self):
        """Parameter arrays in layer order, W0, b0, W1, b1, ..."""
        return [p for pair in zip(self.weights, self.biases) for p in pair]

    def copy(self):
        return Mlp([w.copy() for w in self.weights], [b.copy() for b in self.biases])

    def load(self, other):
        for mine, theirs in zip(self.params, other.params):
            mine[...] = theirs

    def forward(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.sizes[0]:
            raise DimensionMismatchError(self.sizes[0], x.shape[-1])
        single = x.ndim == 1
        activation = x[None, :] if single else x

        activations = [activation]
        pre_activations = []
        last = len(self.weights) - 1
        for index, (w, b) in enumerate(zip(self.weights, self.biases)):
            z = activation @ w + b
            pre_activations.append(z)
            activation = z if index == last else relu(z)
            activations.append(activation)

        self._cache = (activations, pre_activations, single)
        return activation[0] if single else activation

    def backward(self, upstream):
        """Gradients of sum(upstream * output) for the cached forward pass, aligned with params."""
        if self._cache is None:
            raise MissingForwardCacheError()
        activations, pre_activations, single = self._cache

        delta = np.asarray(upstream, dtype=float)
        if single:
            delta = delta[None, :]
        if delta.shape != activations[-1].shape:
            raise DimensionMismatchError(activations[-1].shape, delta.shape)

        grads = [None] * (2 * len(self.weights))
        for index in reversed(range(len(self.weights))):
            grads[2 * index] = activations[index].T @ delta
            grads[2 * index + 1] = delta.sum(axis=0)
            if index:
                delta = (delta @ self.weights[index].T) * (pre_activations[index - 1] > 0)
        return grads


@dataclass
class AdamState:
    first: List[np.ndarray]
    second: List[np.ndarray]
    step: int = 0
    beta1: float = constants.ADAM_BETA1
    beta2: float = constants.ADAM_BETA2
    epsilon: float = constants.ADAM_EPSILON

    @classmethod
    def for_params(cls, params):
        return cls([np.zeros_like(p) for p in params], [np.zeros_like(p) for p in params])


def adam_step(params, grads, state, lr):
    """Bias-corrected Adam update applied in place, returns params."""
    if len(params) != len(grads) or len(params) != len(state.first):
        raise DimensionMismatchError(len(params), len(grads))
    state.step += 1
    correction1 = 1.0 - state.beta1 ** state.step
    correction2 = 1.0 - state.beta2 ** state.step

    for param, grad, m, v in zip(params, grads, state.first, state.second):
        m *= state.beta1
        m += (1.0 - state.beta1) * grad
        v *= state.beta2
        v += (1.0 - state.beta2) * grad * grad
        param -= lr * (m / correction1) / (np.sqrt(v / correction2) + state.epsilon)
    return params


def clip_grad_norm(grads, max_norm):
    """Scale grads in place so their global L2 norm is at most max_norm, returns the norm before clipping."""
    total = float(np.sqrt(sum(float(np.sum(g * g)) for g in grads)))
    if total > max_norm:
        scale = max_norm / (total + 1e-6)
        for g in grads:
            g *= scale
    return total


@dataclass
class ReplayBuffer:
    capacity: int
    observation_size: int = constants.OBSERVATION_SIZE
    states: np.ndarray = field(init=False, repr=False)
    actions: np.ndarray = field(init=False, repr=False)
    rewards: np.ndarray = field(init=False, repr=False)
    next_states: np.ndarray = field(init=False, repr=False)
    dones: np.ndarray = field(init=False, repr=False)
    position: int = 0
    size: int = 0

    def __post_init__(self):
        if self.capacity < 1:
            raise InvalidArgumentError('capacity', self.capacity, "must be at least 1")
        self.states = np.zeros((self.capacity, self.observation_size))
        self.actions = np.zeros(self.capacity, dtype=int)
        self.rewards = np.zeros(self.capacity)
        self.next_states = np.zeros((self.capacity, self.observation_size))
        self.dones = np.zeros(self.capacity, dtype=bool)

    def __len__(self):
        return self.size

    def add(self, state, action, reward, next_state, done):
        i = self.position
        self.states[i] = state
        self.actions[i] = action
        self.rewards[i] = reward
        self.next_states[i] = next_state
        self.dones[i] = done
        self.position = (i + 1) % self.capacity
        self.size = min(self.size + 1, self.capacity)

    def sample(self, batch_size, rng):
        """Uniform batch without replacement, (states, actions, rewards, next_states, dones)."""
        index = rng.choice(self.size, size=min(batch_size, self.size), replace=False)
        return self.states[index], self.actions[index], self.rewards[index], self.next_states[index], self.dones[index]
