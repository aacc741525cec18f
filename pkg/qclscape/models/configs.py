from dataclasses import dataclass, field
from dataclasses_json import dataclass_json
from typing import List

import numpy as np

from qclscape import constants
from qclscape.errors import InvalidArgumentError

__all__ = ['DqnConfig', 'GaConfig', 'PpoConfig', 'QlConfig', 'SgdConfig']


def require(condition, name, value, reason):
    if not condition:
        raise InvalidArgumentError(name, value, reason)


@dataclass_json
@dataclass
class SgdConfig:
    learning_rate: float = constants.SGD_LEARNING_RATE
    momentum: float = constants.SGD_MOMENTUM
    max_iterations: int = constants.SGD_MAX_ITERATIONS
    fd_step: float = constants.SGD_FD_STEP
    target_infidelity: float = constants.TARGET_INFIDELITY
    seed: int = constants.DEFAULT_SEED
    record_trace: bool = False

    def __post_init__(self):
        require(self.learning_rate > 0, 'learning_rate', self.learning_rate, "must be positive")
        require(0 <= self.momentum < 1, 'momentum', self.momentum, "must lie in [0, 1)")
        require(self.max_iterations >= 1, 'max_iterations', self.max_iterations, "must be at least 1")
        require(self.fd_step > 0, 'fd_step', self.fd_step, "must be positive")


@dataclass_json
@dataclass
class GaConfig:
    population_size: int = constants.GA_POPULATION_SIZE
    gene_count: int = constants.GA_GENE_COUNT
    mutation_rate: float = constants.GA_MUTATION_RATE
    elite_fraction: float = constants.GA_ELITE_FRACTION
    underdog_fraction: float = constants.GA_UNDERDOG_FRACTION
    max_generations: int = constants.GA_MAX_GENERATIONS
    target_infidelity: float = constants.TARGET_INFIDELITY
    seed: int = constants.DEFAULT_SEED
    record_trace: bool = False

    def __post_init__(self):
        require(self.population_size >= 2 and self.population_size % 2 == 0,
                'population_size', self.population_size, "must be even and at least 2")
        require(self.gene_count >= 2, 'gene_count', self.gene_count, "must be at least 2")
        require(0 <= self.mutation_rate <= 1, 'mutation_rate', self.mutation_rate, "must lie in [0, 1]")
        require(self.elite_fraction >= 0 and self.underdog_fraction >= 0
                and self.elite_fraction + self.underdog_fraction <= 1,
                'selection fractions', (self.elite_fraction, self.underdog_fraction), "must be >= 0 and sum to <= 1")
        require(self.max_generations >= 0, 'max_generations', self.max_generations, "must be non-negative")

    @property
    def gene_values(self):
        return np.linspace(constants.AMPLITUDE_MIN, constants.AMPLITUDE_MAX, self.gene_count)

    @property
    def elite_count(self):
        return int(round(self.elite_fraction * self.population_size))

    @property
    def underdog_count(self):
        return min(int(round(self.underdog_fraction * self.population_size)),
                   self.population_size - self.elite_count)


@dataclass_json
@dataclass
class QlConfig:
    learning_rate: float = constants.QL_LEARNING_RATE
    discount: float = constants.QL_DISCOUNT
    epsilon: float = constants.QL_EPSILON
    max_episodes: int = constants.QL_MAX_EPISODES
    theta_bins: int = constants.QL_THETA_BINS
    phi_bins: int = constants.QL_PHI_BINS
    rewards: List[float] = field(default_factory=lambda: list(constants.QL_REWARDS))
    target_infidelity: float = constants.TARGET_INFIDELITY
    seed: int = constants.DEFAULT_SEED

    def __post_init__(self):
        require(self.learning_rate > 0, 'learning_rate', self.learning_rate, "must be positive")
        require(0 <= self.discount <= 1, 'discount', self.discount, "must lie in [0, 1]")
        require(0 <= self.epsilon <= 1, 'epsilon', self.epsilon, "must lie in [0, 1]")
        require(self.max_episodes >= 1, 'max_episodes', self.max_episodes, "must be at least 1")
        require(len(self.rewards) == 4, 'rewards', self.rewards, "exactly four tiers are required")


@dataclass_json
@dataclass
class DqnConfig:
    learning_rate: float = constants.DQN_LEARNING_RATE
    exploration_fraction: float = constants.DQN_EXPLORATION_FRACTION
    exploration_initial: float = constants.DQN_EXPLORATION_INITIAL
    exploration_final: float = constants.DQN_EXPLORATION_FINAL
    discount: float = constants.DQN_DISCOUNT
    rewards: List[float] = field(default_factory=lambda: list(constants.DEEP_REWARDS))
    buffer_size: int = constants.DQN_BUFFER_SIZE
    batch_size: int = constants.DQN_BATCH_SIZE
    target_update: int = constants.DQN_TARGET_UPDATE
    train_freq: int = constants.DQN_TRAIN_FREQ
    learning_starts: int = constants.DQN_LEARNING_STARTS
    total_steps: int = constants.DQN_TOTAL_STEPS
    hidden: List[int] = field(default_factory=lambda: list(constants.MLP_HIDDEN))
    target_infidelity: float = constants.TARGET_INFIDELITY
    seed: int = constants.DEFAULT_SEED

    def __post_init__(self):
        require(self.learning_rate > 0, 'learning_rate', self.learning_rate, "must be positive")
        require(0 < self.exploration_fraction <= 1, 'exploration_fraction', self.exploration_fraction,
                "must lie in (0, 1]")
        require(0 <= self.discount <= 1, 'discount', self.discount, "must lie in [0, 1]")
        require(self.buffer_size >= 1 and self.batch_size >= 1, 'buffer/batch size',
                (self.buffer_size, self.batch_size), "must be positive")
        require(self.target_update >= 1 and self.train_freq >= 1, 'target_update/train_freq',
                (self.target_update, self.train_freq), "must be positive")
        require(self.total_steps >= 0, 'total_steps', self.total_steps, "must be non-negative")
        require(len(self.rewards) == 4, 'rewards', self.rewards, "exactly four tiers are required")


@dataclass_json
@dataclass
class PpoConfig:
    learning_rate: float = constants.PPO_LEARNING_RATE
    entropy_coef: float = constants.PPO_ENTROPY_COEF
    discount: float = constants.PPO_DISCOUNT
    clip: float = constants.PPO_CLIP
    rollout_steps: int = constants.PPO_ROLLOUT_STEPS
    epochs: int = constants.PPO_EPOCHS
    batch_size: int = constants.PPO_BATCH_SIZE
    gae_lambda: float = constants.PPO_GAE_LAMBDA
    value_coef: float = constants.PPO_VALUE_COEF
    max_grad_norm: float = constants.PPO_MAX_GRAD_NORM
    rewards: List[float] = field(default_factory=lambda: list(constants.DEEP_REWARDS))
    total_steps: int = constants.PPO_TOTAL_STEPS
    hidden: List[int] = field(default_factory=lambda: list(constants.MLP_HIDDEN))
    target_infidelity: float = constants.TARGET_INFIDELITY
    seed: int = constants.DEFAULT_SEED

    def __post_init__(self):
        require(self.learning_rate > 0, 'learning_rate', self.learning_rate, "must be positive")
        require(self.entropy_coef >= 0, 'entropy_coef', self.entropy_coef, "must be non-negative")
        require(0 <= self.discount <= 1, 'discount', self.discount, "must lie in [0, 1]")
        require(0 < self.clip < 1, 'clip', self.clip, "must lie in (0, 1)")
        require(self.rollout_steps >= 1 and self.epochs >= 1 and self.batch_size >= 1,
                'rollout/epochs/batch', (self.rollout_steps, self.epochs, self.batch_size), "must be positive")
        require(self.total_steps >= 0, 'total_steps', self.total_steps, "must be non-negative")
        require(len(self.rewards) == 4, 'rewards', self.rewards, "exactly four tiers are required")

