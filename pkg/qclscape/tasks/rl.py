import logging
import math

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from qclscape import constants
from qclscape.errors import DimensionMismatchError, EpisodeFinishedError, InvalidArgumentError
from qclscape.models import ControlPulse, DqnConfig, OptimResult, PpoConfig, QlConfig, QubitState
from qclscape.neural import AdamState, Mlp, ReplayBuffer, adam_step, clip_grad_norm, log_softmax, softmax
from qclscape.qdyn import segment_propagators

log = logging.getLogger(__name__)

DQN_MAX_GRAD_NORM = 10.0


@dataclass(frozen=True)
class RewardSchedule:
    """Four reward tiers keyed on infidelity: > 0.5, <= 0.5, < 0.1 and <= target."""
    rewards: Tuple[float, float, float, float]
    target_infidelity: float = constants.TARGET_INFIDELITY

    def __post_init__(self):
        rewards = tuple(float(r) for r in self.rewards)
        if len(rewards) != 4:
            raise InvalidArgumentError('rewards', rewards, "exactly four tiers are required")
        object.__setattr__(self, 'rewards', rewards)

    def tier(self, infidelity):
        if infidelity <= self.target_infidelity:
            return 3
        if infidelity < constants.REWARD_THRESHOLDS[2]:
            return 2
        if infidelity <= constants.REWARD_THRESHOLDS[1]:
            return 1
        return 0

    def __call__(self, infidelity):
        return self.rewards[self.tier(infidelity)]


class ControlEnv:
    """Episodic pulse construction, one amplitude from the action set per step."""

    def __init__(self, n_params, total_time=constants.DEFAULT_TIME, rewards=constants.QL_REWARDS,
                 n_actions=constants.NUM_ACTIONS, target_infidelity=constants.TARGET_INFIDELITY):
        if n_params < 1:
            raise InvalidArgumentError('n_params', n_params, "must be at least 1")
        if n_actions < 2:
            raise InvalidArgumentError('n_actions', n_actions, "must be at least 2")
        self.n_params = n_params
        self.total_time = total_time
        self.dt = total_time / n_params
        self.actions = np.linspace(constants.AMPLITUDE_MIN, constants.AMPLITUDE_MAX, n_actions)
        self.propagators = segment_propagators(self.actions, self.dt)
        self.schedule = RewardSchedule(tuple(rewards), target_infidelity)
        self.target_infidelity = target_infidelity
        self.reset()

    @property
    def n_actions(self):
        return len(self.actions)

    def reset(self):
        self.psi = np.array([1.0, 0.0], dtype=complex)
        self.step_index = 0
        self.done = False
        self.chosen = []
        return self.observation()

    @property
    def state(self):
        return QubitState.from_array(self.psi)

    @property
    def fidelity(self):
        return float(abs(self.psi[1]) ** 2)

    @property
    def infidelity(self):
        return 1.0 - self.fidelity

    @property
    def reached_target(self):
        return self.infidelity <= self.target_infidelity

    def observation(self):
        return np.array([
            self.psi[0].real, self.psi[0].imag, self.psi[1].real, self.psi[1].imag,
            self.step_index / self.n_params,
        ])

    def state_key(self, theta_bins=constants.QL_THETA_BINS, phi_bins=constants.QL_PHI_BINS):
        theta, phi = self.state.bloch_angles()
        theta_bin = min(int(theta / math.pi * theta_bins), theta_bins - 1)
        phi_bin = min(int(phi / (2 * math.pi) * phi_bins), phi_bins - 1)
        return theta_bin, phi_bin, self.step_index

    def step(self, action):
        if self.done:
            raise EpisodeFinishedError()
        if not 0 <= action < self.n_actions:
            raise InvalidArgumentError('action', action, f"must lie in [0, {self.n_actions})")

        self.psi = self.propagators[action] @ self.psi
        self.step_index += 1
        self.chosen.append(int(action))
        infidelity = self.infidelity
        reward = self.schedule(infidelity)
        self.done = self.step_index >= self.n_params
        return self.observation(), reward, self.done

    def pulse(self):
        """Pulse of a finished episode, n_params segments over total_time."""
        if len(self.chosen) != self.n_params:
            raise DimensionMismatchError(self.n_params, len(self.chosen))
        return ControlPulse(tuple(float(self.actions[a]) for a in self.chosen), self.total_time)


class BestPulse:
    """Best finished episode seen during training."""

    def __init__(self, env):
        self.env = env
        self.pulse = None
        self.fidelity = -1.0

    def update(self):
        if self.env.fidelity > self.fidelity:
            self.fidelity = self.env.fidelity
            self.pulse = self.env.pulse()

    def result(self, iterations):
        return OptimResult(
            best_pulse=self.pulse,
            best_fidelity=self.fidelity,
            iterations_used=iterations,
            converged=1.0 - self.fidelity <= self.env.target_infidelity,
        )


def episode_result(env, iterations):
    fidelity = env.fidelity
    return OptimResult(
        best_pulse=env.pulse(),
        best_fidelity=fidelity,
        iterations_used=iterations,
        converged=1.0 - fidelity <= env.target_infidelity,
    )


class QTable:
    """Action values per discretized state, unvisited states read as zeros."""

    def __init__(self, n_actions=constants.NUM_ACTIONS):
        self.n_actions = n_actions
        self.values = {}

    def __getitem__(self, key):
        values = self.values.get(key)
        return values if values is not None else np.zeros(self.n_actions)

    def __len__(self):
        return len(self.values)

    def update(self, key, action, target, learning_rate):
        values = self.values.setdefault(key, np.zeros(self.n_actions))
        values[action] += learning_rate * (target - values[action])

    def best_action(self, key, rng=None):
        """Greedy action, ties broken uniformly when rng is given, else the lowest index."""
        values = self[key]
        if rng is None:
            return int(np.argmax(values))
        candidates = np.flatnonzero(values == values.max())
        return int(candidates[0]) if len(candidates) == 1 else int(rng.choice(candidates))


def ql_train(env, cfg=None):
    cfg = cfg or QlConfig()
    rng = np.random.default_rng(cfg.seed)
    table = QTable(env.n_actions)
    best = BestPulse(env)

    for episode in range(1, cfg.max_episodes + 1):
        env.reset()
        key = env.state_key(cfg.theta_bins, cfg.phi_bins)
        done = False
        while not done:
            if rng.random() < cfg.epsilon:
                action = int(rng.integers(env.n_actions))
            else:
                action = table.best_action(key, rng)
            _, reward, done = env.step(action)
            next_key = env.state_key(cfg.theta_bins, cfg.phi_bins)
            future = 0.0 if done else cfg.discount * float(table[next_key].max())
            table.update(key, action, reward + future, cfg.learning_rate)
            key = next_key

        best.update()
        if env.reached_target:
            log.debug(f"QL seed={cfg.seed} reached the target in episode {episode}")
            return best.result(episode)

    log.debug(f"QL seed={cfg.seed} ended without reaching the target, best fidelity {best.fidelity:.6f}")
    return best.result(cfg.max_episodes)


def greedy_rollout(env, table, theta_bins=constants.QL_THETA_BINS, phi_bins=constants.QL_PHI_BINS):
    """Replay a learned table without exploration, ties go to the lowest action index."""
    env.reset()
    while not env.done:
        env.step(table.best_action(env.state_key(theta_bins, phi_bins)))
    return episode_result(env, 1)


def random_rollout(env, rng):
    env.reset()
    while not env.done:
        env.step(int(rng.integers(env.n_actions)))
    return episode_result(env, 0)


def exploration_rate(step, total_steps, cfg):
    horizon = max(1.0, cfg.exploration_fraction * total_steps)
    progress = min(1.0, step / horizon)
    return cfg.exploration_initial + progress * (cfg.exploration_final - cfg.exploration_initial)


def huber_gradient(error):
    return np.clip(error, -1.0, 1.0)


def dqn_update(online, target, buffer, adam, cfg, rng):
    states, actions, rewards, next_states, dones = buffer.sample(cfg.batch_size, rng)
    batch = len(actions)
    next_values = target.forward(next_states).max(axis=1)
    targets = rewards + cfg.discount * (~dones) * next_values

    q_values = online.forward(states)
    errors = q_values[np.arange(batch), actions] - targets
    upstream = np.zeros_like(q_values)
    upstream[np.arange(batch), actions] = huber_gradient(errors) / batch

    grads = online.backward(upstream)
    clip_grad_norm(grads, DQN_MAX_GRAD_NORM)
    adam_step(online.params, grads, adam, cfg.learning_rate)


def dqn_train(env, cfg=None):
    """Deep Q-learning with replay and a periodically synced target network."""
    cfg = cfg or DqnConfig()
    rng = np.random.default_rng(cfg.seed)
    if cfg.total_steps == 0:
        return random_rollout(env, rng)

    sizes = [constants.OBSERVATION_SIZE] + list(cfg.hidden) + [env.n_actions]
    online = Mlp.create(sizes, rng)
    target = online.copy()
    adam = AdamState.for_params(online.params)
    buffer = ReplayBuffer(cfg.buffer_size)
    best = BestPulse(env)

    observation = env.reset()
    for step in range(1, cfg.total_steps + 1):
        if rng.random() < exploration_rate(step - 1, cfg.total_steps, cfg):
            action = int(rng.integers(env.n_actions))
        else:
            action = int(np.argmax(online.forward(observation)))

        next_observation, reward, done = env.step(action)
        buffer.add(observation, action, reward, next_observation, done)

        if done:
            best.update()
            if env.reached_target:
                log.debug(f"DQN seed={cfg.seed} reached the target after {step} steps")
                return episode_result(env, step)
            observation = env.reset()
        else:
            observation = next_observation

        if step > cfg.learning_starts and step % cfg.train_freq == 0:
            dqn_update(online, target, buffer, adam, cfg, rng)
        if step % cfg.target_update == 0:
            target.load(online)

    if best.pulse is None:
        while not env.done:
            env.step(int(np.argmax(online.forward(env.observation()))))
        best.update()
    log.debug(f"DQN seed={cfg.seed} best fidelity {best.fidelity:.6f} after {cfg.total_steps} steps")
    return best.result(cfg.total_steps)


def clipped_surrogate(ratio, advantage, clip):
    """min(r A, clip(r, 1 - c, 1 + c) A) elementwise."""
    ratio = np.asarray(ratio, dtype=float)
    advantage = np.asarray(advantage, dtype=float)
    return np.minimum(ratio * advantage, np.clip(ratio, 1.0 - clip, 1.0 + clip) * advantage)


def clipped_surrogate_gradient(ratio, advantage, clip):
    """d/d(ratio) of clipped_surrogate, zero where the clipped branch is active."""
    unclipped = ratio * advantage <= np.clip(ratio, 1.0 - clip, 1.0 + clip) * advantage
    inside = (ratio >= 1.0 - clip) & (ratio <= 1.0 + clip)
    return np.where(unclipped | inside, advantage, 0.0)


def categorical_entropy(logits):
    logp = log_softmax(np.asarray(logits, dtype=float))
    return -np.sum(np.exp(logp) * logp, axis=-1)


def entropy_gradient(logits, coef=1.0):
    """Gradient of -coef * H(softmax(logits)) with respect to the logits."""
    logp = log_softmax(np.asarray(logits, dtype=float))
    p = np.exp(logp)
    entropy = -np.sum(p * logp, axis=-1, keepdims=True)
    return coef * p * (logp + entropy)


def gae(rewards, values, dones, last_value, discount, gae_lambda):
    """Generalized advantage estimates and returns for one rollout."""
    advantages = np.zeros_like(rewards)
    running = 0.0
    next_value = last_value
    for t in reversed(range(len(rewards))):
        alive = 0.0 if dones[t] else 1.0
        delta = rewards[t] + discount * next_value * alive - values[t]
        running = delta + discount * gae_lambda * alive * running
        advantages[t] = running
        next_value = values[t]
    return advantages, advantages + values


def ppo_update(net, adam, rollout, cfg, n_actions, rng):
    observations, actions, old_logp, advantages, returns = rollout
    size = len(actions)
    for _ in range(cfg.epochs):
        order = rng.permutation(size)
        for start in range(0, size, cfg.batch_size):
            index = order[start:start + cfg.batch_size]
            batch = len(index)
            output = net.forward(observations[index])
            logits, values = output[:, :n_actions], output[:, n_actions]

            advantage = advantages[index]
            if batch > 1:
                advantage = (advantage - advantage.mean()) / (advantage.std() + 1e-8)

            logp = log_softmax(logits)
            chosen = actions[index]
            ratio = np.exp(logp[np.arange(batch), chosen] - old_logp[index])

            # policy loss is -mean(surrogate)
            d_logp = -clipped_surrogate_gradient(ratio, advantage, cfg.clip) * ratio / batch
            d_logits = -softmax(logits) * d_logp[:, None]
            d_logits[np.arange(batch), chosen] += d_logp
            d_logits += entropy_gradient(logits, cfg.entropy_coef) / batch

            upstream = np.empty_like(output)
            upstream[:, :n_actions] = d_logits
            upstream[:, n_actions] = 2.0 * cfg.value_coef * (values - returns[index]) / batch

            grads = net.backward(upstream)
            clip_grad_norm(grads, cfg.max_grad_norm)
            adam_step(net.params, grads, adam, cfg.learning_rate)


def ppo_train(env, cfg=None):
    """Clipped-objective actor-critic, policy logits and value share one network."""
    cfg = cfg or PpoConfig()
    rng = np.random.default_rng(cfg.seed)
    if cfg.total_steps == 0:
        return random_rollout(env, rng)

    n_actions = env.n_actions
    net = Mlp.create([constants.OBSERVATION_SIZE] + list(cfg.hidden) + [n_actions + 1], rng)
    adam = AdamState.for_params(net.params)
    best = BestPulse(env)

    observation = env.reset()
    step = 0
    while step < cfg.total_steps:
        length = min(cfg.rollout_steps, cfg.total_steps - step)
        observations = np.zeros((length, constants.OBSERVATION_SIZE))
        actions = np.zeros(length, dtype=int)
        old_logp = np.zeros(length)
        values = np.zeros(length)
        rewards = np.zeros(length)
        dones = np.zeros(length, dtype=bool)

        for t in range(length):
            output = net.forward(observation)
            logp = log_softmax(output[:n_actions])
            action = int(rng.choice(n_actions, p=np.exp(logp)))

            observations[t] = observation
            actions[t] = action
            old_logp[t] = logp[action]
            values[t] = output[n_actions]

            observation, rewards[t], dones[t] = env.step(action)
            step += 1
            if dones[t]:
                best.update()
                if env.reached_target:
                    log.debug(f"PPO seed={cfg.seed} reached the target after {step} steps")
                    return episode_result(env, step)
                observation = env.reset()

        last_value = 0.0 if dones[-1] else float(net.forward(observation)[n_actions])
        advantages, returns = gae(rewards, values, dones, last_value, cfg.discount, cfg.gae_lambda)
        ppo_update(net, adam, (observations, actions, old_logp, advantages, returns), cfg, n_actions, rng)

    if best.pulse is None:
        while not env.done:
            env.step(int(np.argmax(net.forward(env.observation())[:n_actions])))
        best.update()
    log.debug(f"PPO seed={cfg.seed} best fidelity {best.fidelity:.6f} after {cfg.total_steps} steps")
    return best.result(cfg.total_steps)


TRAINERS = {'ql': ql_train, 'dqn': dqn_train, 'ppo': ppo_train}


def train(algorithm, n_params, total_time, cfg):
    """Build the environment with the algorithm's reward tiers and train on it."""
    env = ControlEnv(n_params, total_time, rewards=cfg.rewards, target_infidelity=cfg.target_infidelity)
    return TRAINERS[algorithm](env, cfg)
