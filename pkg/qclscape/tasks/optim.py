import logging

import numpy as np

from qclscape import constants
from qclscape.errors import InvalidArgumentError
from qclscape.models import ControlPulse, GaConfig, OptimResult, SgdConfig
from qclscape.qdyn import pulse_fidelities

log = logging.getLogger(__name__)


def check_problem(n_params, total_time):
    if n_params < 1:
        raise InvalidArgumentError('n_params', n_params, "must be at least 1")
    if not np.isfinite(total_time) or total_time <= 0:
        raise InvalidArgumentError('time', total_time, "must be finite and positive")


def central_difference_gradient(amplitudes, total_time, fd_step=constants.SGD_FD_STEP):
    """dF/da_k ~ (F(a + h e_k) - F(a - h e_k)) / 2h, all 2N shifted pulses in one batch."""
    amplitudes = np.asarray(amplitudes, dtype=float)
    n_params = amplitudes.shape[0]
    offsets = fd_step * np.eye(n_params)
    shifted = np.concatenate([amplitudes + offsets, amplitudes - offsets])
    values = pulse_fidelities(shifted, total_time)
    return (values[:n_params] - values[n_params:]) / (2.0 * fd_step)


def sgd_optimize(n_params, total_time=constants.DEFAULT_TIME, cfg=None, initial=None):
    """Gradient ascent with momentum on the fidelity, returning the final iterate."""
    cfg = cfg or SgdConfig()
    check_problem(n_params, total_time)
    rng = np.random.default_rng(cfg.seed)

    if initial is None:
        amplitudes = rng.uniform(constants.AMPLITUDE_MIN, constants.AMPLITUDE_MAX, n_params)
    else:
        amplitudes = np.clip(np.asarray(initial, dtype=float), constants.AMPLITUDE_MIN, constants.AMPLITUDE_MAX)
        if amplitudes.shape != (n_params,):
            raise InvalidArgumentError('initial', list(amplitudes), f"expected {n_params} amplitudes")

    fidelity = float(pulse_fidelities(amplitudes[None, :], total_time)[0])
    trace = [fidelity] if cfg.record_trace else None
    velocity = np.zeros(n_params)
    iterations = 0

    while 1.0 - fidelity > cfg.target_infidelity and iterations < cfg.max_iterations:
        gradient = central_difference_gradient(amplitudes, total_time, cfg.fd_step)
        velocity = cfg.momentum * velocity + cfg.learning_rate * gradient
        amplitudes = np.clip(amplitudes + velocity, constants.AMPLITUDE_MIN, constants.AMPLITUDE_MAX)
        fidelity = float(pulse_fidelities(amplitudes[None, :], total_time)[0])
        iterations += 1
        if trace is not None:
            trace.append(fidelity)

    converged = 1.0 - fidelity <= cfg.target_infidelity
    log.debug(f"SGD seed={cfg.seed} finished after {iterations} iterations with fidelity {fidelity:.6f}")
    return OptimResult(
        best_pulse=ControlPulse(tuple(amplitudes), total_time),
        best_fidelity=fidelity,
        iterations_used=iterations,
        converged=converged,
        trace=trace,
    )


def rank_population(fitness):
    """Indices sorted by descending fitness, ties kept in population order."""
    return np.argsort(-fitness, kind='stable')


def next_generation(population, fitness, cfg, genes, rng):
    order = rank_population(fitness)
    size = population.shape[0]
    elite = population[order[:cfg.elite_count]]
    underdogs = population[order[size - cfg.underdog_count:]] if cfg.underdog_count else population[:0]
    survivors = np.concatenate([elite, underdogs])
    parents = survivors if len(survivors) else population

    n_children = size - len(survivors)
    n_params = population.shape[1]
    pairs = rng.integers(0, len(parents), size=(n_children, 2))
    if n_params > 1:
        cuts = rng.integers(1, n_params, size=n_children)
    else:
        cuts = np.ones(n_children, dtype=int)
    columns = np.arange(n_params)
    take_first = columns[None, :] < cuts[:, None]
    children = np.where(take_first, parents[pairs[:, 0]], parents[pairs[:, 1]])

    mutate = rng.random(children.shape) < cfg.mutation_rate
    replacements = rng.choice(genes, size=children.shape)
    children = np.where(mutate, replacements, children)
    return np.concatenate([survivors, children])


def ga_optimize(n_params, total_time=constants.DEFAULT_TIME, cfg=None, initial_population=None):
    """Genetic search over the discrete gene pool with elite and underdog carry-over."""
    cfg = cfg or GaConfig()
    check_problem(n_params, total_time)
    rng = np.random.default_rng(cfg.seed)
    genes = cfg.gene_values

    population = rng.choice(genes, size=(cfg.population_size, n_params))
    if initial_population is not None:
        seeded = np.atleast_2d(np.asarray(initial_population, dtype=float))[:cfg.population_size]
        if seeded.shape[1] != n_params:
            raise InvalidArgumentError('initial_population', seeded.shape, f"expected rows of {n_params} genes")
        population[:len(seeded)] = np.clip(seeded, constants.AMPLITUDE_MIN, constants.AMPLITUDE_MAX)

    fitness = pulse_fidelities(population, total_time)
    best_index = int(rank_population(fitness)[0])
    best = population[best_index].copy()
    best_fidelity = float(fitness[best_index])
    trace = [best_fidelity] if cfg.record_trace else None
    generation = 0

    while 1.0 - best_fidelity > cfg.target_infidelity and generation < cfg.max_generations:
        population = next_generation(population, fitness, cfg, genes, rng)
        fitness = pulse_fidelities(population, total_time)
        generation += 1

        leader = int(rank_population(fitness)[0])
        if fitness[leader] > best_fidelity:
            best = population[leader].copy()
            best_fidelity = float(fitness[leader])
        if trace is not None:
            trace.append(float(fitness[leader]))

    converged = 1.0 - best_fidelity <= cfg.target_infidelity
    log.debug(f"GA seed={cfg.seed} finished after {generation} generations with fidelity {best_fidelity:.6f}")
    return OptimResult(
        best_pulse=ControlPulse(tuple(best), total_time),
        best_fidelity=best_fidelity,
        iterations_used=generation,
        converged=converged,
        trace=trace,
    )
