"""Vectorised population operations built on the compiled kernels.

Populations are int8 arrays of shape ``(M, n)``. All functions are pure:
inputs are never modified in place.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from . import _kernels
from .braid import GeneratorSet, free_reduce
from .fitness import FitnessSpec, Recoding, Variant

_MODE_OF = {
    Variant.PLAIN_F: _kernels.MODE_PLAIN,
    Variant.EFFECTIVE_F_HAT: _kernels.MODE_EFFECTIVE,
    Variant.PREFIX_BEST_F_BAR: _kernels.MODE_PREFIX_BEST,
}


class BatchEvaluation(NamedTuple):
    fitness: np.ndarray
    epsilon: np.ndarray
    used_length: np.ndarray
    best_prefix_len: np.ndarray


def as_population(words) -> np.ndarray:
    """Coerce a list of equal-length words (or an array) to an int8 matrix."""
    pop = np.asarray(words, dtype=np.int8)
    if pop.ndim != 2:
        raise ValueError("population must be a 2-d array of symbols")
    return pop


def generator_stack(gs: GeneratorSet) -> np.ndarray:
    return np.stack([np.asarray(m, dtype=complex) for m in gs.matrices])


def batch_evaluate(gs: GeneratorSet, spec: FitnessSpec, pop: np.ndarray) -> BatchEvaluation:
    pop = as_population(pop)
    if pop.size and (pop.min() < 0 or pop.max() >= 2 * gs.g):
        raise ValueError("population contains out-of-range symbols")
    fit, eps, used, best_len = _kernels.eval_words(
        pop, generator_stack(gs), np.asarray(gs.target, dtype=complex),
        float(spec.lam), _MODE_OF[spec.variant], gs.g,
    )
    return BatchEvaluation(fit, eps, used, best_len)


def batch_elen(pop: np.ndarray, g: int = 2) -> np.ndarray:
    return _kernels.elen_words(as_population(pop), g)


def random_population(rng: np.random.Generator, count: int, n: int, g: int = 2) -> np.ndarray:
    return rng.integers(0, 2 * g, size=(count, n), dtype=np.int8)


# Ascending replacement symbols for each current symbol (g = 2 alphabet).
_NEIGHBOR_LUT = np.array(
    [[1, 2, 3], [0, 2, 3], [0, 1, 3], [0, 1, 2]], dtype=np.int8
)


def neighbor_block(pop: np.ndarray) -> np.ndarray:
    """All single-symbol substitutions of each row.

    Shape ``(M, 3n, n)``; neighbors are ordered position-major with the
    replacement symbols ascending, matching the greedy tie-break rule.
    """
    pop = as_population(pop)
    m_rows, n = pop.shape
    block = np.repeat(pop[:, None, :], 3 * n, axis=1)
    subs = _NEIGHBOR_LUT[pop]          # (M, n, 3)
    rows = np.arange(m_rows)[:, None, None]
    pos = np.arange(n)[None, :, None]
    alt = np.arange(3)[None, None, :]
    block[rows, pos * 3 + alt, pos] = subs
    return block


def greedy_improve_batch(
    gs: GeneratorSet, spec: FitnessSpec, pop: np.ndarray, ev: BatchEvaluation | None = None
) -> tuple[np.ndarray, BatchEvaluation, np.ndarray]:
    """Best-improvement hill climbing on every row until 1-change local optima.

    Returns the improved population, its evaluation, and the per-row count of
    neighbor evaluations spent (3n per round while the row was active).
    ``ev`` may carry a precomputed evaluation of ``pop`` to avoid repeating it.
    """
    pop = as_population(pop).copy()
    m_rows, n = pop.shape
    if ev is None:
        ev = batch_evaluate(gs, spec, pop)
    fit = ev.fitness.copy()
    eps = ev.epsilon.copy()
    used = ev.used_length.copy()
    best_len = ev.best_prefix_len.copy()
    evals = np.zeros(m_rows, dtype=np.int64)
    active = np.ones(m_rows, dtype=bool)
    while active.any():
        idx = np.nonzero(active)[0]
        nb = neighbor_block(pop[idx]).reshape(-1, n)
        nev = batch_evaluate(gs, spec, nb)
        evals[idx] += 3 * n
        nfit = nev.fitness.reshape(len(idx), 3 * n)
        pick = np.argmax(nfit, axis=1)  # first max: lowest position, lowest symbol
        pick_fit = nfit[np.arange(len(idx)), pick]
        improved = pick_fit > fit[idx]
        winners = idx[improved]
        if winners.size:
            flat = np.arange(len(idx)) * 3 * n + pick
            sel = flat[improved]
            pop[winners] = nb[sel]
            fit[winners] = nev.fitness[sel]
            eps[winners] = nev.epsilon[sel]
            used[winners] = nev.used_length[sel]
            best_len[winners] = nev.best_prefix_len[sel]
        active[idx[~improved]] = False
    return pop, BatchEvaluation(fit, eps, used, best_len), evals


def batch_recode(
    pop: np.ndarray, best_prefix_len: np.ndarray, mode: Recoding, g: int = 2
) -> np.ndarray:
    """Apply the recoding transform row-wise.

    Rows whose best prefix reduces to the identity are left unchanged.
    """
    if mode not in (Recoding.TYPE_I, Recoding.TYPE_II):
        raise ValueError(f"invalid recoding mode {mode}")
    pop = as_population(pop).copy()
    n = pop.shape[1]
    for r in range(pop.shape[0]):
        reduced = free_reduce(pop[r, : int(best_prefix_len[r])], g)
        m = len(reduced)
        if m == 0:
            continue
        if m >= n:
            pop[r] = np.asarray(reduced[:n], dtype=np.int8)
            continue
        head = np.asarray(reduced, dtype=np.int8)
        pop[r, :m] = head
        if mode is Recoding.TYPE_II:
            fill = min(m, n - m)
            pop[r, m : m + fill] = head[::-1][:fill]
    return pop
