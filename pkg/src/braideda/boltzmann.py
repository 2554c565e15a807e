"""Exhaustive landscape analysis at small word lengths.

Every length-``n`` word is enumerated (``4^n`` of them), a Boltzmann
distribution ``p(x) ~ exp(fitness(x)/T)`` is built over the space, and
univariate/bivariate marginals plus mutual information are derived from it.

Enumeration order is base-4 little-endian: the symbol at position 1 is the
least significant digit of the word index, so tables are bit-reproducible.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .batch import batch_evaluate
from .braid import GeneratorSet
from .fitness import FitnessSpec

DEFAULT_MAX_N = 13
_CHUNK = 1 << 18


class EnumerationGuardError(ValueError):
    """Requested word length exceeds the exhaustive-enumeration guard."""


@dataclass(frozen=True)
class BoltzmannTable:
    n: int
    temperature: float
    log_weights: np.ndarray  # fitness / T per word, little-endian word index
    log_z: float

    def probabilities(self) -> np.ndarray:
        return np.exp(self.log_weights - self.log_z)


@dataclass(frozen=True)
class MarginalSet:
    univariate: np.ndarray   # (n, 4); columns sigma1, sigma2, sigma1^-1, sigma2^-1
    bivariate: np.ndarray    # (n, n, 4, 4); upper triangle populated
    mutual_info: np.ndarray  # (n, n) symmetric, bits, zero diagonal


def _logsumexp(values: np.ndarray) -> float:
    hi = float(np.max(values))
    return hi + float(np.log(np.sum(np.exp(values - hi))))


def word_digits(indices: np.ndarray, n: int) -> np.ndarray:
    """Symbols of each word index, position 1 in column 0."""
    return np.stack([(indices >> (2 * i)) & 3 for i in range(n)], axis=1).astype(np.int8)


def landscape_fitness(gs: GeneratorSet, spec: FitnessSpec, n: int, max_n: int = DEFAULT_MAX_N) -> np.ndarray:
    """Fitness of all ``4^n`` words, chunked through the batch evaluator."""
    if n > max_n:
        raise EnumerationGuardError(
            f"n = {n} exceeds the enumeration guard ({max_n}); 4^{n} words would "
            f"need ~{4 ** n * (n + 8) / 2 ** 30:.1f} GiB — raise max_n explicitly to proceed"
        )
    total = 4 ** n
    out = np.empty(total)
    for start in range(0, total, _CHUNK):
        idx = np.arange(start, min(start + _CHUNK, total), dtype=np.int64)
        out[start : start + len(idx)] = batch_evaluate(gs, spec, word_digits(idx, n)).fitness
    return out


def boltzmann_from_fitness(values: np.ndarray, n: int, temperature: float) -> BoltzmannTable:
    """Build the distribution from a precomputed fitness table."""
    if temperature <= 0:
        raise ValueError("temperature must be positive")
    values = np.asarray(values, dtype=float)
    if values.shape != (4 ** n,):
        raise ValueError(f"expected 4^{n} fitness values, got {values.shape}")
    log_w = values / temperature
    return BoltzmannTable(n=n, temperature=temperature, log_weights=log_w, log_z=_logsumexp(log_w))


def enumerate_boltzmann(
    gs: GeneratorSet,
    spec: FitnessSpec,
    n: int,
    temperature: float = 1.0,
    max_n: int = DEFAULT_MAX_N,
) -> BoltzmannTable:
    return boltzmann_from_fitness(landscape_fitness(gs, spec, n, max_n), n, temperature)


def marginals(table: BoltzmannTable) -> MarginalSet:
    """Exact univariate/bivariate marginalisation and mutual information (bits)."""
    n = table.n
    probs = table.probabilities()
    digits = word_digits(np.arange(4 ** n, dtype=np.int64), n)
    univariate = np.empty((n, 4))
    for i in range(n):
        univariate[i] = np.bincount(digits[:, i], weights=probs, minlength=4)
    bivariate = np.zeros((n, n, 4, 4))
    mi = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            pij = np.bincount(
                digits[:, i].astype(np.int64) * 4 + digits[:, j], weights=probs, minlength=16
            ).reshape(4, 4)
            bivariate[i, j] = pij
            outer = np.outer(univariate[i], univariate[j])
            mask = pij > 0
            mi[i, j] = mi[j, i] = float(np.sum(pij[mask] * np.log2(pij[mask] / outer[mask])))
    return MarginalSet(univariate=univariate, bivariate=bivariate, mutual_info=mi)


def pairwise_fitness_scatter(
    gs: GeneratorSet,
    spec_a: FitnessSpec,
    spec_b: FitnessSpec,
    n: int,
    temperature: float = 1.0,
    max_n: int = DEFAULT_MAX_N,
) -> np.ndarray:
    """Per-word probability under each spec's Boltzmann distribution.

    Returns an array of shape ``(4^n, 2)`` in word-index order.
    """
    pa = enumerate_boltzmann(gs, spec_a, n, temperature, max_n).probabilities()
    pb = enumerate_boltzmann(gs, spec_b, n, temperature, max_n).probabilities()
    return np.stack([pa, pb], axis=1)


def adjacent_vs_nonadjacent_mi(ms: MarginalSet) -> tuple[float, float]:
    """Mean mutual information over adjacent pairs vs all other pairs."""
    n = ms.mutual_info.shape[0]
    adj = [ms.mutual_info[i, i + 1] for i in range(n - 1)]
    non = [ms.mutual_info[i, j] for i in range(n) for j in range(i + 2, n)]
    return float(np.mean(adj)), float(np.mean(non))


def write_univariate_csv(path: Path | str, ms: MarginalSet) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["position", "p_sigma1", "p_sigma2", "p_sigma1_inv", "p_sigma2_inv"])
        for i, row in enumerate(ms.univariate, start=1):
            w.writerow([i, *(f"{p:.12g}" for p in row)])


def write_mutual_info_csv(path: Path | str, ms: MarginalSet) -> None:
    n = ms.mutual_info.shape[0]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["position_i", "position_j", "mi_bits"])
        for i in range(n):
            for j in range(i + 1, n):
                w.writerow([i + 1, j + 1, f"{ms.mutual_info[i, j]:.12g}"])


def write_scatter_csv(path: Path | str, pairs: np.ndarray) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["word_index", "p_specA", "p_specB"])
        for idx, (pa, pb) in enumerate(pairs):
            w.writerow([idx, f"{pa:.12g}", f"{pb:.12g}"])
