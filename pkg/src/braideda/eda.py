"""The estimation-of-distribution search loop and the search baselines.

One generation evaluates the population (optionally polishing every word by
greedy hill climbing and rewriting genotypes by recoding), truncation-selects
the best fraction, fits the configured probabilistic model, and samples the
next population either from scratch or by partial resampling around base
words drawn from the current population.
"""

from __future__ import annotations

import enum
import json
import math
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .batch import (
    BatchEvaluation,
    batch_evaluate,
    batch_recode,
    greedy_improve_batch,
    random_population,
)
from .braid import GeneratorSet, format_braid_text
from .fitness import (
    BraidEvaluation,
    FitnessSpec,
    Recoding,
    Variant,
    evaluate,
)
from .models import (
    PartialMode,
    learn_markov,
    learn_tree,
    learn_univariate,
    sample_full,
    sample_partial,
)

LAMBDA_VALUES = (0.0, 0.01, 0.05, 0.1)


class FunctionMode(enum.IntEnum):
    F_PLAIN = 0
    FBAR_NORECODE = 1
    FBAR_RECODE_I = 2
    FBAR_RECODE_II = 3


class SamplingMode(enum.IntEnum):
    FULL = 0
    PARTIAL_I = 1
    PARTIAL_II = 2


class ModelType(enum.IntEnum):
    UNIVARIATE = 0
    MARKOV = 1
    TREE = 2


_LEARNERS = {
    ModelType.UNIVARIATE: learn_univariate,
    ModelType.MARKOV: learn_markov,
    ModelType.TREE: learn_tree,
}


@dataclass
class EdaConfig:
    n: int
    use_local: bool = False
    function_mode: FunctionMode = FunctionMode.F_PLAIN
    lam: float = 0.0
    sampling_mode: SamplingMode = SamplingMode.FULL
    model_type: ModelType = ModelType.UNIVARIATE
    population: Optional[int] = None   # default 10000, or 100n when use_local
    generations: Optional[int] = None  # default 15n, or 100 when use_local
    truncation: float = 0.05
    seed: int = 0
    max_evaluations: Optional[int] = None

    def resolved_population(self) -> int:
        if self.population is not None:
            return self.population
        return 100 * self.n if self.use_local else 10000

    def resolved_generations(self) -> int:
        if self.generations is not None:
            return self.generations
        return 100 if self.use_local else 15 * self.n

    def fitness_spec(self) -> FitnessSpec:
        if self.function_mode is FunctionMode.F_PLAIN:
            return FitnessSpec(Variant.PLAIN_F, self.lam)
        recoding = {
            FunctionMode.FBAR_NORECODE: Recoding.NONE,
            FunctionMode.FBAR_RECODE_I: Recoding.TYPE_I,
            FunctionMode.FBAR_RECODE_II: Recoding.TYPE_II,
        }[self.function_mode]
        return FitnessSpec(Variant.PREFIX_BEST_F_BAR, self.lam, recoding)

    def validate(self) -> None:
        if self.n < 1:
            raise ValueError("n must be positive")
        if math.ceil(self.truncation * self.resolved_population()) < 1:
            raise ValueError("truncation fraction selects an empty set")

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "use_local": self.use_local,
            "function_mode": int(self.function_mode),
            "lambda": self.lam,
            "sampling_mode": int(self.sampling_mode),
            "model_type": int(self.model_type),
            "population": self.resolved_population(),
            "generations": self.resolved_generations(),
            "truncation": self.truncation,
            "seed": self.seed,
            "max_evaluations": self.max_evaluations,
        }


@dataclass
class GenerationStats:
    generation: int
    best_fitness: float
    mean_fitness: float
    best_epsilon: float
    best_length: int
    incumbent_fitness: float
    evaluations: int

    def as_dict(self) -> dict:
        return {
            "generation": self.generation,
            "best_fitness": self.best_fitness,
            "mean_fitness": self.mean_fitness,
            "best_epsilon": self.best_epsilon,
            "best_length": self.best_length,
            "incumbent_fitness": self.incumbent_fitness,
            "evaluations": self.evaluations,
        }


@dataclass
class RunRecord:
    config: dict
    stats: list[GenerationStats] = field(default_factory=list)
    best_word: Optional[tuple] = None
    best_evaluation: Optional[BraidEvaluation] = None
    total_evaluations: int = 0
    wall_time: float = 0.0
    truncated: bool = False

    def deterministic_dict(self) -> dict:
        """Everything except wall-clock; identical across reruns of a seed."""
        return {
            "config": self.config,
            "stats": [s.as_dict() for s in self.stats],
            "best_word": list(self.best_word) if self.best_word is not None else None,
            "best_fitness": self.best_evaluation.fitness if self.best_evaluation else None,
            "best_epsilon": self.best_evaluation.epsilon if self.best_evaluation else None,
            "best_used_length": self.best_evaluation.used_length if self.best_evaluation else None,
            "total_evaluations": self.total_evaluations,
            "truncated": self.truncated,
        }

    def to_jsonl(self) -> str:
        """One line per generation plus a final line with the best word."""
        lines = [json.dumps({"config": self.config})]
        lines += [json.dumps(s.as_dict()) for s in self.stats]
        final = {
            "best_word_text": format_braid_text(self.best_word) if self.best_word else None,
            "best_fitness": self.best_evaluation.fitness if self.best_evaluation else None,
            "best_epsilon": self.best_evaluation.epsilon if self.best_evaluation else None,
            "best_used_length": self.best_evaluation.used_length if self.best_evaluation else None,
            "total_evaluations": self.total_evaluations,
            "wall_time": self.wall_time,
            "truncated": self.truncated,
        }
        lines.append(json.dumps(final))
        return "\n".join(lines) + "\n"


def truncation_select(fitness: np.ndarray, fraction: float) -> np.ndarray:
    """Indices of the best ``ceil(fraction * N)`` individuals.

    Ties break toward lower population index (stable sort).
    """
    count = math.ceil(fraction * len(fitness))
    order = np.argsort(-fitness, kind="stable")
    return order[:count]


def greedy_improve(gs: GeneratorSet, spec: FitnessSpec, word) -> tuple[tuple, BraidEvaluation, int]:
    """Best-improvement hill climbing from a single word (scalar reference).

    Each round evaluates all 3n single-position substitutions and moves to
    the strictly best improving neighbor (ties: lowest position, then lowest
    symbol); stops at a 1-change local optimum.
    """
    word = tuple(int(s) for s in word)
    n = len(word)
    current = evaluate(gs, spec, word)
    evals = 0
    while True:
        best_nb = None
        best_ev = None
        for pos in range(n):
            for sym in range(4):
                if sym == word[pos]:
                    continue
                cand = word[:pos] + (sym,) + word[pos + 1:]
                ev = evaluate(gs, spec, cand)
                evals += 1
                if best_ev is None or ev.fitness > best_ev.fitness:
                    best_nb, best_ev = cand, ev
        if best_ev.fitness > current.fitness:
            word, current = best_nb, best_ev
        else:
            return word, current, evals


def _sample_next(
    config: EdaConfig, model, pop: np.ndarray, rng: np.random.Generator
) -> np.ndarray:
    count = pop.shape[0]
    if config.sampling_mode is SamplingMode.FULL:
        return sample_full(model, count, rng)
    mode = PartialMode.I if config.sampling_mode is SamplingMode.PARTIAL_I else PartialMode.II
    base_idx = rng.integers(0, count, size=count)
    out = np.empty_like(pop)
    for i in range(count):
        out[i] = sample_partial(model, pop[base_idx[i]], mode, rng)
    return out


def run_eda(config: EdaConfig, gs: GeneratorSet) -> RunRecord:
    """Execute one seeded EDA run and return its full provenance record."""
    config.validate()
    spec = config.fitness_spec()
    n = config.n
    pop_size = config.resolved_population()
    generations = config.resolved_generations()
    rng = np.random.default_rng(config.seed)
    pop = random_population(rng, pop_size, n)

    record = RunRecord(config=config.as_dict())
    t0 = time.perf_counter()
    best_fit = -math.inf
    best_word: Optional[tuple] = None
    evals_total = 0

    for gen in range(generations):
        ev: BatchEvaluation = batch_evaluate(gs, spec, pop)
        evals_total += pop_size
        if config.use_local:
            pop, ev, greedy_evals = greedy_improve_batch(gs, spec, pop, ev)
            evals_total += int(greedy_evals.sum())
        if spec.recoding is not Recoding.NONE:
            pop = batch_recode(pop, ev.best_prefix_len, spec.recoding, gs.g)

        gen_best = int(np.argmax(ev.fitness))
        if ev.fitness[gen_best] > best_fit:
            best_fit = float(ev.fitness[gen_best])
            best_word = tuple(int(s) for s in pop[gen_best])
        record.stats.append(
            GenerationStats(
                generation=gen,
                best_fitness=float(ev.fitness[gen_best]),
                mean_fitness=float(ev.fitness.mean()),
                best_epsilon=float(ev.epsilon[gen_best]),
                best_length=int(ev.used_length[gen_best]),
                incumbent_fitness=best_fit,
                evaluations=evals_total,
            )
        )
        budget_hit = (
            config.max_evaluations is not None and evals_total >= config.max_evaluations
        )
        if budget_hit:
            record.truncated = gen < generations - 1
            break
        if gen == generations - 1:
            break
        selected = pop[truncation_select(ev.fitness, config.truncation)]
        model = _LEARNERS[config.model_type](selected)
        pop = _sample_next(config, model, pop, rng)

    record.best_word = best_word
    record.best_evaluation = evaluate(gs, spec, best_word)
    record.total_evaluations = evals_total
    record.wall_time = time.perf_counter() - t0
    return record


def random_search(
    gs: GeneratorSet, spec: FitnessSpec, n: int, draws: int, rng: np.random.Generator
) -> tuple[tuple, BraidEvaluation]:
    """Best of ``draws`` uniform random words."""
    if draws < 1:
        raise ValueError("draws must be >= 1")
    pop = random_population(rng, draws, n)
    ev = batch_evaluate(gs, spec, pop)
    best = int(np.argmax(ev.fitness))
    word = tuple(int(s) for s in pop[best])
    return word, evaluate(gs, spec, word)


def greedy_search(
    gs: GeneratorSet, spec: FitnessSpec, n: int, starts: int, rng: np.random.Generator
) -> tuple[tuple, BraidEvaluation]:
    """Greedy hill climbing from each of ``starts`` random words; overall best."""
    if starts < 1:
        raise ValueError("starts must be >= 1")
    pop = random_population(rng, starts, n)
    improved, ev, _ = greedy_improve_batch(gs, spec, pop)
    best = int(np.argmax(ev.fitness))
    word = tuple(int(s) for s in improved[best])
    return word, evaluate(gs, spec, word)
