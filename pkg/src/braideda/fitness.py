"""Fitness functions over braid words and the recoding transforms.

Three variants share the scalarisation ``(1-lambda)/(1+eps) + lambda/l``:
the plain form uses the word length, the effective form the freely reduced
length, and the prefix-best form the maximum of the plain form over all
prefixes of the word.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .braid import (
    BraidWord,
    GeneratorSet,
    braid_error,
    braid_product,
    free_reduce,
)


class Variant(enum.Enum):
    PLAIN_F = "plain"
    EFFECTIVE_F_HAT = "effective"
    PREFIX_BEST_F_BAR = "prefix_best"


class Recoding(enum.Enum):
    NONE = "none"
    TYPE_I = "type_i"
    TYPE_II = "type_ii"


class DegenerateInputError(ValueError):
    """Empty word passed to a fitness evaluation."""


class DegenerateRecodeError(ValueError):
    """Recoding requested for an evaluation whose reduced prefix is empty."""


@dataclass(frozen=True)
class FitnessSpec:
    variant: Variant
    lam: float = 0.0
    recoding: Recoding = Recoding.NONE

    def __post_init__(self):
        if not 0.0 <= self.lam < 1.0:
            raise ValueError(f"lambda must be in [0, 1), got {self.lam}")
        if self.recoding is not Recoding.NONE and self.variant is not Variant.PREFIX_BEST_F_BAR:
            raise ValueError("recoding is only meaningful with the prefix-best variant")


@dataclass(frozen=True)
class BraidEvaluation:
    fitness: float
    epsilon: float
    used_length: int
    best_prefix_len: Optional[int] = None
    reduced_prefix: Optional[BraidWord] = None


def _scalarise(epsilon: float, length: int, lam: float) -> float:
    return (1.0 - lam) / (1.0 + epsilon) + (lam / length if lam else 0.0)


def eval_plain(gs: GeneratorSet, word: Sequence[int], lam: float = 0.0) -> BraidEvaluation:
    """Fitness with the raw word length in the denominator."""
    if len(word) < 1:
        raise DegenerateInputError("cannot evaluate an empty braid word")
    eps = braid_error(braid_product(gs, word), gs.target)
    return BraidEvaluation(fitness=_scalarise(eps, len(word), lam), epsilon=eps, used_length=len(word))


def eval_effective(gs: GeneratorSet, word: Sequence[int], lam: float = 0.0) -> BraidEvaluation:
    """Fitness with the freely reduced length (floored at 1) in the denominator."""
    if len(word) < 1:
        raise DegenerateInputError("cannot evaluate an empty braid word")
    eps = braid_error(braid_product(gs, word), gs.target)
    used = max(len(free_reduce(word, gs.g)), 1)
    return BraidEvaluation(fitness=_scalarise(eps, used, lam), epsilon=eps, used_length=used)


def eval_prefix_best(gs: GeneratorSet, word: Sequence[int], lam: float = 0.0) -> BraidEvaluation:
    """Maximum plain fitness over all prefixes, with the arg-max prefix.

    Ties go to the shortest prefix, which makes recoding deterministic.
    The reduced arg-max prefix is returned for use by :func:`recode`.
    """
    if len(word) < 1:
        raise DegenerateInputError("cannot evaluate an empty braid word")
    prod = np.eye(2, dtype=complex)
    best_f = -math.inf
    best_len = 1
    best_eps = math.inf
    for k, s in enumerate(word, start=1):
        prod = prod @ gs.matrix(int(s))
        eps = braid_error(prod, gs.target)
        f = _scalarise(eps, k, lam)
        if f > best_f:
            best_f, best_len, best_eps = f, k, eps
    return BraidEvaluation(
        fitness=best_f,
        epsilon=best_eps,
        used_length=best_len,
        best_prefix_len=best_len,
        reduced_prefix=free_reduce(word[:best_len], gs.g),
    )


def evaluate(gs: GeneratorSet, spec: FitnessSpec, word: Sequence[int]) -> BraidEvaluation:
    if spec.variant is Variant.PLAIN_F:
        return eval_plain(gs, word, spec.lam)
    if spec.variant is Variant.EFFECTIVE_F_HAT:
        return eval_effective(gs, word, spec.lam)
    return eval_prefix_best(gs, word, spec.lam)


def recode(word: Sequence[int], ev: BraidEvaluation, mode: Recoding, g: int = 2) -> BraidWord:
    """Move the reduced best prefix to the front of the word.

    Type I keeps the original tail values; type II fills the tail with a
    reversed copy of the reduced prefix (truncated to fit), falling back to
    the original values if the tail is longer than the copy.
    """
    if ev.reduced_prefix is None:
        raise ValueError("recode needs an evaluation from eval_prefix_best")
    if mode not in (Recoding.TYPE_I, Recoding.TYPE_II):
        raise ValueError(f"invalid recoding mode {mode}")
    word = tuple(int(s) for s in word)
    reduced = ev.reduced_prefix
    m = len(reduced)
    n = len(word)
    if m == 0:
        raise DegenerateRecodeError("best prefix reduces to the identity; word left unchanged")
    if m >= n:
        return tuple(reduced[:n])
    if mode is Recoding.TYPE_I:
        tail = word[m:]
    else:
        mirror = tuple(reversed(reduced))[: n - m]
        tail = mirror + word[m + len(mirror):]
    return tuple(reduced) + tail


def sk_length_estimate(epsilon: float) -> float:
    """Braid length scale ``log10(1/eps)^3.97`` used as a comparison baseline."""
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must be in (0, 1), got {epsilon}")
    return math.log10(1.0 / epsilon) ** 3.97
