"""Probabilistic models over braid words: univariate, 1-order Markov, tree.

All models are learned from a selected population with Laplace smoothing
(alpha = 1) so that every probability stays strictly positive, and support
full ancestral sampling as well as partial resampling of a random subset of
positions around a base word.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence, Union

import numpy as np

ALPHABET = 4
MI_EDGE_THRESHOLD = 1e-9


class PartialMode(enum.Enum):
    I = "I"    # resample k ~ U[1, n] positions
    II = "II"  # resample k ~ U[1, n//2] positions


@dataclass(frozen=True)
class UnivariateModel:
    n: int
    probs: np.ndarray  # (n, 4) row-stochastic


@dataclass(frozen=True)
class MarkovChainModel:
    n: int
    initial: np.ndarray      # (4,)
    transitions: np.ndarray  # (n-1, 4, 4); transitions[i-1][a][b] = p(x_{i+1}=b | x_i=a)


@dataclass(frozen=True)
class TreeModel:
    n: int
    parent: np.ndarray               # (n,) parent index, -1 for roots
    root_probs: dict                 # node -> (4,) marginal
    cpts: dict                       # node -> (4, 4) p(node=b | parent=a)
    learned_mi: np.ndarray = field(repr=False, default=None)  # (n, n) smoothed MI

    def topological_order(self) -> list[int]:
        order: list[int] = []
        children: dict[int, list[int]] = {i: [] for i in range(self.n)}
        roots = []
        for i, p in enumerate(self.parent):
            if p < 0:
                roots.append(i)
            else:
                children[int(p)].append(i)
        stack = sorted(roots, reverse=True)
        while stack:
            node = stack.pop()
            order.append(node)
            stack.extend(sorted(children[node], reverse=True))
        return order


Model = Union[UnivariateModel, MarkovChainModel, TreeModel]


def _as_sample(sample) -> np.ndarray:
    arr = np.asarray(sample, dtype=np.int64)
    if arr.ndim != 2 or arr.shape[0] == 0:
        raise ValueError("sample must be a nonempty 2-d array of equal-length words")
    if arr.min() < 0 or arr.max() >= ALPHABET:
        raise ValueError("sample contains out-of-range symbols")
    return arr


def learn_univariate(sample) -> UnivariateModel:
    """Per-position symbol frequencies with add-one smoothing."""
    arr = _as_sample(sample)
    k, n = arr.shape
    probs = np.empty((n, ALPHABET))
    for i in range(n):
        probs[i] = (np.bincount(arr[:, i], minlength=ALPHABET) + 1.0) / (k + ALPHABET)
    return UnivariateModel(n=n, probs=probs)


def learn_markov(sample) -> MarkovChainModel:
    """First-order chain in braid position order, add-one smoothing per row."""
    arr = _as_sample(sample)
    k, n = arr.shape
    initial = (np.bincount(arr[:, 0], minlength=ALPHABET) + 1.0) / (k + ALPHABET)
    transitions = np.empty((max(n - 1, 0), ALPHABET, ALPHABET))
    for i in range(1, n):
        pair = np.bincount(
            arr[:, i - 1] * ALPHABET + arr[:, i], minlength=ALPHABET * ALPHABET
        ).reshape(ALPHABET, ALPHABET)
        transitions[i - 1] = (pair + 1.0) / (pair.sum(axis=1, keepdims=True) + ALPHABET)
    return MarkovChainModel(n=n, initial=initial, transitions=transitions)


def _smoothed_pairwise(arr: np.ndarray, i: int, j: int) -> np.ndarray:
    k = arr.shape[0]
    pair = np.bincount(
        arr[:, i] * ALPHABET + arr[:, j], minlength=ALPHABET * ALPHABET
    ).reshape(ALPHABET, ALPHABET)
    return (pair + 1.0) / (k + ALPHABET * ALPHABET)


def pairwise_mutual_info(sample) -> np.ndarray:
    """Mutual information matrix (bits) from smoothed pairwise marginals."""
    arr = _as_sample(sample)
    n = arr.shape[1]
    mi = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            pij = _smoothed_pairwise(arr, i, j)
            pi = pij.sum(axis=1)
            pj = pij.sum(axis=0)
            mi[i, j] = mi[j, i] = float(np.sum(pij * np.log2(pij / np.outer(pi, pj))))
    return mi


class _UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[rb] = ra
        return True


def maximum_spanning_forest(mi: np.ndarray, threshold: float = MI_EDGE_THRESHOLD) -> list[tuple[int, int]]:
    """Kruskal on MI weights; edges below ``threshold`` are dropped.

    Equal-weight ties break toward the lexicographically smallest (i, j).
    """
    n = mi.shape[0]
    edges = [(i, j) for i in range(n) for j in range(i + 1, n) if mi[i, j] > threshold]
    edges.sort(key=lambda e: (-mi[e[0], e[1]], e[0], e[1]))
    uf = _UnionFind(n)
    return [e for e in edges if uf.union(*e)]


def learn_tree(sample) -> TreeModel:
    """Maximum-MI spanning forest with smoothed CPTs (Chow-Liu style)."""
    arr = _as_sample(sample)
    k, n = arr.shape
    mi = pairwise_mutual_info(arr)
    forest = maximum_spanning_forest(mi)
    adjacency: dict[int, list[int]] = {i: [] for i in range(n)}
    for i, j in forest:
        adjacency[i].append(j)
        adjacency[j].append(i)
    parent = np.full(n, -1, dtype=np.int64)
    visited = np.zeros(n, dtype=bool)
    root_probs: dict[int, np.ndarray] = {}
    cpts: dict[int, np.ndarray] = {}
    for root in range(n):  # lowest index per component becomes the root
        if visited[root]:
            continue
        visited[root] = True
        root_probs[root] = (np.bincount(arr[:, root], minlength=ALPHABET) + 1.0) / (k + ALPHABET)
        stack = [root]
        while stack:
            node = stack.pop()
            for nb in sorted(adjacency[node]):
                if visited[nb]:
                    continue
                visited[nb] = True
                parent[nb] = node
                pair = np.bincount(
                    arr[:, node] * ALPHABET + arr[:, nb], minlength=ALPHABET * ALPHABET
                ).reshape(ALPHABET, ALPHABET)
                cpts[nb] = (pair + 1.0) / (pair.sum(axis=1, keepdims=True) + ALPHABET)
                stack.append(nb)
    return TreeModel(n=n, parent=parent, root_probs=root_probs, cpts=cpts, learned_mi=mi)


def _categorical_rows(probs: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """One draw per row of a row-stochastic matrix."""
    cdf = np.cumsum(probs, axis=1)
    cdf[:, -1] = 1.1  # guard against rounding shortfall
    u = rng.random(probs.shape[0])
    return (u[:, None] < cdf).argmax(axis=1)


def sample_full(model: Model, count: int, rng: np.random.Generator) -> np.ndarray:
    """Draw ``count`` words by ancestral sampling (parents before children)."""
    n = model.n
    out = np.empty((count, n), dtype=np.int8)
    if isinstance(model, UnivariateModel):
        for i in range(n):
            out[:, i] = _categorical_rows(np.broadcast_to(model.probs[i], (count, ALPHABET)), rng)
    elif isinstance(model, MarkovChainModel):
        out[:, 0] = _categorical_rows(np.broadcast_to(model.initial, (count, ALPHABET)), rng)
        for i in range(1, n):
            out[:, i] = _categorical_rows(model.transitions[i - 1][out[:, i - 1]], rng)
    elif isinstance(model, TreeModel):
        for node in model.topological_order():
            p = model.parent[node]
            if p < 0:
                out[:, node] = _categorical_rows(
                    np.broadcast_to(model.root_probs[node], (count, ALPHABET)), rng
                )
            else:
                out[:, node] = _categorical_rows(model.cpts[node][out[:, int(p)]], rng)
    else:
        raise TypeError(f"unknown model type {type(model)!r}")
    return out


def _draw(probs: np.ndarray, rng: np.random.Generator) -> int:
    cdf = np.cumsum(probs)
    cdf[-1] = 1.1
    return int(np.searchsorted(cdf, rng.random(), side="right"))


def sample_partial(
    model: Model,
    base: Sequence[int],
    mode: PartialMode,
    rng: np.random.Generator,
    k: int | None = None,
) -> np.ndarray:
    """Resample a random subset of positions of ``base`` from the model.

    The subset size is uniform in [1, n] (mode I) or [1, n//2] (mode II);
    ``k`` overrides the draw (k = 0 returns the base unchanged — test hook).
    Untouched positions keep their base values and participate in the
    conditioning of resampled children.
    """
    base = np.asarray(base, dtype=np.int8)
    n = model.n
    if base.shape != (n,):
        raise ValueError(f"base word must have length {n}")
    if k is None:
        hi = n if mode is PartialMode.I else max(n // 2, 1)
        k = int(rng.integers(1, hi + 1))
    word = base.copy()
    if k == 0:
        return word
    chosen = rng.choice(n, size=k, replace=False)
    if isinstance(model, UnivariateModel):
        for i in chosen:
            word[i] = _draw(model.probs[i], rng)
    elif isinstance(model, MarkovChainModel):
        for i in sorted(chosen):  # ancestral order; predecessors hold current values
            if i == 0:
                word[i] = _draw(model.initial, rng)
            else:
                word[i] = _draw(model.transitions[i - 1][word[i - 1]], rng)
    elif isinstance(model, TreeModel):
        chosen_set = set(int(i) for i in chosen)
        for node in model.topological_order():
            if node not in chosen_set:
                continue
            p = model.parent[node]
            if p < 0:
                word[node] = _draw(model.root_probs[node], rng)
            else:
                word[node] = _draw(model.cpts[node][word[int(p)]], rng)
    else:
        raise TypeError(f"unknown model type {type(model)!r}")
    return word


def model_to_json(model: Model) -> str:
    """Serialise any model to a JSON document (see ``model_from_json``)."""
    if isinstance(model, UnivariateModel):
        doc = {"model_type": "univariate", "n": model.n, "probs": model.probs.tolist()}
    elif isinstance(model, MarkovChainModel):
        doc = {
            "model_type": "markov",
            "n": model.n,
            "initial": model.initial.tolist(),
            "transitions": model.transitions.tolist(),
        }
    elif isinstance(model, TreeModel):
        doc = {
            "model_type": "tree",
            "n": model.n,
            "parent": model.parent.tolist(),
            "root_probs": {str(k): v.tolist() for k, v in model.root_probs.items()},
            "cpts": {str(k): v.tolist() for k, v in model.cpts.items()},
        }
    else:
        raise TypeError(f"unknown model type {type(model)!r}")
    return json.dumps(doc)


def model_from_json(text: str) -> Model:
    doc = json.loads(text)
    kind = doc["model_type"]
    if kind == "univariate":
        return UnivariateModel(n=doc["n"], probs=np.asarray(doc["probs"]))
    if kind == "markov":
        return MarkovChainModel(
            n=doc["n"],
            initial=np.asarray(doc["initial"]),
            transitions=np.asarray(doc["transitions"]),
        )
    if kind == "tree":
        return TreeModel(
            n=doc["n"],
            parent=np.asarray(doc["parent"], dtype=np.int64),
            root_probs={int(k): np.asarray(v) for k, v in doc["root_probs"].items()},
            cpts={int(k): np.asarray(v) for k, v in doc["cpts"].items()},
        )
    raise ValueError(f"unknown model_type {kind!r}")


def save_model(model: Model, path: Path | str) -> None:
    Path(path).write_text(model_to_json(model))


def load_model(path: Path | str) -> Model:
    return model_from_json(Path(path).read_text())
