"""Braid words over the Fibonacci anyon generators.

A braid word is a sequence of symbols in ``{0, ..., 2g-1}``: symbol ``j < g``
stands for the generator ``sigma_{j+1}`` and symbol ``j >= g`` for its inverse
``sigma_{j-g+1}^-1``.  The gate a word realises is the left-to-right product of
the corresponding 2x2 unitaries.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Sequence

import numpy as np

BraidWord = tuple[int, ...]

TAU = (np.sqrt(5.0) - 1.0) / 2.0


class InvalidSymbolError(ValueError):
    """A braid symbol outside the valid range for the generator set."""


class BraidParseError(ValueError):
    """Malformed braid text; carries the offending token position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (token {position})")
        self.position = position


@dataclass(frozen=True)
class GeneratorSet:
    """Generator matrices, their inverses, and the target gate.

    ``matrices`` holds the ``2g`` unitaries in symbol order: the ``g``
    generators first, then their inverses.
    """

    g: int
    matrices: tuple[np.ndarray, ...]
    target: np.ndarray
    tau: float = TAU

    def matrix(self, symbol: int) -> np.ndarray:
        if not 0 <= symbol < 2 * self.g:
            raise InvalidSymbolError(f"symbol {symbol} out of range [0, {2 * self.g - 1}]")
        return self.matrices[symbol]

    def inverse_symbol(self, symbol: int) -> int:
        """Symbol of the inverse generator: j <-> j+g."""
        if not 0 <= symbol < 2 * self.g:
            raise InvalidSymbolError(f"symbol {symbol} out of range [0, {2 * self.g - 1}]")
        return symbol - self.g if symbol >= self.g else symbol + self.g


def fibonacci_generators() -> GeneratorSet:
    """The two Fibonacci anyon elementary exchanges projected onto SU(2).

    The lower-right entry of the second generator carries phase ``+pi/10``
    (the sign that makes the matrix unitary with det = tau^2 + tau = 1).
    The target gate is ``i*X``, the injection NOT gate that the published
    best braids approximate.
    """
    s1 = np.array(
        [
            [np.exp(-1j * 7 * np.pi / 10), 0.0],
            [0.0, -np.exp(-1j * 3 * np.pi / 10)],
        ]
    )
    s2 = np.array(
        [
            [-TAU * np.exp(-1j * np.pi / 10), -1j * np.sqrt(TAU)],
            [-1j * np.sqrt(TAU), -TAU * np.exp(1j * np.pi / 10)],
        ]
    )
    target = np.array([[0.0, 1j], [1j, 0.0]])
    mats = (s1, s2, s1.conj().T, s2.conj().T)
    for m in mats:
        m.setflags(write=False)
    target.setflags(write=False)
    return GeneratorSet(g=2, matrices=mats, target=target)


def braid_product(gs: GeneratorSet, word: Sequence[int]) -> np.ndarray:
    """Left-to-right product of the generator matrices of ``word``.

    The empty word yields the identity.
    """
    out = np.eye(2, dtype=complex)
    for s in word:
        out = out @ gs.matrix(int(s))
    return out


def braid_error(b: np.ndarray, target: np.ndarray) -> float:
    """Distance between a braid's gate and the target.

    Computed as ``sqrt(sum_ij |B_ij - T_ij|^2 / 2)``, which reproduces the
    published error values of the reference braids.
    """
    d = np.asarray(b) - np.asarray(target)
    return float(np.sqrt(np.sum(np.abs(d) ** 2) / 2.0))


def free_reduce(word: Sequence[int], g: int = 2) -> BraidWord:
    """Delete adjacent inverse pairs until none remain (stack-based, O(n))."""
    stack: list[int] = []
    for s in word:
        s = int(s)
        if not 0 <= s < 2 * g:
            raise InvalidSymbolError(f"symbol {s} out of range [0, {2 * g - 1}]")
        inv = s - g if s >= g else s + g
        if stack and stack[-1] == inv:
            stack.pop()
        else:
            stack.append(s)
    return tuple(stack)


def effective_length(word: Sequence[int], g: int = 2) -> int:
    """Length of the word after all inverse-pair cancellations."""
    return len(free_reduce(word, g))


_TOKEN_RE = re.compile(r"([sS])(\d+)(?:\^(-?\d+))?$")


def parse_braid_text(text: str, g: int = 2) -> BraidWord:
    """Parse whitespace-separated tokens like ``s1 S2 s1^-3`` into a word.

    ``s k`` is the k-th generator, ``S k`` its inverse; an exponent ``m``
    repeats the token ``|m|`` times and a negative ``m`` inverts it.
    """
    word: list[int] = []
    for pos, tok in enumerate(text.split(), start=1):
        m = _TOKEN_RE.match(tok)
        if m is None:
            raise BraidParseError(f"malformed token {tok!r}", pos)
        letter, index, exp = m.group(1), int(m.group(2)), m.group(3)
        count = 1 if exp is None else int(exp)
        if count == 0:
            raise BraidParseError(f"zero exponent in {tok!r}", pos)
        if not 1 <= index <= g:
            raise BraidParseError(f"generator index {index} > g = {g}", pos)
        inverse = letter == "S"
        if count < 0:
            inverse = not inverse
            count = -count
        symbol = (index - 1) + (g if inverse else 0)
        word.extend([symbol] * count)
    return tuple(word)


def format_braid_text(word: Sequence[int], g: int = 2) -> str:
    """Canonical text form: lowercase tokens with maximally grouped exponents."""
    tokens: list[str] = []
    i = 0
    word = [int(s) for s in word]
    while i < len(word):
        s = word[i]
        if not 0 <= s < 2 * g:
            raise InvalidSymbolError(f"symbol {s} out of range [0, {2 * g - 1}]")
        j = i
        while j < len(word) and word[j] == s:
            j += 1
        run = j - i
        index = (s % g) + 1
        exp = -run if s >= g else run
        tokens.append(f"s{index}" if exp == 1 else f"s{index}^{exp}")
        i = j
    return " ".join(tokens)
