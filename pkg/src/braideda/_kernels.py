"""Numba kernels for population-scale fitness evaluation.

The hybrid search evaluates hundreds of thousands of words per generation;
these loops run the 2x2 complex products in compiled code. Results match the
scalar reference implementations in :mod:`braideda.fitness` bit-for-bit for
the plain variant and to rounding error for the rest (the tests compare them
directly).
"""

from __future__ import annotations

import numpy as np
import numba
from numba import njit, prange

# avoid the TBB probe (warns on images with an old TBB); omp/workqueue are fine
if numba.config.THREADING_LAYER == "default":
    numba.config.THREADING_LAYER = "omp"

# Mode codes shared with batch.py.
MODE_PLAIN = 0
MODE_EFFECTIVE = 1
MODE_PREFIX_BEST = 2


@njit(cache=True)
def _eps_from_entries(m00, m01, m10, m11, t00, t01, t10, t11):
    e0 = m00 - t00
    e1 = m01 - t01
    e2 = m10 - t10
    e3 = m11 - t11
    return np.sqrt(
        (
            e0.real * e0.real + e0.imag * e0.imag
            + e1.real * e1.real + e1.imag * e1.imag
            + e2.real * e2.real + e2.imag * e2.imag
            + e3.real * e3.real + e3.imag * e3.imag
        )
        / 2.0
    )


@njit(parallel=True, cache=True)
def eval_words(pop, gmats, target, lam, mode, g):
    """Evaluate every row of ``pop`` (int8, shape (M, n)).

    Returns (fitness, epsilon, used_length, best_prefix_len); the last array
    is meaningful only for the prefix-best mode (1 elsewhere).
    """
    m_rows, n = pop.shape
    fit = np.empty(m_rows)
    eps_out = np.empty(m_rows)
    used = np.empty(m_rows, np.int64)
    best_len = np.ones(m_rows, np.int64)
    t00 = target[0, 0]
    t01 = target[0, 1]
    t10 = target[1, 0]
    t11 = target[1, 1]
    for r in prange(m_rows):
        m00 = 1.0 + 0.0j
        m01 = 0.0j
        m10 = 0.0j
        m11 = 1.0 + 0.0j
        best_f = -1.0e300
        bl = 1
        best_eps = 0.0
        eps = 0.0
        for k in range(n):
            s = pop[r, k]
            a = gmats[s, 0, 0]
            b = gmats[s, 0, 1]
            c = gmats[s, 1, 0]
            d = gmats[s, 1, 1]
            n00 = m00 * a + m01 * c
            n01 = m00 * b + m01 * d
            n10 = m10 * a + m11 * c
            n11 = m10 * b + m11 * d
            m00 = n00
            m01 = n01
            m10 = n10
            m11 = n11
            if mode == MODE_PREFIX_BEST:
                eps = _eps_from_entries(m00, m01, m10, m11, t00, t01, t10, t11)
                f = (1.0 - lam) / (1.0 + eps)
                if lam > 0.0:
                    f += lam / (k + 1)
                if f > best_f:
                    best_f = f
                    bl = k + 1
                    best_eps = eps
        if mode == MODE_PREFIX_BEST:
            fit[r] = best_f
            eps_out[r] = best_eps
            used[r] = bl
            best_len[r] = bl
        else:
            eps = _eps_from_entries(m00, m01, m10, m11, t00, t01, t10, t11)
            eps_out[r] = eps
            if mode == MODE_EFFECTIVE:
                # stack-based free reduction, only the depth is needed
                stack = np.empty(n, np.int8)
                depth = 0
                for k in range(n):
                    s = pop[r, k]
                    inv = s - g if s >= g else s + g
                    if depth > 0 and stack[depth - 1] == inv:
                        depth -= 1
                    else:
                        stack[depth] = s
                        depth += 1
                length = depth if depth > 0 else 1
            else:
                length = n
            used[r] = length
            f = (1.0 - lam) / (1.0 + eps)
            if lam > 0.0:
                f += lam / length
            fit[r] = f
    return fit, eps_out, used, best_len


@njit(parallel=True, cache=True)
def elen_words(pop, g):
    """Effective (freely reduced) length of every row of ``pop``."""
    m_rows, n = pop.shape
    out = np.empty(m_rows, np.int64)
    for r in prange(m_rows):
        stack = np.empty(n, np.int8)
        depth = 0
        for k in range(n):
            s = pop[r, k]
            inv = s - g if s >= g else s + g
            if depth > 0 and stack[depth - 1] == inv:
                depth -= 1
            else:
                stack[depth] = s
                depth += 1
        out[r] = depth
    return out
