"""Sequence acceleration for slowly converging alternating partial sums."""

import math

import numpy as np

__all__ = ["wynn_epsilon"]


def wynn_epsilon(partial_sums, max_len=40):
    """Wynn's epsilon algorithm.

    Only the last ``max_len`` partial sums are used; the table is built
    column by column until it runs out of entries or a difference vanishes.

    Returns
    -------
    estimate : float
        Last entry of the highest even column.
    error : float
        Spread between that entry, its predecessor in the same column and
        the last entry of the previous even column.
    """
    s = np.asarray(partial_sums, dtype=float)[-max_len:]
    n = s.size
    if n == 0:
        raise ValueError("wynn_epsilon needs at least one partial sum")
    if n == 1:
        return float(s[0]), math.inf
    if n == 2:
        return float(s[1]), float(abs(s[1] - s[0]))

    prev = np.zeros(n + 1)
    cur = s
    evens = [s]
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        for k in range(1, n):
            diff = cur[1:] - cur[:-1]
            nxt = prev[1 : cur.size] + 1.0 / diff
            if not np.all(np.isfinite(nxt)):
                break
            prev, cur = cur, nxt
            if k % 2 == 0:
                evens.append(cur)
            if cur.size < 2:
                break

    best = evens[-1]
    if best.size < 2 and len(evens) > 1:
        evens.pop()
        best = evens[-1]
    estimate = float(best[-1])
    error = float(abs(best[-1] - best[-2])) if best.size >= 2 else math.inf
    if len(evens) > 1:
        error = max(error, float(abs(best[-1] - evens[-2][-1])))
    error = max(error, 4.0 * np.finfo(float).eps * float(np.max(np.abs(s))))
    return estimate, error
