"""Exact phase-1 simplex for ``A x = b, x >= 0`` over the rationals.

Bland's rule is used for both the entering and leaving variable, so the
method terminates without any tolerance.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence


def find_nonnegative_solution(A: Sequence[Sequence], b: Sequence) -> list[Fraction] | None:
    """Return some ``x >= 0`` with ``A x = b`` exactly, or ``None`` if none exists."""
    m = len(b)
    n = len(A[0]) if m else 0
    if any(len(row) != n for row in A):
        raise ValueError("ragged constraint matrix")
    if m == 0:
        return [Fraction(0)] * n

    # tableau rows: [original | artificial | rhs], rows flipped so rhs >= 0
    width = n + m + 1
    T = []
    for i in range(m):
        sign = -1 if b[i] < 0 else 1
        row = [Fraction(sign * A[i][j]) for j in range(n)]
        row += [Fraction(1 if k == i else 0) for k in range(m)]
        row.append(Fraction(sign * b[i]))
        T.append(row)
    basis = [n + i for i in range(m)]

    # phase-1 objective: minimise the sum of artificials; keep reduced costs in `cost`
    cost = [Fraction(0)] * width
    for j in range(n):
        cost[j] = -sum(T[i][j] for i in range(m))
    cost[-1] = -sum(T[i][-1] for i in range(m))

    while True:
        entering = next((j for j in range(n + m) if cost[j] < 0), None)
        if entering is None:
            break
        leave, best = None, None
        for i in range(m):
            if T[i][entering] > 0:
                ratio = T[i][-1] / T[i][entering]
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    leave, best = i, ratio
        if leave is None:  # unbounded; cannot happen for phase 1
            raise RuntimeError("phase-1 problem reported unbounded")
        _pivot(T, cost, leave, entering)
        basis[leave] = entering

    if -cost[-1] != 0:
        return None
    x = [Fraction(0)] * n
    for i, var in enumerate(basis):
        if var < n:
            x[var] = T[i][-1]
    for i in range(m):
        if sum(Fraction(A[i][j]) * x[j] for j in range(n)) != b[i]:
            raise AssertionError("simplex returned a point violating A x = b")
    return x


def _pivot(T, cost, r, c):
    piv = T[r][c]
    row = T[r]
    if piv != 1:
        T[r] = row = [v / piv for v in row]
    for i, other in enumerate(T):
        if i != r and other[c] != 0:
            f = other[c]
            T[i] = [u - f * v for u, v in zip(other, row)]
    if cost[c] != 0:
        f = cost[c]
        cost[:] = [u - f * v for u, v in zip(cost, row)]
