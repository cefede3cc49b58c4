"""Small dense linear algebra over Q with exact rationals."""

from __future__ import annotations

from typing import Sequence

from .rational import Rational

Vector = list
Matrix = list


def rref(M: Sequence[Sequence]) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and pivot columns."""
    A = [[Rational(x) for x in row] for row in M]
    if not A:
        return A, []
    m, n = len(A), len(A[0])
    pivots = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, m) if A[i][c]), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        inv = 1 / A[r][c]
        A[r] = [x * inv for x in A[r]]
        for i in range(m):
            if i != r and A[i][c]:
                f = A[i][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    return A, pivots


def rank(M: Sequence[Sequence]) -> int:
    return len(rref(M)[1]) if M and M[0] else 0


def nullspace(M: Sequence[Sequence], ncols: int) -> list[Vector]:
    """Basis of {x : Mx = 0} for an m x ncols matrix (m may be 0)."""
    if not M:
        return [[Rational(int(i == j)) for i in range(ncols)] for j in range(ncols)]
    R, pivots = rref(M)
    free = [c for c in range(ncols) if c not in set(pivots)]
    out = []
    for f in free:
        v = [Rational(0)] * ncols
        v[f] = Rational(1)
        for row, c in zip(R, pivots):
            v[c] = -row[f]
        out.append(v)
    return out


def columns(M: Sequence[Sequence]) -> list[Vector]:
    if not M:
        return []
    return [[Rational(M[i][j]) for i in range(len(M))] for j in range(len(M[0]))]


def extend_basis(base: list[Vector], candidates: list[Vector]) -> tuple[list[Vector], list[Vector]]:
    """Independent subset of ``base`` and the candidates that extend it."""
    kept: list[Vector] = []
    added: list[Vector] = []
    for v in base:
        if rank(kept + [v]) > len(kept):
            kept.append(v)
    for v in candidates:
        if rank(kept + added + [v]) > len(kept) + len(added):
            added.append(v)
    return kept, added


def solve(cols: list[Vector], b: Vector) -> Vector | None:
    """x with sum x_j cols[j] = b, or None; cols must be independent."""
    m = len(b)
    if not cols:
        return [] if not any(b) else None
    aug = [[cols[j][i] for j in range(len(cols))] + [Rational(b[i])] for i in range(m)]
    R, pivots = rref(aug)
    if len(cols) in pivots:
        return None
    x = [Rational(0)] * len(cols)
    for row, c in zip(R, pivots):
        x[c] = row[-1]
    return x


def inverse(M: Sequence[Sequence]) -> Matrix | None:
    n = len(M)
    aug = [[Rational(x) for x in row] + [Rational(int(i == j)) for j in range(n)]
           for i, row in enumerate(M)]
    R, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        return None
    return [row[n:] for row in R]


def matmul(A: Matrix, B: Matrix) -> Matrix:
    if not A:
        return []
    inner = len(B)
    cols = len(B[0]) if B else 0
    return [[sum((A[i][k] * B[k][j] for k in range(inner)), Rational(0)) for j in range(cols)]
            for i in range(len(A))]
