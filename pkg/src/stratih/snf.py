"""Integer linear algebra for chain complexes.

Everything here uses Python ints (or exact rationals for work over Q), so
there is no overflow however large pivots grow.

* :func:`smith_normal_form` -- dense SNF with transforms.
* :func:`integer_kernel` / :class:`EchelonLattice` -- saturated kernel bases.
* :class:`Reduction` -- sparse elimination of a free chain complex down to a
  small core, optionally recording the chain equivalences so cycles can be
  carried back and forth.
"""

from __future__ import annotations

import gc
import heapq
from collections import deque
from contextlib import contextmanager
from math import gcd
from typing import Sequence

from .rational import Rational

Matrix = list  # dense: list of rows of ints
SparseCols = list  # list of {row: coeff} dicts, one per column


# -- dense ----------------------------------------------------------------------


def identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(A: Matrix, B: Matrix) -> Matrix:
    if not A or not B:
        return [[0] * (len(B[0]) if B else 0) for _ in A]
    Bt = list(zip(*B))
    return [[sum(a * b for a, b in zip(row, col)) for col in Bt] for row in A]


def smith_normal_form(A: Matrix, transforms: bool = False):
    """Return ``(S, U, V)`` with ``U A V = S`` diagonal, d_1 | d_2 | ...

    With ``transforms=False`` U and V are None.  The diagonal is nonnegative.
    """
    m = len(A)
    n = len(A[0]) if m else 0
    S = [list(map(int, row)) for row in A]
    U = identity(m) if transforms else None
    V = identity(n) if transforms else None

    def swap_rows(i, j):
        S[i], S[j] = S[j], S[i]
        if U is not None:
            U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in S:
            row[i], row[j] = row[j], row[i]
        if V is not None:
            for row in V:
                row[i], row[j] = row[j], row[i]

    def add_row(src, dst, q):  # row dst += q * row src
        rs, rd = S[src], S[dst]
        for c in range(n):
            if rs[c]:
                rd[c] += q * rs[c]
        if U is not None:
            us, ud = U[src], U[dst]
            for c in range(m):
                if us[c]:
                    ud[c] += q * us[c]

    def add_col(src, dst, q):  # col dst += q * col src
        for row in S:
            if row[src]:
                row[dst] += q * row[src]
        if V is not None:
            for row in V:
                if row[src]:
                    row[dst] += q * row[src]

    t = 0
    while t < min(m, n):
        # pivot: smallest nonzero magnitude in the remaining block
        best = None
        for i in range(t, m):
            row = S[i]
            for j in range(t, n):
                v = row[j]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, j)
                    if best[0] == 1:
                        break
            if best and best[0] == 1:
                break
        if best is None:
            break
        _, i, j = best
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            p = S[t][t]
            dirty = False
            for i in range(t + 1, m):
                if S[i][t]:
                    q = S[i][t] // p
                    add_row(t, i, -q)
                    if S[i][t]:
                        dirty = True
            for j in range(t + 1, n):
                if S[t][j]:
                    q = S[t][j] // p
                    add_col(t, j, -q)
                    if S[t][j]:
                        dirty = True
            if dirty:
                # move the smallest leftover in row/col t to the pivot and repeat
                cand = [(abs(S[i][t]), i, t) for i in range(t + 1, m) if S[i][t]]
                cand += [(abs(S[t][j]), t, j) for j in range(t + 1, n) if S[t][j]]
                _, i, j = min(cand)
                if j == t:
                    swap_rows(t, i)
                else:
                    swap_cols(t, j)
                continue
            # divisibility with the rest of the block
            bad = None
            for i in range(t + 1, m):
                for j in range(t + 1, n):
                    if S[i][j] % p:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            add_row(bad, t, 1)
        if S[t][t] < 0:
            S[t] = [-x for x in S[t]]
            if U is not None:
                U[t] = [-x for x in U[t]]
        t += 1
    return S, U, V


def elementary_divisors(A: Matrix) -> list[int]:
    """Nonzero diagonal of the Smith form, in divisibility order."""
    S, _, _ = smith_normal_form(A)
    return [S[i][i] for i in range(min(len(S), len(S[0]) if S else 0)) if S[i][i]]


def rank_q(A: Matrix) -> int:
    """Rank over the rationals by fraction-free (Bareiss) elimination."""
    M = [list(map(int, r)) for r in A]
    if not M or not M[0]:
        return 0
    m, n = len(M), len(M[0])
    r, prev = 0, 1
    for c in range(n):
        piv = next((i for i in range(r, m) if M[i][c]), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        for i in range(r + 1, m):
            for j in range(c + 1, n):
                M[i][j] = (M[r][c] * M[i][j] - M[i][c] * M[r][j]) // prev
            M[i][c] = 0
        prev = M[r][c]
        r += 1
        if r == m:
            break
    return r


def sparse_to_dense(cols: SparseCols, nrows: int) -> Matrix:
    M = [[0] * len(cols) for _ in range(nrows)]
    for j, col in enumerate(cols):
        for i, v in col.items():
            M[i][j] = v
    return M


# -- kernels --------------------------------------------------------------------


def integer_kernel(rows: Sequence[dict], columns: Sequence) -> list[dict]:
    """Z-basis of {x : row . x = 0 for every row}; rows are {column: coeff}.

    The kernel of an integer matrix is automatically saturated, so any
    Z-basis of it is primitive.  Vectors are returned as {column: coeff}.
    """
    basis: dict[int, dict] = {i: {c: 1} for i, c in enumerate(columns)}
    holders: dict = {c: {i} for i, c in enumerate(columns)}
    for row in rows:
        vals = {}
        for c, coef in row.items():
            for b in holders.get(c, ()):
                vals[b] = vals.get(b, 0) + coef * basis[b][c]
        active = sorted((b for b, v in vals.items() if v), key=lambda b: (abs(vals[b]), b))
        while active:
            piv = active[0]
            p = vals[piv]
            rest = []
            for b in active[1:]:
                q = vals[b] // p
                if q:
                    _axpy(basis, holders, b, piv, -q)
                    vals[b] -= q * p
                if vals[b]:
                    rest.append(b)
            if not rest:
                # piv is the only vector not annihilated: drop it
                for c in basis[piv]:
                    holders[c].discard(piv)
                del basis[piv]
                break
            rest.append(piv)
            active = sorted(rest, key=lambda b: (abs(vals[b]), b))
    return [basis[b] for b in sorted(basis)]


def _axpy(basis, holders, dst, src, q):
    d = basis[dst]
    for c, v in basis[src].items():
        nv = d.get(c, 0) + q * v
        if nv:
            if c not in d:
                holders[c].add(dst)
            d[c] = nv
        else:
            d.pop(c, None)
            holders[c].discard(dst)


class EchelonLattice:
    """A lattice basis put in row-echelon (Hermite) form over a fixed column order,
    so membership tests and coordinates are solved by back substitution."""

    def __init__(self, vectors: Sequence[dict], order: Sequence):
        rank = {c: i for i, c in enumerate(order)}
        self._rank = rank
        self._order = list(order)
        buckets: dict[int, list[dict]] = {}
        for v in vectors:
            if v:
                r = dict(v)
                buckets.setdefault(min(rank[c] for c in r), []).append(r)
        heap = list(buckets)
        heapq.heapify(heap)
        echelon: list[dict] = []
        pivots: list = []
        while heap:
            lead = heapq.heappop(heap)
            group = buckets.pop(lead, None)
            if not group:
                continue
            col = order[lead]
            # Euclid on the leading entries; everything but one row loses its lead
            while len(group) > 1:
                group.sort(key=lambda r: abs(r[col]))
                p = group[0]
                keep = [p]
                for r in group[1:]:
                    q = r[col] // p[col]
                    for c, v in p.items():
                        nv = r.get(c, 0) - q * v
                        if nv:
                            r[c] = nv
                        else:
                            r.pop(c, None)
                    if col in r:
                        keep.append(r)
                    elif r:
                        nl = min(rank[c] for c in r)
                        if nl not in buckets:
                            buckets[nl] = []
                            heapq.heappush(heap, nl)
                        buckets[nl].append(r)
                group = keep
            p = group[0]
            if p[col] < 0:
                p = {c: -v for c, v in p.items()}
            echelon.append(p)
            pivots.append(col)
        self.vectors = echelon
        self.pivots = pivots
        self._index = {c: i for i, c in enumerate(pivots)}

    def sparse_coordinates(self, v: dict) -> dict | None:
        """{basis index: coefficient} with sum = ``v``, or None if ``v`` is not in the lattice."""
        rank = self._rank
        w = {c: x for c, x in v.items() if x}
        heap = [rank[c] for c in w]
        heapq.heapify(heap)
        out = {}
        while w:
            col = self._order[heapq.heappop(heap)]
            if col not in w:
                continue
            i = self._index.get(col)
            if i is None:
                return None
            vec = self.vectors[i]
            q, r = divmod(w[col], vec[col])
            if r:
                return None
            out[i] = q
            for c, x in vec.items():
                nv = w.get(c, 0) - q * x
                if nv:
                    if c not in w:
                        heapq.heappush(heap, rank[c])
                    w[c] = nv
                else:
                    w.pop(c, None)
        return out

    def coordinates(self, v: dict) -> list[int] | None:
        """Integer coordinates of ``v`` in this basis, or None if not in the lattice."""
        sparse = self.sparse_coordinates(v)
        if sparse is None:
            return None
        coords = [0] * len(self.vectors)
        for i, q in sparse.items():
            coords[i] = q
        return coords


# -- sparse reduction ---------------------------------------------------------


@contextmanager
def paused_gc():
    """Suspend the cyclic collector; the big passes allocate millions of
    acyclic dicts and sets, and repeated collections only cost time."""
    was = gc.isenabled()
    gc.disable()
    try:
        yield
    finally:
        if was:
            gc.enable()


class Reduction:
    """Eliminate pivot pairs (a, b) with <da, b> invertible until none remain.

    ``boundaries[k]`` is the column-sparse matrix from degree k to k-1
    (``boundaries[0]`` is ignored).  Over Z only +-1 pivots are used; over Q
    any nonzero pivot.  The surviving cells with the induced differential have
    the same homology.  With ``track=True`` the projection pi: C -> C' and the
    inclusion iota: C' -> C are recoverable via :meth:`project` / :meth:`lift`.

    Pairs are taken cheapest first, where the cost counts the entries an
    elimination would create.  Collapses (b has a single coface) and
    coreductions (a has a single non-critical face) are free.  When only
    costly pairs remain, the lowest-degree cell is declared critical: it
    stays in the core and is never used as a pivot, which typically opens
    up a fresh wave of coreductions (a discrete Morse matching).
    """

    def __init__(self, sizes: Sequence[int], boundaries: Sequence[SparseCols],
                 field: str = "Z", track: bool = False, critical_budget: int = 256):
        if field not in ("Z", "Q"):
            raise ValueError("field must be 'Z' or 'Q'")
        self.field = field
        self.sizes = list(sizes)
        top = len(sizes) - 1
        with paused_gc():
            self.bd = [[{} for _ in range(sizes[0])]]
            for k in range(1, top + 1):
                if field == "Q":
                    self.bd.append([{r: Rational(v) for r, v in col.items() if v}
                                    for col in boundaries[k]])
                else:
                    self.bd.append([{r: v for r, v in col.items() if v} for col in boundaries[k]])
            self.cob = [[set() for _ in range(sizes[k])] for k in range(top + 1)]
            for k in range(1, top + 1):
                cob = self.cob[k - 1]
                for a, col in enumerate(self.bd[k]):
                    for b in col:
                        cob[b].add(a)
            self.alive = [bytearray([1]) * sizes[k] for k in range(top + 1)]
            self.critical = [bytearray(sizes[k]) for k in range(top + 1)]
            self.critical_budget = critical_budget
            self.track = track
            self.log: list = []  # (k, a, b, lam, bd_a, row_b)
            self._run()

    def _pivot_ok(self, v) -> bool:
        return v == 1 or v == -1 if self.field == "Z" else v != 0

    def _free_pair(self, k: int, c: int):
        """A fill-free pair involving cell c, as (degree of a, a, b), or None."""
        crit = self.critical
        # collapse: c has exactly one coface
        if k + 1 < len(self.sizes):
            cob = self.cob[k][c]
            if len(cob) == 1:
                (a,) = cob
                if not crit[k + 1][a] and self._pivot_ok(self.bd[k + 1][a][c]):
                    return k + 1, a, c
        # coreduction: c has exactly one non-critical face
        if k >= 1:
            low = crit[k - 1]
            only = None
            for b in self.bd[k][c]:
                if not low[b]:
                    if only is not None:
                        return None
                    only = b
            if only is not None and self._pivot_ok(self.bd[k][c][only]):
                return k, c, only
        return None

    def _drain(self, work: deque) -> None:
        # _free_pair inlined: this loop visits every cell several times
        alive, crit, bd, cob = self.alive, self.critical, self.bd, self.cob
        top = len(self.sizes) - 1
        unit = self.field == "Z"
        pop, extend, eliminate = work.popleft, work.extend, self._eliminate
        while work:
            k, c = pop()
            if not alive[k][c] or crit[k][c]:
                continue
            if k < top:
                up = cob[k][c]
                if len(up) == 1:
                    for a in up:
                        break
                    v = bd[k + 1][a][c]
                    if not crit[k + 1][a] and (v == 1 or v == -1 if unit else v):
                        extend(eliminate(k + 1, a, c))
                        continue
            if k >= 1:
                low = crit[k - 1]
                only = None
                col = bd[k][c]
                for b in col:
                    if not low[b]:
                        if only is not None:
                            only = -1
                            break
                        only = b
                if only is not None and only >= 0:
                    v = col[only]
                    if v == 1 or v == -1 if unit else v:
                        extend(eliminate(k, c, only))

    def _best(self, k: int, a: int):
        if self.critical[k][a]:
            return None
        col = self.bd[k][a]
        crit = self.critical[k - 1]
        cob = self.cob[k - 1]
        best = None
        for b, v in col.items():
            if not crit[b] and self._pivot_ok(v):
                c = len(cob[b])
                if best is None or c < best[0] or (c == best[0] and b < best[1]):
                    best = (c, b)
        if best is None:
            return None
        return (best[0] - 1) * len(col), best[1]

    def _run(self):
        alive, crit = self.alive, self.critical
        top = len(self.sizes) - 1
        work = deque((k, c) for k in range(top + 1) for c in range(self.sizes[k]))
        next_free = [0] * (top + 1)
        budget = self.critical_budget
        while True:
            self._drain(work)
            if budget <= 0:
                break
            cell = self._next_noncritical(next_free)
            if cell is None:
                break
            budget -= 1
            d, v = cell
            crit[d][v] = 1
            if d < top:
                work.extend((d + 1, x) for x in sorted(self.cob[d][v]))
        # the core is small now; let critical cells cancel among themselves
        for row in crit:
            row[:] = bytearray(len(row))
        self._run_heap()

    def _run_heap(self):
        heap = []
        for k in range(1, len(self.sizes)):
            for a in self.survivors(k):
                r = self._best(k, a)
                if r is not None:
                    heap.append((r[0], k, a))
        heapq.heapify(heap)
        while heap:
            cost, k, a = heapq.heappop(heap)
            if not self.alive[k][a]:
                continue
            r = self._best(k, a)
            if r is None:
                continue
            if r[0] > cost:
                heapq.heappush(heap, (r[0], k, a))
                continue
            for kk, x in self._eliminate(k, a, r[1]):
                if kk == k:
                    rx = self._best(k, x)
                    if rx is not None:
                        heapq.heappush(heap, (rx[0], k, x))

    def _next_noncritical(self, next_free):
        for d in range(len(self.sizes)):
            alive, crit = self.alive[d], self.critical[d]
            i = next_free[d]
            n = self.sizes[d]
            while i < n and (not alive[i] or crit[i]):
                i += 1
            next_free[d] = i
            if i < n:
                return d, i
        return None

    def _eliminate(self, k: int, a: int, b: int) -> list:
        bdk = self.bd[k]
        cobm = self.cob[k - 1]
        col_a = bdk[a]
        lam = col_a[b]
        touched = []
        row_b = {}
        integral = self.field == "Z"
        for x in cobm[b]:
            if x == a:
                continue
            col_x = bdk[x]
            cx = col_x[b]
            row_b[x] = cx
            q = cx // lam if integral else cx / lam
            for r, v in col_a.items():
                nv = col_x.get(r, 0) - q * v
                if nv:
                    if r not in col_x:
                        cobm[r].add(x)
                    col_x[r] = nv
                else:
                    del col_x[r]
                    if r != b:
                        cobm[r].discard(x)
            touched.append((k, x))
        if self.track:
            self.log.append((k, a, b, lam, dict(col_a), row_b))
        # drop a: from its faces' cofaces and from boundaries of degree k+1 cells
        for r in col_a:
            cobm[r].discard(a)
            if r != b:
                touched.append((k - 1, r))
        bdk[a] = {}
        if k + 1 < len(self.sizes):
            up = self.bd[k + 1]
            for y in self.cob[k][a]:
                del up[y][a]
                touched.append((k + 1, y))
            self.cob[k][a] = set()
        self.alive[k][a] = 0
        # drop b
        if k - 1 >= 1:
            cob2 = self.cob[k - 2]
            for r in self.bd[k - 1][b]:
                cob2[r].discard(b)
                touched.append((k - 2, r))
            self.bd[k - 1][b] = {}
        cobm[b] = set()
        self.alive[k - 1][b] = 0
        return touched

    # -- results ------------------------------------------------------------

    def survivors(self, k: int) -> list[int]:
        return [i for i, ok in enumerate(self.alive[k]) if ok]

    def reduced_matrix(self, k: int) -> Matrix:
        """Dense differential of the core from degree k to k-1."""
        cols = self.survivors(k)
        rows = self.survivors(k - 1) if k >= 1 else []
        ri = {r: i for i, r in enumerate(rows)}
        M = [[0] * len(cols) for _ in rows]
        if k >= 1:
            for j, c in enumerate(cols):
                for r, v in self.bd[k][c].items():
                    M[ri[r]][j] = v
        return M

    def project(self, k: int, chain: dict) -> dict:
        """pi: a degree-k chain of the original complex -> chain on surviving cells."""
        c = {x: Rational(v) if self.field == "Q" else v for x, v in chain.items() if v}
        for kk, a, b, lam, col_a, _ in self.log:
            if kk == k:
                c.pop(a, None)
            elif kk == k + 1 and b in c:
                coef = c[b]
                q = coef / lam if self.field == "Q" else coef * lam  # lam = +-1 over Z
                for r, v in col_a.items():
                    nv = c.get(r, 0) - q * v
                    if nv:
                        c[r] = nv
                    else:
                        c.pop(r, None)
        return c

    def lift(self, k: int, chain: dict) -> dict:
        """iota: a degree-k chain on surviving cells -> chain of the original complex."""
        c = {x: Rational(v) if self.field == "Q" else v for x, v in chain.items() if v}
        for kk, a, b, lam, _, row_b in reversed(self.log):
            if kk != k:
                continue
            s = sum(c[x] * v for x, v in row_b.items() if x in c)
            if s:
                q = s / lam if self.field == "Q" else s * lam
                c[a] = c.get(a, 0) - q
                if not c[a]:
                    del c[a]
        return c


# -- homology ---------------------------------------------------------------------


def homology_ranks(sizes: Sequence[int], boundaries: Sequence[SparseCols], field: str = "Z"):
    """Betti numbers (and torsion over Z) of a free chain complex.

    Returns ``(betti, torsion)`` lists indexed by degree.
    """
    red = Reduction(sizes, boundaries, field=field)
    top = len(sizes) - 1
    core = [len(red.survivors(k)) for k in range(top + 1)]
    ranks = [0] * (top + 2)
    torsion: list[list[int]] = [[] for _ in range(top + 1)]
    for k in range(1, top + 1):
        M = red.reduced_matrix(k)
        if not M or not M[0]:
            continue
        if field == "Z":
            divs = elementary_divisors(M)
            ranks[k] = len(divs)
            torsion[k - 1] = [d for d in divs if d > 1]
        else:
            ranks[k] = _rank_fraction(M)
    betti = [core[k] - ranks[k] - ranks[k + 1] for k in range(top + 1)]
    return betti, torsion


def _rank_fraction(M: Matrix) -> int:
    A = [[Rational(x) for x in row] for row in M]
    m, n = len(A), len(A[0])
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, m) if A[i][c]), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        for i in range(r + 1, m):
            if A[i][c]:
                f = A[i][c] / A[r][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[r])]
        r += 1
        if r == m:
            break
    return r
