"""Exact integer linear algebra over Z^k.

Everything here works on plain Python ints (edge labels of the periodic
quotient graphs involve powers of search parameters, so values are not
bounded by machine words).  Vectors are tuples of ints, matrices are tuples
of row tuples.  No floating point anywhere.
"""

from __future__ import annotations

import heapq
from math import gcd

Vector = tuple[int, ...]
Matrix = tuple[Vector, ...]


def _as_rows(generators) -> list[list[int]]:
    rows = [list(v) for v in generators]
    if rows:
        dim = len(rows[0])
        for r in rows:
            if len(r) != dim:
                raise ValueError("generators have mixed dimensions")
    return rows


def hermite_basis(generators, dim: int | None = None) -> Matrix:
    """Canonical triangular basis of the integer row span of `generators`.

    Row-style Hermite form: pivots positive, entries above a pivot reduced
    into [0, pivot).  The result depends only on the spanned lattice, so it
    doubles as a canonical key for spans.
    """
    rows = _as_rows(generators)
    if not rows:
        if dim is None:
            raise ValueError("empty generator list needs an explicit dimension")
        return ()
    ncols = len(rows[0])
    basis: list[list[int]] = []
    piv = 0
    for col in range(ncols):
        live = [r for r in rows if r[col] != 0]
        if not live:
            continue
        # gcd reduction: shrink entries in this column until one row remains
        while len(live) > 1:
            live.sort(key=lambda r: abs(r[col]))
            head = live[0]
            rest = []
            for r in live[1:]:
                q = r[col] // head[col]
                if q:
                    for j in range(col, ncols):
                        r[j] -= q * head[j]
                if r[col] != 0:
                    rest.append(r)
            live = [head] + rest
        pivot_row = live[0]
        if pivot_row[col] < 0:
            for j in range(col, ncols):
                pivot_row[j] = -pivot_row[j]
        rows = [r for r in rows if r is not pivot_row and any(r[col:])]
        basis.append(pivot_row)
        piv += 1
    # reduce entries above each pivot
    for i in range(len(basis) - 1, -1, -1):
        row = basis[i]
        col = next(j for j, x in enumerate(row) if x != 0)
        for above in basis[:i]:
            q = above[col] // row[col]
            if q:
                for j in range(col, len(row)):
                    above[j] -= q * row[j]
    return tuple(tuple(r) for r in basis)


def rank(matrix) -> int:
    """Rank over the rationals, computed exactly from the Hermite form."""
    rows = [r for r in matrix if any(r)]
    if not rows:
        return 0
    return len(hermite_basis(rows))


def span_contains(generators, v) -> bool:
    """True iff v is an integer combination of the generators."""
    v = list(v)
    gens = _as_rows(generators)
    if gens and len(v) != len(gens[0]):
        raise ValueError("dimension mismatch")
    basis = hermite_basis(gens, dim=len(v)) if gens else ()
    for row in basis:
        col = next(j for j, x in enumerate(row) if x != 0)
        if v[col] % row[col]:
            return False
        q = v[col] // row[col]
        if q:
            for j in range(col, len(v)):
                v[j] -= q * row[j]
    return not any(v)


def primitive(v) -> Vector:
    """v divided by the gcd of its entries (zero input is an error)."""
    g = 0
    for x in v:
        g = gcd(g, x)
    if g == 0:
        raise ValueError("zero vector has no primitive part")
    return tuple(x // g for x in v)


def determinant(matrix) -> int:
    """Exact determinant of a small square integer matrix (Bareiss)."""
    m = [list(r) for r in matrix]
    n = len(m)
    if any(len(r) != n for r in m):
        raise ValueError("matrix is not square")
    sign = 1
    prev = 1
    for i in range(n - 1):
        if m[i][i] == 0:
            for r in range(i + 1, n):
                if m[r][i] != 0:
                    m[i], m[r] = m[r], m[i]
                    sign = -sign
                    break
            else:
                return 0
        for r in range(i + 1, n):
            for c in range(i + 1, n):
                m[r][c] = (m[r][c] * m[i][i] - m[r][i] * m[i][c]) // prev
            m[r][i] = 0
        prev = m[i][i]
    return sign * m[n - 1][n - 1] if n else 1


# ---------------------------------------------------------------------------
# Smith normal form
# ---------------------------------------------------------------------------

def smith_diagonal(matrix, shape: tuple[int, int] | None = None) -> tuple[int, ...]:
    """Invariant factors d_1 | d_2 | ... of an integer matrix.

    The result has length min(rows, cols), padded with zeros for rank
    deficiency.  Accepts either a dense row-tuple matrix or a sparse
    {(row, col): value} dict together with an explicit shape.
    """
    if isinstance(matrix, dict):
        if shape is None:
            raise ValueError("sparse input needs an explicit shape")
        nrows, ncols = shape
        entries = {rc: v for rc, v in matrix.items() if v}
    else:
        nrows = len(matrix)
        ncols = len(matrix[0]) if nrows else 0
        entries = {}
        for i, row in enumerate(matrix):
            for j, v in enumerate(row):
                if v:
                    entries[(i, j)] = v
    return _smith_sparse(entries, nrows, ncols)


def _smith_sparse(entries, nrows, ncols):
    rows: dict[int, dict[int, int]] = {}
    cols: dict[int, set[int]] = {}
    for (i, j), v in entries.items():
        rows.setdefault(i, {})[j] = v
        cols.setdefault(j, set()).add(i)

    units = 0
    heap: list[tuple[int, int, int]] = []
    for i, row in rows.items():
        for j, v in row.items():
            if v in (1, -1):
                heap.append(((len(row) - 1) * (len(cols[j]) - 1), i, j))
    heapq.heapify(heap)

    def eliminate(pi, pj):
        pv = rows[pi][pj]
        prow = rows.pop(pi)
        for j in prow:
            cols[j].discard(pi)
            if not cols[j]:
                del cols[j]
        for i in list(cols.get(pj, ())):
            q = rows[i][pj] // pv  # exact when pv is a unit
            ri = rows[i]
            for j, v in prow.items():
                if j == pj:
                    continue
                nv = ri.get(j, 0) - q * v
                if nv:
                    if j not in ri:
                        cols.setdefault(j, set()).add(i)
                    ri[j] = nv
                    if nv in (1, -1):
                        heapq.heappush(heap, (0, i, j))
                else:
                    if j in ri:
                        del ri[j]
                        cols[j].discard(i)
                        if not cols[j]:
                            del cols[j]
            del ri[pj]
            if not ri:
                del rows[i]
        cols.pop(pj, None)

    # phase 1: clear every +-1 pivot (cheap, no gcd steps, keeps fill low)
    while heap:
        _, i, j = heapq.heappop(heap)
        v = rows.get(i, {}).get(j)
        if v not in (1, -1):
            continue
        fill = (len(rows[i]) - 1) * (len(cols[j]) - 1)
        if heap and fill > heap[0][0]:
            heapq.heappush(heap, (fill, i, j))
            continue
        eliminate(i, j)
        units += 1

    # phase 2: dense Smith form on whatever is left
    if rows:
        ridx = sorted(rows)
        cidx = sorted({j for r in rows.values() for j in r})
        dense = [[rows[i].get(j, 0) for j in cidx] for i in ridx]
        rest = _smith_dense(dense)
    else:
        rest = []

    diag = [1] * units + [d for d in rest if d]
    # restore the divisibility chain (unimodular ops allow gcd/lcm swaps)
    for i in range(len(diag)):
        for j in range(i + 1, len(diag)):
            if diag[j] % diag[i]:
                g = gcd(diag[i], diag[j])
                diag[i], diag[j] = g, diag[i] // g * diag[j]
    n = min(nrows, ncols)
    diag = diag[:n]
    return tuple(diag + [0] * (n - len(diag)))


def _smith_dense(m) -> list[int]:
    """Textbook Smith diagonalization of a dense integer matrix in place."""
    nr = len(m)
    nc = len(m[0]) if nr else 0
    out: list[int] = []
    top = 0
    while True:
        best = None
        for i in range(top, nr):
            for j in range(nc):
                v = m[i][j]
                if v and (best is None or abs(v) < abs(m[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        bi, bj = best
        if bi != top:
            m[top], m[bi] = m[bi], m[top]
        if bj != top:
            for row in m:
                row[top], row[bj] = row[bj], row[top]
        while True:
            pv = m[top][top]
            done = True
            for i in range(top + 1, nr):
                if m[i][top]:
                    q = m[i][top] // pv
                    for j in range(top, nc):
                        m[i][j] -= q * m[top][j]
                    if m[i][top]:
                        m[top], m[i] = m[i], m[top]
                        done = False
                        break
            if not done:
                continue
            for j in range(top + 1, nc):
                if m[top][j]:
                    q = m[top][j] // pv
                    for i in range(top, nr):
                        m[i][j] -= q * m[i][top]
                    if m[top][j]:
                        for i in range(nr):
                            m[i][top], m[i][j] = m[i][j], m[i][top]
                        done = False
                        break
            if done:
                break
        out.append(abs(m[top][top]))
        top += 1
        if top == nr:
            break
    return out
