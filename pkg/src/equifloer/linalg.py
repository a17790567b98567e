"""Exact linear algebra kernels: GF(2), integers, and F2[theta].

Three small toolkits used throughout the package:

* dense GF(2) elimination on numpy uint8 arrays (ranks, solving,
  kernels, subspace arithmetic) for chain complexes and spectral
  sequence pages;
* integer linear algebra via Smith normal form (exact solving and
  saturated kernels of region incidence matrices);
* univariate polynomials over GF(2) encoded as Python ints (bit i is
  the theta^i coefficient), with a Smith normal form over F2[theta]
  used as the stabilization oracle for the localization spectral
  sequence.

Matrices here are tens of rows at most, so the integer and polynomial
routines favour clarity over asymptotics; pivots are chosen smallest
first to limit entry growth.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

# ---------------------------------------------------------------------------
# GF(2)
# ---------------------------------------------------------------------------


def gf2_matrix(rows, width):
    """Build a uint8 matrix from an iterable of 0/1 row vectors."""
    rows = list(rows)
    if not rows:
        return np.zeros((0, width), dtype=np.uint8)
    out = np.array(rows, dtype=np.uint8) % 2
    if out.shape[1] != width:
        raise ValueError("row width mismatch")
    return out


def gf2_row_reduce(M):
    """Return (R, pivot_cols) with R the reduced row-echelon form of M.

    Zero rows are dropped, so R has full row rank.
    """
    R = (np.asarray(M, dtype=np.uint8) % 2).copy()
    m, n = R.shape
    pivots = []
    row = 0
    for col in range(n):
        if row == m:
            break
        hits = np.nonzero(R[row:, col])[0]
        if hits.size == 0:
            continue
        top = row + hits[0]
        if top != row:
            R[[row, top]] = R[[top, row]]
        for r in np.nonzero(R[:, col])[0]:
            if r != row:
                R[r] ^= R[row]
        pivots.append(col)
        row += 1
    return R[:row], pivots


def gf2_rank(M):
    M = np.asarray(M, dtype=np.uint8)
    if M.size == 0:
        return 0
    _, pivots = gf2_row_reduce(M)
    return len(pivots)


class Gf2Space:
    """Row space of a GF(2) matrix, kept in reduced echelon form."""

    def __init__(self, rows=None, width=0):
        if rows is None:
            self.width = width
            self.basis = np.zeros((0, width), dtype=np.uint8)
            self.pivots = []
            return
        M = np.asarray(rows, dtype=np.uint8) % 2
        if M.size == 0:
            self.width = width if M.ndim < 2 else M.shape[1]
            self.basis = np.zeros((0, self.width), dtype=np.uint8)
            self.pivots = []
            return
        self.width = M.shape[1]
        self.basis, self.pivots = gf2_row_reduce(M)

    @property
    def dim(self):
        return self.basis.shape[0]

    def reduce(self, v):
        """Reduce v modulo the row space; returns the residue vector."""
        v = (np.asarray(v, dtype=np.uint8) % 2).copy()
        for row, col in zip(self.basis, self.pivots):
            if v[col]:
                v ^= row
        return v

    def contains(self, v):
        return not self.reduce(v).any()

    def extended(self, rows):
        """Row space spanned by this space together with extra rows."""
        extra = np.asarray(rows, dtype=np.uint8) % 2
        if extra.size == 0:
            return self
        if self.dim == 0:
            return Gf2Space(extra, width=self.width)
        return Gf2Space(np.vstack([self.basis, extra]), width=self.width)

    def intersection(self, other):
        """Intersection of two row spaces (Zassenhaus algorithm)."""
        assert self.width == other.width
        n = self.width
        if self.dim == 0 or other.dim == 0:
            return Gf2Space(width=n)
        left = np.hstack([self.basis, self.basis])
        right = np.hstack([other.basis, np.zeros_like(other.basis)])
        R, _ = gf2_row_reduce(np.vstack([left, right]))
        rows = [r[n:] for r in R if not r[:n].any()]
        return Gf2Space(rows if rows else None, width=n)


def gf2_solve(A, b):
    """One solution x of A @ x = b over GF(2), or None if inconsistent."""
    A = np.asarray(A, dtype=np.uint8) % 2
    b = np.asarray(b, dtype=np.uint8) % 2
    m, n = A.shape
    aug = np.hstack([A, b.reshape(m, 1)])
    R, pivots = gf2_row_reduce(aug)
    if n in pivots:
        return None
    x = np.zeros(n, dtype=np.uint8)
    for row, col in zip(R, pivots):
        x[col] = row[n]
    return x


def gf2_kernel(A):
    """Basis (rows) of the right kernel of A over GF(2)."""
    A = np.asarray(A, dtype=np.uint8) % 2
    m, n = A.shape
    R, pivots = gf2_row_reduce(A)
    free = [c for c in range(n) if c not in pivots]
    out = np.zeros((len(free), n), dtype=np.uint8)
    for k, fc in enumerate(free):
        out[k, fc] = 1
        for row, pc in zip(R, pivots):
            if row[fc]:
                out[k, pc] = 1
    return out


def gf2_image(A):
    """Row-space object spanned by the columns of A (the image of A)."""
    A = np.asarray(A, dtype=np.uint8) % 2
    return Gf2Space(A.T, width=A.shape[0])


# ---------------------------------------------------------------------------
# Integer Smith normal form
# ---------------------------------------------------------------------------


def smith_normal_form(M):
    """Smith normal form over the integers.

    Returns (D, U, V) with U @ M @ V = D (as nested lists), U and V
    unimodular, D diagonal with nonnegative entries and d_i | d_{i+1}.
    """
    A = [list(map(int, row)) for row in M]
    m = len(A)
    n = len(A[0]) if m else 0
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]

    def add_row(src, dst, c):
        A[dst] = [a + c * b for a, b in zip(A[dst], A[src])]
        U[dst] = [a + c * b for a, b in zip(U[dst], U[src])]

    def add_col(src, dst, c):
        for row in A:
            row[dst] += c * row[src]
        for row in V:
            row[dst] += c * row[src]

    t = 0
    while True:
        pivot = None
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if A[i][j] != 0 and (best is None or abs(A[i][j]) < best):
                    best = abs(A[i][j])
                    pivot = (i, j)
        if pivot is None:
            break
        pi, pj = pivot
        if pi != t:
            A[t], A[pi] = A[pi], A[t]
            U[t], U[pi] = U[pi], U[t]
        if pj != t:
            for row in A:
                row[t], row[pj] = row[pj], row[t]
            for row in V:
                row[t], row[pj] = row[pj], row[t]

        dirty = False
        for i in range(t + 1, m):
            if A[i][t]:
                q = A[i][t] // A[t][t]
                add_row(t, i, -q)
                if A[i][t]:
                    dirty = True
        for j in range(t + 1, n):
            if A[t][j]:
                q = A[t][j] // A[t][t]
                add_col(t, j, -q)
                if A[t][j]:
                    dirty = True
        if dirty:
            continue

        bad = None
        for i in range(t + 1, m):
            for j in range(t + 1, n):
                if A[i][j] % A[t][t] != 0:
                    bad = i
                    break
            if bad is not None:
                break
        if bad is not None:
            add_row(bad, t, 1)
            continue
        t += 1

    for i in range(min(m, n)):
        if A[i][i] < 0:
            for row in A:
                row[i] = -row[i]
            for row in V:
                row[i] = -row[i]
    return A, U, V


class SmithSolver:
    """Reusable exact solver for A x = b over the integers.

    Factors A once; solve() answers arbitrary right-hand sides.  The
    kernel basis spans the saturated solution lattice.
    """

    _NUMPY_LIMIT = 2 ** 31

    def __init__(self, A):
        self.m = len(A)
        self.n = len(A[0]) if self.m else 0
        if self.m == 0:
            self.kernel = [[int(i == j) for j in range(self.n)]
                           for i in range(self.n)]
            return
        self.D, self.U, self.V = smith_normal_form(A)
        r = min(self.m, self.n)
        free = [j for j in range(self.n) if j >= r or self.D[j][j] == 0]
        self.kernel = [[self.V[i][j] for i in range(self.n)] for j in free]
        self.rank = r - len([j for j in range(r) if self.D[j][j] == 0])
        biggest = max(
            max(max(abs(v) for v in row) for row in self.U),
            max(max(abs(v) for v in row) for row in self.V),
        )
        self._fast = biggest < self._NUMPY_LIMIT
        if self._fast:
            self._U = np.array(self.U, dtype=np.int64)
            self._V = np.array(self.V, dtype=np.int64)
            self._d = np.array([self.D[i][i] for i in range(r)], dtype=np.int64)

    def solve(self, b):
        """One integer solution, or None when none exists."""
        if self.m == 0:
            return [0] * self.n
        if self._fast:
            return self._solve_np(b)
        Ub = [0] * self.m
        for k, bk in enumerate(b):
            if bk:
                for i in range(self.m):
                    Ub[i] += self.U[i][k] * bk
        r = min(self.m, self.n)
        y = [0] * self.n
        for i in range(r):
            d = self.D[i][i]
            if d == 0:
                if Ub[i] != 0:
                    return None
            elif Ub[i] % d != 0:
                return None
            else:
                y[i] = Ub[i] // d
        for i in range(r, self.m):
            if Ub[i] != 0:
                return None
        return [sum(self.V[i][j] * y[j] for j in range(self.n))
                for i in range(self.n)]

    def _solve_np(self, b):
        Ub = self._U @ np.asarray(b, dtype=np.int64)
        r = min(self.m, self.n)
        head, tail = Ub[:r], Ub[r:]
        if tail.size and tail.any():
            return None
        y = np.zeros(self.n, dtype=np.int64)
        zero = self._d == 0
        if (head[zero] != 0).any():
            return None
        nz = ~zero
        if ((head[nz] % self._d[nz]) != 0).any():
            return None
        y[:r][nz] = head[nz] // self._d[nz]
        return [int(v) for v in (self._V @ y)]


def integer_solve(A, b):
    """All integer solutions of A x = b.

    Returns (particular, kernel_basis), where kernel_basis spans the
    saturated solution lattice, or None when no integer solution exists.
    """
    solver = SmithSolver(A)
    x = solver.solve(b)
    if x is None:
        return None
    return x, solver.kernel


def integer_kernel(A):
    """Saturated integer kernel basis (list of vectors) of A."""
    n = len(A[0]) if A else 0
    if not A:
        return [[int(i == j) for j in range(n)] for i in range(n)]
    sol = integer_solve(A, [0] * len(A))
    assert sol is not None
    return sol[1]


def rational_consistent(A, b):
    """Whether A x = b has a rational solution (Fraction Gauss)."""
    m = len(A)
    n = len(A[0]) if m else 0
    rows = [[Fraction(v) for v in row] + [Fraction(bv)] for row, bv in zip(A, b)]
    row = 0
    for col in range(n):
        piv = next((r for r in range(row, m) if rows[r][col] != 0), None)
        if piv is None:
            continue
        rows[row], rows[piv] = rows[piv], rows[row]
        inv = 1 / rows[row][col]
        rows[row] = [v * inv for v in rows[row]]
        for r in range(m):
            if r != row and rows[r][col] != 0:
                c = rows[r][col]
                rows[r] = [v - c * w for v, w in zip(rows[r], rows[row])]
        row += 1
        if row == m:
            break
    return all(r[n] == 0 for r in rows[row:])


# ---------------------------------------------------------------------------
# F2[theta]: polynomials as ints, bit i = coefficient of theta^i
# ---------------------------------------------------------------------------


def p2_mul(a, b):
    """Carry-less multiplication of GF(2)[theta] polynomials."""
    out = 0
    while b:
        low = b & -b
        out ^= a << (low.bit_length() - 1)
        b ^= low
    return out


def p2_deg(a):
    """Degree of a (-1 for the zero polynomial)."""
    return a.bit_length() - 1


def p2_divmod(a, b):
    """Polynomial division: (q, r) with a = q*b + r and deg r < deg b."""
    if b == 0:
        raise ZeroDivisionError("division by zero polynomial")
    q = 0
    db = p2_deg(b)
    while a and p2_deg(a) >= db:
        shift = p2_deg(a) - db
        q ^= 1 << shift
        a ^= b << shift
    return q, a


def p2_gcd(a, b):
    while b:
        _, r = p2_divmod(a, b)
        a, b = b, r
    return a


def p2_theta_valuation(a):
    """Largest k with theta^k dividing a (None for the zero polynomial)."""
    if a == 0:
        return None
    return (a & -a).bit_length() - 1


def poly_smith_normal_form(M):
    """Elementary divisors of a matrix over F2[theta].

    Entries are ints in the bitmask encoding.  Returns the nonzero
    diagonal of the Smith form, monic, with d_i | d_{i+1}.  The number
    of divisors is the rank over the fraction field F2(theta).
    """
    A = [list(map(int, row)) for row in M]
    m = len(A)
    n = len(A[0]) if m else 0
    t = 0
    while True:
        pivot = None
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if A[i][j] and (best is None or p2_deg(A[i][j]) < best):
                    best = p2_deg(A[i][j])
                    pivot = (i, j)
        if pivot is None:
            break
        pi, pj = pivot
        A[t], A[pi] = A[pi], A[t]
        for row in A:
            row[t], row[pj] = row[pj], row[t]

        dirty = False
        for i in range(t + 1, m):
            if A[i][t]:
                q, r = p2_divmod(A[i][t], A[t][t])
                A[i] = [a ^ p2_mul(q, b) for a, b in zip(A[i], A[t])]
                if r:
                    dirty = True
        for j in range(t + 1, n):
            if A[t][j]:
                q, r = p2_divmod(A[t][j], A[t][t])
                for i in range(m):
                    A[i][j] ^= p2_mul(q, A[i][t])
                if r:
                    dirty = True
        if dirty:
            continue

        bad = None
        for i in range(t + 1, m):
            for j in range(t + 1, n):
                if p2_divmod(A[i][j], A[t][t])[1]:
                    bad = i
                    break
            if bad is not None:
                break
        if bad is not None:
            A[t] = [a ^ b for a, b in zip(A[t], A[bad])]
            continue
        t += 1

    divisors = [A[i][i] for i in range(t)]
    return divisors
