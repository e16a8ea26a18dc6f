"""Small exact linear algebra over the rationals and prime fields.

Everything works on lists of lists (rows) holding `Fraction`s or reduced
ints mod p.  Sizes here are tiny, so plain Gaussian elimination is fine.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np


def _inv_mod(a: int, p: int) -> int:
    a %= p
    if a == 0:
        raise ZeroDivisionError("not invertible mod p")
    return pow(a, p - 2, p)


def _as_rows(mat) -> list[list]:
    arr = np.asarray(mat, dtype=object)
    if arr.ndim != 2:
        raise ValueError("expected a matrix")
    return [list(row) for row in arr]


def rref_fraction(mat) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form over Q; returns (rows, pivot column list)."""
    rows = [[Fraction(x) for x in row] for row in _as_rows(mat)]
    nrows = len(rows)
    ncols = len(rows[0]) if nrows else 0
    pivots = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, nrows) if rows[i][c] != 0), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(nrows):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return rows, pivots


def rref_mod_p(mat, p: int) -> tuple[list[list[int]], list[int]]:
    rows = [[int(x) % p for x in row] for row in _as_rows(mat)]
    nrows = len(rows)
    ncols = len(rows[0]) if nrows else 0
    pivots = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, nrows) if rows[i][c] % p != 0), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = _inv_mod(rows[r][c], p)
        rows[r] = [(x * inv) % p for x in rows[r]]
        for i in range(nrows):
            if i != r and rows[i][c] % p != 0:
                f = rows[i][c]
                rows[i] = [(a - f * b) % p for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return rows, pivots


def rank_fraction(mat) -> int:
    return len(rref_fraction(mat)[1])


def rank_mod_p(mat, p: int) -> int:
    return len(rref_mod_p(mat, p)[1])


def rank_complex(mat, rel_tol: float = 1e-9) -> int:
    """Numerical rank: singular values above rel_tol times the largest."""
    arr = np.asarray(mat, dtype=complex)
    if arr.size == 0:
        return 0
    sv = np.linalg.svd(arr, compute_uv=False)
    if sv.size == 0 or sv[0] == 0.0:
        return 0
    return int(np.sum(sv > rel_tol * sv[0]))


def nullspace_fraction(mat) -> list[list[Fraction]]:
    """Basis of the right nullspace over Q (list of vectors)."""
    arr = np.asarray(mat, dtype=object)
    nrows, ncols = arr.shape if arr.ndim == 2 else (0, 0)
    if nrows == 0:
        return [[Fraction(int(i == j)) for i in range(ncols)] for j in range(ncols)]
    rows, pivots = rref_fraction(arr)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        for r, pc in enumerate(pivots):
            v[pc] = -rows[r][fc]
        basis.append(v)
    return basis


def _solve_inverse(mat, n, one, zero, is_zero, div, sub_mul):
    # Gauss-Jordan on [A | I]; raises on singular input.
    aug = [list(row) + [one if i == j else zero for j in range(n)]
           for i, row in enumerate(mat)]
    for c in range(n):
        pivot = next((i for i in range(c, n) if not is_zero(aug[i][c])), None)
        if pivot is None:
            raise ZeroDivisionError("singular matrix")
        aug[c], aug[pivot] = aug[pivot], aug[c]
        pv = aug[c][c]
        aug[c] = [div(x, pv) for x in aug[c]]
        for i in range(n):
            if i != c and not is_zero(aug[i][c]):
                f = aug[i][c]
                aug[i] = [sub_mul(a, f, b) for a, b in zip(aug[i], aug[c])]
    return [row[n:] for row in aug]


def invert_fraction(mat) -> np.ndarray:
    rows = [[Fraction(x) for x in row] for row in _as_rows(mat)]
    n = len(rows)
    if n == 0 or any(len(r) != n for r in rows):
        raise ValueError("expected a square matrix")
    inv = _solve_inverse(rows, n, Fraction(1), Fraction(0),
                         lambda x: x == 0, lambda a, b: a / b,
                         lambda a, f, b: a - f * b)
    out = np.empty((n, n), dtype=object)
    out[:] = inv
    return out


def invert_mod_p(mat, p: int) -> np.ndarray:
    rows = [[int(x) % p for x in row] for row in _as_rows(mat)]
    n = len(rows)
    if n == 0 or any(len(r) != n for r in rows):
        raise ValueError("expected a square matrix")
    inv = _solve_inverse(rows, n, 1, 0,
                         lambda x: x % p == 0,
                         lambda a, b: (a * _inv_mod(b, p)) % p,
                         lambda a, f, b: (a - f * b) % p)
    out = np.empty((n, n), dtype=object)
    out[:] = [[x % p for x in row] for row in inv]
    return out


def clear_denominators(vec: list[Fraction]) -> list[int]:
    """Scale a rational vector to a primitive integer vector."""
    from math import gcd, lcm

    fracs = [Fraction(x) for x in vec]
    denom = lcm(*[f.denominator for f in fracs]) if fracs else 1
    ints = [int(f * denom) for f in fracs]
    g = 0
    for v in ints:
        g = gcd(g, v)
    if g > 1:
        ints = [v // g for v in ints]
    return ints
