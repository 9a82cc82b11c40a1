"""Exact integer utilities for small even symmetric matrices (size <= 4).

Everything here works on ``int64`` numpy arrays or Python ints; no floating
point decides a yes/no question.  The main pieces are

* vectorized principal-minor tests and determinants,
* enumeration of even positive semi-definite matrices under a diagonal or
  trace bound,
* reduction of a singular form to its positive definite part,
* GL_g(Z)-orbit generation inside a bound, used to partition target sets
  into equivalence classes (representation numbers are class invariants).
"""
from __future__ import annotations

import itertools
from fractions import Fraction
from functools import lru_cache
from math import gcd, isqrt

import numpy as np

from .errors import ResourceLimitError, ValidationError

MAX_GENUS = 4

#: Ceiling on the number of candidate bases examined by :func:`orbit_grams`.
ORBIT_TUPLE_CEILING = 20_000_000


# ---------------------------------------------------------------------------
# determinants and minors

def _det2(M, r, c):
    return M[:, r[0], c[0]] * M[:, r[1], c[1]] - M[:, r[0], c[1]] * M[:, r[1], c[0]]


def _det3(M, r, c):
    return (M[:, r[0], c[0]] * _det2(M, r[1:], (c[1], c[2]))
            - M[:, r[0], c[1]] * _det2(M, r[1:], (c[0], c[2]))
            + M[:, r[0], c[2]] * _det2(M, r[1:], (c[0], c[1])))


def _det4(M):
    r = (1, 2, 3)
    return (M[:, 0, 0] * _det3(M, r, (1, 2, 3)) - M[:, 0, 1] * _det3(M, r, (0, 2, 3))
            + M[:, 0, 2] * _det3(M, r, (0, 1, 3)) - M[:, 0, 3] * _det3(M, r, (0, 1, 2)))


def batch_det(M):
    """Exact determinants of a stack of small integer matrices, shape (N, k, k)."""
    M = np.asarray(M, dtype=np.int64)
    k = M.shape[-1]
    if k == 0:
        return np.ones(len(M), np.int64)
    if k == 1:
        return M[:, 0, 0].copy()
    if k == 2:
        return _det2(M, (0, 1), (0, 1))
    if k == 3:
        return _det3(M, (0, 1, 2), (0, 1, 2))
    if k == 4:
        return _det4(M)
    raise ValidationError(f"batch_det supports k <= 4, got {k}")


def _sym_det3(D, i, j, k):
    a, b, c = D[:, i, i], D[:, j, j], D[:, k, k]
    d, e, f = D[:, i, j], D[:, i, k], D[:, j, k]
    return a * b * c + 2 * d * e * f - a * f * f - b * e * e - c * d * d


def psd_mask(D):
    """Boolean mask: which symmetric matrices in the stack D (N, g, g) are psd.

    Uses the criterion that every principal minor is nonnegative; matrices
    are dropped from further work as soon as one minor fails.
    """
    D = np.asarray(D, dtype=np.int64)
    g = D.shape[-1]
    ok = np.all(D.diagonal(axis1=1, axis2=2) >= 0, axis=1)
    idx = np.nonzero(ok)[0]
    E = D[idx]
    tests = [lambda M, p=p: M[:, p[0], p[0]] * M[:, p[1], p[1]] - M[:, p[0], p[1]] ** 2
             for p in itertools.combinations(range(g), 2)]
    tests += [lambda M, p=p: _sym_det3(M, *p) for p in itertools.combinations(range(g), 3)]
    if g == 4:
        tests.append(_det4)
    for t in tests:
        if not len(idx):
            break
        keep = t(E) >= 0
        idx, E = idx[keep], E[keep]
    out = np.zeros(len(D), bool)
    out[idx] = True
    return out


def pd_mask(D):
    """Boolean mask of positive definite matrices (leading principal minors > 0)."""
    D = np.asarray(D, dtype=np.int64)
    g = D.shape[-1]
    ok = np.ones(len(D), bool)
    for k in range(1, g + 1):
        ok &= batch_det(D[:, :k, :k]) > 0
    return ok


def exact_rank(T) -> int:
    """Rank over Q of an integer matrix (Gaussian elimination over Fractions)."""
    A = [[Fraction(int(x)) for x in row] for row in np.asarray(T)]
    rows = len(A)
    cols = len(A[0]) if rows else 0
    rank = 0
    for c in range(cols):
        piv = next((r for r in range(rank, rows) if A[r][c] != 0), None)
        if piv is None:
            continue
        A[rank], A[piv] = A[piv], A[rank]
        for r in range(rank + 1, rows):
            f = A[r][c] / A[rank][c]
            if f:
                A[r] = [a - f * b for a, b in zip(A[r], A[rank])]
        rank += 1
    return rank


def exact_det(M) -> int:
    """Determinant of a square integer matrix (Bareiss, Python integers)."""
    A = [[int(x) for x in row] for row in np.asarray(M)]
    n = len(A)
    sign = 1
    prev = 1
    for c in range(n):
        piv = next((r for r in range(c, n) if A[r][c] != 0), None)
        if piv is None:
            return 0
        if piv != c:
            A[c], A[piv] = A[piv], A[c]
            sign = -sign
        for r in range(c + 1, n):
            for k in range(c + 1, n):
                A[r][k] = (A[c][c] * A[r][k] - A[r][c] * A[c][k]) // prev
        prev = A[c][c]
    return sign * (A[n - 1][n - 1] if n else 1)


def is_even_psd(T) -> bool:
    T = np.asarray(T)
    if T.ndim != 2 or T.shape[0] != T.shape[1]:
        return False
    if not np.array_equal(T, T.T) or np.any(T.diagonal() % 2):
        return False
    return bool(psd_mask(T[None].astype(np.int64))[0])


# ---------------------------------------------------------------------------
# singular forms

def column_reduce(T):
    """Unimodular U with T @ U = [H | 0], H of full column rank.

    Returns ``(U, r)`` with r = rank(T).  For a symmetric psd T the matrix
    ``U.T @ T @ U`` is then ``diag(T', 0)`` with T' (r x r) positive definite.
    """
    A = [[int(x) for x in row] for row in np.asarray(T)]
    n = len(A)
    U = [[int(i == j) for j in range(n)] for i in range(n)]

    def colop(dst, src, q):  # col[dst] -= q * col[src]
        for M in (A, U):
            for row in M:
                row[dst] -= q * row[src]

    def swap(i, j):
        for M in (A, U):
            for row in M:
                row[i], row[j] = row[j], row[i]

    piv = 0
    for row in range(n):
        if piv == n:
            break
        while True:
            nz = [c for c in range(piv, n) if A[row][c] != 0]
            if not nz:
                break
            c = min(nz, key=lambda j: abs(A[row][j]))
            if c != piv:
                swap(c, piv)
            done = True
            for j in range(piv + 1, n):
                if A[row][j]:
                    colop(j, piv, A[row][j] // A[row][piv])
                    if A[row][j]:
                        done = False
            if done:
                break
        if any(A[row][c] for c in range(piv, n)):
            piv += 1
    return np.array(U, dtype=np.int64), piv


def size_reduce(T):
    """Equivalent form with small entries: pairwise size reduction, then sorted diagonal.

    Repeatedly replaces basis vector b_i by b_i - q b_j with q the rounded
    ratio t_ij / t_jj while this lowers t_ii.  T must be positive definite.
    """
    A = [[int(x) for x in row] for row in np.asarray(T)]
    n = len(A)
    changed = True
    while changed:
        changed = False
        for i in range(n):
            for j in range(n):
                if i == j or A[j][j] == 0:
                    continue
                q = round(Fraction(A[i][j], A[j][j]))
                if q == 0 or A[i][i] - 2 * q * A[i][j] + q * q * A[j][j] >= A[i][i]:
                    continue
                # b_i <- b_i - q b_j
                new_ii = A[i][i] - 2 * q * A[i][j] + q * q * A[j][j]
                for k in range(n):
                    if k != i:
                        A[i][k] -= q * A[j][k]
                        A[k][i] = A[i][k]
                A[i][i] = new_ii
                changed = True
    M = np.array(A, dtype=np.int64).reshape(n, n)
    o = np.argsort(M.diagonal(), kind="stable")
    return M[o][:, o]


def definite_part(T):
    """Positive definite T' with N(S, T) = N(S, T') for every positive definite S."""
    T = np.asarray(T, dtype=np.int64)
    U, r = column_reduce(T)
    R = U.T @ T @ U
    return size_reduce(R[:r, :r]) if r else R[:0, :0].copy()


# ---------------------------------------------------------------------------
# target enumeration

def _offdiag_pairs(g):
    return [(i, j) for i in range(g) for j in range(i + 1, g)]


def enumerate_psd(g: int, max_diag: int | None = None, max_trace: int | None = None,
                  min_diag: int = 0, positive: bool = False):
    """All even psd g x g integer matrices within the bounds, as an (N, g, g) array.

    ``max_diag`` bounds every diagonal entry, ``max_trace`` bounds the trace,
    ``min_diag`` is a lower bound on each diagonal entry and ``positive``
    keeps only definite matrices.  Off-diagonal entries range over the
    Cauchy-Schwarz box |t_ij| <= sqrt(t_ii t_jj).  Rows are sorted
    lexicographically by the row-major flattened matrix.
    """
    if not 1 <= g <= MAX_GENUS:
        raise ValidationError(f"genus must be in 1..{MAX_GENUS}, got {g}")
    if max_diag is None and max_trace is None:
        raise ValidationError("need max_diag or max_trace")
    top = max_diag if max_diag is not None else max_trace
    if top < 0:
        raise ValidationError("bounds must be nonnegative")
    lo = max(min_diag, 2 if positive else 0)
    lo += lo % 2
    pairs = _offdiag_pairs(g)
    blocks = []
    for d in itertools.product(range(lo, top + 1, 2), repeat=g):
        if max_trace is not None and sum(d) > max_trace:
            continue
        ranges = []
        for i, j in pairs:
            b = isqrt(d[i] * d[j])
            ranges.append(np.arange(-b, b + 1))
        if pairs:
            grids = np.meshgrid(*ranges, indexing="ij")
            offs = np.stack([x.ravel() for x in grids], axis=1)
        else:
            offs = np.zeros((1, 0), np.int64)
        M = np.zeros((len(offs), g, g), np.int64)
        for k, (i, j) in enumerate(pairs):
            M[:, i, j] = offs[:, k]
            M[:, j, i] = offs[:, k]
        for i in range(g):
            M[:, i, i] = d[i]
        M = M[pd_mask(M)] if positive else M[psd_mask(M)]
        blocks.append(M)
    if not blocks:
        return np.zeros((0, g, g), np.int64)
    out = np.concatenate(blocks)
    order = np.lexsort(out.reshape(len(out), -1).T[::-1])
    return out[order]


# ---------------------------------------------------------------------------
# orbits and classes

def form_key(T) -> tuple:
    """Ordering key (trace, diagonal, upper off-diagonals) used to pick class representatives."""
    T = np.asarray(T)
    g = len(T)
    iu = np.triu_indices(g, 1)
    return (int(np.trace(T)),) + tuple(int(x) for x in T.diagonal()) + tuple(int(x) for x in T[iu])


def _batch_keys(M):
    g = M.shape[-1]
    iu = np.triu_indices(g, 1)
    tr = np.trace(M, axis1=1, axis2=2)[:, None]
    return np.concatenate([tr, M.diagonal(axis1=1, axis2=2), M[:, iu[0], iu[1]]], axis=1)


def short_coordinate_vectors(C, bound: int):
    """Integer x (first nonzero entry positive) with 0 < x^T C x <= bound, sorted by norm."""
    C = np.asarray(C, dtype=np.int64)
    r = len(C)
    Ci = np.linalg.inv(C.astype(float))
    lim = [int(np.floor(np.sqrt(max(bound, 0) * Ci[i, i]) + 1e-9)) for i in range(r)]
    grids = np.meshgrid(*[np.arange(-l, l + 1) for l in lim], indexing="ij")
    X = np.stack([x.ravel() for x in grids], axis=1).astype(np.int64)
    nz = X != 0
    first = X[np.arange(len(X)), nz.argmax(1)]
    X = X[nz.any(1) & (first > 0)]
    n = np.einsum("ij,jk,ik->i", X, C, X)
    keep = n <= bound
    X, n = X[keep], n[keep]
    order = np.lexsort(np.concatenate([n[:, None], X], 1).T[::-1])
    return X[order], n[order]


@lru_cache(maxsize=None)
def _signed_permutations(g):
    perms = np.array(list(itertools.permutations(range(g))), dtype=np.int64)
    signs = np.array(list(itertools.product((1, -1), repeat=g)), dtype=np.int64)
    return perms, signs


def _upper_keys(G, bound):
    """Injective int64 keys for symmetric matrices with entries in [-bound, bound]."""
    g = G.shape[-1]
    iu = np.triu_indices(g)
    F = G[:, iu[0], iu[1]] + bound
    base = 2 * bound + 1
    if len(iu[0]) * np.log2(base) > 62:
        raise ResourceLimitError("matrix entries too large for int64 keys")
    key = np.zeros(len(G), np.int64)
    for c in range(F.shape[1]):
        key = key * base + F[:, c]
    return key


def _unique_sym(G):
    if len(G) == 0:
        return G
    bound = int(np.abs(G).max())
    _, idx = np.unique(_upper_keys(G, bound), return_index=True)
    return G[idx]


def _expand_signed_permutations(G):
    """All D P^T G P D for permutation matrices P and sign matrices D, deduplicated."""
    g = G.shape[-1]
    G = _unique_sym(G)
    perms, signs = _signed_permutations(g)
    S = signs[:, :, None] * signs[:, None, :]          # (2^g, g, g)
    out = []
    for p in perms:
        Gp = G[:, p][:, :, p]
        out.append(_unique_sym((Gp[:, None] * S[None]).reshape(-1, g, g)))
    return _unique_sym(np.concatenate(out))


def orbit_grams(C, max_diag: int | None = None, max_trace: int | None = None):
    """All Gram matrices of Z-bases of the form C that satisfy the bounds.

    C must be positive definite.  The result is the intersection of the
    GL_g(Z)-orbit of C with the bounded target set, deduplicated.  Bases are
    generated as index-increasing tuples of sign-normalized short vectors
    (norms nondecreasing), kept when the determinant is +-1, and the signed
    permutations of their Gram matrices are added afterwards.
    """
    C = np.asarray(C, dtype=np.int64)
    g = len(C)
    X0, n0 = short_coordinate_vectors(C, int(C.diagonal().max()))
    lam = int(n0[0])
    bounds = []
    if max_diag is not None:
        bounds.append(max_diag)
    if max_trace is not None:
        bounds.append(max_trace - (g - 1) * lam)
    if not bounds:
        raise ValidationError("need max_diag or max_trace")
    B = min(bounds)
    X, n = short_coordinate_vectors(C, B)
    if len(X) == 0:
        return np.zeros((0, g, g), np.int64)
    cap = max_trace if max_trace is not None else g * B
    tup = np.arange(len(X))[:, None]
    s = n.copy()
    for k in range(1, g):
        remaining = g - k          # vectors still to choose, each of norm >= the next one
        last = tup[:, -1]
        limit = (cap - s) // remaining
        hi = np.searchsorted(n, limit, side="right")
        cnt = np.maximum(hi - last - 1, 0)
        total = int(cnt.sum())
        if total > ORBIT_TUPLE_CEILING:
            raise ResourceLimitError(f"orbit enumeration needs {total} tuples")
        rep = np.repeat(np.arange(len(tup)), cnt)
        start = np.repeat(last + 1 - np.concatenate([[0], np.cumsum(cnt)[:-1]]), cnt)
        nxt = start + np.arange(total)
        tup = np.concatenate([tup[rep], nxt[:, None]], axis=1)
        s = s[rep] + n[nxt]
        if total == 0:
            return np.zeros((0, g, g), np.int64)
    V = X[tup]                                        # (N, g, g): rows are basis vectors
    keep = np.abs(batch_det(V)) == 1
    V = V[keep]
    if len(V) == 0:
        return np.zeros((0, g, g), np.int64)
    G = np.einsum("nik,kl,njl->nij", V, C, V)
    A = _expand_signed_permutations(G)
    if max_diag is not None:
        A = A[np.all(A.diagonal(axis1=1, axis2=2) <= max_diag, axis=1)]
    if max_trace is not None:
        A = A[np.trace(A, axis1=1, axis2=2) <= max_trace]
    return A


def _min_by_key(M):
    K = _batch_keys(M)
    i = np.lexsort(K.T[::-1])[0]
    return M[i].copy()


@lru_cache(maxsize=4096)
def _canonical_cached(key: bytes, g: int):
    T = np.frombuffer(key, dtype=np.int64).reshape(g, g)
    members = orbit_grams(T, max_trace=int(np.trace(T)))
    return _min_by_key(members).tobytes()


def canonical_form(T):
    """Class representative of a psd even form: minimal key among equivalent forms.

    Singular forms are reduced to their definite part T' and represented as
    ``diag(canonical(T'), 0)``.  Two forms are GL_g(Z)-equivalent iff their
    canonical forms agree.
    """
    T = np.asarray(T, dtype=np.int64)
    g = len(T)
    P = definite_part(T)
    r = len(P)
    out = np.zeros((g, g), np.int64)
    if r:
        Cr = np.frombuffer(_canonical_cached(np.ascontiguousarray(P).tobytes(), r),
                           dtype=np.int64).reshape(r, r)
        out[:r, :r] = Cr
    return out


def _encode_rows(M, offset, base):
    F = M.reshape(len(M), -1) + offset
    key = np.zeros(len(M), np.int64)
    for c in range(F.shape[1]):
        key = key * base + F[:, c]
    return key


class ClassPartition:
    """GL_g(Z)-classes of a bounded set of positive definite even forms.

    Attributes
    ----------
    targets : (N, g, g) array of all forms in the set (sorted as given)
    labels : (N,) class index of each target
    reps : (K, g, g) canonical representative of each class
    sizes : (K,) number of targets in each class
    """

    def __init__(self, targets, max_diag=None, max_trace=None):
        T = np.asarray(targets, dtype=np.int64)
        self.targets = T
        self.g = T.shape[-1] if T.ndim == 3 else 0
        self.max_diag = max_diag
        self.max_trace = max_trace
        N = len(T)
        if N and not pd_mask(T).all():
            raise ValidationError("ClassPartition needs positive definite targets")
        top = int(np.abs(T).max()) if N else 0
        self._offset, self._base = top, 2 * top + 1
        keys = _encode_rows(T, self._offset, self._base) if N else np.zeros(0, np.int64)
        order = np.argsort(keys)
        skeys = keys[order]
        labels = -np.ones(N, np.int64)
        reps = []
        visit = np.lexsort(_batch_keys(T).T[::-1]) if N else []
        for i in visit:
            if labels[i] >= 0:
                continue
            M = orbit_grams(T[i], max_diag=max_diag, max_trace=max_trace)
            mk = _encode_rows(M, self._offset, self._base)
            pos = np.searchsorted(skeys, mk)
            pos = np.minimum(pos, N - 1)
            if not np.all(skeys[pos] == mk):
                raise ValidationError("target set is not closed under the bounded orbit")
            idx = order[pos]
            if np.any(labels[idx] >= 0):
                raise AssertionError("orbits overlap; orbit generation is inconsistent")
            labels[idx] = len(reps)
            reps.append(_min_by_key(M))
        self.labels = labels
        self.reps = np.array(reps, dtype=np.int64).reshape(-1, self.g, self.g)
        self.sizes = np.bincount(labels, minlength=len(reps)) if N else np.zeros(0, np.int64)

    def __len__(self):
        return len(self.reps)


def primitive_rows(M) -> bool:
    """True iff the k rows of the integer matrix M extend to a basis of Z^r."""
    M = np.asarray(M, dtype=np.int64)
    k, r = M.shape
    acc = 0
    for cols in itertools.combinations(range(r), k):
        acc = gcd(acc, abs(exact_det(M[:, cols])))
        if acc == 1:
            return True
    return False
