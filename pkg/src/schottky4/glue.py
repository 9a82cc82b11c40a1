"""Representation numbers of D_n^+ block lattices by a coordinate-row DP.

A vector of D_n^+ (n divisible by 8) is x in Z^n with even coordinate sum,
or x in (Z + 1/2)^n with even coordinate sum.  Writing u = 2x, a matrix
G in Mat(m, g) of lattice vectors is an n x g integer matrix of rows u_i
with

* every entry of column j congruent to delta_j mod 2 (delta in {0,1}^g),
* each column sum congruent to 0 mod 4,

and 4 T = sum_i u_i u_i^T.  Counting G with a prescribed T is therefore a
walk over rows: the state after k rows is the partial sum P of the rank-one
terms together with the column sums mod 4.  States with T4 - P not positive
semi-definite are dropped, which keeps the state space small.

Two reductions make the walk fast enough for genus 4:

* sign folding: only rows whose first nonzero entry is positive are walked.
  For delta = 0 a nonzero row carries weight 2: flipping its sign keeps
  u u^T and changes the column sums by 2u, which is 0 mod 4 for even u.
  For delta != 0 every row is nonzero,
  sign flips shift the column sums by 2*delta, so column sums are tracked
  modulo <2*delta> and the total is multiplied by 2^(n-1) at the end
  (exactly half of the 2^n sign patterns fix the parity).
* meet in the middle: the n rows of a D16^+ block are split into two halves
  whose state distributions are joined on complementary keys.  E8 + E8 is
  the join of two full E8 block distributions.
"""
from __future__ import annotations

import itertools
from math import isqrt

import numpy as np

from .errors import ResourceLimitError
from .forms import psd_mask

#: States with weights above this bound would risk int64 overflow.
WEIGHT_CEILING = 2 ** 62


def _rows(T4, delta):
    """Candidate rows u (sign-normalized) with u = delta mod 2 and T4 - u u^T psd."""
    g = len(T4)
    rng = []
    for j in range(g):
        b = isqrt(int(T4[j, j]))
        rng.append([u for u in range(-b, b + 1) if u % 2 == delta[j]])
    U = np.array(list(itertools.product(*rng)), dtype=np.int64).reshape(-1, g)
    nz = U != 0
    first = np.where(nz.any(1), U[np.arange(len(U)), nz.argmax(1)], 1)
    U = U[first > 0]
    R = U[:, :, None] * U[:, None, :]
    ok = psd_mask(T4[None] - R)
    return U[ok], R[ok]


class _Keys:
    """Injective int64 encoding of (P, s) states for a fixed target T4."""

    def __init__(self, T4):
        g = len(T4)
        self.g = g
        self.iu = np.triu_indices(g)
        d = T4.diagonal()
        hi = np.array([d[i] if i == j else isqrt(int(d[i] * d[j]))
                       for i, j in zip(*self.iu)], dtype=np.int64)
        self.lo = np.array([0 if i == j else -hi[k]
                            for k, (i, j) in enumerate(zip(*self.iu))], dtype=np.int64)
        self.span = hi - self.lo + 1
        bits = np.log2(self.span.astype(float)).sum() + 2 * g
        if bits > 62:
            raise ResourceLimitError("state space too large for int64 keys")

    def __call__(self, P, s):
        ent = P[:, self.iu[0], self.iu[1]]
        key = np.zeros(len(P), np.int64)
        for c in range(ent.shape[1]):
            key = key * self.span[c] + (ent[:, c] - self.lo[c])
        for c in range(self.g):
            key = key * 4 + s[:, c]
        return key


def _fold(S, delta):
    """Representative of S modulo the subgroup generated by 2*delta (mod 4)."""
    if not delta.any():
        return S
    g = S.shape[1]
    alt = (S + 2 * delta) % 4
    w = 4 ** np.arange(g)
    return np.where(((alt * w).sum(1) < (S * w).sum(1))[:, None], alt, S)


def _walk(T4, delta, nrows, total_rows, keys):
    """Distribution of states (P, s) after ``nrows`` of ``total_rows`` rows."""
    g = len(T4)
    U, R = _rows(T4, delta)
    if not delta.any():
        rw = np.where(np.any(U != 0, axis=1), 2, 1).astype(np.int64)
    else:
        rw = np.ones(len(U), np.int64)
    usq = U * U
    P = np.zeros((1, g, g), np.int64)
    s = np.zeros((1, g), np.int64)
    w = np.ones(1, np.int64)
    for step in range(nrows):
        left = total_rows - step - 1
        # each remaining row needs u_j^2 >= delta_j on the diagonal
        slack = (T4[None] - P).diagonal(axis1=1, axis2=2) - left * delta
        buckets, inv = np.unique(slack, axis=0, return_inverse=True)
        inv = inv.ravel()
        NP, NS, NW = [], [], []
        for b in range(len(buckets)):
            fits = np.all(usq <= buckets[b][None], axis=1)
            if not fits.any():
                continue
            si = np.nonzero(inv == b)[0]
            Ub, Rb, wb = U[fits], R[fits], rw[fits]
            cand = (P[si][:, None] + Rb[None]).reshape(-1, g, g)
            ok = psd_mask(T4[None] - cand)
            NP.append(cand[ok])
            NS.append(((s[si][:, None] + Ub[None]) % 4).reshape(-1, g)[ok])
            NW.append((w[si][:, None] * wb[None]).reshape(-1)[ok])
        if not NP:
            return None
        P = np.concatenate(NP)
        if len(P) == 0:
            return None
        s = _fold(np.concatenate(NS), delta)
        W = np.concatenate(NW)
        k = keys(P, s)
        uk, first, inv = np.unique(k, return_index=True, return_inverse=True)
        w = np.zeros(len(uk), np.int64)
        np.add.at(w, inv.ravel(), W)
        if w.max() > WEIGHT_CEILING // 4:
            raise ResourceLimitError("row-walk weights approach int64 overflow")
        P, s = P[first], s[first]
    return P, s, w


def _join(k1, w1, k2, w2):
    """Sum of w1[a] * w2[b] over pairs with k1[a] == k2[b], exact."""
    o = np.argsort(k1)
    ks, ws = k1[o], w1[o]
    pos = np.minimum(np.searchsorted(ks, k2), len(ks) - 1)
    hit = ks[pos] == k2
    if not hit.any():
        return 0
    return int(sum(int(a) * int(b) for a, b in zip(w2[hit], ws[pos[hit]])))


def _deltas(T4, n):
    g = len(T4)
    for delta in itertools.product((0, 1), repeat=g):
        delta = np.array(delta, dtype=np.int64)
        if np.all(n * delta <= T4.diagonal()):
            yield delta


def count_single_block(T, n: int) -> int:
    """N(D_n^+, T) by a meet-in-the-middle join of two half-walks (n divisible by 8)."""
    T4 = 4 * np.asarray(T, dtype=np.int64)
    keys = _Keys(T4)
    total = 0
    for delta in _deltas(T4, n):
        half = _walk(T4, delta, n // 2, n, keys)
        if half is None:
            continue
        P, s, w = half
        # both halves have n/2 rows, so the second half reuses the first walk
        k1 = keys(P, s)
        k2 = keys(T4[None] - P, _fold((-s) % 4, delta))
        sub = _join(k1, w, k2, w)
        if delta.any():
            sub *= 2 ** (n - 1)
        total += sub
    return total


def block_distribution(T4, n: int, keys):
    """Map P -> number of n-row D_n^+ blocks with sum_i u_i u_i^T = P (P <= T4)."""
    g = len(T4)
    Ps, Ws = [], []
    for delta in _deltas(T4, n):
        walk = _walk(T4, delta, n, n, keys)
        if walk is None:
            continue
        P, s, w = walk
        if delta.any():
            ok = np.all(s == 0, axis=1) | np.all(s == (2 * delta) % 4, axis=1)
            w = w * 2 ** (n - 1)
        else:
            ok = np.all(s == 0, axis=1)
        Ps.append(P[ok])
        Ws.append(w[ok])
    P = np.concatenate(Ps)
    W = np.concatenate(Ws)
    k = keys(P, np.zeros((len(P), g), np.int64))
    uk, first, inv = np.unique(k, return_index=True, return_inverse=True)
    w = np.zeros(len(uk), dtype=object)
    np.add.at(w, inv.ravel(), W.astype(object))
    return P[first], uk, w


def count_blocks(T, blocks) -> int:
    """N(D_{n_1}^+ + ... + D_{n_k}^+, T) for block sizes divisible by 8 (k <= 2)."""
    blocks = tuple(blocks)
    T = np.asarray(T, dtype=np.int64)
    if len(blocks) == 1:
        return count_single_block(T, blocks[0])
    if len(blocks) != 2:
        raise ValueError("at most two blocks are supported")
    T4 = 4 * T
    keys = _Keys(T4)
    zs = lambda P: np.zeros((len(P), len(T)), np.int64)
    P1, k1, w1 = block_distribution(T4, blocks[0], keys)
    if blocks[1] == blocks[0]:
        P2, k2, w2 = P1, k1, w1
    else:
        P2, k2, w2 = block_distribution(T4, blocks[1], keys)
    kc = keys(T4[None] - P1, zs(P1))
    o = np.argsort(k2)
    ks, ws = k2[o], w2[o]
    pos = np.minimum(np.searchsorted(ks, kc), len(ks) - 1)
    hit = ks[pos] == kc
    return int(sum(a * b for a, b in zip(w1[hit], ws[pos[hit]])))
