"""Even unimodular lattices and their representation numbers.

Lattices are given by Gram matrices.  E8 and D16^+ are built from the
coordinate model D_n^+ = D_n + Z h, h = (1/2, ..., 1/2): with u = 2x the
basis vectors (as rows of doubled coordinates) are

    h2 = (1, 1, ..., 1),
    2(e_i - e_{i+1})      for i = 2, ..., n - 1,
    2(e_{n-1} + e_n),

and S = U U^T / 4.  This is the D_n root basis with e_1 - e_2 replaced by
the glue vector, which has determinant 1 for n = 8 and n = 16.

Representation numbers N(S, T) = #{G in Mat(m, g; Z) : G^T S G = T} are
computed by one of two exact engines:

* ``"columns"``: column-by-column extension over short-vector lists with
  inner-product filtering, the last two columns joined through a matrix of
  inner products.  Works for any positive definite S.
* ``"glue"``: the coordinate-row walk of :mod:`schottky4.glue`, available
  when S carries its D_n^+ block model.  Much faster for rank 16 at genus 4.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import forms, glue
from .errors import (CutoffInfeasibleError, ResourceLimitError, ValidationError)


@dataclass(frozen=True)
class LatticeConfig:
    """Resource ceilings for lattice enumeration."""

    max_vectors: int = 2_000_000       # vectors (both signs) in one short-vector table
    max_nodes: int = 20_000_000        # candidate operations in the column engine
    max_theta_trace: int = 16          # largest trace used by lattice_theta_value
    min_eig_floor: float = 0.1         # smallest admissible eigenvalue of Im(tau)


DEFAULT_CONFIG = LatticeConfig()

# default diagonal ceilings per genus
DEFAULT_MAX_DIAG = {1: 8, 2: 8, 3: 6, 4: 4}


# ---------------------------------------------------------------------------
# Gram matrices

@dataclass(frozen=True, eq=False)
class GramMatrix:
    """Positive definite even Gram matrix.

    ``model`` records the D_n^+ block sizes when the lattice is an orthogonal
    sum of such blocks; it is kept under change of basis and enables the
    glue engine.
    """

    entries: np.ndarray
    name: str = ""
    model: tuple | None = None

    def __post_init__(self):
        S = np.array(self.entries, dtype=np.int64)
        if S.ndim != 2 or S.shape[0] != S.shape[1] or S.shape[0] == 0:
            raise ValidationError("Gram matrix must be square and nonempty")
        if not np.array_equal(S, S.T):
            raise ValidationError("Gram matrix must be symmetric")
        if np.any(S.diagonal() % 2):
            raise ValidationError("Gram matrix must have even diagonal")
        for k in range(1, len(S) + 1):
            if forms.exact_det(S[:k, :k]) <= 0:
                raise ValidationError("Gram matrix must be positive definite")
        if self.model is not None and sum(self.model) != len(S):
            raise ValidationError("block model does not match the rank")
        S.setflags(write=False)
        object.__setattr__(self, "entries", S)

    @property
    def dim(self) -> int:
        return len(self.entries)

    def det(self) -> int:
        return forms.exact_det(self.entries)

    def change_basis(self, U) -> "GramMatrix":
        """Gram matrix U^T S U of the same lattice in another basis (U unimodular)."""
        U = np.asarray(U, dtype=np.int64)
        if abs(forms.exact_det(U)) != 1:
            raise ValidationError("change of basis must be unimodular")
        return GramMatrix(U.T @ self.entries @ U, self.name, self.model)

    def __eq__(self, other):
        return isinstance(other, GramMatrix) and np.array_equal(self.entries, other.entries)

    def __hash__(self):
        return hash(self.entries.tobytes())


def _dn_plus_rows(n: int):
    rows = [np.ones(n, np.int64)]
    for i in range(1, n - 1):
        r = np.zeros(n, np.int64)
        r[i], r[i + 1] = 2, -2
        rows.append(r)
    r = np.zeros(n, np.int64)
    r[n - 2], r[n - 1] = 2, 2
    rows.append(r)
    return np.array(rows)


def dn_plus_basis(n: int):
    """Basis of D_n^+ as rows of doubled coordinates (n divisible by 8)."""
    if n % 8:
        raise ValidationError("D_n^+ is even unimodular only for n divisible by 8")
    return _dn_plus_rows(n)


def _dn_plus_gram(n: int, name: str) -> GramMatrix:
    U = dn_plus_basis(n)
    return GramMatrix((U @ U.T) // 4, name, (n,))


def gram_e8() -> GramMatrix:
    """Gram matrix of E8 = D8^+."""
    return _dn_plus_gram(8, "E8")


def gram_d16_plus() -> GramMatrix:
    """Gram matrix of D16^+."""
    return _dn_plus_gram(16, "D16+")


def direct_sum(S1: GramMatrix, S2: GramMatrix) -> GramMatrix:
    """Block-diagonal Gram matrix of the orthogonal sum."""
    m1, m2 = S1.dim, S2.dim
    S = np.zeros((m1 + m2, m1 + m2), np.int64)
    S[:m1, :m1] = S1.entries
    S[m1:, m1:] = S2.entries
    model = S1.model + S2.model if (S1.model and S2.model) else None
    name = f"{S1.name}+{S2.name}" if (S1.name and S2.name) else ""
    return GramMatrix(S, name, model)


def gram_e8_e8() -> GramMatrix:
    return direct_sum(gram_e8(), gram_e8())


# ---------------------------------------------------------------------------
# short vectors

@dataclass
class VectorTable:
    """Nonzero lattice vectors of norm <= max_norm, one per +- pair, keyed by norm."""

    max_norm: int
    by_norm: dict = field(default_factory=dict)

    def vectors(self, norm: int, expand: bool = False):
        V = self.by_norm.get(norm)
        if V is None:
            if norm > self.max_norm:
                raise ValidationError(f"norm {norm} exceeds table bound {self.max_norm}")
            return np.zeros((0, 0), np.int64)
        return np.concatenate([V, -V]) if expand else V

    def count(self, norm: int) -> int:
        """Number of vectors (both signs) of the given norm; 1 for norm 0."""
        if norm == 0:
            return 1
        return 2 * len(self.by_norm.get(norm, ()))

    def total(self) -> int:
        return sum(len(v) for v in self.by_norm.values())


def short_vectors(S: GramMatrix, max_norm: int, config: LatticeConfig = DEFAULT_CONFIG) -> VectorTable:
    """All nonzero v with v^T S v <= max_norm, one of each +- pair (Fincke-Pohst).

    Coordinates are fixed from last to first; the admissible interval for
    each coordinate comes from the Cholesky factor.  Candidate norms are
    rechecked in exact integer arithmetic.
    """
    if max_norm < 0:
        raise ValidationError("max_norm must be nonnegative")
    A = S.entries
    m = len(A)
    table = VectorTable(int(max_norm))
    if max_norm == 0:
        return table
    R = np.linalg.cholesky(A.astype(float)).T          # A = R^T R, R upper triangular
    d = np.diag(R) ** 2
    mu = R / np.diag(R)[:, None]                       # mu[i, j] = R[i, j] / R[i, i]
    bound = max_norm + 1e-7
    # partial vectors hold coordinates i..m-1; rest = remaining budget
    X = np.zeros((1, 0), np.int64)
    rest = np.array([bound])
    for i in range(m - 1, -1, -1):
        c = -(X @ mu[i, i + 1:]) if X.shape[1] else np.zeros(len(X))
        r = np.sqrt(np.maximum(rest, 0) / d[i])
        lo = np.ceil(c - r - 1e-9).astype(np.int64)
        hi = np.floor(c + r + 1e-9).astype(np.int64)
        cnt = np.maximum(hi - lo + 1, 0)
        total = int(cnt.sum())
        if total > config.max_vectors * 4:
            raise ResourceLimitError(f"short-vector enumeration exceeded {config.max_vectors} vectors")
        rep = np.repeat(np.arange(len(X)), cnt)
        offs = np.arange(total) - np.repeat(np.concatenate([[0], np.cumsum(cnt)[:-1]]), cnt)
        xi = lo[rep] + offs
        newrest = rest[rep] - d[i] * (xi - c[rep]) ** 2
        X = np.concatenate([xi[:, None], X[rep]], axis=1)
        rest = newrest
        keep = rest > -1e-7
        X, rest = X[keep], rest[keep]
    norms = np.einsum("ij,jk,ik->i", X, A, X)
    nz = np.any(X != 0, axis=1)
    first = X[np.arange(len(X)), np.argmax(X != 0, axis=1)]
    keep = nz & (first > 0) & (norms <= max_norm)
    X, norms = X[keep], norms[keep]
    order = np.lexsort(np.concatenate([norms[:, None], X], 1).T[::-1])
    X, norms = X[order], norms[order]
    for nv in np.unique(norms):
        table.by_norm[int(nv)] = X[norms == nv]
    return table


@lru_cache(maxsize=32)
def _cached_table(S: GramMatrix, max_norm: int) -> VectorTable:
    return short_vectors(S, max_norm)


# ---------------------------------------------------------------------------
# representation numbers

def _as_target(T):
    T = np.array(T, dtype=np.int64)
    if T.ndim != 2 or T.shape[0] != T.shape[1] or not 1 <= len(T) <= forms.MAX_GENUS:
        raise ValidationError("T must be a g x g matrix with 1 <= g <= 4")
    if not forms.is_even_psd(T):
        raise ValidationError("T must be symmetric, even and positive semi-definite")
    return T


def _count_columns(S: GramMatrix, T, config: LatticeConfig) -> int:
    r = len(T)
    order = np.argsort(T.diagonal(), kind="stable")
    T = T[order][:, order]
    table = _cached_table(S, int(T.diagonal().max()))
    V = [table.vectors(int(T[j, j]), expand=True) for j in range(r)]
    if any(len(v) == 0 for v in V):
        return 0
    if r == 1:
        return len(V[0])
    SV = [v @ S.entries for v in V]
    ops = [0]

    def rec(k, cand):
        # cand[j] = indices into V[j] consistent with the chosen v_0..v_{k-1}
        if k == r - 2:
            A = V[r - 2][cand[r - 2]]
            B = SV[r - 1][cand[r - 1]]
            ops[0] += len(A) * len(B)
            if ops[0] > config.max_nodes:
                raise ResourceLimitError("column extension exceeded the node ceiling")
            if len(A) == 0 or len(B) == 0:
                return 0
            return int(np.count_nonzero(A @ B.T == T[r - 2, r - 1]))
        total = 0
        for i in cand[k]:
            v = V[k][i]
            nxt = {}
            for j in range(k + 1, r):
                cj = cand[j]
                nxt[j] = cj[SV[j][cj] @ v == T[k, j]]
            ops[0] += sum(len(c) for c in nxt.values())
            if ops[0] > config.max_nodes:
                raise ResourceLimitError("column extension exceeded the node ceiling")
            if all(len(c) for c in nxt.values()):
                total += rec(k + 1, nxt)
        return total

    return rec(0, {j: np.arange(len(V[j])) for j in range(r)})


def representation_count(S: GramMatrix, T, method: str = "auto",
                         config: LatticeConfig = DEFAULT_CONFIG) -> int:
    """N(S, T) = #{G : G^T S G = T}, counting all sign and order choices.

    ``method`` is ``"columns"``, ``"glue"`` or ``"auto"`` (glue when the block
    model is known).  Singular T are first reduced to their definite part.
    """
    T = _as_target(T)
    P = forms.definite_part(T)
    if len(P) == 0:
        return 1
    if method == "auto":
        method = "glue" if S.model else "columns"
    if method == "glue":
        if not S.model:
            raise ValidationError("glue engine needs a D_n^+ block model")
        return glue.count_blocks(P, S.model)
    if method == "columns":
        return _count_columns(S, P, config)
    raise ValidationError(f"unknown method {method!r}")


# ---------------------------------------------------------------------------
# target sets and tables

def enumerate_targets(g: int, max_diag: int):
    """All even psd g x g matrices with diagonal <= max_diag (Cauchy-Schwarz box)."""
    if max_diag < 0 or max_diag % 2:
        raise ValidationError("max_diag must be a nonnegative even integer")
    return [T for T in forms.enumerate_psd(g, max_diag=max_diag)]


@dataclass
class CountTable:
    """Representation numbers of several lattices over a bounded target set.

    ``targets`` is sorted lexicographically; ``counts[name][i]`` is the exact
    count for ``targets[i]``; ``classes[i]`` is the canonical representative
    index of target i (equal representatives share counts).
    """

    g: int
    targets: np.ndarray
    counts: dict
    reps: list
    classes: np.ndarray

    def difference(self, a: str, b: str):
        return [x - y for x, y in zip(self.counts[a], self.counts[b])]

    def rows(self, a: str, b: str):
        for i, T in enumerate(self.targets):
            na, nb = self.counts[a][i], self.counts[b][i]
            yield [int(x) for x in T.ravel()], na, nb, na - nb

    def to_csv(self, a: str, b: str) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        g = self.g
        w.writerow([f"t{i + 1}{j + 1}" for i in range(g) for j in range(g)]
                   + [f"N_{a}", f"N_{b}", "difference"])
        for flat, na, nb, dv in self.rows(a, b):
            w.writerow(flat + [na, nb, dv])
        return buf.getvalue()

    def to_text(self, a: str, b: str) -> str:
        lines = []
        for flat, na, nb, dv in sorted(self.rows(a, b)):
            lines.append(" ".join(str(x) for x in flat) + f" | {na} {nb} {dv}")
        return "\n".join(lines) + "\n"


def classify_targets(targets, max_diag=None, max_trace=None):
    """Canonical class representative for every target.

    Definite targets are partitioned by bounded orbits; singular ones are
    reduced to their definite part and canonicalized.  Returns
    ``(reps, labels)`` with ``reps`` a list of arrays.
    """
    T = np.asarray(targets, dtype=np.int64)
    N = len(T)
    g = T.shape[-1]
    labels = -np.ones(N, np.int64)
    reps, index = [], {}
    definite = forms.pd_mask(T) if N else np.zeros(0, bool)
    if definite.any():
        part = forms.ClassPartition(T[definite], max_diag=max_diag, max_trace=max_trace)
        for r in part.reps:
            index[r.tobytes()] = len(reps)
            reps.append(r)
        labels[np.nonzero(definite)[0]] = part.labels
    for i in np.nonzero(~definite)[0]:
        C = forms.canonical_form(T[i])
        key = C.tobytes()
        if key not in index:
            index[key] = len(reps)
            reps.append(C)
        labels[i] = index[key]
    return reps, labels


def count_table(lattices: dict, g: int, max_diag: int = None, max_trace: int = None,
                method: str = "auto") -> CountTable:
    """Exact counts for every even psd g x g target within the bound.

    Counts are computed once per GL_g(Z) class.
    """
    if max_diag is None and max_trace is None:
        max_diag = DEFAULT_MAX_DIAG[g]
    targets = forms.enumerate_psd(g, max_diag=max_diag, max_trace=max_trace)
    reps, labels = classify_targets(targets, max_diag=max_diag, max_trace=max_trace)
    counts = {}
    for name, S in lattices.items():
        per_rep = [representation_count(S, R, method=method) for R in reps]
        counts[name] = [per_rep[k] for k in labels]
    return CountTable(g, targets, counts, reps, labels)


# ---------------------------------------------------------------------------
# theta series

def _siegel_parts(tau):
    from .theta import SiegelPoint
    if not isinstance(tau, SiegelPoint):
        tau = SiegelPoint.from_matrix(tau)
    return tau


def _theta3(b: float) -> float:
    """sum_n exp(-b n^2)."""
    n = math.isqrt(int(40 / b)) + 2
    return 1 + 2 * sum(math.exp(-b * k * k) for k in range(1, n))


def _theta_majorant(S: GramMatrix, a: float) -> float:
    """Upper bound for sum_v exp(-a v^T S v).

    With S = L L^T, v^T S v = sum_i d_i (v_i + shift_i)^2 where d_i = L_ii^2
    and shift_i depends only on v_{i+1}, ...  A shifted Gaussian sum is at
    most the unshifted one (its Poisson dual has nonnegative coefficients),
    so summing coordinates in order gives prod_i theta3(a d_i).
    """
    d = np.diag(np.linalg.cholesky(S.entries.astype(float))) ** 2 * (1 - 1e-9)
    return float(np.prod([_theta3(a * di) for di in d]))


def genus_one_counts(S: GramMatrix, max_norm: int):
    """Exact N(S, [[2k]]) for 2k <= max_norm, as a list indexed by k."""
    table = _cached_table(S, int(max_norm))
    return [table.count(2 * k) for k in range(max_norm // 2 + 1)]


def _power_series_power(a, g, K):
    out = [1] + [0] * K
    for _ in range(g):
        out = [sum(out[i] * a[k - i] for i in range(k + 1) if i < len(out) and k - i < len(a))
               for k in range(K + 1)]
    return out


def trace_multiplicities(a, g, K):
    """r_g(2k) = #{G : trace(G^T S G) = 2k} from genus-one counts a[k], k <= K."""
    return _power_series_power(a, g, K)


def theta_tail_bound(S: GramMatrix, g: int, lam: float, cutoff: int, known: int) -> float:
    """Bound for sum over T with trace > cutoff of N(S, T) exp(-pi lam trace T).

    Uses |exp(pi i Tr(T tau))| <= exp(-pi lam Tr T), exact multiplicities
    for traces up to ``known`` and a Cholesky-product majorant beyond it.
    """
    K = known // 2
    a = genus_one_counts(S, 2 * K)
    r = trace_multiplicities(a, g, K)
    X = math.exp(-2 * math.pi * lam)              # weight per unit k = trace / 2
    tail = sum(r[k] * X ** k for k in range(cutoff // 2 + 1, K + 1))
    # beyond K: sum_{k > K} r_k X^k <= X^((1-s)(K+1)) * (sum_v X^(s v^T S v / 2))^g
    beyond = min(X ** ((1 - s) * (K + 1)) * _theta_majorant(S, math.pi * lam * s) ** g
                 for s in np.linspace(0.02, 0.98, 49))
    return tail + beyond


def lattice_theta_value(S: GramMatrix, tau, tol: float = 1e-10,
                        config: LatticeConfig = DEFAULT_CONFIG) -> complex:
    """Genus-g theta series sum_T N(S, T) exp(pi i Tr(T tau)), truncated by trace."""
    tau = _siegel_parts(tau)
    g = tau.g
    if g > forms.MAX_GENUS:
        raise ValidationError("genus must be at most 4")
    lam = tau.min_eig
    if lam < config.min_eig_floor:
        raise ValidationError(f"min eigenvalue {lam:.3g} of Im(tau) below floor")
    # exact multiplicities are only needed up to the cutoff itself; the
    # Cholesky majorant bounds everything beyond it
    cutoff = None
    for c in range(0, config.max_theta_trace + 1, 2):
        try:
            bound = theta_tail_bound(S, g, lam, c, c)
        except ResourceLimitError as exc:
            raise CutoffInfeasibleError(
                f"tol {tol:g} needs traces beyond {c - 2}, where counting exceeds the ceiling") from exc
        if bound < tol:
            cutoff = c
            break
    if cutoff is None:
        raise CutoffInfeasibleError(
            f"tol {tol:g} not reachable with trace <= {config.max_theta_trace}")
    if cutoff == 0:
        return complex(1.0)
    table = count_table({"S": S}, g, max_trace=cutoff)
    M = np.asarray(table.targets, dtype=float)
    ex = np.exp(1j * np.pi * np.einsum("nij,ji->n", M, tau.mat))
    n = np.array(table.counts["S"], dtype=float)
    return complex(np.sum(n * ex))


# ---------------------------------------------------------------------------
# witnesses

def d4_gram():
    return np.array([[2, -1, -1, -1], [-1, 2, 0, 0], [-1, 0, 2, 0], [-1, 0, 0, 2]], np.int64)


def separation_witness(S1: GramMatrix, S2: GramMatrix, max_diag: int = 4, g: int = 4):
    """Minimal-trace class of rank-g forms T (diag <= max_diag) with N(S1,T) != N(S2,T).

    The D4 Gram matrix is checked first.  Returns ``(T, n1, n2, checked)``
    where ``checked`` lists the class representatives examined, or None
    when no witness exists within the bound.
    """
    checked = []
    if g == 4 and max_diag >= 2:
        D4 = d4_gram()
        n1, n2 = representation_count(S1, D4), representation_count(S2, D4)
        checked.append(D4)
        if n1 != n2:
            return D4, n1, n2, checked
    targets = forms.enumerate_psd(g, max_diag=max_diag, positive=True)
    part = forms.ClassPartition(targets, max_diag=max_diag)
    order = sorted(range(len(part.reps)), key=lambda i: forms.form_key(part.reps[i]))
    for i in order:
        R = part.reps[i]
        n1, n2 = representation_count(S1, R), representation_count(S2, R)
        checked.append(R)
        if n1 != n2:
            return R, n1, n2, checked
    return None
