"""Siegel theta functions with characteristics, genus 1 to 4.

    theta[eps; eps'](tau, z) = sum_{m in Z^g} exp(pi i (n^T tau n + 2 n^T (z + eps'/2))),
    n = m + eps/2.

Characteristics have length equal to the genus of the point.  (In the
genus-4 Schottky construction the genus-3 constants carry characteristics of
length 3 and their genus-4 substitutes append one bit.)  The sum is
truncated to the box ||n||_inf <= R, with R from a rigorous Gaussian tail
bound, see :func:`truncation_radius`.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DomainError, ValidationError

#: Requested tolerances below this are raised to it (double precision floor).
TOL_FLOOR = 1e-12
#: Smallest admissible eigenvalue of Im(tau).
MIN_EIG_FLOOR = 0.05
#: Bound on ||Im z||_2 for theta_function.
MAX_IM_Z = 2.0
SYMMETRY_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class SiegelPoint:
    """Point of the Siegel upper half space: complex symmetric g x g, Im positive definite."""

    mat: np.ndarray

    def __post_init__(self):
        M = np.array(self.mat, dtype=complex)
        if M.ndim != 2 or M.shape[0] != M.shape[1] or not 1 <= len(M) <= 4:
            raise ValidationError("tau must be a g x g matrix with 1 <= g <= 4")
        if not np.all(np.isfinite(M)):
            raise ValidationError("tau has non-finite entries")
        if np.max(np.abs(M - M.T)) >= SYMMETRY_TOL:
            raise ValidationError("tau is not symmetric")
        M = (M + M.T) / 2
        try:
            np.linalg.cholesky(M.imag)
        except np.linalg.LinAlgError:
            raise ValidationError("Im(tau) is not positive definite") from None
        M.setflags(write=False)
        object.__setattr__(self, "mat", M)

    @classmethod
    def from_matrix(cls, M):
        return cls(np.asarray(M, dtype=complex))

    @property
    def g(self) -> int:
        return len(self.mat)

    @cached_property
    def min_eig(self) -> float:
        return float(np.linalg.eigvalsh(self.mat.imag)[0])

    @cached_property
    def max_eig(self) -> float:
        return float(np.linalg.eigvalsh(self.mat.imag)[-1])

    def to_json(self) -> dict:
        return {"g": self.g, "re": self.mat.real.tolist(), "im": self.mat.imag.tolist()}

    @classmethod
    def from_json(cls, obj) -> "SiegelPoint":
        try:
            g = int(obj["g"])
            re = np.array(obj["re"], dtype=float)
            im = np.array(obj["im"], dtype=float)
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"malformed SiegelPoint JSON: {exc}") from None
        if re.size != g * g or im.size != g * g:
            raise ValidationError("SiegelPoint JSON arrays do not match g")
        return cls(re.reshape(g, g) + 1j * im.reshape(g, g))

    def __eq__(self, other):
        return isinstance(other, SiegelPoint) and np.array_equal(self.mat, other.mat)

    def __hash__(self):
        return hash(self.mat.tobytes())


def load_point(path) -> SiegelPoint:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, ValueError) as exc:
        raise ValidationError(f"cannot read point file {path}: {exc}") from exc
    return SiegelPoint.from_json(data)


def diag_blocks(*taus) -> SiegelPoint:
    """Block-diagonal point from lower-genus points (or matrices)."""
    mats = [t.mat if isinstance(t, SiegelPoint) else np.atleast_2d(np.asarray(t, complex))
            for t in taus]
    g = sum(len(m) for m in mats)
    M = np.zeros((g, g), complex)
    k = 0
    for m in mats:
        M[k:k + len(m), k:k + len(m)] = m
        k += len(m)
    return SiegelPoint(M)


def random_point(g: int, rng: np.random.Generator, scale: float = 1.5, spread: float = 0.2) -> SiegelPoint:
    """Sample tau with Re symmetric U[-1/2, 1/2] and Im = scale I + symmetric U[-spread, spread].

    Off-diagonal entries of each symmetric part are drawn once, so the
    entries themselves are uniform on the stated intervals.
    """
    while True:
        X = rng.uniform(-0.5, 0.5, (g, g))
        Y = rng.uniform(-spread, spread, (g, g))
        X = np.triu(X) + np.triu(X, 1).T
        Y = np.triu(Y) + np.triu(Y, 1).T + scale * np.eye(g)
        if np.linalg.eigvalsh(Y)[0] > 0:
            return SiegelPoint(X + 1j * Y)


# ---------------------------------------------------------------------------
# characteristics

@dataclass(frozen=True)
class Characteristic:
    eps: tuple
    eps_prime: tuple

    def __post_init__(self):
        e, ep = tuple(int(x) for x in self.eps), tuple(int(x) for x in self.eps_prime)
        if len(e) != len(ep) or not all(x in (0, 1) for x in e + ep):
            raise ValidationError("characteristic entries must be bits of equal length")
        object.__setattr__(self, "eps", e)
        object.__setattr__(self, "eps_prime", ep)

    @property
    def h(self) -> int:
        return len(self.eps)

    @property
    def parity(self) -> int:
        """0 for even, 1 for odd."""
        return sum(a * b for a, b in zip(self.eps, self.eps_prime)) % 2

    def extend(self, e: int, ep: int) -> "Characteristic":
        return Characteristic(self.eps + (e,), self.eps_prime + (ep,))

    def __str__(self):
        return "[" + "".join(map(str, self.eps)) + ";" + "".join(map(str, self.eps_prime)) + "]"


def parity(c: Characteristic) -> str:
    return "odd" if c.parity else "even"


def all_characteristics(h: int):
    bits = list(itertools.product((0, 1), repeat=h))
    return [Characteristic(e, ep) for e in bits for ep in bits]


def even_characteristics(h: int):
    """Even characteristics of length h, eps-major lexicographic order."""
    if not 1 <= h <= 4:
        raise ValidationError("h must be in 1..4")
    return [c for c in all_characteristics(h) if c.parity == 0]


# ---------------------------------------------------------------------------
# truncation

def _geometric_tail(a: float, lam: float) -> float:
    """sum_{k >= 0} exp(-pi lam (a + k)^2) <= exp(-pi lam a^2) / (1 - exp(-2 pi lam a))."""
    return math.exp(-math.pi * lam * a * a) / (-math.expm1(-2 * math.pi * lam * a))


def tail_bound(R: int, lam: float, g: int) -> float:
    """Bound on the sum of exp(-pi lam |n|^2) over n in Z^g + eps/2 with ||n||_inf > R."""
    one_tail = 2 * _geometric_tail(R + 0.5, lam)
    full = 1 + 2 * _geometric_tail(0.5, lam)
    return g * one_tail * full ** (g - 1)


def truncation_radius(im_tau, tol: float, floor: float = MIN_EIG_FLOOR) -> int:
    """Smallest R with tail_bound(R, lambda_min(Im tau), g) < tol."""
    Y = np.atleast_2d(np.asarray(im_tau, dtype=float))
    if tol <= 0:
        raise ValidationError("tol must be positive")
    lam = float(np.linalg.eigvalsh(Y)[0])
    if lam < floor:
        raise ValidationError(f"min eigenvalue {lam:.3g} of Im(tau) below floor {floor}")
    return _radius(lam, len(Y), tol)


def _radius(lam, g, tol):
    R = 0
    while tail_bound(R, lam, g) >= tol:
        R += 1
        if R > 200:
            raise ValidationError("truncation radius exceeds 200")
    return R


# ---------------------------------------------------------------------------
# evaluation

def _box(g, R, eps):
    r = np.arange(-R, R + 1, dtype=float)
    grids = np.meshgrid(*([r] * g), indexing="ij")
    M = np.stack([x.ravel() for x in grids], axis=1)
    return M + np.asarray(eps, float) / 2


def _as_point(tau) -> SiegelPoint:
    return tau if isinstance(tau, SiegelPoint) else SiegelPoint.from_matrix(tau)


def theta_function(c: Characteristic, tau, z=None, tol: float = 1e-12) -> complex:
    """theta[eps; eps'](tau, z), absolute error below max(tol, TOL_FLOOR)."""
    tau = _as_point(tau)
    g = tau.g
    if c.h != g:
        raise ValidationError("characteristic length must equal the genus")
    z = np.zeros(g, complex) if z is None else np.asarray(z, dtype=complex).reshape(-1)
    if len(z) != g:
        raise ValidationError("z has the wrong dimension")
    tol = max(tol, TOL_FLOOR)
    y = z.imag
    ny = float(np.linalg.norm(y))
    if ny > MAX_IM_Z:
        raise DomainError(f"|Im z| = {ny:.3g} exceeds supported bound {MAX_IM_Z}")
    lam = tau.min_eig
    if lam < MIN_EIG_FLOOR:
        raise ValidationError(f"min eigenvalue {lam:.3g} of Im(tau) below floor")
    if ny > 0:
        # n^T Y n + 2 n^T y >= lam |n|^2 / 2 - 2 |y|^2 / lam
        lam_eff, pref = lam / 2, math.exp(2 * math.pi * ny * ny / lam)
    else:
        lam_eff, pref = lam, 1.0
    R = _radius(lam_eff, g, tol / pref)
    n = _box(g, R, c.eps)
    q = np.einsum("ni,ij,nj->n", n, tau.mat, n)
    lin = 2 * n @ (z + np.asarray(c.eps_prime, float) / 2)
    return complex(np.exp(1j * np.pi * (q + lin)).sum())


def theta_constant(c: Characteristic, tau, tol: float = 1e-12) -> complex:
    return theta_function(c, tau, None, tol)


def theta_constants(tau, chars, tol: float = 1e-12):
    """Vector of theta constants for several characteristics sharing one box per eps."""
    tau = _as_point(tau)
    g = tau.g
    tol = max(tol, TOL_FLOOR)
    R = truncation_radius(tau.mat.imag, tol)
    out = np.zeros(len(chars), complex)
    by_eps = {}
    for i, c in enumerate(chars):
        by_eps.setdefault(c.eps, []).append(i)
    for eps, idx in by_eps.items():
        n = _box(g, R, eps)
        base = np.exp(1j * np.pi * np.einsum("ni,ij,nj->n", n, tau.mat, n))
        for i in idx:
            ep = np.asarray(chars[i].eps_prime, float)
            out[i] = np.sum(base * np.exp(1j * np.pi * (n @ ep)))
    return out


def theta_constants_mp(tau, chars, dps: int):
    """High-precision theta constants (mpmath) for characteristics of length g.

    Returns a list of ``mpmath.mpc``.  For each eps the Gaussian weights
    exp(pi i n^T tau n) are computed once and grouped by m mod 2, so every
    eps' costs only 2^g signed additions.
    """
    import mpmath as mp

    tau = _as_point(tau)
    g = tau.g
    with mp.workdps(dps):
        R = _radius(tau.min_eig, g, 10.0 ** (-dps - 5))
        t = [[mp.mpc(tau.mat[i, j].real, tau.mat[i, j].imag) for j in range(g)] for i in range(g)]
        results = [None] * len(chars)
        by_eps = {}
        for i, c in enumerate(chars):
            by_eps.setdefault(c.eps, []).append(i)
        for eps, idx in by_eps.items():
            half = [mp.mpf(e) / 2 for e in eps]
            sums = {}
            for m in itertools.product(range(-R, R + 1), repeat=g):
                n = [m[i] + half[i] for i in range(g)]
                q = mp.fsum(n[i] * n[j] * t[i][j] * (1 if i == j else 2)
                            for i in range(g) for j in range(i, g))
                key = tuple(x % 2 for x in m)
                sums[key] = sums.get(key, mp.mpc(0)) + mp.expjpi(q)
            for i in idx:
                ep = chars[i].eps_prime
                # exp(pi i n.eps') = exp(pi i m.eps') exp(pi i eps.eps' / 2)
                phase = mp.expjpi(mp.mpf(sum(a * b for a, b in zip(eps, ep))) / 2)
                acc = mp.mpc(0)
                for key, val in sums.items():
                    acc += -val if sum(a * b for a, b in zip(key, ep)) % 2 else val
                results[i] = phase * acc
        return [+r for r in results]
