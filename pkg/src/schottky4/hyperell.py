"""Period matrices of hyperelliptic curves y^2 = prod (x - b_i) with real branch points.

Homology basis (b_1 < ... < b_{2g+2}):

* a_i encircles [b_{2i-1}, b_{2i}],
* b_i encircles [b_{2i}, b_{2g+1}].

Each cycle integral is twice a sum of interval integrals
I_j^k = int_{b_j}^{b_{j+1}} x^k / y(x + i0) dx on the upper sheet.  Along the
b-cycle the intervals inside branch cuts [b_{2l-1}, b_{2l}] are traversed
once on each sheet and cancel, so only the gaps [b_{2l}, b_{2l+1}],
l = i..g, contribute.

On (b_j, b_{j+1}) the boundary value is y(x + i0) = i^(#{b > x}) |f(x)|^(1/2).
With x = c + h t the integrand is w(t) / sqrt(1 - t^2) times a smooth
function, so Gauss-Chebyshev quadrature of the first kind integrates the
endpoint singularities exactly:

    I = (pi / n) sum_k x_k^k / (phase * sqrt|prod_{other} (x_k - b_i)|),
    t_k = cos((2k - 1) pi / (2n)).

tau = A^{-1} B, where A[:, i] and B[:, i] hold the periods of
x^k dx / y, k = 0..g-1, along a_i and b_i.  For real branch points tau is
purely imaginary.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, ValidationError
from .theta import SiegelPoint

#: Minimum gap between consecutive branch points, relative to their spread.
CONDITIONING_FLOOR = 1e-9
#: Quadrature doubling must change period entries by less than this (relative).
CONVERGENCE_TOL = 1e-9
RIEMANN_TOL = 1e-8
MIN_QUAD_ORDER = 16
MAX_QUAD_ORDER = 2 ** 16


@dataclass(frozen=True, eq=False)
class HyperellipticCurve:
    branch: np.ndarray

    @property
    def g(self) -> int:
        return (len(self.branch) - 2) // 2

    def to_json(self) -> dict:
        return {"branch": self.branch.tolist()}


def validate_curve(branch) -> HyperellipticCurve:
    """Sort and check branch points: distinct, even count >= 4, well separated."""
    try:
        b = np.sort(np.asarray(branch, dtype=float).ravel())
    except (TypeError, ValueError):
        raise ValidationError("branch points must be real numbers") from None
    if not np.all(np.isfinite(b)):
        raise ValidationError("branch points must be finite")
    if len(b) % 2:
        raise ValidationError(f"need an even number of branch points, got {len(b)}")
    if len(b) < 4:
        raise ValidationError("need at least 4 branch points (genus >= 1)")
    gaps = np.diff(b)
    if np.any(gaps == 0):
        raise ValidationError("duplicate branch points")
    if gaps.min() < CONDITIONING_FLOOR * (b[-1] - b[0]):
        raise ValidationError("branch points too close: curve is ill-conditioned")
    b.setflags(write=False)
    return HyperellipticCurve(b)


def load_curve(path) -> HyperellipticCurve:
    with open(path) as fh:
        obj = json.load(fh)
    if not isinstance(obj, dict) or "branch" not in obj:
        raise ValidationError("curve JSON must be an object with a 'branch' list")
    return validate_curve(obj["branch"])


def interval_integrals(curve: HyperellipticCurve, n: int):
    """I[j, k] = int_{b_j}^{b_{j+1}} x^k / y(x + i0) dx, j = 0..2g, k = 0..g-1."""
    b = curve.branch
    N = len(b)
    g = curve.g
    t = np.cos((2 * np.arange(1, n + 1) - 1) * np.pi / (2 * n))
    out = np.zeros((N - 1, g), complex)
    for j in range(N - 1):
        lo, hi = b[j], b[j + 1]
        x = (lo + hi) / 2 + (hi - lo) / 2 * t
        others = np.delete(b, [j, j + 1])
        h = 1.0 / np.sqrt(np.abs(np.prod(x[:, None] - others[None, :], axis=1)))
        phase = 1j ** (N - j - 1)                      # branch points to the right of x
        powers = x[None, :] ** np.arange(g)[:, None]   # (g, n)
        out[j] = np.pi / n * (powers @ h) / phase
    return out


@dataclass(frozen=True)
class PeriodData:
    A: np.ndarray
    B: np.ndarray
    quad_order: int
    drift: float          # max relative change of A, B between order n and 2n

    @property
    def tau(self):
        return np.linalg.solve(self.A, self.B)


def _assemble(curve, n):
    g = curve.g
    I = interval_integrals(curve, n)
    A = np.zeros((g, g), complex)
    B = np.zeros((g, g), complex)
    for i in range(g):
        A[:, i] = 2 * I[2 * i]
        B[:, i] = 2 * I[2 * i + 1:2 * g:2].sum(axis=0)
    return A, B


def periods(curve: HyperellipticCurve, quad_order: int = 256) -> PeriodData:
    """Period matrices A, B; fails unless doubling the order changes them by < 1e-9."""
    if quad_order < MIN_QUAD_ORDER:
        raise ValidationError(f"quad_order must be at least {MIN_QUAD_ORDER}")
    A1, B1 = _assemble(curve, quad_order)
    A2, B2 = _assemble(curve, 2 * quad_order)
    scale = max(np.abs(A2).max(), np.abs(B2).max())
    drift = max(np.abs(A2 - A1).max(), np.abs(B2 - B1).max()) / scale
    if drift >= CONVERGENCE_TOL:
        raise ConvergenceError(
            f"quadrature order {quad_order} not converged (relative drift {drift:.2e})")
    return PeriodData(A2, B2, 2 * quad_order, float(drift))


def converged_periods(curve: HyperellipticCurve, start: int = 64) -> PeriodData:
    """Double the quadrature order from ``start`` until the convergence gate passes."""
    n = max(start, MIN_QUAD_ORDER)
    while True:
        try:
            return periods(curve, n)
        except ConvergenceError:
            n *= 2
            if n > MAX_QUAD_ORDER:
                raise


def riemann_check(tau):
    """(symmetry residual, min eigenvalue of Im tau) for a period matrix."""
    tau = np.asarray(tau)
    return float(np.abs(tau - tau.T).max()), float(np.linalg.eigvalsh((tau.imag + tau.imag.T) / 2)[0])


def jacobian_point(curve: HyperellipticCurve, quad_order: int | None = None) -> SiegelPoint:
    """tau = A^{-1} B, symmetrized, after checking the Riemann relations."""
    data = periods(curve, quad_order) if quad_order else converged_periods(curve)
    return point_from_periods(data)


def point_from_periods(data: PeriodData) -> SiegelPoint:
    """Validated, symmetrized SiegelPoint from period data."""
    tau = data.tau
    sym, lam = riemann_check(tau)
    if sym >= RIEMANN_TOL or lam <= 0:
        raise ConvergenceError(
            f"Riemann relations violated: symmetry residual {sym:.2e}, min eig Im {lam:.3g}")
    return SiegelPoint((tau + tau.T) / 2)


def agm(a: float, b: float) -> float:
    """Arithmetic-geometric mean."""
    for _ in range(100):
        if abs(a - b) <= 4e-16 * abs(a):
            break
        a, b = (a + b) / 2, np.sqrt(a * b)
    return float(a)


def elliptic_tau_agm(branch) -> complex:
    """tau of y^2 = (x-b1)(x-b2)(x-b3)(x-b4) from the arithmetic-geometric mean.

    With k^2 = (b2-b1)(b4-b3) / ((b3-b1)(b4-b2)) and k'^2 = 1 - k^2,
    tau = i K(k') / K(k), and K(k) = pi / (2 AGM(1, k')) gives
    tau = i AGM(1, k') / AGM(1, k).
    """
    b = np.sort(np.asarray(branch, dtype=float))
    k2 = (b[1] - b[0]) * (b[3] - b[2]) / ((b[2] - b[0]) * (b[3] - b[1]))
    return 1j * agm(1.0, np.sqrt(1 - k2)) / agm(1.0, np.sqrt(k2))


def pinched_branch_points(centers, widths):
    """Branch points c_i -+ w_i: pairs pinched around the given centers."""
    c = np.asarray(centers, float)
    w = np.asarray(widths, float) * np.ones_like(c)
    return np.sort(np.concatenate([c - w, c + w]))
