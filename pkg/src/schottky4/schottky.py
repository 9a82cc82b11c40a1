"""The weight-8 Schottky form in genus 4, computed two ways.

* ``F_lattice``: the difference of the genus-4 theta series of E8+E8 and
  D16^+, summed from exact integer Fourier coefficients
  c(T) = N(E8+E8, T) - N(D16^+, T).
* ``F_theta``: the genus-3 relation r1 - r2 - r3 = 0 among products of
  theta constants, squared out to a polynomial in the squares theta^2 and
  then evaluated with every theta^2[eps; eps'] replaced by the genus-4
  product theta[eps 0; eps' 0] theta[eps 0; eps' 1].

Both agree up to one constant factor; :func:`proportionality` measures it.

Tolerances for ``F_lattice`` and the indicator are relative to the scale
sum_T |c(T)| exp(-pi Tr(T Im tau)), because F itself is tiny (around
1e-25 at Im tau = 3 I) while its Fourier terms do not cancel termwise.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources

import numpy as np

from . import forms
from .errors import CutoffInfeasibleError, DegenerateError, ValidationError
from .lattice import (classify_targets, gram_d16_plus, gram_e8_e8, representation_count,
                      trace_multiplicities)
from .theta import (Characteristic, SiegelPoint, even_characteristics, theta_constants,
                    theta_constants_mp)

# Rows of the genus-3 relation: each entry is (eps, eps') of one theta constant.
RELATION_CHARACTERISTICS = (
    (((0, 0, 0), (0, 0, 0)), ((0, 0, 0), (1, 0, 0)), ((0, 0, 0), (0, 1, 0)), ((0, 0, 0), (1, 1, 0))),
    (((0, 0, 1), (0, 0, 0)), ((0, 0, 1), (1, 0, 0)), ((0, 0, 1), (0, 1, 0)), ((0, 0, 1), (1, 1, 0))),
    (((0, 0, 0), (0, 0, 1)), ((0, 0, 0), (1, 0, 1)), ((0, 0, 0), (0, 1, 1)), ((0, 0, 0), (1, 1, 1))),
)

LATTICE_NAMES = ("E8+E8", "D16+")
DEFAULT_TOL = 1e-8


def relation_characteristics():
    return [[Characteristic(e, ep) for e, ep in row] for row in RELATION_CHARACTERISTICS]


def _point(tau, g=None) -> SiegelPoint:
    tau = tau if isinstance(tau, SiegelPoint) else SiegelPoint.from_matrix(tau)
    if g is not None and tau.g != g:
        raise ValidationError(f"expected a genus-{g} point, got genus {tau.g}")
    return tau


# ---------------------------------------------------------------------------
# genus-3 relation

@dataclass(frozen=True)
class ThetaRelationTerms:
    r1: complex
    r2: complex
    r3: complex

    @property
    def residual(self) -> float:
        """|r1 - r2 - r3| / (|r1| + |r2| + |r3|)."""
        den = abs(self.r1) + abs(self.r2) + abs(self.r3)
        return abs(self.r1 - self.r2 - self.r3) / den if den else 0.0


def relation_terms(tau, tol: float = 1e-12) -> ThetaRelationTerms:
    """The three quadruple products of genus-3 theta constants."""
    tau = _point(tau, 3)
    rows = relation_characteristics()
    flat = [c for row in rows for c in row]
    vals = theta_constants(tau, flat, tol)
    r = [complex(np.prod(vals[4 * i:4 * i + 4])) for i in range(3)]
    return ThetaRelationTerms(*r)


def square_relation_value(r1, r2, r3):
    """r1^4 + r2^4 + r3^4 - 2 r1^2 r2^2 - 2 r1^2 r3^2 - 2 r2^2 r3^2."""
    return relation_from_squares(r1 * r1, r2 * r2, r3 * r3)


def relation_from_squares(s1, s2, s3):
    """The square relation written in s_i = r_i^2."""
    return s1 * s1 + s2 * s2 + s3 * s3 - 2 * s1 * s2 - 2 * s1 * s3 - 2 * s2 * s3


def sq_coordinates(tau, tol: float = 1e-12):
    """Squared even theta constants (36 of them, eps-major order), scaled so max |x| = 1."""
    tau = _point(tau, 3)
    chars = even_characteristics(3)
    v = theta_constants(tau, chars, tol) ** 2
    top = np.max(np.abs(v))
    if top < tol:
        raise DegenerateError("all squared theta constants vanish numerically")
    return v / v[np.argmax(np.abs(v))]


def relation_on_coordinates(x):
    """Square relation evaluated on a vector of squared even constants (eps-major order)."""
    chars = even_characteristics(3)
    pos = {(c.eps, c.eps_prime): i for i, c in enumerate(chars)}
    s = [np.prod([x[pos[c]] for c in row]) for row in RELATION_CHARACTERISTICS]
    return relation_from_squares(*s)


# ---------------------------------------------------------------------------
# Fourier coefficients

@dataclass
class FourierTable:
    """Class-level Fourier coefficients of F for genus-4 forms of trace <= max_trace.

    One entry per GL_4(Z)-class of even psd forms (singular ones included).
    """

    max_trace: int
    reps: list
    n_e8e8: list
    n_d16: list
    sizes: list = field(default_factory=list)

    @property
    def diffs(self):
        return [a - b for a, b in zip(self.n_e8e8, self.n_d16)]

    @property
    def ranks(self):
        return [forms.exact_rank(R) for R in self.reps]

    def to_json(self) -> dict:
        return {
            "max_trace": self.max_trace,
            "lattices": list(LATTICE_NAMES),
            "classes": [
                {"rep": np.asarray(R).tolist(), "rank": int(rk), "members": int(k),
                 "n_e8e8": int(a), "n_d16_plus": int(b), "c": int(a - b)}
                for R, rk, k, a, b in zip(self.reps, self.ranks, self.sizes, self.n_e8e8, self.n_d16)
            ],
        }

    @classmethod
    def from_json(cls, obj) -> "FourierTable":
        cl = obj["classes"]
        return cls(int(obj["max_trace"]),
                   [np.array(c["rep"], np.int64) for c in cl],
                   [int(c["n_e8e8"]) for c in cl],
                   [int(c["n_d16_plus"]) for c in cl],
                   [int(c["members"]) for c in cl])


def build_fourier_table(max_trace: int, progress=None) -> FourierTable:
    """Count both lattices on every class of even psd 4 x 4 forms with trace <= max_trace."""
    targets = forms.enumerate_psd(4, max_trace=max_trace)
    reps, labels = classify_targets(targets, max_trace=max_trace)
    order = sorted(range(len(reps)), key=lambda i: forms.form_key(reps[i]))
    sizes = np.bincount(labels, minlength=len(reps))
    S1, S2 = gram_e8_e8(), gram_d16_plus()
    n1, n2 = [], []
    for k, i in enumerate(order):
        n1.append(representation_count(S1, reps[i]))
        n2.append(representation_count(S2, reps[i]))
        if progress:
            progress(k + 1, len(order), reps[i], n1[-1] - n2[-1])
    return FourierTable(max_trace, [reps[i] for i in order], n1, n2,
                        [int(sizes[i]) for i in order])


@lru_cache(maxsize=1)
def load_fourier_table() -> FourierTable:
    """The shipped coefficient table (regenerate with scripts/build_fourier_table.py)."""
    text = resources.files("schottky4.data").joinpath("fourier_trace12.json").read_text()
    return FourierTable.from_json(json.loads(text))


@dataclass
class SchottkyCoefficients:
    """c(T) = N(E8+E8, T) - N(D16^+, T) for every target T of a bounded set."""

    max_diag: int
    targets: np.ndarray
    diffs: list
    n_e8e8: list
    n_d16: list
    ranks: list

    def nonzero(self):
        return [(T, c) for T, c in zip(self.targets, self.diffs) if c]


def schottky_coefficients(max_diag: int = 4, max_ceiling: int = 4) -> SchottkyCoefficients:
    """Exact Fourier coefficients of F over all even psd 4 x 4 forms with diagonal <= max_diag."""
    if max_diag < 0 or max_diag % 2:
        raise ValidationError("max_diag must be a nonnegative even integer")
    if max_diag > max_ceiling:
        raise ValidationError(f"max_diag {max_diag} above ceiling {max_ceiling}")
    targets = forms.enumerate_psd(4, max_diag=max_diag)
    reps, labels = classify_targets(targets, max_diag=max_diag)
    S1, S2 = gram_e8_e8(), gram_d16_plus()
    a = [representation_count(S1, R) for R in reps]
    b = [representation_count(S2, R) for R in reps]
    rk = [forms.exact_rank(R) for R in reps]
    return SchottkyCoefficients(max_diag, targets,
                                [a[k] - b[k] for k in labels],
                                [a[k] for k in labels], [b[k] for k in labels],
                                [rk[k] for k in labels])


# ---------------------------------------------------------------------------
# F from the lattice side

def e4_coefficients(K: int):
    """Coefficients of E4 = theta_{E8}: 1, 240 sigma_3(n)."""
    out = [1]
    for n in range(1, K + 1):
        out.append(240 * sum(d ** 3 for d in range(1, n + 1) if n % d == 0))
    return out


@lru_cache(maxsize=8)
def _rank16_multiplicities(K: int):
    # genus-one theta of either rank-16 lattice is E4^2; four columns give E4^8
    return trace_multiplicities(trace_multiplicities(e4_coefficients(K), 2, K), 4, K)


def fourier_tail_bound(lam: float, cutoff: int, K: int = 120) -> float:
    """Bound for sum over T with Tr T > cutoff of |c(T)| exp(-pi lam Tr T).

    |c(T)| <= N(E8+E8, T) + N(D16^+, T), whose sum over Tr T = 2k is twice
    the q^k coefficient of E4^8.  Exact coefficients are used up to k = K;
    beyond that, with X = exp(-2 pi lam) and Y = sqrt(X),
    sum_{k>K} b_k X^k <= (X/Y)^(K+1) E4(Y)^8, and E4(Y) <= 1 + 289 Li_{-3}(Y)
    since 240 sigma_3(n) <= 240 zeta(3) n^3 < 289 n^3.
    """
    b = _rank16_multiplicities(K)
    X = math.exp(-2 * math.pi * lam)
    tail = sum(b[k] * X ** k for k in range(cutoff // 2 + 1, K + 1))
    Y = math.sqrt(X)
    li3 = Y * (1 + 4 * Y + Y * Y) / (1 - Y) ** 4
    tail += (X / Y) ** (K + 1) * (1 + 289 * li3) ** 8
    return 2 * tail


@lru_cache(maxsize=1)
def _fourier_terms():
    """Member-level arrays (T, c, trace) of the shipped table, nonzero c only."""
    table = load_fourier_table()
    # singular classes have c = 0 (the table records and the tests check this)
    coeff = {R.tobytes(): c for R, c, rk in zip(table.reps, table.diffs, table.ranks) if rk == 4}
    targets = forms.enumerate_psd(4, max_trace=table.max_trace, positive=True)
    part = forms.ClassPartition(targets, max_trace=table.max_trace)
    c_rep = []
    for R in part.reps:
        key = R.tobytes()
        if key not in coeff:
            raise ValidationError("shipped table does not cover every class")
        c_rep.append(coeff[key])
    c = np.array([c_rep[k] for k in part.labels], dtype=object)
    keep = c != 0
    T = targets[keep]
    return T.astype(float), c[keep].astype(float), np.trace(T, axis1=1, axis2=2), table.max_trace


@dataclass(frozen=True)
class LatticeEvaluation:
    value: complex
    scale: float          # sum |c(T)| exp(-pi Tr(T Im tau)) over retained terms
    tail: float           # bound on the discarded terms
    cutoff: int           # largest trace retained


def evaluate_lattice(tau, tol: float = DEFAULT_TOL) -> LatticeEvaluation:
    """F_lattice with its scale and tail bound; tail <= tol * scale."""
    tau = _point(tau, 4)
    T, c, tr, top = _fourier_terms()
    lam = tau.min_eig
    ex = np.einsum("nij,ji->n", T, tau.mat)
    mag = np.abs(c) * np.exp(-np.pi * ex.imag)
    for cutoff in range(8, top + 1, 2):
        sel = tr <= cutoff
        scale = float(mag[sel].sum())
        tail = fourier_tail_bound(lam, cutoff)
        if tail <= tol * scale:
            val = complex(np.sum(c[sel] * np.exp(1j * np.pi * ex[sel])))
            return LatticeEvaluation(val, scale, tail, cutoff)
    raise CutoffInfeasibleError(
        f"trace cutoff {top} gives tail/scale {tail / scale:.3g} > tol {tol:g} "
        f"(min eigenvalue of Im tau {lam:.3g})")


def F_lattice(tau, tol: float = DEFAULT_TOL) -> complex:
    """F(tau) = theta_{E8+E8}(tau) - theta_{D16+}(tau) in genus 4."""
    return evaluate_lattice(tau, tol).value


def schottky_indicator(tau, tol: float = DEFAULT_TOL) -> float:
    """|F_lattice(tau)| / sum_T |c(T)| exp(-pi Tr(T Im tau))."""
    ev = evaluate_lattice(tau, tol)
    return abs(ev.value) / ev.scale


# ---------------------------------------------------------------------------
# F from theta constants

def substitution_characteristics():
    """Genus-4 characteristic pairs replacing each theta^2 of the relation rows."""
    return [[(c.extend(0, 0), c.extend(0, 1)) for c in row] for row in relation_characteristics()]


def theta_precision(tau, tol: float) -> int:
    """Decimal digits for F_theta: F is about exp(-8 pi lambda_max) times its terms."""
    tau = _point(tau)
    lost = 8 * math.pi * tau.max_eig / math.log(10)
    return int(math.ceil(lost + math.log10(1 / tol) + 12))


def theta_products(tau, tol: float = DEFAULT_TOL, dps: int | None = None):
    """(R1, R2, R3) as mpmath numbers, R_i the substituted square of r_i."""
    import mpmath as mp

    tau = _point(tau, 4)
    dps = dps or theta_precision(tau, tol)
    rows = substitution_characteristics()
    flat = [c for row in rows for pair in row for c in pair]
    vals = theta_constants_mp(tau, flat, dps)
    with mp.workdps(dps):
        R = []
        for i in range(3):
            p = mp.mpc(1)
            for v in vals[8 * i:8 * i + 8]:
                p *= v
            R.append(p)
    return R, dps


def F_theta(tau, tol: float = DEFAULT_TOL, dps: int | None = None) -> complex:
    """Square relation evaluated on the genus-4 substitutes of the squared constants.

    Evaluated in extended precision: at well-conditioned points the value is
    many orders of magnitude below the individual products.
    """
    import mpmath as mp

    (R1, R2, R3), dps = theta_products(tau, tol, dps)
    with mp.workdps(dps):
        return complex(relation_from_squares(R1, R2, R3))


@dataclass(frozen=True)
class ProportionalityResult:
    constant: complex
    max_rel_deviation: float
    used: int
    ratios: tuple


def proportionality(points, tol: float = DEFAULT_TOL, noise_floor: float = 1e-6) -> ProportionalityResult:
    """Single constant k with F_theta = k F_lattice, fitted over generic points.

    Points whose indicator is below ``noise_floor`` are skipped.  The fit
    minimizes sum_k |F_theta/F_lattice - k|^2, i.e. least squares after
    scaling each equation by 1/|F_lattice|.
    """
    pts = [_point(p, 4) for p in points]
    if not pts:
        raise ValidationError("need at least one point")
    ratios, lat, th = [], [], []
    for p in pts:
        ev = evaluate_lattice(p, tol)
        if abs(ev.value) / ev.scale < noise_floor:
            continue
        ft = F_theta(p, tol)
        lat.append(ev.value)
        th.append(ft)
        ratios.append(ft / ev.value)
    if not ratios:
        raise DegenerateError("every point is numerically on the Schottky locus")
    k = complex(np.mean(ratios))
    dev = max(abs(t - k * l) / abs(k * l) for t, l in zip(th, lat)) if k else math.inf
    return ProportionalityResult(k, float(dev), len(ratios), tuple(ratios))
