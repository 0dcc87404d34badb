"""Closed-form finite-size outage probability for the Jacobi channel.

For integer channel counts the outage probability has an exact finite
expression: expanding the binomials (x-1)^{|Nt-Nr|} and ((1+rho)-x)^{N0}
and the Vandermonde-squared interaction term turns P_out into a triple
sum over two multi-indices (k, n) and permutations sigma, with

    1 - P_out(r) = A' * sum_{k,n} prod_j c_{k_j,n_j}
                      * sum_sigma sgn(sigma)
                      * sum_{l >= l(r)} (-1)^{l+Nt} d_l(s) F(Nt*r - l*log(1+rho), s),

    s_j  = j + sigma_j - 1 + k_j + N0 - n_j            (always >= 1)
    d_l  = e_l((1+rho)^{s_1}, ..., (1+rho)^{s_Nt})
    A'   = Nt! / (Z * rho^{Nt^2 + (|Nt-Nr|+N0) Nt})

and F(z, s) the inverse Fourier transform of 1/((eps-ip) prod(s_j-ip)),
which for z < 0 is a residue sum; only l with Nt*r < l*log(1+rho)
contribute.  Z is the Selberg normalization of the joint eigenvalue law.

Two conventions here are pinned by independent oracles rather than by
transcription (see the tests): the residue sum enters F with a minus
sign,

    F(z, s) = prod_j 1/s_j  -  sum_j e^{s_j z} / (s_j prod_{k != j} (s_k - s_j)),

which is what reproduces P_out = (e^r-1)/rho for the single-channel flat
law, and the confluent (repeated s_j) determinant uses polynomial rows
x^0 .. x^{Nt-2} alongside e^{xz}/x, which is what matches the limit of
the distinct-s formula.

The sum is violently alternating, so every interior operation runs in
mpmath extended precision (default 256-bit significand) and is rounded
to binary64 only at the end.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

from mpmath import mp, mpf, matrix as mp_matrix, det as mp_det

from .ensemble import ChannelDims, SnrParam
from .montecarlo import OutageEstimate
from .specfun import elementary_symmetric

__all__ = [
    "ExactConfig",
    "TermBudgetError",
    "DensityEstimate",
    "log_selberg_z",
    "c_coefficient",
    "f_residue",
    "outage_exact",
    "outage_density_exact",
]

_EXACT_TOL = 1e-9  # guaranteed accuracy of the rounded result
_CONSISTENCY_SLACK = 1e-6  # |P| may not exceed [0,1] by more than this


class TermBudgetError(ValueError):
    """The requested configuration exceeds the exact solver's caps."""


@dataclass(frozen=True)
class ExactConfig:
    """Exact-solver configuration and complexity caps.

    ``precision_bits`` is the working significand of the interior sums.
    The term count (|Nt-Nr|+1)^Nt * (N0+1)^Nt * Nt! must stay within
    ``term_budget``; beyond a few channels the asymptotic solver is the
    right tool anyway.
    """

    dims: ChannelDims
    snr: SnrParam
    precision_bits: int = 256
    max_nt: int = 5
    term_budget: int = 10**8

    def __post_init__(self):
        if self.precision_bits < 128:
            raise ValueError("precision_bits must be >= 128")

    def term_count(self) -> int:
        d = self.dims
        dn = d.Nr - d.Nt
        return (dn + 1) ** d.Nt * (d.N0 + 1) ** d.Nt * math.factorial(d.Nt)

    def check_caps(self):
        if self.dims.Nt > self.max_nt:
            raise TermBudgetError(
                f"Nt={self.dims.Nt} exceeds the exact-solver cap max_nt={self.max_nt}"
            )
        count = self.term_count()
        if count > self.term_budget:
            raise TermBudgetError(
                f"term count {count} exceeds term_budget={self.term_budget}"
            )


class DensityEstimate(NamedTuple):
    value: float
    error: float


def _selberg_z_fraction(dims: ChannelDims) -> Fraction:
    """Exact Selberg normalization of the joint eigenvalue density.

    Z = prod_{k=0}^{Nt-1} (Nr-Nt+k)! (N0+k)! (k+1)! / (Nr+N0+k)!
    (all integer factorials, so the value is an exact rational).
    """
    num = 1
    den = 1
    for k in range(dims.Nt):
        num *= (
            math.factorial(dims.Nr - dims.Nt + k)
            * math.factorial(dims.N0 + k)
            * math.factorial(k + 1)
        )
        den *= math.factorial(dims.Nr + dims.N0 + k)
    return Fraction(num, den)


def log_selberg_z(dims: ChannelDims) -> float:
    """log Z for the joint eigenvalue density, via exact integer factorials."""
    z = _selberg_z_fraction(dims)
    with mp.workprec(128):
        return float(mp.log(mpf(z.numerator) / mpf(z.denominator)))


def c_coefficient(k: int, n: int, dims: ChannelDims, snr: SnrParam):
    """Binomial-expansion coefficient c_{k,n} (extended precision).

    c_{k,n} = C(|Nt-Nr|, k) C(N0, n) (-1)^{|Nt-Nr|-k+N0-n} (1+rho)^n.
    """
    dn = dims.Nr - dims.Nt
    if not (0 <= k <= dn):
        raise ValueError(f"k must be in [0, {dn}], got {k}")
    if not (0 <= n <= dims.N0):
        raise ValueError(f"n must be in [0, {dims.N0}], got {n}")
    sign = -1 if (dn - k + dims.N0 - n) % 2 else 1
    return sign * math.comb(dn, k) * math.comb(dims.N0, n) * (1 + mpf(snr.rho)) ** n


def _cluster(s: Sequence, tol) -> list[tuple]:
    """Group sorted values into (value, multiplicity) clusters."""
    ordered = sorted(s)
    clusters: list[list] = [[ordered[0], 1]]
    for v in ordered[1:]:
        if v - clusters[-1][0] <= tol:
            clusters[-1][1] += 1
        else:
            clusters.append([v, 1])
    return [tuple(c) for c in clusters]


def _g_derivative(x, z, order: int):
    """d^order/dx^order of exp(x z)/x (Leibniz on exp * x^{-1})."""
    acc = mpf(0)
    for j in range(order + 1):
        acc += (
            math.comb(order, j)
            * z ** (order - j)
            * (-1) ** j
            * math.factorial(j)
            * x ** (-(1 + j))
        )
    return mp.exp(x * z) * acc


def _poly_derivative(p: int, x, order: int):
    """d^order/dx^order of x^p for integer p >= 0."""
    if order > p:
        return mpf(0)
    return mpf(math.perm(p, order)) * x ** (p - order)


def f_residue(zneg: float, s: Sequence, dedup_tol: float = 0.0):
    """The residue function F(z, s) for z < 0 (extended precision).

    Distinct s uses the plain residue sum; exact collisions (the s_j are
    integers in production) switch to the confluent determinant with
    derivative columns.  ``dedup_tol`` widens the collision test, which
    the near-collision limit tests exploit.
    """
    if not zneg < 0:
        raise ValueError(f"f_residue requires z < 0, got {zneg!r}")
    if any(v <= 0 for v in s):
        raise ValueError("all components of s must be positive")
    z = mpf(zneg) if not isinstance(zneg, mpf) else zneg
    svals = [v if isinstance(v, mpf) else mpf(v) for v in s]
    n = len(svals)

    lead = mpf(1)
    for v in svals:
        lead /= v

    clusters = _cluster(svals, mpf(dedup_tol))
    if len(clusters) == n:
        f1 = mpf(0)
        ordered = [c[0] for c in clusters]
        for j, sj in enumerate(ordered):
            denom = sj
            for k, sk in enumerate(ordered):
                if k != j:
                    denom *= sk - sj
            f1 += mp.exp(sj * z) / denom
        return lead - f1

    # confluent case: one column per derivative order within each cluster
    cols = []
    for v, m in clusters:
        for t in range(m):
            col = [_g_derivative(v, z, t)]
            for i in range(2, n + 1):
                col.append(_poly_derivative(i - 2, v, t))
            cols.append(col)
    zmat = mp_matrix(n, n)
    for j, col in enumerate(cols):
        for i, entry in enumerate(col):
            zmat[i, j] = entry
    denom = mpf(1)
    for _, m in clusters:
        for q in range(1, m):
            denom *= math.factorial(q)
    for gi in range(len(clusters)):
        for gj in range(gi + 1, len(clusters)):
            vi, mi = clusters[gi]
            vj, mj = clusters[gj]
            denom *= (vj - vi) ** (mi * mj)
    return lead - mp_det(zmat) / denom


def _perms_with_sign(n: int):
    out = []
    for perm in itertools.permutations(range(1, n + 1)):
        inv = sum(
            1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j]
        )
        out.append((perm, -1 if inv % 2 else 1))
    return out


def _outage_sum(cfg: ExactConfig, r_eff: float) -> float:
    """Evaluate the triple sum at the current working precision."""
    dims, rho = cfg.dims, cfg.snr.rho
    nt, dn, n0 = dims.Nt, dims.Nr - dims.Nt, dims.N0
    one_rho = 1 + mpf(rho)
    log_one_rho = mp.log(one_rho)
    ntr = nt * mpf(r_eff)

    # smallest l with Nt*r < l*log(1+rho); terms below it vanish
    l_min = int(mp.floor(ntr / log_one_rho)) + 1
    if l_min > nt:
        return 1.0

    zfrac = _selberg_z_fraction(dims)
    a_norm = mpf(math.factorial(nt)) / (
        (mpf(zfrac.numerator) / mpf(zfrac.denominator))
        * mpf(rho) ** (nt * nt + (dn + n0) * nt)
    )

    c_table = [
        [c_coefficient(k, n, dims, cfg.snr) for n in range(n0 + 1)]
        for k in range(dn + 1)
    ]
    smax = 2 * nt - 1 + dn + n0
    opr_pow = [one_rho**e for e in range(smax + 1)]
    zs = [ntr - l * log_one_rho for l in range(nt + 1)]

    inner_cache: dict[tuple, mpf] = {}

    def inner(s: tuple) -> mpf:
        key = tuple(sorted(s))
        got = inner_cache.get(key)
        if got is not None:
            return got
        weights = [opr_pow[sj] for sj in key]
        acc = mpf(0)
        for l in range(l_min, nt + 1):
            term = elementary_symmetric(weights, l) * f_residue(zs[l], key)
            acc += -term if (l + nt) % 2 else term
        inner_cache[key] = acc
        return acc

    perms = _perms_with_sign(nt)
    total = mpf(0)
    for kvec in itertools.product(range(dn + 1), repeat=nt):
        for nvec in itertools.product(range(n0 + 1), repeat=nt):
            coeff = mpf(1)
            for kj, nj in zip(kvec, nvec):
                coeff *= c_table[kj][nj]
            perm_acc = mpf(0)
            for perm, sign in perms:
                s = tuple(
                    j + perm[j - 1] - 1 + kvec[j - 1] + n0 - nvec[j - 1]
                    for j in range(1, nt + 1)
                )
                perm_acc += sign * inner(s)
            total += coeff * perm_acc

    return float(1 - a_norm * total)


def outage_exact(cfg: ExactConfig, r: float) -> OutageEstimate:
    """P_out(r) from the closed-form finite-size expression.

    ``r`` is the full per-channel rate including any deterministic
    offset carried by reduced dims; the random part is what the formula
    sees.  The result is accurate to 1e-9 after rounding from extended
    precision; an out-of-range interior result signals catastrophic
    cancellation, triggering one retry at doubled precision.
    """
    if r < 0:
        raise ValueError("rate threshold r must be >= 0")
    cfg.check_caps()
    r_eff = r - float(cfg.dims.rate_offset) * math.log1p(cfg.snr.rho)
    if r_eff <= 0:
        p = 0.0
    elif r_eff >= math.log1p(cfg.snr.rho):
        p = 1.0
    else:
        with mp.workprec(cfg.precision_bits):
            p = _outage_sum(cfg, r_eff)
        if not -_CONSISTENCY_SLACK <= p <= 1 + _CONSISTENCY_SLACK:
            with mp.workprec(2 * cfg.precision_bits):
                p = _outage_sum(cfg, r_eff)
            if not -_CONSISTENCY_SLACK <= p <= 1 + _CONSISTENCY_SLACK:
                raise ArithmeticError(
                    f"exact outage {p!r} outside [0,1] even after doubling the "
                    f"working precision to {2 * cfg.precision_bits} bits"
                )
        p = min(1.0, max(0.0, p))
    return OutageEstimate(p=p, ci_low=p, ci_high=p, method="exact", trials_or_tol=_EXACT_TOL)


def outage_density_exact(cfg: ExactConfig, r: float, step: float | None = None) -> DensityEstimate:
    """Rate density P'(r) by Richardson-extrapolated central differences.

    The step shrinks near the ends of the achievable rate window (where
    the outage clamps to 0 or 1, which would bias a straddling stencil);
    the error estimate combines the observed step-halving change with
    the rounding floor of the underlying outage values.
    """
    offset = float(cfg.dims.rate_offset) * math.log1p(cfg.snr.rho)
    lo_edge = offset
    hi_edge = offset + math.log1p(cfg.snr.rho)
    h = step if step is not None else 1e-4 * max(1.0, abs(r))
    room = min(r - lo_edge, hi_edge - r)
    if room > 0:
        h = min(h, 0.49 * room)
    h = max(h, 1e-12)

    def central(hh: float) -> float:
        hi = outage_exact(cfg, r + hh).p
        lo = outage_exact(cfg, max(0.0, r - hh)).p
        return (hi - lo) / (2.0 * hh)

    d1 = central(h)
    d2 = central(h / 2)
    value = (4 * d2 - d1) / 3
    error = abs(d2 - d1) / 3 + _EXACT_TOL / h
    return DensityEstimate(value=value, error=error)
