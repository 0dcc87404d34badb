"""Large-channel-count solver: constrained spectral densities and rate function.

For many channels the eigenvalues of U^H U behave like a 2D Coulomb gas
confined to (0, 1): the outage probability obeys

    P(I < r) ~ exp(-Nt^2 * (E(r) - E0)),

where E(r) minimizes the electrostatic energy functional

    E[p] = -n0 Int p log(1-x) - (beta-1) Int p log(x) - Int Int p p log|x-y|

over unit-mass densities with rate Int p(x) log(1+rho*x) dx pinned to r,
and E0 is the unconstrained minimum.  Stationarity gives a singular
integral equation whose solution on a single support interval (a, b)
falls into four families, depending on whether the support touches the
hard walls at 0 and 1:

    S01 (a=0, b=1)   only for n0=0, beta=1
    S0b (a=0, b<1)   only for beta=1
    Sa1 (a>0, b=1)   only for n0=0
    Sab (a>0, b<1)   generic; the soft-edge conditions p(a)=p(b)=0 hold

The rate constraint enters through a Lagrange multiplier k with
E'(r) = k: k = 0 at the ergodic rate r_erg (the distribution's peak),
k < 0 below it, k > 0 above.  Support endpoints come from normalization
and edge conditions at fixed k; the outer solve matches r(k) = r using
the monotonicity of r(k).  All the rate and energy integrals reduce to
closed forms in the kernel function G(x, y) from :mod:`.specfun`.

Two transcription corrections relative to common statements of the
ergodic (k = 0) solution, both forced by the mass and moment checks in
the tests: the support endpoints are

    a0, b0 = (sqrt(1+n0) -/+ sqrt(beta(n0+beta)))^2 / (n0+1+beta)^2

(the denominator is squared) and the ergodic density carries the
prefactor (n0+beta+1):

    p0(x) = (n0+beta+1) sqrt((x-a0)(b0-x)) / (2 pi x (1-x)).

At n0=0, beta=1 these reduce to the arcsine law on (0, 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.optimize import brentq
from scipy.stats import norm as _norm

from .ensemble import SnrParam
from .montecarlo import OutageEstimate
from .specfun import g_closed, q_fn

__all__ = [
    "ErgodicSummary",
    "RegimeSolution",
    "ergodic_summary",
    "ergodic_density",
    "critical_thresholds",
    "solve_regime",
    "solve_at_multiplier",
    "density_at",
    "rate_exponent",
    "density_asymptotic",
    "outage_asymptotic",
    "gaussian_outage",
]

_TWO_PI = 2.0 * math.pi
_K_TOL = 1e-12          # root tolerance on the Lagrange multiplier
_EDGE = 1e-15           # hard floor keeping endpoints inside (0, 1)
_LD_TOL = 1e-8          # advertised tolerance of the deterministic estimates


@dataclass(frozen=True)
class ErgodicSummary:
    """Unconstrained (k = 0) solution: support, rate, peak variance, E0."""

    n0: float
    beta: float
    rho: float
    a0: float
    b0: float
    r_erg: float
    v_erg: float
    e0: float


@dataclass(frozen=True)
class RegimeSolution:
    """One solved constrained-density instance.

    ``energy`` is E(r); ``exponent`` is Delta E = E(r) - E0 >= 0, the decay
    rate of the outage (r < r_erg) or overshoot (r > r_erg) probability.
    """

    regime: str
    a: float
    b: float
    k: float
    r: float
    energy: float
    exponent: float
    n0: float
    beta: float
    rho: float


def _check_params(n0: float, beta: float, snr: SnrParam):
    if n0 < 0:
        raise ValueError(f"n0 must be >= 0, got {n0!r}")
    if beta < 1:
        raise ValueError(f"beta must be >= 1, got {beta!r}")


def _xlogx(t: float) -> float:
    # 0*log(0) = 0 convention for the entropy-like terms in E0
    return 0.0 if t == 0.0 else t * math.log(t)


def _e0_value(n0: float, beta: float) -> float:
    return 0.5 * (
        (beta + n0 + 1.0) * _xlogx(beta + n0 + 1.0)
        - (beta + n0) * _xlogx(beta + n0)
        - beta * _xlogx(beta)
        + (beta - 1.0) * _xlogx(beta - 1.0)
        - (1.0 + n0) * _xlogx(1.0 + n0)
        + n0 * _xlogx(n0)
    )


def _ergodic_support(n0: float, beta: float) -> tuple[float, float]:
    t = n0 + 1.0 + beta
    lo = math.sqrt(1.0 + n0)
    hi = math.sqrt(beta * (n0 + beta))
    return ((hi - lo) / t) ** 2, ((hi + lo) / t) ** 2


def ergodic_density(n0: float, beta: float, x: float) -> float:
    """Unconstrained limiting eigenvalue density p0 at x (0 outside support)."""
    a0, b0 = _ergodic_support(n0, beta)
    if not a0 < x < b0:
        return 0.0
    return (n0 + beta + 1.0) * math.sqrt((x - a0) * (b0 - x)) / (_TWO_PI * x * (1.0 - x))


# ---------------------------------------------------------------------------
# Regime S01: support (0, 1); only for n0 = 0, beta = 1
# ---------------------------------------------------------------------------

def _s01_rate_coeffs(z: float) -> tuple[float, float]:
    """(r_erg, v) with r(k) = r_erg + k*v in the S01 family."""
    rho = 1.0 / z
    s = math.sqrt(1.0 + rho)
    r_erg = 2.0 * math.log(0.5 * (1.0 + s))
    v = math.log((1.0 + s) ** 2 / (4.0 * s))
    return r_erg, v


def _s01_k_limits(z: float) -> tuple[float, float]:
    d = math.sqrt(z + 1.0) - math.sqrt(z)
    return -2.0 * math.sqrt(z + 1.0) / d, 2.0 * math.sqrt(z) / d


# ---------------------------------------------------------------------------
# Regime S0b: support (0, b); only for beta = 1
# ---------------------------------------------------------------------------

def _s0b_norm_residual(n0: float, z: float, k: float, b: float) -> float:
    return n0 / math.sqrt(1.0 - b) + k * math.sqrt(z / (z + b)) - (2.0 + n0 + k)


def _s0b_b_of_k(n0: float, z: float, k: float) -> float:
    lo, hi = _EDGE, 1.0 - _EDGE
    flo = _s0b_norm_residual(n0, z, k, lo)
    fhi = _s0b_norm_residual(n0, z, k, hi)
    if not flo < 0 < fhi:
        raise ArithmeticError(
            f"S0b normalization not bracketed for k={k!r} "
            f"(residuals {flo!r} at b->0, {fhi!r} at b->1)"
        )
    return brentq(
        lambda b: _s0b_norm_residual(n0, z, k, b), lo, hi, xtol=1e-300, rtol=8.9e-16
    )


def _s0b_poles(n0: float, z: float, k: float, b: float) -> list[tuple[float, float]]:
    """Pole decomposition of the S0b density in t = x/b.

    p(x) dx = (1/2pi) sqrt(t(1-t)) sum_i gamma_i/(t + y_i) dt; the hard
    edge at 0 contributes the y = 0 pole.
    """
    big_n = n0 / math.sqrt(1.0 - b)
    big_k = k * math.sqrt(z) / math.sqrt(z + b)
    return [
        (b * big_n - b * big_k / z, 0.0),
        (-b * big_n, -1.0 / b),
        (b * big_k / z, z / b),
    ]


# ---------------------------------------------------------------------------
# Regime Sa1: support (a, 1); only for n0 = 0
# ---------------------------------------------------------------------------

def _sa1_norm_residual(beta: float, z: float, k: float, a: float) -> float:
    return (
        (beta - 1.0) / math.sqrt(a)
        + k * math.sqrt((z + 1.0) / (z + a))
        - (beta + 1.0 + k)
    )


def _sa1_a_of_k(beta: float, z: float, k: float) -> float:
    lo, hi = _EDGE, 1.0 - _EDGE
    flo = _sa1_norm_residual(beta, z, k, lo)
    fhi = _sa1_norm_residual(beta, z, k, hi)
    if not flo > 0 > fhi:
        raise ArithmeticError(
            f"Sa1 normalization not bracketed for k={k!r} "
            f"(residuals {flo!r} at a->0, {fhi!r} at a->1)"
        )
    return brentq(
        lambda a: _sa1_norm_residual(beta, z, k, a), lo, hi, xtol=1e-300, rtol=8.9e-16
    )


def _sa1_poles(beta: float, z: float, k: float, a: float) -> list[tuple[float, float]]:
    """Pole decomposition of the Sa1 density in t = (x-a)/(1-a).

    The hard edge at 1 contributes the y = -1 pole.
    """
    d = 1.0 - a
    kk = k * d / math.sqrt((z + 1.0) * (z + a))
    bb = (beta - 1.0) * d / math.sqrt(a)
    return [
        (-(kk + bb), -1.0),
        (kk, (a + z) / d),
        (bb, a / d),
    ]


# ---------------------------------------------------------------------------
# Regime Sab: detached support (a, b); soft edges p(a) = p(b) = 0
# ---------------------------------------------------------------------------

def _sab_residuals(n0: float, beta: float, z: float, k: float, a: float, b: float):
    rho = 1.0 / z
    root = math.sqrt((1.0 + rho * a) * (1.0 + rho * b))
    edge = -k * rho / root
    mass = k * (1.0 + rho) / root - (n0 + beta + 1.0 + k)
    if n0:
        edge += n0 / math.sqrt((1.0 - a) * (1.0 - b))
    if beta > 1.0:
        t = (beta - 1.0) / math.sqrt(a * b)
        edge -= t
        mass += t
    return edge, mass


def _sab_newton(n0, beta, z, k, a, b, tol=1e-13, iters=60):
    for _ in range(iters):
        f1, f2 = _sab_residuals(n0, beta, z, k, a, b)
        res = math.hypot(f1, f2)
        if res < tol:
            return a, b
        ha = 1e-8 * max(a, 1e-8)
        hb = 1e-8 * max(1.0 - b, 1e-8)
        g1a, g2a = _sab_residuals(n0, beta, z, k, a + ha, b)
        g1b, g2b = _sab_residuals(n0, beta, z, k, a, b + hb)
        j11, j12 = (g1a - f1) / ha, (g1b - f1) / hb
        j21, j22 = (g2a - f2) / ha, (g2b - f2) / hb
        det = j11 * j22 - j12 * j21
        if det == 0 or not math.isfinite(det):
            break
        da = -(f1 * j22 - f2 * j12) / det
        db = -(j11 * f2 - j21 * f1) / det
        step = 1.0
        improved = False
        for _ in range(40):
            na = min(max(a + step * da, _EDGE), 1.0 - _EDGE)
            nb = min(max(b + step * db, _EDGE), 1.0 - _EDGE)
            if nb <= na:
                nb = min(1.0 - _EDGE, na + max(0.5 * (b - a), _EDGE))
            n1, n2 = _sab_residuals(n0, beta, z, k, na, nb)
            if math.isfinite(n1) and math.isfinite(n2) and math.hypot(n1, n2) < res:
                a, b = na, nb
                improved = True
                break
            step *= 0.5
        if not improved:
            break
    f1, f2 = _sab_residuals(n0, beta, z, k, a, b)
    if math.hypot(f1, f2) < 1e-10:
        return a, b
    return None


def _sab_nested(n0, beta, z, k, b_lo=0.0, b_hi=1.0):
    """Fallback: for each b solve the edge condition for a, bisect on mass."""
    b_lo = max(b_lo, 4.0 * _EDGE)
    b_hi = min(b_hi, 1.0 - _EDGE)

    def a_of_b(b):
        lo, hi = _EDGE, b * (1.0 - 1e-12)

        def f(a):
            return _sab_residuals(n0, beta, z, k, a, b)[0]

        flo, fhi = f(lo), f(hi)
        if flo == 0.0:
            return lo
        if fhi == 0.0:
            return hi
        if flo * fhi > 0:
            return None
        return brentq(f, lo, hi, xtol=1e-300, rtol=8.9e-16)

    def mass(b):
        a = a_of_b(b)
        if a is None:
            return None
        return _sab_residuals(n0, beta, z, k, a, b)[1], a

    prev_b = prev_m = None
    for i in range(401):
        b = b_lo + (b_hi - b_lo) * i / 400.0
        cur = mass(b)
        if cur is None:
            prev_b = prev_m = None
            continue
        if prev_m is not None and prev_m * cur[0] <= 0.0:
            bb = brentq(
                lambda x: mass(x)[0], prev_b, b, xtol=1e-300, rtol=8.9e-16
            )
            return a_of_b(bb), bb
        prev_b, prev_m = b, cur[0]
    raise ArithmeticError(
        f"Sab nested bisection found no sign change for k={k!r} "
        f"over b in ({b_lo!r}, {b_hi!r})"
    )


def _kc3(n0: float, z: float) -> tuple[float, float]:
    """beta = 1, n0 > 0: Sab takes over from S0b where p(0+) hits zero.

    At the threshold n0*(1+z) = (2+n0+k)*sqrt(1-b) jointly with the S0b
    normalization; eliminated down to one equation in b.
    """

    def k_of_b(b):
        return n0 * (1.0 + z) / math.sqrt(1.0 - b) - 2.0 - n0

    def h(b):
        return _s0b_norm_residual(n0, z, k_of_b(b), b)

    b0 = 4.0 * (1.0 + n0) / (2.0 + n0) ** 2
    b = brentq(h, b0, 1.0 - _EDGE, xtol=1e-300, rtol=8.9e-16)
    return k_of_b(b), b


def _kc4(beta: float, z: float) -> tuple[float, float]:
    """n0 = 0, beta > 1: Sab takes over from Sa1 where p(1-) hits zero.

    At the threshold (beta-1)*z + (1+beta+k)*sqrt(a) = 0 jointly with the
    Sa1 normalization; eliminated down to one equation in a.
    """

    def k_of_a(a):
        return -(beta - 1.0) * z / math.sqrt(a) - (1.0 + beta)

    def h(a):
        return _sa1_norm_residual(beta, z, k_of_a(a), a)

    a0 = ((beta - 1.0) / (beta + 1.0)) ** 2
    a = brentq(h, _EDGE, a0, xtol=1e-300, rtol=8.9e-16)
    return k_of_a(a), a


def _sab_seed(n0: float, beta: float, z: float) -> tuple[float, tuple[float, float]]:
    """Continuation origin (k_start, (a, b)) for the Sab family."""
    if n0 > 0 and beta > 1.0:
        return 0.0, _ergodic_support(n0, beta)
    if n0 > 0:  # beta == 1: Sab takes over above k_c3
        k_c3, b_c3 = _kc3(n0, z)
        return k_c3 + 1e-6, (1e-8, b_c3)
    # n0 == 0, beta > 1: Sab takes over below k_c4
    k_c4, a_c4 = _kc4(beta, z)
    return k_c4 - 1e-6, (a_c4, 1.0 - 1e-8)


def _sab_ab_of_k(n0: float, beta: float, z: float, k: float):
    k_start, (a, b) = _sab_seed(n0, beta, z)
    span = k - k_start
    steps = max(1, math.ceil(abs(span) / 0.25))
    prev_k = k_start
    for i in range(1, steps + 1):
        kk = k_start + span * i / steps
        got = _sab_newton(n0, beta, z, kk, a, b)
        if got is None:
            mid = 0.5 * (prev_k + kk)
            got = _sab_newton(n0, beta, z, mid, a, b)
            if got is not None:
                a, b = got
                got = _sab_newton(n0, beta, z, kk, a, b)
        if got is None:
            got = _sab_nested(n0, beta, z, kk)
        a, b = got
        prev_k = kk
    return a, b


def _sab_poles(n0: float, beta: float, z: float, a: float, b: float) -> list[tuple[float, float]]:
    """Pole decomposition of the Sab density in t = (x-a)/(b-a).

    Terms are (gamma, y) for gamma/(t+y): the SNR pole carries y = az,
    the wall terms y = -(1-a)/d and y = a/d.  Both edges are soft, so
    every pole sits strictly outside [0, 1].
    """
    d = b - a
    az = (a + z) / d
    gz = 0.0
    gc = 0.0
    ga = 0.0
    if n0:
        w = n0 / math.sqrt(((1.0 - a) / d) * ((1.0 - b) / d))
        gz += w
        gc -= w
    if beta > 1.0:
        w = (beta - 1.0) / math.sqrt((a / d) * (b / d))
        gz -= w
        ga += w
    return [(gz, az), (gc, -(1.0 - a) / d), (ga, a / d)]


# ---------------------------------------------------------------------------
# Rates and energies from the pole decompositions
#
# With the density written as p dx = (1/2pi) sqrt(t(1-t)) sum gamma/(t+y) dt
# on the unit t-interval, every integral against log(t + w) is a G value:
#
#   Int p log(1 + rho x) dx = log(rho d) + (1/2) sum gamma G(az, y)
#   I0 := Int p log x dx    = log d + (1/2) sum gamma G(a/d, y)
#   Ic := Int p log(1-x) dx = log d - (1/2) sum gamma G((1-b)/d, -(1+y))
#   L(b):= Int p log(b-x)   = log d - (1/2) sum gamma G(0, -(1+y))
#   L(a):= Int p log(x-a)   = log d + (1/2) sum gamma G(0, y)
#
# (the flipped arguments come from t -> 1-t, which negates gamma and maps
# the pole y to -(1+y)).  Multiplying the stationarity condition by p and
# integrating eliminates the double logarithmic integral, leaving
#
#   E(r) = (k/2)(r - log(1+rho x0)) - (n0/2)(Ic + log(1-x0))
#          - ((beta-1)/2)(I0 + log x0) - L(x0)
#
# for any reference point x0 in the support; x0 = b except for Sa1, whose
# support ends at the wall b = 1 (there x0 = a).  This assembly is what
# the per-regime energy expressions unfold to, and is validated against
# direct quadrature of the energy functional in the tests.
# ---------------------------------------------------------------------------

def _rate_from_poles(z: float, a: float, b: float, poles) -> float:
    d = b - a
    az = (a + z) / d
    r = math.log(d / z)
    for gamma, y in poles:
        if gamma:
            r += 0.5 * gamma * g_closed(az, y)
    return r


def _energy_from_poles(n0, beta, z, k, a, b, r, poles, x0) -> float:
    d = b - a
    rho = 1.0 / z
    e = 0.5 * k * (r - math.log1p(rho * x0))
    if n0:
        ic = math.log(d)
        for gamma, y in poles:
            if gamma:
                ic -= 0.5 * gamma * g_closed((1.0 - b) / d, -(1.0 + y))
        e -= 0.5 * n0 * (ic + math.log1p(-x0))
    if beta > 1.0:
        i0 = math.log(d)
        for gamma, y in poles:
            if gamma:
                i0 += 0.5 * gamma * g_closed(a / d, y)
        e -= 0.5 * (beta - 1.0) * (i0 + math.log(x0))
    lref = math.log(d)
    for gamma, y in poles:
        if gamma:
            if x0 == b:
                lref -= 0.5 * gamma * g_closed(0.0, -(1.0 + y))
            else:
                lref += 0.5 * gamma * g_closed(0.0, y)
    return e - lref


# ---------------------------------------------------------------------------
# Public surface
# ---------------------------------------------------------------------------

def critical_thresholds(n0: float, beta: float, snr: SnrParam) -> list[tuple[float, float]]:
    """Regime-boundary points (k_c, r_c), ordered by rate.

    n0=0, beta=1 has two (S0b|S01 and S01|Sa1); the one-sided hard-edge
    cases have one; the fully detached case n0>0, beta>1 has none (Sab
    covers every rate).
    """
    _check_params(n0, beta, snr)
    z = snr.z
    if n0 == 0 and beta == 1.0:
        r_erg, v = _s01_rate_coeffs(z)
        k1, k2 = _s01_k_limits(z)
        return [(k1, r_erg + k1 * v), (k2, r_erg + k2 * v)]
    if beta == 1.0:
        k, b = _kc3(n0, z)
        return [(k, _rate_from_poles(z, 0.0, b, _s0b_poles(n0, z, k, b)))]
    if n0 == 0:
        k, a = _kc4(beta, z)
        return [(k, _rate_from_poles(z, a, 1.0, _sa1_poles(beta, z, k, a)))]
    return []


def _regime_for_k(n0: float, beta: float, z: float, k: float) -> str:
    if n0 == 0 and beta == 1.0:
        k1, k2 = _s01_k_limits(z)
        return "S0b" if k < k1 else ("Sa1" if k > k2 else "S01")
    if beta == 1.0:
        return "S0b" if k < _kc3(n0, z)[0] else "Sab"
    if n0 == 0:
        return "Sa1" if k > _kc4(beta, z)[0] else "Sab"
    return "Sab"


def solve_at_multiplier(n0: float, beta: float, snr: SnrParam, k: float) -> RegimeSolution:
    """Constrained-density solution for a given Lagrange multiplier k.

    The regime follows from k against the critical thresholds; the rate
    comes out of the solution (use :func:`solve_regime` to prescribe the
    rate instead).
    """
    _check_params(n0, beta, snr)
    z = snr.z
    e0 = _e0_value(n0, beta)
    regime = _regime_for_k(n0, beta, z, k)
    if regime == "S01":
        r_erg, v = _s01_rate_coeffs(z)
        r = r_erg + k * v
        energy = e0 + 0.5 * k * k * v
        return RegimeSolution("S01", 0.0, 1.0, k, r, energy, energy - e0, n0, beta, snr.rho)
    if regime == "S0b":
        b = _s0b_b_of_k(n0, z, k)
        poles = _s0b_poles(n0, z, k, b)
        r = _rate_from_poles(z, 0.0, b, poles)
        energy = _energy_from_poles(n0, beta, z, k, 0.0, b, r, poles, x0=b)
        return RegimeSolution("S0b", 0.0, b, k, r, energy, energy - e0, n0, beta, snr.rho)
    if regime == "Sa1":
        a = _sa1_a_of_k(beta, z, k)
        poles = _sa1_poles(beta, z, k, a)
        r = _rate_from_poles(z, a, 1.0, poles)
        energy = _energy_from_poles(n0, beta, z, k, a, 1.0, r, poles, x0=a)
        return RegimeSolution("Sa1", a, 1.0, k, r, energy, energy - e0, n0, beta, snr.rho)
    a, b = _sab_ab_of_k(n0, beta, z, k)
    poles = _sab_poles(n0, beta, z, a, b)
    r = _rate_from_poles(z, a, b, poles)
    energy = _energy_from_poles(n0, beta, z, k, a, b, r, poles, x0=b)
    return RegimeSolution("Sab", a, b, k, r, energy, energy - e0, n0, beta, snr.rho)


def solve_regime(n0: float, beta: float, snr: SnrParam, r: float) -> RegimeSolution:
    """Constrained-density solution at prescribed rate r in (0, log(1+rho)).

    Outer bracketed root-find on the multiplier k; r(k) is strictly
    increasing (dr/dk = 1/E'' > 0 by convexity), which the expanding
    bracket verifies as it goes.
    """
    _check_params(n0, beta, snr)
    rmax = math.log1p(snr.rho)
    if not 0.0 < r < rmax:
        raise ValueError(f"rate {r!r} outside the achievable interval (0, {rmax!r})")

    cache: dict[float, RegimeSolution] = {}

    def rate_at(k: float) -> float:
        sol = solve_at_multiplier(n0, beta, snr, k)
        cache[k] = sol
        return sol.r

    r0 = rate_at(0.0)
    if abs(r - r0) < 1e-14:
        return cache[0.0]
    if r > r0:
        lo, hi = 0.0, 1.0
        r_prev, r_hi = r0, rate_at(1.0)
        while r_hi < r:
            if r_hi < r_prev:
                raise ArithmeticError("r(k) not increasing during bracket expansion")
            lo, hi = hi, 2.0 * hi
            if hi > 2.0**60:
                raise ArithmeticError(f"failed to bracket k for rate {r!r}")
            r_prev, r_hi = r_hi, rate_at(hi)
    else:
        lo, hi = -1.0, 0.0
        r_prev, r_lo = r0, rate_at(-1.0)
        while r_lo > r:
            if r_lo > r_prev:
                raise ArithmeticError("r(k) not increasing during bracket expansion")
            lo, hi = 2.0 * lo, lo
            if lo < -(2.0**60):
                raise ArithmeticError(f"failed to bracket k for rate {r!r}")
            r_prev, r_lo = r_lo, rate_at(lo)

    k_star = brentq(lambda k: rate_at(k) - r, lo, hi, xtol=_K_TOL, rtol=8.9e-16)
    return cache.get(k_star) or solve_at_multiplier(n0, beta, snr, k_star)


def density_at(sol: RegimeSolution, x: float) -> float:
    """Constrained eigenvalue density of ``sol`` at x (0 outside support)."""
    if not sol.a < x < sol.b:
        return 0.0
    z = 1.0 / sol.rho
    k, n0, beta = sol.k, sol.n0, sol.beta
    if sol.regime == "S01":
        num = (z + x) * (k + 2.0) - k * math.sqrt(z * (z + 1.0))
        return num / (_TWO_PI * (z + x) * math.sqrt(x * (1.0 - x)))
    if sol.regime == "S0b":
        b = sol.b
        body = -k * math.sqrt(z) / (math.sqrt(z + b) * (z + x))
        if n0:
            body += n0 / (math.sqrt(1.0 - b) * (1.0 - x))
        return math.sqrt((b - x) / x) * body / _TWO_PI
    if sol.regime == "Sa1":
        a = sol.a
        body = k * math.sqrt((z + 1.0) / (z + a)) / (z + x)
        if beta > 1.0:
            body += (beta - 1.0) / (x * math.sqrt(a))
        return math.sqrt(x - a) / (_TWO_PI * math.sqrt(1.0 - x)) * body
    a, b = sol.a, sol.b
    body = 0.0
    if n0:
        body += n0 * (sol.rho + 1.0) / ((1.0 - x) * math.sqrt((1.0 - a) * (1.0 - b)))
    if beta > 1.0:
        body += (beta - 1.0) / (x * math.sqrt(a * b))
    return math.sqrt((x - a) * (b - x)) / (_TWO_PI * (1.0 + sol.rho * x)) * body


def ergodic_summary(n0: float, beta: float, snr: SnrParam) -> ErgodicSummary:
    """Support, ergodic rate, peak variance, and E0 of the k = 0 solution."""
    _check_params(n0, beta, snr)
    a0, b0 = _ergodic_support(n0, beta)
    sol0 = solve_at_multiplier(n0, beta, snr, 0.0)
    rho = snr.rho
    sa = math.sqrt(1.0 + rho * a0)
    sb = math.sqrt(1.0 + rho * b0)
    v_erg = math.log((sb + sa) ** 2 / (4.0 * sb * sa))
    return ErgodicSummary(
        n0=n0, beta=beta, rho=rho, a0=a0, b0=b0,
        r_erg=sol0.r, v_erg=v_erg, e0=_e0_value(n0, beta),
    )


def rate_exponent(n0: float, beta: float, snr: SnrParam, r: float) -> float:
    """Delta E(r) = E(r) - E0: P(I < r) ~ exp(-Nt^2 Delta E) for r < r_erg."""
    return solve_regime(n0, beta, snr, r).exponent


def density_asymptotic(n0: float, beta: float, snr: SnrParam, nt: int, r: float) -> float:
    """Large-Nt rate density: Nt exp(-Nt^2 Delta E(r)) / sqrt(2 pi v_erg)."""
    if nt < 1:
        raise ValueError("nt must be >= 1")
    summ = ergodic_summary(n0, beta, snr)
    de = solve_regime(n0, beta, snr, r).exponent
    return nt * math.exp(-nt * nt * de) / math.sqrt(_TWO_PI * summ.v_erg)


def outage_asymptotic(n0: float, beta: float, snr: SnrParam, nt: int, r: float) -> OutageEstimate:
    """Finite-Nt outage from the rate function with the Gaussian-peak crossover.

    Laplace integration of the asymptotic density gives, for r < r_erg,

        P_out ~ exp(-Nt^2 (dE - k^2/(2 k'))) * Q(Nt |k| / sqrt(k')) / sqrt(k' v_erg)

    with k' = dk/dr by central differences of the solved multiplier, and
    one minus the mirrored expression for r > r_erg; the branches meet at
    1/2 at the ergodic rate.  Evaluated in log space so deep tails
    neither underflow nor lose the exponent.
    """
    if nt < 1:
        raise ValueError("nt must be >= 1")
    summ = ergodic_summary(n0, beta, snr)
    sol = solve_regime(n0, beta, snr, r)
    h = max(1e-5, 1e-4 * abs(summ.r_erg))
    h = min(h, 0.45 * r, 0.45 * (math.log1p(snr.rho) - r))
    k_hi = solve_regime(n0, beta, snr, r + h).k
    k_lo = solve_regime(n0, beta, snr, r - h).k
    kp = (k_hi - k_lo) / (2.0 * h)
    if not kp > 0:
        raise ArithmeticError(
            f"non-positive multiplier slope k'={kp!r} at r={r!r}; the rate "
            "function should be convex, so this signals a solver failure"
        )
    u = nt * abs(sol.k) / math.sqrt(kp)
    log_tail = (
        -nt * nt * (sol.exponent - sol.k * sol.k / (2.0 * kp))
        + float(_norm.logsf(u))
        - 0.5 * math.log(kp * summ.v_erg)
    )
    tail = math.exp(min(log_tail, 0.0))
    p = tail if r <= summ.r_erg else 1.0 - tail
    p = min(1.0, max(0.0, p))
    return OutageEstimate(p=p, ci_low=p, ci_high=p, method="ld", trials_or_tol=_LD_TOL)


def gaussian_outage(ergodic: ErgodicSummary, nt: int, r: float) -> OutageEstimate:
    """Gaussian comparator: the rate treated as N(r_erg, v_erg / Nt^2).

    P_out = Q((r_erg - r) * Nt / sqrt(v_erg)); the baseline the rate
    function is meant to beat away from the peak.
    """
    if nt < 1:
        raise ValueError("nt must be >= 1")
    p = q_fn((ergodic.r_erg - r) * nt / math.sqrt(ergodic.v_erg))
    return OutageEstimate(p=p, ci_low=p, ci_high=p, method="gauss", trials_or_tol=_LD_TOL)
