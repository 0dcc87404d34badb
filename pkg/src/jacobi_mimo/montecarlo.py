"""Monte Carlo estimation of outage, rate moments, and spectral histograms.

This is the empirical ground truth the deterministic solvers are checked
against.  Reproducibility contract: every trial draws from its own
counter-based Philox substream keyed by (seed, trial index), and trials
are processed in fixed-size blocks reduced in block order, so results
are bit-identical for a given (seed, trials) no matter how many workers
run the blocks.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.stats import beta as _beta_dist

from .ensemble import ChannelDims, SnrParam

__all__ = [
    "McConfig",
    "OutageEstimate",
    "EigenHistogram",
    "estimate_outage",
    "outage_curve",
    "moments",
    "eigen_histogram",
]

# Trials per batched linear-algebra block.  Fixed (not configurable) so the
# partitioning, and therefore the floating-point reduction order, never
# depends on the worker count.
_BLOCK = 1024

# Each trial owns a 2^128-wide counter slab in the Philox stream; draws can
# never run into a neighboring trial's slab.
_TRIAL_STRIDE = 1 << 128


@dataclass(frozen=True)
class McConfig:
    """One Monte Carlo run: channel, SNR, trial count, seed, parallelism."""

    dims: ChannelDims
    snr: SnrParam
    trials: int
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


@dataclass(frozen=True)
class OutageEstimate:
    """An outage probability with provenance and uncertainty.

    For Monte Carlo the bounds are a Clopper-Pearson 95% interval; the
    deterministic methods report their numerical tolerance through
    ``trials_or_tol`` and collapse the interval onto the value.
    """

    p: float
    ci_low: float
    ci_high: float
    method: str
    trials_or_tol: float

    def __post_init__(self):
        if not self.ci_low <= self.p <= self.ci_high:
            raise ValueError("require ci_low <= p <= ci_high")


@dataclass(frozen=True)
class EigenHistogram:
    """Normalized eigenvalue histogram on [0, 1]: density per bin."""

    edges: np.ndarray
    density: np.ndarray

    def mass(self) -> float:
        return float(np.sum(self.density * np.diff(self.edges)))


def _trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=seed, counter=trial * _TRIAL_STRIDE))


def _block_eigenvalues(dims: ChannelDims, seed: int, lo: int, hi: int) -> np.ndarray:
    """Eigenvalues of U^H U for trials [lo, hi): array of shape (hi-lo, Nt).

    Gaussians come from each trial's own substream.  One Philox object is
    reused by resetting its counter to trial * 2^128 per trial, which is
    bit-identical to constructing the substream fresh but several times
    cheaper; the QR / Gram / eigensolve steps then run batched.
    """
    n, nt, nr = dims.N, dims.Nt, dims.Nr
    count = hi - lo
    g = np.empty((count, n, 2 * nt))
    bitgen = np.random.Philox(key=seed)
    gen = np.random.Generator(bitgen)
    state = bitgen.state
    counter = state["state"]["counter"]
    for i in range(count):
        counter[:] = 0
        counter[2] = lo + i  # counter word 2 == trial * 2^128
        bitgen.state = state
        g[i] = gen.standard_normal((n, 2 * nt))
    z = (g[:, :, :nt] + 1j * g[:, :, nt:]) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r, axis1=1, axis2=2)
    bad = np.any(d == 0, axis=1)
    if bad.any():
        # probability-zero event; redraw those trials from their own streams
        for i in np.nonzero(bad)[0]:
            rng = _trial_rng(seed, lo + i)
            rng.standard_normal((n, 2 * nt))  # skip the draw that produced the zero
            while True:
                gi = rng.standard_normal((n, 2 * nt))
                zi = (gi[:, :nt] + 1j * gi[:, nt:]) / np.sqrt(2.0)
                qi, ri = np.linalg.qr(zi)
                di = np.diagonal(ri)
                if np.all(di != 0):
                    q[i], d[i] = qi, di
                    break
    corner = q[:, :nr, :] * (d / np.abs(d))[:, None, :]
    gram = np.matmul(corner.conj().transpose(0, 2, 1), corner)
    lam = np.linalg.eigvalsh(gram)
    return np.clip(lam, 0.0, 1.0)


def _block_ranges(trials: int):
    return [(lo, min(lo + _BLOCK, trials)) for lo in range(0, trials, _BLOCK)]


def _map_blocks(cfg: McConfig, fn):
    """Apply fn(eigenvalue_block) to every block, in block order."""
    ranges = _block_ranges(cfg.trials)

    def run(span):
        lo, hi = span
        return fn(_block_eigenvalues(cfg.dims, cfg.seed, lo, hi))

    if cfg.workers == 1 or len(ranges) == 1:
        return [run(span) for span in ranges]
    with ThreadPoolExecutor(max_workers=min(cfg.workers, len(ranges))) as pool:
        return list(pool.map(run, ranges))


def _rates(lam: np.ndarray, cfg: McConfig) -> np.ndarray:
    rates = np.log1p(cfg.snr.rho * lam).sum(axis=1) / cfg.dims.Nt
    if cfg.dims.rate_offset:
        rates = rates + float(cfg.dims.rate_offset) * np.log1p(cfg.snr.rho)
    return rates


def _clopper_pearson(k: int, n: int, conf: float = 0.95) -> tuple[float, float]:
    alpha = 1.0 - conf
    lo = 0.0 if k == 0 else float(_beta_dist.ppf(alpha / 2, k, n - k + 1))
    hi = 1.0 if k == n else float(_beta_dist.ppf(1 - alpha / 2, k + 1, n - k))
    return lo, hi


def outage_curve(cfg: McConfig, rs) -> list[OutageEstimate]:
    """Outage estimates at several thresholds over one shared sample set.

    Sharing samples makes the curve exactly monotone in r and amortizes
    the sampling cost over the whole rate grid.  Bit-identical for fixed
    (seed, trials) regardless of cfg.workers.
    """
    thresholds = np.asarray(list(rs), dtype=float)
    if thresholds.size and thresholds.min() < 0:
        raise ValueError("rate thresholds must be >= 0")
    counts = _map_blocks(
        cfg,
        lambda lam: np.count_nonzero(_rates(lam, cfg)[:, None] < thresholds[None, :], axis=0),
    )
    totals = np.sum(counts, axis=0)
    out = []
    for k in totals:
        k = int(k)
        lo, hi = _clopper_pearson(k, cfg.trials)
        p = k / cfg.trials
        out.append(
            OutageEstimate(p=p, ci_low=min(lo, p), ci_high=max(hi, p), method="mc", trials_or_tol=cfg.trials)
        )
    return out


def estimate_outage(cfg: McConfig, r: float) -> OutageEstimate:
    """Fraction of trials with mutual information below r, with 95% CI.

    Bit-identical for fixed (seed, trials) regardless of cfg.workers.
    """
    return outage_curve(cfg, [r])[0]


def moments(cfg: McConfig) -> tuple[float, float]:
    """Sample mean and unbiased sample variance of the mutual information."""
    if cfg.trials < 2:
        raise ValueError("moments needs at least 2 trials")
    partials = _map_blocks(
        cfg, lambda lam: (float(np.sum(r := _rates(lam, cfg))), float(np.sum(r * r)))
    )
    s1 = sum(p[0] for p in partials)
    s2 = sum(p[1] for p in partials)
    n = cfg.trials
    mean = s1 / n
    var = max(0.0, (s2 - n * mean * mean) / (n - 1))
    return mean, var


def eigen_histogram(cfg: McConfig, bins: int) -> EigenHistogram:
    """Histogram of all sampled eigenvalues, normalized to unit mass on [0, 1]."""
    if bins < 2:
        raise ValueError("bins must be >= 2")
    edges = np.linspace(0.0, 1.0, bins + 1)
    counts = _map_blocks(
        cfg, lambda lam: np.histogram(lam.ravel(), bins=edges)[0].astype(np.int64)
    )
    total = np.sum(counts, axis=0)
    density = total / (cfg.trials * cfg.dims.Nt * np.diff(edges))
    return EigenHistogram(edges=edges, density=density)
