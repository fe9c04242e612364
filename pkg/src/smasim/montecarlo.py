"""Reproducible Monte Carlo estimation of BER, outage and ergodic sum rate.

Trials at each SNR point are split into fixed-size blocks. Block ``b`` of
SNR point ``i`` draws all of its randomness from
``substream(master_seed, i, b)`` and blocks are always accumulated in
index order, so results are bit-identical for any number of workers.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum
import math
from typing import NamedTuple

import numpy as np

from . import analytic
from .channel import NoiseSpec, db_to_linear, sample_channel, sample_noise, received_vector, substream
from .detectors import detect_noma_far, detect_noma_near_sic, detect_ue1, detect_ue2
from .modem import ConstellationSpec, constellation, encode_noma, encode_sma, validate_power_split

__all__ = [
    "BLOCK_SIZE",
    "Metric",
    "Scenario",
    "CurvePoint",
    "CurveSeries",
    "StandardError",
    "standard_error",
    "run_ber",
    "run_outage",
    "run_sum_rate",
    "run_scenario",
    "analytic_companion",
]

BLOCK_SIZE = 10_000

SCHEMES = ("SMA", "NOMA")
EXPERIMENTS = ("ber", "outage", "sum_rate")


class Metric(str, Enum):
    BER_UE1 = "ber_ue1"
    BER_UE2 = "ber_ue2"
    OUTAGE_UE1 = "outage_ue1"
    OUTAGE_UE2 = "outage_ue2"
    SUM_RATE = "sum_rate"

    @property
    def is_proportion(self) -> bool:
        return self is not Metric.SUM_RATE


@dataclass(frozen=True)
class Scenario:
    """One simulated system and sweep.

    ``target_rates`` defaults to ``log2(Nt)`` for both users. With
    ``fair_comparison`` set, ``Nr == Nt`` and ``M == Nt`` are enforced.
    ``min_errors`` enables early stopping of BER points once both users
    have accumulated that many bit errors.
    """

    name: str
    scheme: str
    experiment: str
    Nt: int = 4
    Nr: int = 4
    M: int = 4
    sigma1_sq: float = 1.0
    sigma2_sq: float = 1.0
    a1: float = 0.2
    a2: float = 0.8
    target_rates: analytic.TargetRates = None
    snr_grid_db: tuple = (0.0, 5.0, 10.0, 15.0, 20.0)
    trials: int = 1_000_000
    master_seed: int = 0
    fair_comparison: bool = True
    min_errors: int = None
    constellation: ConstellationSpec = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if self.experiment not in EXPERIMENTS:
            raise ValueError(f"experiment must be one of {EXPERIMENTS}, got {self.experiment!r}")
        for attr in ("Nt", "Nr", "M"):
            v = getattr(self, attr)
            if not isinstance(v, int) or v < 1:
                raise ValueError(f"{attr} must be a positive integer, got {v!r}")
        if self.Nt & (self.Nt - 1) or self.M & (self.M - 1) or self.M < 2:
            raise ValueError("Nt and M must be powers of two (M >= 2)")
        if self.fair_comparison and not (self.Nr == self.Nt and self.M == self.Nt):
            raise ValueError(
                f"fair comparison requires Nr = Nt and M = Nt, got Nt={self.Nt}, Nr={self.Nr}, M={self.M}")
        if not (self.sigma1_sq > 0 and self.sigma2_sq > 0):
            raise ValueError("channel variances must be positive")
        validate_power_split(self.a1, self.a2)
        if not isinstance(self.trials, int) or self.trials < 1:
            raise ValueError(f"trials must be a positive integer, got {self.trials!r}")
        if not 0 <= self.master_seed < 2 ** 64:
            raise ValueError("master_seed must be a 64-bit unsigned integer")
        if self.min_errors is not None and self.min_errors < 1:
            raise ValueError("min_errors must be positive")
        grid = tuple(float(s) for s in self.snr_grid_db)
        if not grid:
            raise ValueError("snr grid must not be empty")
        if any(math.isnan(s) for s in grid):
            raise ValueError("snr grid contains NaN")
        object.__setattr__(self, "snr_grid_db", grid)
        if self.target_rates is None:
            r = math.log2(self.Nt) if self.Nt > 1 else 1.0
            object.__setattr__(self, "target_rates", analytic.TargetRates(r, r))
        object.__setattr__(self, "constellation", constellation(self.M))

    def with_overrides(self, **changes) -> "Scenario":
        return replace(self, **changes)


class CurvePoint(NamedTuple):
    snr_db: float
    estimate: float
    standard_error: float
    trials_used: int


@dataclass
class CurveSeries:
    """One metric sampled over an SNR grid."""

    metric: Metric
    scheme: str
    points: list = field(default_factory=list)

    @property
    def snr_db(self) -> np.ndarray:
        return np.array([p.snr_db for p in self.points])

    @property
    def estimates(self) -> np.ndarray:
        return np.array([p.estimate for p in self.points])

    @property
    def standard_errors(self) -> np.ndarray:
        return np.array([p.standard_error for p in self.points])

    @property
    def trials_used(self) -> np.ndarray:
        return np.array([p.trials_used for p in self.points], dtype=np.int64)


class StandardError(NamedTuple):
    value: float
    degenerate: bool


def standard_error(successes: int, trials: int) -> StandardError:
    """Binomial standard error ``sqrt(p (1-p) / trials)`` with ``p = successes / trials``.

    ``degenerate`` flags ``successes`` in ``{0, trials}``, where the
    estimate is 0 and carries no information about the spread.
    """
    if trials <= 0:
        raise ValueError("trials must be positive")
    if not 0 <= successes <= trials:
        raise ValueError("successes must lie in [0, trials]")
    p = successes / trials
    return StandardError(math.sqrt(p * (1.0 - p) / trials), successes in (0, trials))


def _proportion_se(p: float, trials: int) -> float:
    return math.sqrt(max(p * (1.0 - p), 0.0) / trials)


def _block_sizes(trials: int):
    full, rest = divmod(trials, BLOCK_SIZE)
    return [BLOCK_SIZE] * full + ([rest] if rest else [])


def _popcount(v: np.ndarray) -> np.ndarray:
    count = np.zeros(v.shape, dtype=np.int64)
    v = v.copy()
    while np.any(v):
        count += v & 1
        v >>= 1
    return count


def _noise(Nr, rho, rng, n):
    # Noise is drawn even at infinite SNR so the stream layout stays fixed.
    w = sample_noise(Nr, NoiseSpec(1.0), rng, n)
    return w * (0.0 if math.isinf(rho) else math.sqrt(1.0 / rho))


# Block kernels return plain tuples of integers/floats; they must not depend
# on anything but (scenario, snr index, block index, block length).

def _ber_block(scn: Scenario, rho: float, rng: np.random.Generator, n: int):
    spec = scn.constellation
    m = spec.bits_per_symbol
    if scn.scheme == "SMA":
        m2 = int(math.log2(scn.Nt))
        q1 = rng.integers(0, 2, size=(n, m), dtype=np.int8)
        q2 = rng.integers(0, 2, size=(n, m2), dtype=np.int8)
        x = encode_sma(q1, q2, spec, scn.Nt)
        H1 = sample_channel(scn.Nt, scn.Nr, scn.sigma1_sq, rng, n)
        H2 = sample_channel(scn.Nt, scn.Nr, scn.sigma2_sq, rng, n)
        y1 = received_vector(H1, x, _noise(scn.Nr, rho, rng, n))
        y2 = received_vector(H2, x, _noise(scn.Nr, rho, rng, n))
        label1 = (q1.astype(np.int64) << np.arange(m - 1, -1, -1)).sum(axis=-1)
        j = (q2.astype(np.int64) << np.arange(m2 - 1, -1, -1)).sum(axis=-1)
        h_active = np.take_along_axis(H1, j[:, None, None], axis=2)[:, :, 0]
        n1_hat = detect_ue1(y1, h_active, spec)
        j_hat = detect_ue2(y2, H2, spec).antenna_index
        err1 = _popcount(spec.gray_labels[n1_hat] ^ label1).sum()
        err2 = _popcount(j_hat ^ j).sum()
        return int(err1), int(err2)
    n1 = rng.integers(0, spec.M, size=n)
    n2 = rng.integers(0, spec.M, size=n)
    x = encode_noma(spec.points[n1], spec.points[n2], scn.a1, scn.a2)
    h1 = sample_channel(1, scn.Nr, scn.sigma1_sq, rng, n)[:, :, 0]
    h2 = sample_channel(1, scn.Nr, scn.sigma2_sq, rng, n)[:, :, 0]
    y1 = h1 * x[:, None] + _noise(scn.Nr, rho, rng, n)
    y2 = h2 * x[:, None] + _noise(scn.Nr, rho, rng, n)
    n1_hat = detect_noma_near_sic(y1, h1, scn.a1, scn.a2, spec)
    n2_hat = detect_noma_far(y2, h2, scn.a1, scn.a2, spec)
    labels = spec.gray_labels
    err1 = _popcount(labels[n1_hat] ^ labels[n1]).sum()
    err2 = _popcount(labels[n2_hat] ^ labels[n2]).sum()
    return int(err1), int(err2)


def _instantaneous_rates(scn: Scenario, rho: float, rng: np.random.Generator, n: int):
    if scn.scheme == "SMA":
        H1 = sample_channel(scn.Nt, scn.Nr, scn.sigma1_sq, rng, n)
        j = rng.integers(0, scn.Nt, size=n)
        h = np.take_along_axis(H1, j[:, None, None], axis=2)[:, :, 0]
        gamma1 = rho * (np.abs(h) ** 2).sum(axis=-1)
        return analytic.sma_rates(gamma1, scn.Nt)
    h1 = sample_channel(1, scn.Nr, scn.sigma1_sq, rng, n)[:, :, 0]
    h2 = sample_channel(1, scn.Nr, scn.sigma2_sq, rng, n)[:, :, 0]
    gamma1 = rho * (np.abs(h1) ** 2).sum(axis=-1)
    gamma2 = rho * (np.abs(h2) ** 2).sum(axis=-1)
    return analytic.noma_rates(gamma1, gamma2, scn.a1, scn.a2)


def _outage_block(scn: Scenario, rho: float, rng: np.random.Generator, n: int):
    r1, r2 = _instantaneous_rates(scn, rho, rng, n)
    t = scn.target_rates
    return int(np.count_nonzero(r1 < t.r1_target)), int(np.count_nonzero(r2 < t.r2_target))


def _sum_rate_block(scn: Scenario, rho: float, rng: np.random.Generator, n: int):
    r1, r2 = _instantaneous_rates(scn, rho, rng, n)
    total = np.asarray(r1 + r2, dtype=float)
    return math.fsum(total), math.fsum(total * total)


_KERNELS = {"ber": _ber_block, "outage": _outage_block, "sum_rate": _sum_rate_block}


def _block_task(args):
    kind, scn, snr_index, block_index, n = args
    rho = float(db_to_linear(scn.snr_grid_db[snr_index]))
    rng = substream(scn.master_seed, snr_index, block_index)
    return n, _KERNELS[kind](scn, rho, rng, n)


def _iter_blocks(kind, scn, snr_index, executor, wave):
    tasks = [(kind, scn, snr_index, b, n) for b, n in enumerate(_block_sizes(scn.trials))]
    if executor is None:
        yield from map(_block_task, tasks)
        return
    for start in range(0, len(tasks), wave):
        yield from executor.map(_block_task, tasks[start:start + wave])


class _Pool:
    def __init__(self, workers):
        self.workers = workers
        self.executor = None

    def __enter__(self):
        if self.workers and self.workers > 1:
            self.executor = ProcessPoolExecutor(max_workers=self.workers)
        return self

    def __exit__(self, *exc):
        if self.executor is not None:
            self.executor.shutdown(cancel_futures=True)


def _sweep(kind, scn, workers, stop=None):
    """Yield ``(snr_index, trials_used, [block results])`` per SNR point."""
    with _Pool(workers) as pool:
        wave = 4 * (workers or 1)
        for i in range(len(scn.snr_grid_db)):
            used = 0
            results = []
            for n, res in _iter_blocks(kind, scn, i, pool.executor, wave):
                used += n
                results.append(res)
                if stop is not None and stop(results):
                    break
            yield i, used, results


def run_ber(scn: Scenario, workers: int = 1) -> dict:
    """Simulated bit error rate of both users over the scenario's SNR grid.

    Returns
    -------
    dict
        ``{Metric.BER_UE1: CurveSeries, Metric.BER_UE2: CurveSeries}``.
        The standard error is ``sqrt(p (1-p) / trials_used)`` with
        ``trials_used`` counted in channel uses; bits sharing a channel
        realization are not independent, so this is the conservative choice.
    """
    _check_kind(scn, "ber")
    bits1 = scn.constellation.bits_per_symbol
    bits2 = bits1 if scn.scheme == "NOMA" else int(math.log2(scn.Nt))
    stop = None
    if scn.min_errors is not None:
        def stop(results):
            return (sum(r[0] for r in results) >= scn.min_errors
                    and sum(r[1] for r in results) >= scn.min_errors)
    out = {Metric.BER_UE1: CurveSeries(Metric.BER_UE1, scn.scheme),
           Metric.BER_UE2: CurveSeries(Metric.BER_UE2, scn.scheme)}
    for i, used, results in _sweep("ber", scn, workers, stop):
        snr = scn.snr_grid_db[i]
        for k, (metric, bits) in enumerate(((Metric.BER_UE1, bits1), (Metric.BER_UE2, bits2))):
            if bits == 0:
                p = 0.0
            else:
                p = sum(r[k] for r in results) / (used * bits)
            out[metric].points.append(CurvePoint(snr, p, _proportion_se(p, used), used))
    return out


def run_outage(scn: Scenario, workers: int = 1) -> dict:
    """Simulated outage probability ``P(R_i < target_i)`` of both users.

    SMA UE-2's rate is the constant ``log2(Nt)``, so its series is
    identically 0 whenever the target does not exceed it.
    """
    _check_kind(scn, "outage")
    out = {Metric.OUTAGE_UE1: CurveSeries(Metric.OUTAGE_UE1, scn.scheme),
           Metric.OUTAGE_UE2: CurveSeries(Metric.OUTAGE_UE2, scn.scheme)}
    for i, used, results in _sweep("outage", scn, workers):
        snr = scn.snr_grid_db[i]
        for k, metric in enumerate((Metric.OUTAGE_UE1, Metric.OUTAGE_UE2)):
            count = sum(r[k] for r in results)
            se = standard_error(count, used).value
            out[metric].points.append(CurvePoint(snr, count / used, se, used))
    return out


def run_sum_rate(scn: Scenario, workers: int = 1) -> dict:
    """Sample mean of the instantaneous sum rate (bits per channel use)."""
    _check_kind(scn, "sum_rate")
    series = CurveSeries(Metric.SUM_RATE, scn.scheme)
    for i, used, results in _sweep("sum_rate", scn, workers):
        total = math.fsum(r[0] for r in results)
        total_sq = math.fsum(r[1] for r in results)
        mean = total / used
        if used > 1 and math.isfinite(mean):
            var = max(total_sq - used * mean * mean, 0.0) / (used - 1)
            se = math.sqrt(var / used)
        else:
            se = 0.0 if math.isfinite(mean) else math.nan
        series.points.append(CurvePoint(scn.snr_grid_db[i], mean, se, used))
    return {Metric.SUM_RATE: series}


def _check_kind(scn, kind):
    if scn.experiment != kind:
        raise ValueError(f"scenario {scn.name!r} is a {scn.experiment!r} experiment, not {kind!r}")


_RUNNERS = {"ber": run_ber, "outage": run_outage, "sum_rate": run_sum_rate}


def run_scenario(scn: Scenario, workers: int = 1) -> dict:
    """Dispatch to the runner matching ``scn.experiment``."""
    return _RUNNERS[scn.experiment](scn, workers=workers)


def analytic_companion(scn: Scenario, metric: Metric) -> np.ndarray:
    """Closed-form counterpart of a simulated series, NaN where none exists.

    For SMA UE-2 BER this is the raw (unclamped) union bound.
    """
    rho = db_to_linear(np.asarray(scn.snr_grid_db))
    rho = np.atleast_1d(rho)
    out = np.full(rho.shape, np.nan)
    finite = np.isfinite(rho) & (rho > 0)
    r = rho[finite]
    t = scn.target_rates
    spec = scn.constellation
    if scn.scheme == "SMA":
        if metric is Metric.BER_UE1 and spec.M <= 4:
            out[finite] = analytic.abep_ue1(r * scn.sigma1_sq / math.log2(spec.M), scn.Nr)
        elif metric is Metric.BER_UE2:
            out[finite] = analytic.union_bound_ue2(r, scn.Nt, scn.Nr, spec, scn.sigma2_sq).raw
        elif metric is Metric.OUTAGE_UE1:
            out[finite] = analytic.outage_ue1(t.r1_target, r * scn.sigma1_sq, scn.Nr)
        elif metric is Metric.OUTAGE_UE2:
            out[:] = analytic.outage_ue2(t.r2_target, scn.Nt)
        elif metric is Metric.SUM_RATE:
            out[finite] = analytic.ergodic_sum_rate(r, scn.Nr, scn.Nt, scn.sigma1_sq)
    else:
        if metric is Metric.OUTAGE_UE1:
            out[finite] = analytic.noma_outage_near(t.r1_target, r * scn.sigma1_sq, scn.Nr, scn.a1, scn.a2)
        elif metric is Metric.OUTAGE_UE2:
            out[finite] = analytic.noma_outage_far(t.r2_target, r * scn.sigma2_sq, scn.Nr, scn.a1, scn.a2)
        elif metric is Metric.SUM_RATE:
            out[finite] = [analytic.noma_ergodic_sum_rate(v, scn.Nr, scn.a1, scn.a2,
                                                          scn.sigma1_sq, scn.sigma2_sq) for v in r]
    return out
