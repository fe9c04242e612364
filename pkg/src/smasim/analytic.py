"""Closed-form performance of SMA and the NOMA rate/outage baseline.

Notation follows the simulator: ``rho`` is the average SNR per receive
antenna, ``sigma1_sq``/``sigma2_sq`` the per-entry channel variances of
UE-1/UE-2 and ``Nr`` the number of receive antennas per user (MRC).
UE-1's per-branch symbol SNR is ``rho * sigma1_sq``; its per-bit SNR is that
divided by ``log2(M)``.
"""

from dataclasses import dataclass
import math
from typing import NamedTuple

import numpy as np
from scipy import integrate
from scipy.special import gammaln, xlogy

from .modem import ConstellationSpec, validate_power_split
from .numerics import binomial, exp_scaled_e1

__all__ = [
    "AnalyticParams",
    "RatePair",
    "TargetRates",
    "UnionBound",
    "pdf_gamma1b",
    "cdf_gamma1",
    "abep_ue1",
    "pep_sm_raw",
    "pep_sm",
    "union_bound_ue2",
    "sma_rates",
    "noma_rates",
    "ergodic_capacity_ue1",
    "ergodic_sum_rate",
    "outage_ue1",
    "outage_ue2",
    "noma_outage_near",
    "noma_outage_far",
    "noma_ergodic_sum_rate",
]


class RatePair(NamedTuple):
    """Achievable rates of UE-1 and UE-2 in bits per channel use."""

    r1: object
    r2: object


@dataclass(frozen=True)
class TargetRates:
    r1_target: float
    r2_target: float

    def __post_init__(self):
        if not (self.r1_target > 0 and self.r2_target > 0):
            raise ValueError("target rates must be positive")


class UnionBound(NamedTuple):
    """UE-2 union bound: ``raw`` as computed, ``clamped = min(raw, 0.5)`` for plotting."""

    raw: object
    clamped: object


@dataclass(frozen=True)
class AnalyticParams:
    """Derived scalars feeding the closed forms at one SNR point.

    ``sigma_a_sq`` and ``mu2`` are for a constant-modulus (unit-energy PSK)
    constellation, where they do not depend on the symbol pair.
    """

    gamma_bar_1b: float
    eta: int
    mu1: float
    mu2: float
    sigma_a_sq: float

    @classmethod
    def from_snr(cls, rho, Nr, M, sigma1_sq=1.0, sigma2_sq=1.0):
        if not rho > 0:
            raise ValueError(f"rho must be positive, got {rho}")
        gb = rho * sigma1_sq / math.log2(M)
        sa = rho * sigma2_sq / 2.0
        return cls(
            gamma_bar_1b=gb,
            eta=int(Nr) - 1,
            mu1=math.sqrt(gb / (1.0 + gb)),
            mu2=_mu2(sa),
            sigma_a_sq=sa,
        )


def _mu2(sigma_a_sq):
    return 0.5 * (1.0 - np.sqrt(sigma_a_sq / (1.0 + sigma_a_sq)))


def _mrc_rayleigh_sum(p, Nr):
    # sum_{k=0}^{Nr-1} C(Nr-1+k, k) p^k
    eta = int(Nr) - 1
    return sum(binomial(eta + k, k) * p ** k for k in range(eta + 1))


def _check_nr(Nr):
    if int(Nr) != Nr or Nr < 1:
        raise ValueError(f"Nr must be a positive integer, got {Nr}")
    return int(Nr)


def pdf_gamma1b(g, gamma_bar, Nr):
    """Density of the MRC output SNR: chi-square with ``2*Nr`` degrees of freedom.

    ``g**(Nr-1) * exp(-g/gamma_bar) / (Gamma(Nr) * gamma_bar**Nr)``, where
    ``gamma_bar`` is the mean per-branch SNR.
    """
    Nr = _check_nr(Nr)
    g = np.asarray(g, dtype=float)
    if np.any(g < 0):
        raise ValueError("SNR argument must be non-negative")
    if not gamma_bar > 0:
        raise ValueError("gamma_bar must be positive")
    with np.errstate(divide="ignore"):
        log_pdf = xlogy(Nr - 1, g) - g / gamma_bar - gammaln(Nr) - Nr * np.log(gamma_bar)
    return np.exp(log_pdf)[()]


def cdf_gamma1(theta, gamma_bar, Nr):
    """CDF of the MRC output SNR, ``1 - exp(-t) * sum_{k<Nr} t**k / k!`` with ``t = theta/gamma_bar``."""
    Nr = _check_nr(Nr)
    theta = np.asarray(theta, dtype=float)
    if np.any(theta < 0):
        raise ValueError("theta must be non-negative")
    t = theta / gamma_bar
    term = np.exp(-t)
    head = np.zeros_like(t)
    for k in range(Nr):
        if k:
            term = term * t / k
        head = head + term
    # For t < 1 the complement e^-t sum_{k>=Nr} t^k/k! avoids cancellation.
    tail = np.zeros_like(t)
    for k in range(Nr, Nr + 40):
        term = term * t / k
        tail = tail + term
    return np.clip(np.where(t < 1.0, tail, 1.0 - head), 0.0, 1.0)[()]


def abep_ue1(gamma_bar_1b, Nr):
    """Average BEP of UE-1 (BPSK/QPSK, Gray) with ``Nr``-branch MRC in Rayleigh fading.

    ``((1-mu1)/2)**Nr * sum_{k=0}^{Nr-1} C(Nr-1+k, k) ((1+mu1)/2)**k`` with
    ``mu1 = sqrt(gb/(1+gb))`` and ``gb`` the mean per-branch SNR per bit.
    """
    Nr = _check_nr(Nr)
    gb = np.asarray(gamma_bar_1b, dtype=float)
    if np.any(gb <= 0):
        raise ValueError("gamma_bar_1b must be positive")
    mu1 = np.sqrt(gb / (1.0 + gb))
    # (1 - mu1) loses precision at high SNR; 1 - mu1 = 1 / ((1 + gb) (1 + mu1))
    one_minus_mu = 1.0 / ((1.0 + gb) * (1.0 + mu1))
    return ((one_minus_mu / 2.0) ** Nr * _mrc_rayleigh_sum((1.0 + mu1) / 2.0, Nr))[()]


def _pep_from_pair_energy(rho, sigma2_sq, pair_energy, Nr):
    sa = rho * sigma2_sq * pair_energy / 4.0
    # 1/2 (1 - sqrt(sa/(1+sa))) = 1 / (2 (1+sa) (1 + sqrt(sa/(1+sa))))
    mu2 = 1.0 / (2.0 * (1.0 + sa) * (1.0 + np.sqrt(sa / (1.0 + sa))))
    return mu2 ** Nr * _mrc_rayleigh_sum(1.0 - mu2, Nr)


def pep_sm_raw(rho, sigma2_sq, xn, xnhat, Nr):
    """Exact Rayleigh-averaged PEP between two SM hypotheses on different antennas.

    ``mu2**Nr * sum_{k<Nr} C(Nr-1+k, k) (1-mu2)**k`` with
    ``mu2 = (1 - sqrt(sa/(1+sa)))/2`` and
    ``sa = rho*sigma2_sq*(|xn|**2 + |xnhat|**2)/4``.
    """
    Nr = _check_nr(Nr)
    rho = np.asarray(rho, dtype=float)
    if np.any(rho <= 0):
        raise ValueError("rho must be positive")
    return _pep_from_pair_energy(rho, sigma2_sq, abs(xn) ** 2 + abs(xnhat) ** 2, Nr)[()]


def pep_sm(rho, sigma2_sq, xn, xnhat, Nr, M):
    """SM pairwise error term of the UE-2 union bound: ``log2(M) * pep_sm_raw(...)``.

    The ``log2(M)`` weighting makes this exceed 1 at low SNR for ``M > 2``;
    it is a bound ingredient, not a probability.
    """
    return math.log2(M) * pep_sm_raw(rho, sigma2_sq, xn, xnhat, Nr)


def union_bound_ue2(rho, Nt, Nr, spec: ConstellationSpec, sigma2_sq=1.0,
                    method="auto", include_same_antenna=True) -> UnionBound:
    """Union bound on UE-2's bit error probability.

    Parameters
    ----------
    rho : float or array_like
        Average SNR per receive antenna (linear).
    Nt, Nr : int
        Transmit and receive antenna counts.
    spec : ConstellationSpec
        UE-1's constellation.
    sigma2_sq : float
        Channel variance of UE-2.
    method : {"auto", "closed", "sum"}
        ``"closed"`` is ``Nt * pep_sm`` with the pair-independent
        ``|xn|**2 + |xnhat|**2 = 2`` (constant-modulus only). ``"sum"``
        evaluates ``(1/Nt) sum_j sum_jhat pep_sm``, with the per-pair term
        averaged over equiprobable sent/decided points ``(n, nhat)``.
        ``"auto"`` picks ``"closed"`` for constant-modulus constellations.
    include_same_antenna : bool
        Keep the ``jhat == j`` terms of the double sum (as in the closed
        form). Only honoured by ``method="sum"``.

    Returns
    -------
    UnionBound
        Raw bound and its clamp ``min(raw, 0.5)``.
    """
    if method == "auto":
        method = "closed" if spec.is_constant_modulus else "sum"
    if method == "closed":
        if not spec.is_constant_modulus:
            raise ValueError("closed-form union bound needs a constant-modulus constellation")
        raw = Nt * pep_sm(rho, sigma2_sq, 1.0, 1.0, Nr, spec.M)
    elif method == "sum":
        Nr = _check_nr(Nr)
        rho = np.asarray(rho, dtype=float)
        if np.any(rho <= 0):
            raise ValueError("rho must be positive")
        e = np.abs(spec.points) ** 2
        energies = (e[:, None] + e[None, :]).ravel()
        per_pair = math.log2(spec.M) * np.mean(
            [_pep_from_pair_energy(rho, sigma2_sq, pe, Nr) for pe in energies], axis=0)
        n_pairs = Nt * Nt if include_same_antenna else Nt * (Nt - 1)
        raw = n_pairs * per_pair / Nt
    else:
        raise ValueError(f"unknown method {method!r}")
    raw = np.asarray(raw)[()]
    return UnionBound(raw, np.minimum(raw, 0.5)[()])


def sma_rates(gamma1, Nt) -> RatePair:
    """SMA rates: ``log2(1 + gamma1)`` for UE-1 and ``log2(Nt)`` for UE-2."""
    gamma1 = np.asarray(gamma1, dtype=float)
    if np.any(gamma1 < 0):
        raise ValueError("gamma1 must be non-negative")
    if Nt < 1 or (int(Nt) & (int(Nt) - 1)):
        raise ValueError(f"Nt must be a power of two, got {Nt}")
    r2 = np.full_like(gamma1, math.log2(Nt))
    return RatePair(np.log2(1.0 + gamma1)[()], r2[()])


def noma_rates(gamma1, gamma2, a1, a2) -> RatePair:
    """Two-user NOMA rates with near user 1 (after SIC) and far user 2.

    ``r1 = log2(1 + a1*gamma1)``, ``r2 = log2(1 + a2*gamma2 / (a1*gamma2 + 1))``.
    """
    validate_power_split(a1, a2)
    g1 = np.asarray(gamma1, dtype=float)
    g2 = np.asarray(gamma2, dtype=float)
    if np.any(g1 < 0) or np.any(g2 < 0):
        raise ValueError("SNRs must be non-negative")
    r1 = np.log2(1.0 + a1 * g1)
    with np.errstate(invalid="ignore"):
        sinr2 = np.where(np.isinf(g2), a2 / a1, a2 * g2 / (a1 * g2 + 1.0))
    return RatePair(r1[()], np.log2(1.0 + sinr2)[()])


def _ergodic_capacity_scalar(gbar, Nr):
    eta = Nr - 1
    total = 0.0
    # e^{1/g} Ei(-1/g) = -exp_scaled_e1(1/g)
    ei_term = -exp_scaled_e1(1.0 / gbar)
    for k in range(eta + 1):
        d = eta - k
        inner = (-1.0) ** (d - 1) / gbar ** d * ei_term
        inner += sum(math.factorial(j - 1) / (-gbar) ** (d - j) for j in range(1, d + 1))
        total += math.factorial(eta) / math.factorial(d) * inner
    return math.log2(math.e) / math.gamma(Nr) * total


def ergodic_capacity_ue1(rho, Nr, sigma1_sq=1.0):
    """Ergodic capacity of UE-1 (``Nr``-branch MRC, Rayleigh) in bits per channel use.

    Exponential-integral closed form in the mean per-branch symbol SNR
    ``rho * sigma1_sq``. The alternating finite sum cancels badly for
    ``Nr > 1`` once ``rho * sigma1_sq`` drops well below 1e-2.
    """
    Nr = _check_nr(Nr)
    rho_arr = np.asarray(rho, dtype=float)
    if np.any(rho_arr <= 0):
        raise ValueError("rho must be positive")
    out = np.vectorize(lambda r: _ergodic_capacity_scalar(r * sigma1_sq, Nr), otypes=[float])(rho_arr)
    return out[()]


def ergodic_sum_rate(rho, Nr, Nt, sigma1_sq=1.0):
    """SMA ergodic sum rate: ``log2(Nt)`` plus UE-1's ergodic capacity."""
    return math.log2(Nt) + ergodic_capacity_ue1(rho, Nr, sigma1_sq)


def _threshold(target):
    target = np.asarray(target, dtype=float)
    if np.any(target < 0):
        raise ValueError("target rate must be non-negative")
    return np.expm1(target * math.log(2.0))


def outage_ue1(target, gamma_bar, Nr):
    """UE-1 outage probability ``P(log2(1 + gamma1) < target)``.

    ``gamma_bar`` is the mean per-branch symbol SNR ``rho * sigma1_sq``.
    """
    if not np.all(np.asarray(gamma_bar) > 0):
        raise ValueError("gamma_bar must be positive")
    return cdf_gamma1(_threshold(target), gamma_bar, Nr)


def outage_ue2(target, Nt):
    """UE-2 SMA outage: 0 when the target fits in ``log2(Nt)`` antenna bits, else 1."""
    if not target > 0:
        raise ValueError("target rate must be positive")
    return 0.0 if target <= math.log2(Nt) else 1.0


def noma_outage_near(target, gamma_bar, Nr, a1, a2):
    """Near-user NOMA outage ``P(log2(1 + a1*gamma1) < target)``."""
    validate_power_split(a1, a2)
    return cdf_gamma1(_threshold(target) / a1, gamma_bar, Nr)


def noma_outage_far(target, gamma_bar, Nr, a1, a2):
    """Far-user NOMA outage ``P(log2(1 + a2*g/(a1*g + 1)) < target)``.

    Certain outage when ``2**target - 1 >= a2/a1`` (SINR ceiling).
    """
    validate_power_split(a1, a2)
    theta = np.asarray(_threshold(target))
    feasible = a2 - a1 * theta > 0
    limit = np.where(feasible, theta / np.where(feasible, a2 - a1 * theta, 1.0), 0.0)
    return np.where(feasible, cdf_gamma1(limit, gamma_bar, Nr), 1.0)[()]


def _expect_over_gamma(func, gamma_bar, Nr):
    def integrand(g):
        return func(g) * pdf_gamma1b(g, gamma_bar, Nr)
    # Split at the mean so quad sees the bulk of the chi-square mass.
    mid = Nr * gamma_bar
    a, _ = integrate.quad(integrand, 0.0, mid, epsabs=0.0, epsrel=1e-11, limit=400)
    b, _ = integrate.quad(integrand, mid, np.inf, epsabs=0.0, epsrel=1e-11, limit=400)
    return a + b


def noma_ergodic_sum_rate(rho, Nr, a1, a2, sigma1_sq=1.0, sigma2_sq=1.0):
    """Ergodic NOMA sum rate ``E[r1] + E[r2]`` under ``Nr``-branch MRC, by numerical quadrature."""
    validate_power_split(a1, a2)
    Nr = _check_nr(Nr)
    if not rho > 0:
        raise ValueError("rho must be positive")
    c1 = _expect_over_gamma(lambda g: math.log2(1.0 + a1 * g), rho * sigma1_sq, Nr)
    c2 = _expect_over_gamma(lambda g: math.log2(1.0 + a2 * g / (a1 * g + 1.0)), rho * sigma2_sq, Nr)
    return c1 + c2
