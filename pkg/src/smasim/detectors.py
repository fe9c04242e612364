"""Receivers for SMA and the two-user NOMA baseline.

All detectors are vectorized: a single instance uses ``y`` of shape
``(Nr,)``; a batch of ``T`` instances uses ``(T, Nr)`` with matching
leading dimensions on the channel. Ties go to the lowest index (antenna
first, then constellation point), which is what :func:`numpy.argmin`
does on the flattened metric.
"""

from typing import NamedTuple

import numpy as np

from .modem import ConstellationSpec, validate_power_split

__all__ = [
    "DetectionResult",
    "detect_ue1",
    "detect_ue2",
    "ue2_ml_metric",
    "detect_noma_far",
    "detect_noma_near_sic",
]


class DetectionResult(NamedTuple):
    """Joint ML decision of the SM detector.

    Fields are ints for a single instance, arrays for a batch.
    """

    antenna_index: object
    point_index: object
    metric: object


def _as_result(value):
    return value.item() if isinstance(value, np.ndarray) and value.ndim == 0 else value


def detect_ue1(y, h_j, spec: ConstellationSpec):
    """UE-1 ML symbol decision given the active antenna's channel column.

    Returns ``argmin_n ||y - h_j x_n||^2``.
    """
    y = np.asarray(y)
    h_j = np.asarray(h_j)
    if y.shape != h_j.shape:
        raise ValueError(f"y {y.shape} and h_j {h_j.shape} must have the same shape")
    diff = y[..., None, :] - h_j[..., None, :] * spec.points[:, None]
    metric = (diff.real ** 2 + diff.imag ** 2).sum(axis=-1)
    return _as_result(np.argmin(metric, axis=-1))


def _check_H(y, H):
    H = getattr(H, "entries", H)
    H = np.asarray(H)
    y = np.asarray(y)
    if H.ndim < 2 or H.shape[-2] != y.shape[-1] or H.shape[:-2] != y.shape[:-1]:
        raise ValueError(f"dimension mismatch: y {y.shape}, H {H.shape}")
    return y, H


def detect_ue2(y, H, spec: ConstellationSpec, rho=None) -> DetectionResult:
    """Joint ML (antenna, symbol) decision of the spatial-modulation detector.

    Minimizes ``||y - h_j x_n||^2`` over all ``Nt * M`` hypotheses. This has
    the same argmin as the SNR-weighted correlation form of
    :func:`ue2_ml_metric`, so ``rho`` is accepted for interface symmetry but
    not needed. UE-2's bits come from ``antenna_index`` alone.
    """
    y, H = _check_H(y, H)
    Nt = H.shape[-1]
    # (..., Nr, Nt, M) candidate noiseless observations
    g = H[..., :, :, None] * spec.points
    diff = y[..., :, None, None] - g
    metric = (diff.real ** 2 + diff.imag ** 2).sum(axis=-3)
    flat = metric.reshape(metric.shape[:-2] + (Nt * spec.M,))
    best = np.argmin(flat, axis=-1)
    j, n = np.divmod(best, spec.M)
    m = np.take_along_axis(flat, best[..., None], axis=-1)[..., 0]
    return DetectionResult(_as_result(j), _as_result(n), _as_result(m))


def ue2_ml_metric(y2, H, spec: ConstellationSpec, rho: float) -> np.ndarray:
    """SNR-weighted SM detection metric ``sqrt(rho)*||g||^2 - 2 Re{y2^H g}``.

    ``g = h_j x_n`` runs over all hypotheses; the result has shape
    ``(..., Nt, M)``. ``y2`` must be on the unit-noise scale, i.e.
    ``y2 = sqrt(rho) * h_j x_n + w`` with ``w ~ CN(0, I)``; under the
    package's SNR convention that is ``sqrt(rho)`` times the received vector.
    """
    y2, H = _check_H(y2, H)
    g = H[..., :, :, None] * spec.points
    energy = (g.real ** 2 + g.imag ** 2).sum(axis=-3)
    corr = np.einsum("...r,...rtm->...tm", np.conj(y2), g).real
    return np.sqrt(rho) * energy - 2.0 * corr


def _mrc(y, h):
    y = np.asarray(y)
    h = np.asarray(h)
    if y.shape != h.shape:
        raise ValueError(f"y {y.shape} and h {h.shape} must have the same shape")
    gain = (h.real ** 2 + h.imag ** 2).sum(axis=-1)
    return (np.conj(h) * y).sum(axis=-1) / gain


def _nearest(z, reference):
    d = np.abs(np.asarray(z)[..., None] - reference)
    return np.argmin(d, axis=-1)


def detect_noma_far(y, h, a1: float, a2: float, spec: ConstellationSpec):
    """Far-user (high-power) symbol decision, treating the near user's signal as noise.

    MRC-combines the receive branches, then picks the nearest point of the
    ``sqrt(a2)``-scaled constellation.
    """
    validate_power_split(a1, a2)
    z = _mrc(y, h)
    return _as_result(_nearest(z, np.sqrt(a2) * spec.points))


def detect_noma_near_sic(y, h, a1: float, a2: float, spec: ConstellationSpec, far_index=None):
    """Near-user (low-power) symbol decision with hard successive interference cancellation.

    The far user's symbol is detected first (or taken from ``far_index`` for
    genie-aided cancellation), its contribution ``h * sqrt(a2) * s2`` is
    subtracted, and the residual is MRC-detected against the
    ``sqrt(a1)``-scaled constellation.
    """
    validate_power_split(a1, a2)
    y = np.asarray(y)
    h = np.asarray(h)
    if far_index is None:
        far_index = detect_noma_far(y, h, a1, a2, spec)
    s2 = np.sqrt(a2) * spec.points[np.asarray(far_index)]
    residual = y - h * np.asarray(s2)[..., None]
    z = _mrc(residual, h)
    return _as_result(_nearest(z, np.sqrt(a1) * spec.points))
