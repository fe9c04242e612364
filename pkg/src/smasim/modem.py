"""Bit/symbol mapping for SMA and the NOMA baseline.

An SMA channel use carries two users' bits at once: UE-1's bits select a
point of an M-ary Gray-labelled constellation, UE-2's bits select which of
the ``Nt`` transmit antennas radiates it. All mappers accept a single bit
vector of shape ``(m,)`` or a batch of shape ``(..., m)``; bits are read
most-significant first.
"""

from dataclasses import dataclass, field
import math
from typing import NamedTuple

import numpy as np

__all__ = [
    "ConstellationSpec",
    "SmaSymbol",
    "psk",
    "qam",
    "constellation",
    "bits_to_int",
    "int_to_bits",
    "map_mary",
    "demap_mary",
    "map_ssk",
    "demap_ssk",
    "encode_sma",
    "encode_noma",
    "validate_power_split",
    "bit_diff_count",
    "is_tx_vector",
]


def _is_power_of_two(n: int) -> bool:
    return isinstance(n, (int, np.integer)) and n >= 1 and (n & (n - 1)) == 0


def _gray(k):
    return k ^ (k >> 1)


@dataclass(frozen=True, eq=False)
class ConstellationSpec:
    """An M-ary constellation with Gray labels and BEP coefficients.

    Attributes
    ----------
    M : int
        Constellation order (power of two).
    points : np.ndarray
        ``M`` complex points with unit average energy, indexed by point index.
    gray_labels : np.ndarray
        ``gray_labels[n]`` is the integer bit label carried by point ``n``.
    alpha, beta : float
        Coefficients of the conditional bit error probability
        ``alpha * Q(sqrt(beta * snr_per_bit))``.
    name : str
        Human-readable name, e.g. ``"QPSK"``.
    """

    M: int
    points: np.ndarray
    gray_labels: np.ndarray
    alpha: float
    beta: float
    name: str = ""
    _label_to_index: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if not _is_power_of_two(self.M) or self.M < 2:
            raise ValueError(f"constellation order must be a power of two >= 2, got {self.M}")
        points = np.asarray(self.points, dtype=complex)
        labels = np.asarray(self.gray_labels, dtype=np.int64)
        if points.shape != (self.M,) or labels.shape != (self.M,):
            raise ValueError("points and gray_labels must both have length M")
        if sorted(labels.tolist()) != list(range(self.M)):
            raise ValueError("gray_labels must be a permutation of 0..M-1")
        inverse = np.empty(self.M, dtype=np.int64)
        inverse[labels] = np.arange(self.M)
        points.setflags(write=False)
        labels.setflags(write=False)
        inverse.setflags(write=False)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "gray_labels", labels)
        object.__setattr__(self, "_label_to_index", inverse)

    @property
    def bits_per_symbol(self) -> int:
        return int(math.log2(self.M))

    @property
    def is_constant_modulus(self) -> bool:
        return bool(np.allclose(np.abs(self.points), 1.0, atol=1e-12))

    def index_of_label(self, label):
        """Point index carrying the given integer label(s)."""
        return self._label_to_index[label]

    def __repr__(self):
        return f"ConstellationSpec({self.name or self.M})"


class SmaSymbol(NamedTuple):
    """One SMA channel use: active antenna ``j`` and point index ``n``."""

    antenna_index: int
    point_index: int


def psk(M: int) -> ConstellationSpec:
    """Gray-labelled M-PSK on the unit circle.

    Point ``k`` sits at angle ``2*pi*k/M + offset`` (counterclockwise), with
    offset 0 for BPSK and ``pi/M`` otherwise, so QPSK starts at ``pi/4``.
    Point ``k`` carries the reflected-Gray label ``k ^ (k >> 1)``.
    """
    if not _is_power_of_two(M) or M < 2:
        raise ValueError(f"PSK order must be a power of two >= 2, got {M}")
    k = np.arange(M)
    offset = 0.0 if M == 2 else np.pi / M
    points = np.exp(1j * (2 * np.pi * k / M + offset))
    if M == 2:
        points = points.real.round() + 0j
    m = int(math.log2(M))
    if M <= 4:
        alpha, beta = 1.0, 2.0
    else:
        alpha, beta = 2.0 / m, 2.0 * m * math.sin(math.pi / M) ** 2
    name = {2: "BPSK", 4: "QPSK"}.get(M, f"{M}-PSK")
    return ConstellationSpec(M, points, _gray(k), alpha, beta, name)


def qam(M: int) -> ConstellationSpec:
    """Square M-QAM (M = 16, 64, ...) with per-axis Gray labels.

    Point index ``n = i * L + q`` where ``i``, ``q`` index the ascending
    in-phase and quadrature amplitude levels and ``L = sqrt(M)``. The label
    is ``gray(i) << log2(L) | gray(q)``.
    """
    m = int(round(math.log2(M))) if M > 0 else 0
    if not _is_power_of_two(M) or m % 2 or M < 16:
        raise ValueError(f"square QAM needs M = 4**k >= 16, got {M}")
    L = int(round(math.sqrt(M)))
    levels = np.arange(-(L - 1), L, 2, dtype=float)
    i, q = np.divmod(np.arange(M), L)
    points = (levels[i] + 1j * levels[q]) / math.sqrt(2.0 * (M - 1) / 3.0)
    labels = (_gray(i) << (m // 2)) | _gray(q)
    alpha = 4.0 * (1.0 - 1.0 / L) / m
    beta = 3.0 * m / (M - 1)
    return ConstellationSpec(M, points, labels, alpha, beta, f"{M}-QAM")


def constellation(M: int) -> ConstellationSpec:
    """Default constellation of order ``M``: square QAM for M = 16, 64, ..., PSK otherwise."""
    if M >= 16 and _is_power_of_two(M) and int(math.log2(M)) % 2 == 0:
        return qam(M)
    return psk(M)


def bits_to_int(bits) -> np.ndarray:
    """Read the last axis of a bit array as MSB-first unsigned integers."""
    b = np.asarray(bits)
    if b.ndim == 0:
        raise ValueError("bit vector must have at least one dimension")
    if b.size and not np.all((b == 0) | (b == 1)):
        raise ValueError("bits must be 0 or 1")
    weights = 1 << np.arange(b.shape[-1] - 1, -1, -1, dtype=np.int64)
    return b.astype(np.int64) @ weights


def int_to_bits(values, m: int) -> np.ndarray:
    """MSB-first ``m``-bit representation along a new last axis."""
    v = np.asarray(values, dtype=np.int64)
    shifts = np.arange(m - 1, -1, -1, dtype=np.int64)
    return ((v[..., None] >> shifts) & 1).astype(np.int8)


def _scalar_or_array(a):
    a = np.asarray(a)
    return int(a) if a.ndim == 0 else a


def map_mary(q1, spec: ConstellationSpec):
    """Gray-labelled point index for UE-1's bits ``q1`` (length log2 M)."""
    q1 = np.asarray(q1)
    if q1.ndim == 0 or q1.shape[-1] != spec.bits_per_symbol:
        raise ValueError(
            f"{spec.name} expects {spec.bits_per_symbol} bits per symbol, "
            f"got shape {q1.shape}")
    return _scalar_or_array(spec.index_of_label(bits_to_int(q1)))


def demap_mary(point_index, spec: ConstellationSpec) -> np.ndarray:
    """Bits carried by constellation point(s) ``point_index``."""
    idx = np.asarray(point_index)
    if np.any(idx < 0) or np.any(idx >= spec.M):
        raise ValueError(f"point index out of range [0, {spec.M})")
    return int_to_bits(spec.gray_labels[idx], spec.bits_per_symbol)


def _check_nt(Nt):
    if not _is_power_of_two(Nt):
        raise ValueError(f"Nt must be a power of two, got {Nt}")
    return int(math.log2(Nt))


def map_ssk(q2, Nt: int):
    """Active antenna index for UE-2's bits ``q2`` (natural binary)."""
    m2 = _check_nt(Nt)
    q2 = np.asarray(q2)
    if q2.ndim == 0 or q2.shape[-1] != m2:
        raise ValueError(f"Nt={Nt} expects {m2} bits, got shape {q2.shape}")
    return _scalar_or_array(bits_to_int(q2))


def demap_ssk(antenna_index, Nt: int) -> np.ndarray:
    m2 = _check_nt(Nt)
    idx = np.asarray(antenna_index)
    if np.any(idx < 0) or np.any(idx >= Nt):
        raise ValueError(f"antenna index out of range [0, {Nt})")
    return int_to_bits(idx, m2)


def encode_sma(q1, q2, spec: ConstellationSpec, Nt: int) -> np.ndarray:
    """Build the SMA transmit vector.

    The vector has ``Nt`` entries, all zero except position
    ``map_ssk(q2, Nt)`` which holds ``spec.points[map_mary(q1, spec)]``.
    Batched bit arrays give an array of shape ``(..., Nt)``.
    """
    n = np.asarray(map_mary(q1, spec))
    j = np.asarray(map_ssk(q2, Nt))
    if n.shape != j.shape:
        raise ValueError("q1 and q2 batches must have the same leading shape")
    x = np.zeros(n.shape + (Nt,), dtype=complex)
    np.put_along_axis(x, j[..., None], spec.points[n][..., None], axis=-1)
    return x


def is_tx_vector(x, spec: ConstellationSpec) -> bool:
    """True if ``x`` has exactly one nonzero entry and it is a constellation point."""
    x = np.asarray(x)
    nz = np.flatnonzero(x)
    if nz.size != 1:
        return False
    return bool(np.min(np.abs(spec.points - x[nz[0]])) < 1e-12)


def validate_power_split(a1: float, a2: float) -> None:
    """Raise unless ``a1 + a2 = 1`` and ``a2 > a1 > 0``."""
    if not math.isclose(a1 + a2, 1.0, rel_tol=0.0, abs_tol=1e-12):
        raise ValueError(f"power split must sum to 1, got a1={a1}, a2={a2}")
    if not a2 > a1 > 0:
        raise ValueError(f"power split needs a2 > a1 > 0, got a1={a1}, a2={a2}")


def encode_noma(s1, s2, a1: float, a2: float):
    """Power-domain superposition ``sqrt(a1)*s1 + sqrt(a2)*s2``."""
    validate_power_split(a1, a2)
    return math.sqrt(a1) * s1 + math.sqrt(a2) * s2


def bit_diff_count(n, n_hat, spec: ConstellationSpec):
    """Number of differing bits between the labels of points ``n`` and ``n_hat``."""
    n = np.asarray(n)
    n_hat = np.asarray(n_hat)
    if np.any((n < 0) | (n >= spec.M) | (n_hat < 0) | (n_hat >= spec.M)):
        raise ValueError(f"point index out of range [0, {spec.M})")
    diff = np.bitwise_xor(spec.gray_labels[n], spec.gray_labels[n_hat])
    count = np.zeros(diff.shape, dtype=np.int64)
    while np.any(diff):
        count += diff & 1
        diff = diff >> 1
    return _scalar_or_array(count)
