"""Rayleigh MIMO channel, AWGN and the received-vector model.

SNR convention: transmit symbols have unit average energy, channel entries
are CN(0, sigma_sq) and the noise variance is ``N0 = 1 / rho``. With
``sigma_sq = 1`` this makes ``rho`` the average received SNR per receive
antenna.

Sampling functions take an explicit :class:`numpy.random.Generator`; use
:func:`substream` to derive independent, counter-indexed generators from a
master seed.
"""

from dataclasses import dataclass
import math

import numpy as np

__all__ = [
    "ChannelMatrix",
    "NoiseSpec",
    "SnrPoint",
    "db_to_linear",
    "substream",
    "sample_channel",
    "sample_noise",
    "received_vector",
]


def db_to_linear(snr_db):
    """Convert dB to a linear power ratio; ``inf`` maps to ``inf``."""
    return np.power(10.0, np.asarray(snr_db, dtype=float) / 10.0)[()]


def substream(master_seed: int, *counters: int) -> np.random.Generator:
    """Generator for the substream identified by ``(master_seed, *counters)``.

    Streams with different counter tuples are statistically independent;
    the same tuple always reproduces the same stream.
    """
    ss = np.random.SeedSequence(entropy=int(master_seed), spawn_key=tuple(int(c) for c in counters))
    return np.random.Generator(np.random.PCG64(ss))


@dataclass(frozen=True)
class NoiseSpec:
    """Per-entry complex noise variance ``n0`` (each dimension CN(0, n0))."""

    n0: float

    def __post_init__(self):
        if not self.n0 > 0:
            raise ValueError(f"noise variance must be positive, got {self.n0}")

    @classmethod
    def from_snr(cls, rho: float) -> "NoiseSpec":
        return cls(1.0 / SnrPoint(rho).rho)


@dataclass(frozen=True)
class SnrPoint:
    """Average SNR per receive antenna, linear scale."""

    rho: float

    def __post_init__(self):
        if not self.rho > 0:
            raise ValueError(f"SNR must be positive, got {self.rho}")

    @classmethod
    def from_db(cls, snr_db: float) -> "SnrPoint":
        return cls(float(db_to_linear(snr_db)))

    @property
    def db(self) -> float:
        return 10.0 * math.log10(self.rho)


@dataclass(frozen=True, eq=False)
class ChannelMatrix:
    """One ``Nr x Nt`` flat-fading realization; column ``v`` is antenna ``v``'s channel."""

    entries: np.ndarray
    sigma_sq: float = 1.0

    def __post_init__(self):
        h = np.asarray(self.entries, dtype=complex)
        if h.ndim != 2 or min(h.shape) < 1:
            raise ValueError(f"channel matrix must be 2-D and non-empty, got shape {h.shape}")
        object.__setattr__(self, "entries", h)

    @property
    def Nr(self) -> int:
        return self.entries.shape[0]

    @property
    def Nt(self) -> int:
        return self.entries.shape[1]

    def column(self, v: int) -> np.ndarray:
        """Channel vector ``h_v`` from transmit antenna ``v`` to all receive antennas."""
        return self.entries[:, v]


def _crandn(rng, shape, variance):
    # Real and imaginary parts each carry half the variance.
    scale = math.sqrt(variance / 2.0)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def sample_channel(Nt: int, Nr: int, sigma_sq: float, rng: np.random.Generator, size=None):
    """Draw i.i.d. CN(0, sigma_sq) channel entries.

    With ``size=None`` a single :class:`ChannelMatrix` is returned; otherwise
    a raw array of shape ``(size, Nr, Nt)`` for batched simulation.
    """
    if int(Nt) < 1 or int(Nr) < 1:
        raise ValueError(f"channel dimensions must be >= 1, got Nt={Nt}, Nr={Nr}")
    if not sigma_sq > 0:
        raise ValueError(f"sigma_sq must be positive, got {sigma_sq}")
    if size is None:
        return ChannelMatrix(_crandn(rng, (Nr, Nt), sigma_sq), sigma_sq)
    return _crandn(rng, (size, Nr, Nt), sigma_sq)


def sample_noise(Nr: int, noise: NoiseSpec, rng: np.random.Generator, size=None) -> np.ndarray:
    """Draw an ``Nr``-dimensional CN(0, N0) noise vector (or ``(size, Nr)`` batch)."""
    shape = (Nr,) if size is None else (size, Nr)
    return _crandn(rng, shape, noise.n0)


def received_vector(H, x, w) -> np.ndarray:
    """Received vector ``y = H x + w``.

    For an SMA transmit vector this equals ``h_j * x_n + w``. Batched inputs
    of shape ``(T, Nr, Nt)``, ``(T, Nt)``, ``(T, Nr)`` are supported.
    """
    H = H.entries if isinstance(H, ChannelMatrix) else np.asarray(H)
    x = np.asarray(x)
    w = np.asarray(w)
    if H.shape[-1] != x.shape[-1] or H.shape[-2] != w.shape[-1]:
        raise ValueError(
            f"dimension mismatch: H {H.shape}, x {x.shape}, w {w.shape}")
    return np.einsum("...rt,...t->...r", H, x) + w
