"""The two SMA receivers on a single noisy channel use, and in bulk."""
import numpy as np

from smasim import channel, detectors, modem

rng = channel.substream(7, 0)
qpsk = modem.constellation(4)
Nt, Nr, rho = 4, 4, channel.db_to_linear(6.0)

# Each user sees its own Rayleigh channel matrix and its own noise
H1 = channel.sample_channel(Nt, Nr, 1.0, rng)
H2 = channel.sample_channel(Nt, Nr, 1.0, rng)
noise = channel.NoiseSpec.from_snr(rho)
x = modem.encode_sma([0, 1], [1, 0], qpsk, Nt)      # antenna 2, point 1
y1 = channel.received_vector(H1, x, channel.sample_noise(Nr, noise, rng))
y2 = channel.received_vector(H2, x, channel.sample_noise(Nr, noise, rng))

# UE-1 knows the active column and only decides the symbol
print("UE-1 decides point", detectors.detect_ue1(y1, H1.column(2), qpsk))
# UE-2 runs the joint (antenna, symbol) search and keeps the antenna
print("UE-2 decides", detectors.detect_ue2(y2, H2, qpsk))

# The SNR-weighted correlation metric picks the same hypothesis
metric = detectors.ue2_ml_metric(np.sqrt(rho) * y2, H2, qpsk, rho)
print("argmin of the correlation form:", np.unravel_index(np.argmin(metric), metric.shape))

# A batch of 100k uses at the same SNR: count antenna errors
T = 100_000
H = channel.sample_channel(Nt, Nr, 1.0, rng, size=T)
j = rng.integers(0, Nt, T)
n = rng.integers(0, 4, T)
y = H[np.arange(T), :, j] * qpsk.points[n][:, None] + channel.sample_noise(Nr, noise, rng, size=T)
res = detectors.detect_ue2(y, H, qpsk)
print("antenna error rate at 6 dB:", np.mean(res.antenna_index != j))
