"""How two users share one transmission: symbol bits and antenna bits."""
import numpy as np

from smasim import modem

# UE-1's bits pick a point of an M-ary Gray-coded constellation,
# UE-2's bits pick which transmit antenna is switched on.
qpsk = modem.constellation(4)
print(qpsk.name, "points:", np.round(qpsk.points, 4))
print("Gray labels:", qpsk.gray_labels)
print("alpha, beta =", qpsk.alpha, qpsk.beta)

# Neighbours on the ring differ in one bit, opposite points in two
for n in range(4):
    print(n, modem.demap_mary(n, qpsk), "->", [modem.bit_diff_count(n, k, qpsk) for k in range(4)])

# One SMA channel use with Nt = 4: q1 = 10 for UE-1, q2 = 11 for UE-2
x = modem.encode_sma([1, 0], [1, 1], qpsk, 4)
print("transmit vector:", np.round(x, 4))
print("only one antenna is active:", modem.is_tx_vector(x, qpsk))

# The same bits, vectorized over a batch of channel uses
rng = np.random.default_rng(1)
q1 = rng.integers(0, 2, (5, 2))
q2 = rng.integers(0, 2, (5, 2))
print(np.round(modem.encode_sma(q1, q2, qpsk, 4), 3))

# The NOMA baseline instead superposes both symbols with a power split
print("NOMA superposition:", modem.encode_noma(qpsk.points[0], qpsk.points[3], 0.2, 0.8))

# Larger orders switch to square QAM
for M in (8, 16, 64):
    spec = modem.constellation(M)
    print(M, spec.name, "constant modulus:", spec.is_constant_modulus)
