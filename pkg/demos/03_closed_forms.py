"""Closed-form error, rate and outage curves, side by side."""
import numpy as np

from smasim import analytic, modem

snr_db = np.arange(0, 31, 5)
rho = 10 ** (snr_db / 10)
qpsk = modem.constellation(4)

# UE-1 bit error probability with Nr-branch MRC (per-bit SNR = rho / log2 M)
for Nr in (1, 2, 4):
    print(f"Nr={Nr} ABEP:", np.array2string(analytic.abep_ue1(rho / 2, Nr), precision=3))

# UE-2's union bound; the raw value can exceed 1 at low SNR, plots use min(., 0.5)
ub = analytic.union_bound_ue2(rho, 4, 4, qpsk)
print("UE-2 bound raw:    ", np.array2string(ub.raw, precision=3))
print("UE-2 bound clamped:", np.array2string(ub.clamped, precision=3))

# Diversity: each decade of SNR buys Nr decades of BER at high SNR
p = analytic.abep_ue1(np.array([1e3, 1e4]) / 2, 4)
print("decades gained from 30 to 40 dB:", np.log10(p[0] / p[1]))

# Ergodic sum rates: SMA carries log2(Nt) antenna bits on top of UE-1's capacity
for Nr in (2, 4, 8):
    sma = analytic.ergodic_sum_rate(rho, Nr, Nr)
    noma = [analytic.noma_ergodic_sum_rate(r, Nr, 0.2, 0.8) for r in rho]
    print(f"Nr={Nr}: SMA", np.round(sma, 2), " NOMA", np.round(noma, 2))

# Outage at a target of 2 bit/s/Hz for both users
print("SMA UE-1:", np.array2string(analytic.outage_ue1(2.0, rho, 4), precision=2))
print("SMA UE-2:", analytic.outage_ue2(2.0, 4))
print("NOMA near:", np.array2string(analytic.noma_outage_near(2.0, rho, 4, 0.2, 0.8), precision=2))
print("NOMA far: ", np.array2string(analytic.noma_outage_far(2.0, rho, 4, 0.2, 0.8), precision=2))
