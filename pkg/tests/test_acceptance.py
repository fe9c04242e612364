"""End-to-end acceptance checks at desk scale (10^6 trials per SNR point).

Each test prints one ``PASS``/``FAIL`` line; the lines are repeated in a
summary section at the end of the pytest run. The full-scale runs take a
few minutes on one core; deselect with ``-m "not slow"``.
"""

import filecmp
import math
import os
import time

import numpy as np
import pytest
from scipy import integrate

import conftest
from oracles import brute_ue1_batch, brute_ue2_batch, chi2_pdf
from smasim import cli
from smasim.analytic import abep_ue1, ergodic_sum_rate, outage_ue1, union_bound_ue2
from smasim.channel import NoiseSpec, sample_channel, sample_noise, substream
from smasim.detectors import detect_ue1, detect_ue2
from smasim.modem import psk
from smasim.montecarlo import Metric, Scenario, run_sum_rate

pytestmark = pytest.mark.slow

TRIALS = 1_000_000
SEED = 2024


def report(n, title, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} criterion {n}: {title} -- {detail}"
    conftest.ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def read_csv(path):
    data = np.genfromtxt(path, delimiter=",", names=True)
    return {k: np.atleast_1d(data[k]) for k in data.dtype.names}


def run_preset(name, out_dir, workers=1):
    t0 = time.perf_counter()
    status = cli.run(cli.RunConfig(config=name, out_dir=str(out_dir), workers=workers))
    assert status == 0, f"{name} run exited with {status}"
    return time.perf_counter() - t0


@pytest.fixture(scope="module")
def fig2(tmp_path_factory):
    out = tmp_path_factory.mktemp("fig2_w1")
    return out, run_preset("fig2", out)


@pytest.fixture(scope="module")
def fig3(tmp_path_factory):
    out = tmp_path_factory.mktemp("fig3")
    run_preset("fig3", out)
    return out


@pytest.fixture(scope="module")
def fig4(tmp_path_factory):
    out = tmp_path_factory.mktemp("fig4")
    run_preset("fig4", out)
    return out


def test_criterion_1_ue1_ber_matches_closed_form(fig2):
    out, seconds = fig2
    d = read_csv(out / "ber_sma_ue1.csv")
    assert np.all(d["trials_used"] == TRIALS)
    want = abep_ue1(10 ** (d["snr_db"] / 10) / 2, 4)
    mask = d["estimate"] >= 1e-5
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.abs(d["estimate"] - want) / d["standard_error"]
    worst = float(np.max(z[mask]))
    ok = bool(np.all(z[mask] <= 3)) and seconds < 300
    assert report(1, "SMA UE-1 BER within 3 SE of closed form", ok,
                  f"{mask.sum()} points with BER >= 1e-5, worst |dev| = {worst:.2f} SE; "
                  f"fig2 run {seconds:.0f} s (target < 300 s)")


def test_criterion_2_ue2_ber_below_union_bound(fig2):
    out, _ = fig2
    d = read_csv(out / "ber_sma_ue2.csv")
    bound = union_bound_ue2(10 ** (d["snr_db"] / 10), 4, 4, psk(4)).clamped
    below = d["estimate"] <= bound
    usable = np.flatnonzero(d["estimate"] >= 1e-4)
    k = usable[-1]
    ratio = bound[k] / d["estimate"][k]
    with np.errstate(divide="ignore", invalid="ignore"):
        margin = (bound - d["estimate"]) / d["standard_error"]
    violations = ", ".join(f"{s:g} dB ({m:+.2f} SE)" for s, m, b in
                           zip(d["snr_db"], margin, below) if not b)
    ok = bool(np.all(below)) and ratio <= 4
    assert report(2, "SMA UE-2 BER <= clamped union bound; looseness <= 4", ok,
                  f"violations: {violations or 'none'}; bound/sim = {ratio:.3f} at {d['snr_db'][k]:g} dB")


def _ergodic_quadrature(rho, Nr):
    f = lambda g: math.log2(1 + g) * chi2_pdf(g, rho, Nr)
    mid = Nr * rho
    return (integrate.quad(f, 0, mid, epsabs=0, epsrel=1e-12, limit=400)[0]
            + integrate.quad(f, mid, math.inf, epsabs=0, epsrel=1e-12, limit=400)[0])


def test_criterion_3_ergodic_sum_rate():
    grid_db = (0.0, 10.0, 20.0, 30.0)
    worst_rel, worst_z, fails = 0.0, 0.0, []
    for Nr in (1, 2, 4):
        for s in grid_db:
            rho = 10 ** (s / 10)
            want = math.log2(4) + _ergodic_quadrature(rho, Nr)
            worst_rel = max(worst_rel, abs(ergodic_sum_rate(rho, Nr, 4) - want) / want)
        scn = Scenario(name=f"c3_nr{Nr}", scheme="SMA", experiment="sum_rate", Nt=4, Nr=Nr, M=4,
                       fair_comparison=False, snr_grid_db=grid_db, trials=TRIALS, master_seed=SEED)
        series = run_sum_rate(scn)[Metric.SUM_RATE]
        z = np.abs(series.estimates - ergodic_sum_rate(10 ** (series.snr_db / 10), Nr, 4))
        z = z / series.standard_errors
        worst_z = max(worst_z, float(z.max()))
        fails += [f"Nr={Nr} {s:g} dB" for s, v in zip(series.snr_db, z) if v > 3]
    ok = worst_rel < 1e-6 and not fails
    assert report(3, "ergodic sum rate closed form vs quadrature and Monte Carlo", ok,
                  f"max rel. err vs quadrature {worst_rel:.1e}; worst MC |dev| {worst_z:.2f} SE"
                  + (f"; outside 3 SE: {', '.join(fails)}" if fails else ""))


def test_criterion_4_outage(fig4):
    d1 = read_csv(fig4 / "outage_sma_ue1.csv")
    d2 = read_csv(fig4 / "outage_sma_ue2.csv")
    want = outage_ue1(2.0, 10 ** (d1["snr_db"] / 10), 4)
    mask = d1["estimate"] >= 1e-5
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.abs(d1["estimate"] - want) / d1["standard_error"]
    ue2_zero = bool(np.all(d2["estimate"] == 0) and np.all(d2["trials_used"] == TRIALS))
    ok = bool(np.all(z[mask] <= 3)) and ue2_zero
    assert report(4, "SMA UE-1 outage within 3 SE; UE-2 outage identically 0", ok,
                  f"{mask.sum()} points >= 1e-5, worst |dev| {z[mask].max():.2f} SE; "
                  f"UE-2 all zero: {ue2_zero}")


def test_criterion_5_orderings(fig2, fig3, fig4):
    out, _ = fig2
    notes, ok = [], True
    for user in ("ue1", "ue2"):
        sma = read_csv(out / f"ber_sma_{user}.csv")
        noma = read_csv(out / f"ber_noma_{user}.csv")
        hi = sma["snr_db"] >= 10
        better = sma["estimate"][hi] < noma["estimate"][hi]
        ok &= bool(np.all(better))
        notes.append(f"BER {user}: SMA < NOMA at {better.sum()}/{hi.sum()} points >= 10 dB")
    sma = read_csv(fig3 / "sum_rate_sma_nr4.csv")
    noma = read_csv(fig3 / "sum_rate_noma_nr4.csv")
    gap = sma["estimate"] - noma["estimate"]
    ok &= bool(np.all(gap > 0))
    notes.append(f"sum rate SMA > NOMA at {(gap > 0).sum()}/{gap.size} points (min gap {gap.min():.3f})")
    sma = read_csv(fig4 / "outage_sma_ue1.csv")["estimate"]
    below = True
    for user in ("ue1", "ue2"):
        noma = read_csv(fig4 / f"outage_noma_{user}.csv")["estimate"]
        below &= bool(np.all((sma <= noma) & ((sma < noma) | (noma == 0))))
    ok &= below
    notes.append(f"SMA UE-1 outage below both NOMA curves: {below}")
    assert report(5, "SMA vs NOMA orderings (BER, sum rate, outage)", ok, "; ".join(notes))


def test_criterion_6_diversity_order():
    snr_db = np.linspace(30, 40, 11)
    slopes = {}
    for Nr in (2, 4):
        ber = abep_ue1(10 ** (snr_db / 10) / 2, Nr)
        slopes[Nr] = np.polyfit(snr_db / 10, np.log10(ber), 1)[0]
    ok = all(abs(slopes[n] + n) <= 0.5 for n in slopes)
    assert report(6, "diversity order of UE-1 BER (closed form, 30-40 dB)", ok,
                  ", ".join(f"Nr={n}: slope {s:.3f}" for n, s in slopes.items()))


def test_criterion_7_detector_oracle():
    T = 100_000
    mismatches = 0
    configs = [(Nt, M, Nr) for Nt in (2, 4) for M in (2, 4) for Nr in (1, 2)]
    for k, (Nt, M, Nr) in enumerate(configs):
        spec = psk(M)
        rng = substream(SEED, 7, k)
        H = sample_channel(Nt, Nr, 1.0, rng, size=T)
        j = rng.integers(0, Nt, T)
        n = rng.integers(0, M, T)
        y = H[np.arange(T), :, j] * spec.points[n][:, None]
        y = y + sample_noise(Nr, NoiseSpec.from_snr(2.0), rng, size=T)
        jj, nn = brute_ue2_batch(y, H, spec.points)
        res = detect_ue2(y, H, spec)
        h_active = H[np.arange(T), :, j]
        mismatches += int(np.count_nonzero((res.antenna_index != jj) | (res.point_index != nn)))
        mismatches += int(np.count_nonzero(detect_ue1(y, h_active, spec)
                                           != brute_ue1_batch(y, h_active, spec.points)))
    ok = mismatches == 0
    assert report(7, "detectors bit-exact vs brute-force enumeration", ok,
                  f"{len(configs)} configs x {T} noisy instances, {mismatches} mismatches")


def test_criterion_8_determinism(fig2, tmp_path_factory):
    out1, _ = fig2
    out2 = tmp_path_factory.mktemp("fig2_w2")
    run_preset("fig2", out2, workers=2)
    names = sorted(os.listdir(out1))
    match, mismatch, errors = filecmp.cmpfiles(out1, out2, names, shallow=False)
    ok = len(match) == len(names) == 4
    assert report(8, "fig2 CSVs byte-identical with 1 and 2 workers", ok,
                  f"{len(match)}/{len(names)} files identical" + (f"; differ: {mismatch + errors}" if not ok else ""))
