"""Monte Carlo estimates next to their closed forms."""
import numpy as np

from smasim import Metric, Scenario, run_ber, run_outage, run_sum_rate
from smasim.montecarlo import analytic_companion

grid = (0.0, 4.0, 8.0, 12.0)
sma = Scenario(name="sma", scheme="SMA", experiment="ber", snr_grid_db=grid, trials=100_000,
               master_seed=1)
ber = run_ber(sma)
for metric, series in ber.items():
    ana = analytic_companion(sma, metric)
    print(metric.value)
    for p, a in zip(series.points, ana):
        print(f"  {p.snr_db:5.1f} dB  sim {p.estimate:.3e} +- {p.standard_error:.1e}   closed form {a:.3e}")

# The same system against the NOMA baseline
noma = run_ber(sma.with_overrides(name="noma", scheme="NOMA"))
print("UE-1 SMA/NOMA:", np.round(ber[Metric.BER_UE1].estimates / noma[Metric.BER_UE1].estimates, 3))
print("UE-2 SMA/NOMA:", np.round(ber[Metric.BER_UE2].estimates / noma[Metric.BER_UE2].estimates, 3))

# Outage and sum rate share the instantaneous-rate sampler
out = run_outage(sma.with_overrides(experiment="outage"))
print("outage UE-1:", out[Metric.OUTAGE_UE1].estimates, "UE-2:", out[Metric.OUTAGE_UE2].estimates)
rate = run_sum_rate(sma.with_overrides(experiment="sum_rate"))[Metric.SUM_RATE]
print("sum rate:", np.round(rate.estimates, 3), "+-", np.round(rate.standard_errors, 4))

# Results do not depend on the worker count
again = run_ber(sma, workers=2)
print("identical with 2 workers:", all(again[m].points == ber[m].points for m in ber))
