"""Spatial multiple access (SMA) over MIMO Rayleigh channels, with a NOMA baseline.

Submodules
----------
numerics     special functions (Q, Ei, binomial)
modem        Gray constellations, SSK antenna mapping, SMA/NOMA transmit symbols
channel      Rayleigh channel, AWGN, received vector, RNG substreams
detectors    SMA receivers (UE-1 MRC/ML, UE-2 joint SM ML) and NOMA SIC receivers
analytic     closed-form BEP, union bound, rates, ergodic sum rate, outage
montecarlo   reproducible BER / outage / sum-rate sweeps
config, cli  scenario files, presets and the ``smasim`` command
"""

from . import analytic, channel, detectors, modem, montecarlo, numerics
from .montecarlo import Metric, Scenario, run_ber, run_outage, run_sum_rate

__version__ = "0.1.0"

__all__ = [
    "analytic", "channel", "detectors", "modem", "montecarlo", "numerics",
    "Metric", "Scenario", "run_ber", "run_outage", "run_sum_rate",
]
