"""Reproduce the three comparison figures from the bundled presets (reduced trials).

Equivalent shell commands::

    smasim list-presets
    smasim run --config fig2 --trials 20000 --out figures --plots
"""
import os
import subprocess
import sys

from smasim import cli

out = os.path.join(os.path.dirname(os.path.abspath(__file__)), "figures")
for preset in ("fig2", "fig3", "fig4"):
    status = cli.run(cli.RunConfig(config=preset, out_dir=out, trials=20_000, emit_plots=True))
    print(preset, "exit status", status)

print(sorted(os.listdir(out)))
with open(os.path.join(out, "ber_sma_ue2.csv")) as fh:
    print(fh.read())

# The generated scripts need matplotlib; render them if it is installed
try:
    import matplotlib  # noqa: F401
except ImportError:
    print("matplotlib not installed; skipping rendering")
else:
    for preset in ("fig2", "fig3", "fig4"):
        subprocess.run([sys.executable, os.path.join(out, f"plot_{preset}.py")], check=True)
    print("wrote", [f for f in os.listdir(out) if f.endswith(".png")])
