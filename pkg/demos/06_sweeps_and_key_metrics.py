"""A reduced Monte-Carlo sweep producing the key-generation metrics.

Runs a small version of the three-scheme SNR sweep (the full presets use
1000 trials per cell; pass --full to reproduce them) and prints the
correlation, key rates, and disagreement rate per cell, then writes the
CSV the way the command line front end would.
"""

import argparse
import os
import tempfile

from lockeysim.config import build_config
from lockeysim.harness import emit_csv, preset_config, run_sweep

parser = argparse.ArgumentParser()
parser.add_argument("--full", action="store_true", help="run the full 1000-trial preset")
parser.add_argument("--output", default=None, help="CSV path (default: temp file)")
args = parser.parse_args()

overrides = {} if args.full else {
    "harness.trials": 100,
    "harness.snr_grid_db": [0.0, 10.0, 20.0, 30.0],
}
config = preset_config("fig5c", base=build_config(overrides))
rows = run_sweep(config)

print(f"{'scheme':13s} {'snr':>5s} {'rho':>6s} {'bits/sc':>8s} {'info':>6s} {'kdr':>6s}")
for row in rows:
    print(f"{row.scheme:13s} {row.snr_db:5.1f} {row.rho_empirical:6.3f} "
          f"{row.csk_bits:8.3f} {row.csk_info:6.2f} {row.kdr:6.3f}")

path = args.output or os.path.join(tempfile.gettempdir(), "lockeysim_demo_sweep.csv")
emit_csv(rows, path)
print(f"\nwrote {len(rows)} rows to {path}")
print("equivalent command line:")
print("  lockeysim simulate --preset fig5c --output sweep.csv"
      + ("" if args.full else "  (with harness.trials reduced in a config file)"))
