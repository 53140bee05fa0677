"""Seed ensemble of the plane-wave reconstruction sweep.

Writes one CSV per seed plus an ensemble summary (median MNE per frequency).
"""
import argparse
from pathlib import Path

import numpy as np

from rkbeam.simharness import ScenarioConfig, run_reconstruction, write_result


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--seeds", type=int, default=10)
    p.add_argument("--snr", type=float, default=30.0)
    p.add_argument("--out", default="results/reconstruction")
    args = p.parse_args()

    out = Path(args.out)
    per_seed = []
    for seed in range(1, args.seeds + 1):
        res = run_reconstruction(ScenarioConfig(seed=seed, snr_db=args.snr))
        write_result(res, out / f"seed{seed:02d}")
        per_seed.append(np.array([[r[0], r[2], r[3]] for r in res.rows]))
    stack = np.stack(per_seed)
    freqs = stack[0, :, 0]
    med_p = np.median(stack[:, :, 1], axis=0)
    med_o = np.median(stack[:, :, 2], axis=0)
    lines = ["freq_hz,median_mne_proposed_db,median_mne_omni_db"]
    lines += [f"{f:.17g},{a:.17g},{b:.17g}" for f, a, b in zip(freqs, med_p, med_o)]
    (out / "summary.csv").write_text("\n".join(lines) + "\n")
    for f, a, b in zip(freqs, med_p, med_o):
        print(f"{f:8.1f} Hz  proposed {a:7.2f} dB  omni {b:7.2f} dB")


if __name__ == "__main__":
    main()
