"""Seed ensemble of the simple-beamformer sweep: DI per frequency and 1 kHz peak angles."""
import argparse
from pathlib import Path

import numpy as np

from rkbeam.simharness import ScenarioConfig, run_beamforming, write_result


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--seeds", type=int, default=10)
    p.add_argument("--out", default="results/beamforming")
    args = p.parse_args()

    out = Path(args.out)
    di = []
    for seed in range(1, args.seeds + 1):
        res = run_beamforming(ScenarioConfig(seed=seed))
        write_result(res, out / f"seed{seed:02d}")
        di.append([r[2] for r in res.rows])
        freqs = [r[0] for r in res.rows]
        _, rows = res.tables["patterns"]
        f1k = min(freqs, key=lambda f: abs(f - 1000.0))
        peak = max((r for r in rows if r[0] == f1k), key=lambda r: r[4])
        print(f"seed {seed:2d}: pattern peak at {peak[1]:.0f} deg ({f1k:.0f} Hz)")
    di = np.array(di)
    lines = ["freq_hz,median_di_db,min_di_db,max_di_db"]
    lines += [f"{f:.17g},{np.median(c):.17g},{c.min():.17g},{c.max():.17g}" for f, c in zip(freqs, di.T)]
    (out / "summary.csv").write_text("\n".join(lines) + "\n")
    for f, c in zip(freqs, di.T):
        print(f"{f:8.1f} Hz  DI median {np.median(c):6.2f} dB  range [{c.min():6.2f}, {c.max():6.2f}]")


if __name__ == "__main__":
    main()
