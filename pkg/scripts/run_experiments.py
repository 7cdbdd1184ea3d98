"""Run the three built-in network experiments and drop their series as CSV.

Writes one file per preset into --outdir (default ./results) sweeping the
network discount ratio, then prints the headline numbers: where each
defender arrangement stops being insurable and where the centralized
arrangement starts beating the distributed one on total defender loss.
"""

import argparse
import pathlib
import sys

import numpy as np

from flipnet.cli import preset, render_csv, sweep_records


def first_zero_eta(rows, etas, mode):
    for eta in etas:
        row = next(r for r in rows if r["mode"] == mode and r["eta"] == eta)
        if row["T_total"] == 0.0:
            return eta
    return None


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--outdir", default="results")
    ap.add_argument("--steps", type=int, default=181, help="sweep points on [0, 0.9]")
    args = ap.parse_args(argv)

    outdir = pathlib.Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    etas = np.round(np.linspace(0.0, 0.9, args.steps), 12)

    for name in ("fig8a", "fig8b", "fig9", "fig10"):
        weights, ids, params = preset(name)
        rows = sweep_records(weights, ids, params, "both", etas)
        path = outdir / f"{name}.csv"
        path.write_text(render_csv(rows, timestamp=False))
        print(f"wrote {path} ({len(rows)} records)")

        d_zero = first_zero_eta(rows, etas, "d")
        c_zero = first_zero_eta(rows, etas, "c")
        print(f"  premium hits zero: distributed at eta={d_zero}, centralized at eta={c_zero}")

        crossover = None
        for eta in etas:
            ld = next(r["L_d_total"] for r in rows if r["mode"] == "d" and r["eta"] == eta)
            lc = next(r["L_d_total"] for r in rows if r["mode"] == "c" and r["eta"] == eta)
            if eta > 0.0 and lc < ld:
                crossover = eta
                break
        print(f"  centralized total loss first beats distributed at eta={crossover}")

    return 0


if __name__ == "__main__":
    sys.exit(main())
