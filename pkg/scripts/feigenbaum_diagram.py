"""Bifurcation (Feigenbaum) diagram of outlet temperature vs coolant temperature.

The default range spans the whole oscillatory structure of the reference
parameter set: the period-doubling cascade (2 -> 4 -> 8 -> small chaos) on the
right, the interior crisis near theta_h = -0.0273 where the attractor suddenly
grows ~10x, and the band of alternating chaotic/periodic windows down to the
steady region below -0.0404.

Usage:
    python scripts/feigenbaum_diagram.py [--grid LO:HI:COUNT] [--out CSV] [--plot PNG]
"""

import argparse
from pathlib import Path

from recycle_reactor import InletState, IntegratorConfig, ReactorParams, SweepPlan, run_sweep
from recycle_reactor.io import write_sweep_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--grid", default="-0.0410:-0.0050:1201", help="lo:hi:count")
    ap.add_argument("--record", type=int, default=200)
    ap.add_argument("--transient", type=int, default=3000)
    ap.add_argument("--threads", type=int, default=None)
    ap.add_argument("--cold", action="store_true")
    ap.add_argument("--out", default="results/feigenbaum.csv")
    ap.add_argument("--plot", default=None, help="optional PNG path")
    args = ap.parse_args()

    lo, hi, count = args.grid.split(":")
    plan = SweepPlan.from_grid(
        "theta_h", float(lo), float(hi), int(count),
        n_transient=args.transient, n_record=args.record,
        continuation=not args.cold,
    )
    result = run_sweep(plan, ReactorParams(), IntegratorConfig(),
                       inlet0=InletState(0.0, 0.0), threads=args.threads)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_sweep_csv(out, result)
    print(f"wrote {out}")

    if args.plot:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        xs, ys = [], []
        for pt in result.points:
            if pt.theta_samples is not None:
                xs.extend([pt.value] * len(pt.theta_samples))
                ys.extend(pt.theta_samples)
        fig, ax = plt.subplots(figsize=(10, 6))
        ax.plot(xs, ys, ",", markersize=0.3, alpha=0.4)
        ax.set_xlabel("coolant temperature theta_h")
        ax.set_ylabel("outlet temperature samples")
        fig.savefig(args.plot, dpi=200, bbox_inches="tight")
        print(f"wrote {args.plot}")


if __name__ == "__main__":
    main()
