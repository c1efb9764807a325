"""Outlet time series for the characteristic regimes of the reference set.

Produces one orbit CSV per regime: a periodic window, irregular (chaotic)
intermittency, regular intermittency just outside the period-8 window edge,
long-period regular intermittency even closer to the edge, and transient
chaos inside a narrow window embedded in the chaotic band.

Usage: python scripts/time_series_regimes.py [--outdir results/]
"""

import argparse
from pathlib import Path

from recycle_reactor import InletState, IntegratorConfig, ReactorParams, simulate_orbit
from recycle_reactor.io import write_orbit_csv

# theta_h, passes, transient
REGIMES = {
    "periodic": (-0.0335, 2000, 2000),
    "intermittent_irregular": (-0.03299, 20000, 2000),
    "intermittent_regular": (-0.03300992, 60000, 5000),
    "intermittent_long_period": (-0.033010120925, 100000, 5000),
    "transient_chaos": (-0.03298705, 8000, 0),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--outdir", default="results")
    args = ap.parse_args()
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)

    cfg = IntegratorConfig()
    for name, (theta_h, passes, transient) in REGIMES.items():
        p = ReactorParams(theta_h=theta_h)
        series = simulate_orbit(InletState(0.0, 0.0), p, cfg,
                                n_passes=passes, n_transient=transient)
        path = outdir / f"series_{name}.csv"
        write_orbit_csv(path, series)
        print(f"{name}: theta_h={theta_h} -> {path}")


if __name__ == "__main__":
    main()
