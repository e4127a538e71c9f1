"""Detection saturation under correlated test outcomes, numerically.

For a sweep of correlation levels this script simulates detection-rate
curves dr(n), compares them with the closed form, fits the effective-size
model back onto each curve, and prints one table row per correlation.
The CSV per curve (n, simulated, model bound, closed form) lands under
--out for plotting.

The punchline is visible in the table: with independence dr(n) climbs
toward 1, while any positive correlation caps the curve near its
asymptotic limit long before n runs out.
"""

import argparse
from pathlib import Path

from vfkit.saturation import (
    NoFitError,
    SaturationParams,
    analytic_no_detection,
    asymptotic_limit,
    dr_upper_bound,
    fit_saturation,
    simulate_exchangeable,
)
from vfkit.report import write_sim_csv

P_BAR = 0.2
RHOS = [0.0, 0.05, 0.1, 0.3, 0.6]


def run(out: Path, n_max: int, trials: int, seed: int) -> None:
    out.mkdir(parents=True, exist_ok=True)
    header = (f"{'rho':>5} {'dr(1)':>7} {'dr(10)':>7} {f'dr({n_max})':>8} "
              f"{'limit':>7} {'p_fit':>7} {'rho_fit':>8}")
    print(f"p_bar = {P_BAR}, {trials} trials per point, seed {seed}")
    print(header)
    print("-" * len(header))

    for rho in RHOS:
        curve = simulate_exchangeable(n_max, P_BAR, rho, trials, seed)
        drs = dict(curve.points)

        bound = [dr_upper_bound(SaturationParams(P_BAR, rho, n))
                 for n, _ in curve.points]
        analytic = [1.0 - analytic_no_detection(P_BAR, rho, n)
                    for n, _ in curve.points]
        write_sim_csv(curve, bound, analytic, out / f"sim_rho{rho:g}.csv")

        limit = "1.0" if rho == 0.0 else f"{asymptotic_limit(P_BAR, rho):.3f}"
        try:
            fit = fit_saturation(curve)
            fitted = f"{fit.p_hat:>7.3f} {fit.rho_hat:>8.3f}"
        except NoFitError:
            # a fully saturated curve (dr = 1) is outside the fit domain
            fitted = f"{'--':>7} {'--':>8}"
        print(f"{rho:>5g} {drs[1]:>7.3f} {drs[10]:>7.3f} {drs[n_max]:>8.3f} "
              f"{limit:>7} {fitted}")

    print()
    print(f"curves written to {out}/sim_rho*.csv")
    print("note: the fitted parameters describe the effective-size family; "
          "mixture-generated curves are matched in shape, not in (p, rho).")


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", type=Path, default=Path("runs/saturation"))
    parser.add_argument("--n-max", type=int, default=100)
    parser.add_argument("--trials", type=int, default=20_000)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    run(args.out, args.n_max, args.trials, args.seed)
