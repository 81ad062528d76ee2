"""Regenerate the CSV data behind each figure.

Usage: python scripts/reproduce_figures.py [--out results] [--quick] [fig ...]

``--quick`` cuts the Monte Carlo budget so a full pass finishes in a few
minutes on one core; the analytic columns are unaffected.
"""

import argparse
import sys

from noisemod import cli

MC_FULL = ["--mc-trials", "1000000", "--mc-max-trials", "10000000"]
MC_QUICK = ["--mc-trials", "20000", "--mc-max-trials", "200000"]

RECIPES = {
    # NoiseMod (N=50) against BPSK and NC-FSK on a per-bit SNR axis
    "fig1": [["ber-awgn", "--n", "50", "--snr-convention", "per-bit", "--snr", "0:24:1",
              "--baselines", "--seed", "1", "MC"]],
    # BER against per-sample SNR for N = 10, 50, 100
    "fig2": [["ber-awgn", "--n", "10,50,100", "--snr", "-5:20:1", "--seed", "2", "MC"]],
    # Rayleigh fading with and without two-branch selection
    "fig3": [["ber-fading", "--n", "50", "--snr", "-5:20:1", "--seed", "3",
              "--channel", "rayleigh,div2-ideal,div2-maxstat,div2-energy", "MC"]],
    # Shannon capacity, 1/N efficiency and mutual information
    "fig4": [["capacity", "--n", "10,50,100", "--snr", "-10:30:1"]],
    # energy per bit against distance and the crossover table
    "fig5": [
        ["energy", "--freqs", "2.4e9,5.725e9,24e9", "--calibrate", "2.4e9=41.7", "--distances", "0.5:100:0.5"],
        ["crossover", "--freqs", "2.4e9,5.725e9,24e9", "--calibrate", "2.4e9=41.7"],
    ],
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    parser.add_argument("figures", nargs="*", choices=[[], *RECIPES], default=[])
    parser.add_argument("--out", default="results")
    parser.add_argument("--quick", action="store_true")
    parser.add_argument("--workers", default="1")
    args = parser.parse_args(argv)

    mc = (MC_QUICK if args.quick else MC_FULL) + ["--workers", args.workers]
    for fig in args.figures or list(RECIPES):
        for recipe in RECIPES[fig]:
            argv_fig = []
            for tok in recipe:
                argv_fig.extend(mc if tok == "MC" else [tok])
            print(f"== {fig}: noisemod {' '.join(argv_fig)}")
            code = cli.main(["--out", f"{args.out}/{fig}"] + argv_fig)
            if code:
                return code
    return 0


if __name__ == "__main__":
    sys.exit(main())
