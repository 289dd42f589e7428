"""Check that the learned NIL threshold approaches the Bayes boundary.

Scores for correct and incorrect top candidates are drawn from two
Gaussians with a shared variance. The learned threshold is compared with
the analytic boundary at increasing sample sizes.
"""

import argparse
import math
import random

from kbp.linking import learn_threshold


def bayes_boundary(mu_c, mu_i, sigma, p_c):
    # Equal-variance Gaussians: log-odds is linear in the score.
    return (mu_c + mu_i) / 2 + sigma ** 2 * math.log((1 - p_c) / p_c) / (mu_c - mu_i)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--mu-correct", type=float, default=8.0)
    ap.add_argument("--mu-incorrect", type=float, default=3.0)
    ap.add_argument("--sigma", type=float, default=1.5)
    ap.add_argument("--p-correct", type=float, default=0.3)
    ap.add_argument("--trials", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    target = bayes_boundary(args.mu_correct, args.mu_incorrect, args.sigma, args.p_correct)
    rng = random.Random(args.seed)
    print(f"analytic boundary: {target:.4f}")
    print("     n   mean_alpha   mean_abs_err")
    for n in (20, 100, 1000, 10000):
        alphas = []
        for _ in range(args.trials):
            data = []
            for _ in range(n):
                ok = rng.random() < args.p_correct
                mu = args.mu_correct if ok else args.mu_incorrect
                data.append((rng.gauss(mu, args.sigma), ok))
            try:
                alphas.append(learn_threshold(data))
            except ValueError:
                pass  # a draw with a single class
        err = sum(abs(a - target) for a in alphas) / len(alphas)
        print(f"{n:6d}   {sum(alphas) / len(alphas):10.4f}   {err:12.4f}")


if __name__ == "__main__":
    main()
