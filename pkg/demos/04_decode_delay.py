"""Latency comparison: how long until a lost packet becomes readable?

Time to decode counts the slots between a packet's lost original and the
moment a receiver finally recovers it.  Waiting for the whole batch
before repairing (strict-rule schedulers) puts a hard floor under that
delay; interleaving repairs into the batch does not.

Second half: pushing the loss rate up actually SHORTENS the relaxed
scheduler's delay past a point, because packets missed by everyone stop
hunting for coding partners and are repaired uncoded on the spot.
"""

import math

import numpy as np

from ncretx.harness import replication_seed, run_replication

REPS = 120


def mean_ttd(algorithms, m, p, n, tag):
    sums = {a: [] for a in algorithms}
    for r in range(REPS):
        seed = replication_seed(tag, m, p, n, r)
        for row in run_replication(algorithms, m, p, n, seed):
            if not math.isnan(row["ttd_mean"]):
                sums[row["algorithm"]].append(row["ttd_mean"])
    return {a: float(np.mean(v)) for a, v in sums.items()}


def main() -> None:
    print(__doc__)
    print("delay vs audience size (p=0.25, N=20):")
    print(f"{'M':>3} {'benefit':>9} {'sort-utility':>13}")
    for m in (2, 4, 6, 8, 10):
        got = mean_ttd(["benefit", "sort-utility"], m, 0.25, 20, tag=4)
        print(f"{m:>3} {got['benefit']:>9.2f} {got['sort-utility']:>13.2f}")

    print("\ndelay vs loss rate (M=5, N=20, relaxed scheduler):")
    print(f"{'p':>5} {'benefit':>9}")
    for p in (0.1, 0.3, 0.5, 0.7, 0.8, 0.9):
        got = mean_ttd(["benefit"], 5, p, 20, tag=5)
        print(f"{p:>5.1f} {got['benefit']:>9.2f}")
    print("\nNote the turnover after p=0.8.")


if __name__ == "__main__":
    main()
