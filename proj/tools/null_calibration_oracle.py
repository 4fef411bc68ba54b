#!/usr/bin/env python3
"""Standalone Monte-Carlo oracle for the label-swap null calibration thresholds.

Independent of the C++ implementation: uses numpy only. It simulates the two
synthetic dataset families used by the acceptance suite and reports how often
the observed/null ratio lands in the accepted ranges, so the thresholds in
tests/acceptance.cpp can be checked before (and independently of) the build.

Dataset families (dim 8, 30 + 30 images, 20 statements, 500 null trials):

  exchangeable  every image row ~ normalize(N(0, I)); statements likewise.
  structured    group A rows ~ normalize(+s/2 * u + noise * N(0, I)),
                group B rows ~ normalize(-s/2 * u + noise * N(0, I)),
                with u a random unit direction, s = 0.5, noise = 0.3.

Usage: null_calibration_oracle.py [--replications 50] [--datasets 100]
"""
import argparse

import numpy as np

DIM = 8
N_A = 30
N_B = 30
STATEMENTS = 20
TRIALS = 500
SEPARATION = 0.5
NOISE = 0.3


def unit_rows(x):
    return x / np.linalg.norm(x, axis=1, keepdims=True)


def make_dataset(rng, structured):
    texts = unit_rows(rng.standard_normal((STATEMENTS, DIM)))
    if structured:
        u = rng.standard_normal(DIM)
        u /= np.linalg.norm(u)
        a = unit_rows(SEPARATION / 2 * u + NOISE * rng.standard_normal((N_A, DIM)))
        b = unit_rows(-SEPARATION / 2 * u + NOISE * rng.standard_normal((N_B, DIM)))
    else:
        a = unit_rows(rng.standard_normal((N_A, DIM)))
        b = unit_rows(rng.standard_normal((N_B, DIM)))
    return texts, a, b


def mean_abs_bias(sims, a_mask):
    bias = sims[:, a_mask].mean(axis=1) - sims[:, ~a_mask].mean(axis=1)
    return np.abs(bias).mean()


def calibrate(rng, texts, a, b):
    pooled = np.vstack([a, b])
    sims = texts @ pooled.T
    truth = np.zeros(N_A + N_B, dtype=bool)
    truth[:N_A] = True
    observed = mean_abs_bias(sims, truth)
    null = np.empty(TRIALS)
    for t in range(TRIALS):
        perm = rng.permutation(N_A + N_B)
        mask = np.zeros(N_A + N_B, dtype=bool)
        mask[perm[:N_A]] = True
        null[t] = mean_abs_bias(sims, mask)
    q05, q95 = np.quantile(null, [0.05, 0.95])  # linear interpolation (type 7)
    return observed, null.mean(), q05, q95


def run_family(rng, structured, datasets):
    in_range = above = inside_q = 0
    for _ in range(datasets):
        texts, a, b = make_dataset(rng, structured)
        observed, null_mean, q05, q95 = calibrate(rng, texts, a, b)
        ratio = observed / null_mean
        in_range += 0.7 <= ratio <= 1.4
        above += ratio > 1.5
        inside_q += q05 <= observed <= q95
    return in_range, above, inside_q


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--replications", type=int, default=50)
    parser.add_argument("--datasets", type=int, default=100)
    parser.add_argument("--seed", type=int, default=20240601)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    ex_in, ex_q, st_above = [], [], []
    for rep in range(args.replications):
        in_range, _, inside_q = run_family(rng, False, args.datasets)
        _, above, _ = run_family(rng, True, args.datasets)
        ex_in.append(in_range)
        ex_q.append(inside_q)
        st_above.append(above)
        print(f"rep {rep:3d}: exchangeable ratio in [0.7,1.4]: {in_range:3d}/{args.datasets}"
              f"  observed in [q05,q95]: {inside_q:3d}/{args.datasets}"
              f"  structured ratio > 1.5: {above:3d}/{args.datasets}")

    def summary(name, counts, gate):
        counts = np.asarray(counts)
        print(f"{name}: min {counts.min()} median {np.median(counts):.1f} max {counts.max()}"
              f"  replications meeting >= {gate}: {(counts >= gate).sum()}/{len(counts)}")

    summary("exchangeable ratio in [0.7, 1.4]", ex_in, 90)
    summary("exchangeable observed in [q05, q95]", ex_q, 90)
    summary("structured ratio > 1.5", st_above, 95)


if __name__ == "__main__":
    main()
