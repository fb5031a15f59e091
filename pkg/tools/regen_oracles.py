#!/usr/bin/env python3
"""Regenerate the frozen Monte Carlo oracles behind the test suite.

Three jobs, each an independent computation that avoids the closed form
it is judging:

  exp-barrier     exact-sampler check of exp_barrier_spread_survival at
                  (t=1, h=0.25, lam=2).  Draws the endpoint and running
                  maximum of the driver jointly from the exact
                  conditional law, the barrier as h + Exp(lam), and
                  applies the mirror coupling by hand.

  one-reflection  unbiased oracle for the one-switch spread survival
                  mb_survival(1, t=1, x=0.25) at (nu, eta, rho) =
                  (0, 0.5, 0.9).  The no-switch piece is a
                  reflection-principle closed form; the post-switch
                  piece averages the conditional Gaussian tail over
                  exactly sampled first-passage times, so there is no
                  grid bias at all.

  grid-mc         Euler-grid estimate of the same one-switch survival
                  (1e6 paths, dt=1e-4, switch detected on the grid with
                  a snap to the barrier).  Biased low by late detection;
                  kept as a record of what a plain grid simulation
                  gives and why the frozen test value comes from the
                  unbiased oracle instead.

Seeds are fixed so a full-size run reproduces the recorded values to
the printed digits.  --scale shrinks the draw counts for a quick smoke
run; the estimates then move within their widened error bars.

Recorded full-size results (scale 1.0):

  exp-barrier      x=0.5: mc 0.57874850   x=0.2: mc 0.60613050
                   x=1.0: mc 0.26421775   (closed form within 0.72 sigma)
  one-reflection   0.59182995  (se 1.06e-4; no-switch 0.00162201,
                   post-switch 0.59020794)
  grid-mc          0.589434    (se 4.92e-4; sits ~2.4e-3 below the
                   unbiased oracle, outside its own 3 sigma)
"""

from __future__ import annotations

import argparse
import math
import sys
import time

import numpy as np
from scipy.special import ndtr

from reflcop.spread import MultiBarrierParams, exp_barrier_spread_survival, mb_survival


def job_exp_barrier(scale: float) -> None:
    n = max(int(4_000_000 * scale), 10_000)
    t, h, lam = 1.0, 0.25, 2.0
    rng = np.random.default_rng(8821447)
    b = rng.standard_normal(n) * math.sqrt(t)
    u = rng.random(n)
    # Joint draw of (B_t, sup_{s<=t} B_s): given the endpoint b, the
    # maximum is m = (b + sqrt(b^2 - 2 t log U)) / 2.
    m = 0.5 * (b + np.sqrt(b * b - 2.0 * t * np.log(u)))
    barrier = h + rng.exponential(1.0 / lam, n)
    spread = np.where(m < barrier, 2.0 * b, 2.0 * barrier)
    print(f"exp-barrier: {n} draws, (t, h, lam) = ({t}, {h}, {lam})")
    for x in (0.5, 0.2, 1.0):
        p_hat = float((spread >= x).mean())
        se = math.sqrt(p_hat * (1.0 - p_hat) / n)
        closed = exp_barrier_spread_survival(x, t, h, lam)
        dev = (closed - p_hat) / se
        print(
            f"  x={x}: closed {closed:.17g}  mc {p_hat:.8f}"
            f"  se {se:.2e}  dev {dev:+.2f} sigma"
        )


def job_one_reflection(scale: float) -> None:
    n = max(int(8_000_000 * scale), 10_000)
    rho, eta, x, t = 0.9, 0.5, 0.25, 1.0
    u1 = eta / math.sqrt(2.0 * (1.0 + rho))
    a = x / math.sqrt(2.0 * (1.0 + rho))
    # No-switch piece: P(M_t < u1, W_t >= a) for a <= u1, by reflection.
    nohit = (
        ndtr(-a / math.sqrt(t))
        - 2.0 * ndtr(-u1 / math.sqrt(t))
        + ndtr((a - 2.0 * u1) / math.sqrt(t))
    )
    # Post-switch piece: after the driver hits u1 at time tau the spread
    # restarts at eta with variance rate 2(1-rho); average the Gaussian
    # tail over tau = (u1 / xi)^2, the exact first-passage law.
    rng = np.random.default_rng(55190)
    xi = rng.standard_normal(n)
    tau = (u1 / xi) ** 2
    vals = np.zeros(n)
    hit = tau <= t
    vals[hit] = ndtr((eta - x) / np.sqrt(2.0 * (1.0 - rho) * (t - tau[hit])))
    hit_piece = float(vals.mean())
    se = float(vals.std(ddof=1)) / math.sqrt(n)
    oracle = nohit + hit_piece
    print(f"one-reflection: {n} passage-time draws")
    print(f"  no-switch {nohit:.8f}  post-switch {hit_piece:.8f}")
    print(f"  oracle {oracle:.8f}  se {se:.2e}")
    impl = mb_survival(1, t, x, MultiBarrierParams(0.0, eta, rho))
    print(f"  mb_survival(1) {impl:.10f}  dev {(impl - oracle) / se:+.2f} sigma")


def job_grid_mc(scale: float) -> None:
    rho, eta, x_thr, t = 0.9, 0.5, 0.25, 1.0
    dt = 1e-4
    steps = round(t / dt)
    n = max(int(1_000_000 * scale), 5_000)
    chunk = min(5_000, n)
    n = (n // chunk) * chunk
    sig0 = math.sqrt(2.0 * (1.0 + rho) * dt)
    sig1 = math.sqrt(2.0 * (1.0 - rho) * dt)
    rng = np.random.default_rng(773301)
    count = 0
    t0 = time.time()
    n_chunks = n // chunk
    print(f"grid-mc: {n} paths, dt={dt}, {steps} steps (slow at full size)")
    for c in range(n_chunks):
        D = np.zeros(chunk)
        regime1 = np.zeros(chunk, dtype=bool)
        Z = rng.standard_normal((steps, chunk))
        for s in range(steps):
            D += np.where(regime1, sig1, sig0) * Z[s]
            newly = (~regime1) & (D >= eta)
            if newly.any():
                D[newly] = eta
                regime1 |= newly
        count += int((D >= x_thr).sum())
        if c % 40 == 0:
            running = count / ((c + 1) * chunk)
            print(
                f"  chunk {c + 1}/{n_chunks}: running p={running:.6f}"
                f"  elapsed {time.time() - t0:.0f}s",
                flush=True,
            )
    p_hat = count / n
    se = math.sqrt(p_hat * (1.0 - p_hat) / n)
    print(f"  grid estimate {p_hat:.6f}  se {se:.2e}  3 sigma {3 * se:.2e}")
    print(f"  unbiased oracle 0.59182995; grid bias {p_hat - 0.59182995:+.6f}")


JOBS = {
    "exp-barrier": job_exp_barrier,
    "one-reflection": job_one_reflection,
    "grid-mc": job_grid_mc,
}


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        description="Recompute the Monte Carlo oracles frozen in the tests."
    )
    parser.add_argument(
        "job",
        choices=sorted(JOBS) + ["all"],
        help="which oracle to regenerate",
    )
    parser.add_argument(
        "--scale",
        type=float,
        default=1.0,
        help="multiplier on the draw counts (use e.g. 0.01 for a smoke run)",
    )
    args = parser.parse_args(argv)
    if args.scale <= 0.0:
        parser.error("--scale must be positive")
    names = sorted(JOBS) if args.job == "all" else [args.job]
    for name in names:
        JOBS[name](args.scale)
    return 0


if __name__ == "__main__":
    sys.exit(main())
