#!/usr/bin/env python3
"""Closed-loop feasibility check for the inertial-coefficient estimator.

Independent prototype built on scipy.special so the protocol choices can be
validated before the package implementation exists: thresholds are the
distinct observed |x|, rho is the empirical survival fraction, candidates are
scored by squared Pearson correlation between the theoretical tail
probabilities and rho, and the winner is refined by golden section.

Prints median relative error of m-hat and median r^2 over 50 seeds for
N in {100, 1000}, plus wall time.
"""

import time

import numpy as np
from scipy.special import erfc, erfcinv

PHI = (np.sqrt(5.0) - 1.0) / 2.0


def sample_abs(m, t, n, seed):
    rng = np.random.Generator(np.random.Philox(seed))
    u = 1.0 - rng.random(n)
    return np.sqrt(2.0 * t / m) * erfcinv(np.sqrt(u))


def tail(m, t, x):
    return erfc(np.asarray(x) * np.sqrt(m / (2.0 * t))) ** 2


def pearson_r2_rows(pred, obs):
    pred = pred - pred.mean(axis=1, keepdims=True)
    obs = obs - obs.mean()
    num = pred @ obs
    den = np.sqrt((pred**2).sum(axis=1) * (obs**2).sum())
    out = np.zeros(pred.shape[0])
    ok = den > 0
    out[ok] = (num[ok] / den[ok]) ** 2
    return out


def fit(abs_x, t, n_grid=2000):
    n = abs_x.size
    thr = np.unique(abs_x[abs_x > 0])
    rho = (abs_x[None, :] >= thr[:, None]).mean(axis=1)  # counts all weeks
    ok = (rho > 0) & (rho < 1)
    m_w = 2.0 * t * (erfcinv(np.sqrt(rho[ok])) / thr[ok]) ** 2
    grid = np.geomspace(m_w.min() / 4.0, m_w.max() * 4.0, n_grid)
    pr = erfc(np.sqrt(grid[:, None] / (2.0 * t)) * thr[None, :]) ** 2
    r2 = pearson_r2_rows(pr, rho)
    k = int(np.argmax(r2))

    def f(m):
        p = tail(m, t, thr)
        c = np.corrcoef(p, rho)[0, 1]
        return c * c

    lo = grid[max(k - 1, 0)]
    hi = grid[min(k + 1, n_grid - 1)]
    a, b = lo, hi
    c = b - PHI * (b - a)
    d = a + PHI * (b - a)
    fc, fd = f(c), f(d)
    while (b - a) > 1e-9 * b:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + PHI * (b - a)
            fd = f(d)
    m_hat = c if fc >= fd else d
    return m_hat, max(f(m_hat), r2[k])


def run(n, m_true_list=(355.92, 977.73, 2513.76), seeds=50, t=1.0):
    t0 = time.time()
    worst = 0.0
    for m_true in m_true_list:
        errs, r2s = [], []
        for s in range(seeds):
            ax = sample_abs(m_true, t, n, seed=1000 * s + 7)
            m_hat, r2 = fit(ax, t)
            errs.append(abs(m_hat / m_true - 1.0))
            r2s.append(r2)
        med_err = float(np.median(errs))
        med_r2 = float(np.median(r2s))
        worst = max(worst, med_err)
        print(f"  N={n:5d} m={m_true:8.2f}: median |err| = {med_err:.4f}, "
              f"median r2 = {med_r2:.5f}")
    print(f"  N={n} wall: {time.time() - t0:.1f}s, worst median err {worst:.4f}")
    return worst


if __name__ == "__main__":
    run(100)
    run(1000)
