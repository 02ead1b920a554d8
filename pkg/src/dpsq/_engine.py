"""Event loop of the DPS queue simulator, compiled with numba.

With exponential service at every class the queue state (N_1, ..., N_M) is a
continuous-time Markov chain: class k completes work at total rate
N_k * mu_k * g_k / sum_j(g_j * N_j), and memorylessness lets the departing
job be drawn uniformly among the class's jobs. The loop therefore samples
one exponential holding time per transition instead of managing per-job
timers, which is exact and much faster.

Randomness comes from three caller-supplied generator streams: holding
times, transition selection, and departing-job selection. Keeping the
streams separate makes trajectories reproducible under any change that
preserves the event sequence.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def run_dps_ctmc(
    lam,
    mu,
    g,
    target,
    warmup,
    nb,
    max_events,
    gen_hold,
    gen_pick,
    gen_victim,
):
    m = lam.shape[0]
    lam_cum = np.cumsum(lam)
    lam_tot = lam_cum[m - 1]
    n_rec = target - warmup

    cap = 1024
    buf = np.empty((m, cap), dtype=np.float64)  # arrival times of jobs in system
    counts = np.zeros(m, dtype=np.int64)
    completions = np.zeros(m, dtype=np.int64)
    sums = np.zeros(m)
    batch_sum = np.zeros((m, nb))
    batch_cnt = np.zeros((m, nb), dtype=np.int64)
    area = np.zeros(m)  # integral of N_k dt since time 0
    snap_t = np.zeros((m, nb + 1))
    snap_a = np.zeros((m, nb + 1))
    next_snap = np.zeros(m, dtype=np.int64)
    rates = np.empty(m)

    t = 0.0
    finished = 0
    events = 0
    while finished < m and events < max_events:
        events += 1
        total_weight = 0.0
        for k in range(m):
            total_weight += g[k] * counts[k]
        completion_total = 0.0
        for k in range(m):
            if counts[k] > 0:
                rates[k] = counts[k] * mu[k] * g[k] / total_weight
            else:
                rates[k] = 0.0
            completion_total += rates[k]
        overall = lam_tot + completion_total

        dt = gen_hold.exponential(1.0) / overall
        for k in range(m):
            area[k] += counts[k] * dt
        t += dt

        u = gen_pick.random() * overall
        if u < lam_tot:
            k = 0
            while k < m - 1 and u > lam_cum[k]:
                k += 1
            if counts[k] == cap:
                grown = np.empty((m, cap * 2), dtype=np.float64)
                grown[:, :cap] = buf
                buf = grown
                cap *= 2
            buf[k, counts[k]] = t
            counts[k] += 1
        else:
            u -= lam_tot
            k = 0
            acc = rates[0]
            while k < m - 1 and u > acc:
                k += 1
                acc += rates[k]
            if counts[k] == 0:
                # float roundoff landed past the last occupied class
                for kk in range(m):
                    if counts[kk] > 0:
                        k = kk
                        break
            idx = gen_victim.integers(0, counts[k])
            sojourn = t - buf[k, idx]
            counts[k] -= 1
            buf[k, idx] = buf[k, counts[k]]
            completions[k] += 1
            c = completions[k]
            if c == warmup:
                snap_t[k, 0] = t
                snap_a[k, 0] = area[k]
            elif warmup < c <= target:
                i_rec = c - warmup - 1
                b = i_rec * nb // n_rec
                if b >= nb:
                    b = nb - 1
                sums[k] += sojourn
                batch_sum[k, b] += sojourn
                batch_cnt[k, b] += 1
                rc = i_rec + 1
                while next_snap[k] < nb and rc == (next_snap[k] + 1) * n_rec // nb:
                    snap_t[k, next_snap[k] + 1] = t
                    snap_a[k, next_snap[k] + 1] = area[k]
                    next_snap[k] += 1
                if c == target:
                    finished += 1

    return t, completions, sums, batch_sum, batch_cnt, area, snap_t, snap_a, events
