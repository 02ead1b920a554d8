"""Discrete-event simulation of the DPS queue.

The simulator cross-validates the analytic sojourn times: it runs the exact
continuous-time Markov chain of the queue (see :mod:`dpsq._engine`), records
per-job sojourn times from arrival to departure, and reports per-class means
with batch-means standard errors plus the time-average occupancy needed for
a Little's-law self-check.

Reproducibility contract: results are a pure function of (params, weights,
config). Randomness is PCG64 (numpy's default 64-bit generator), split into
three independent streams, one per random decision category (holding times,
transition selection, departing-job selection), via SeedSequence spawning
from the single configured seed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._engine import run_dps_ctmc
from .errors import NumericError
from .model import SystemParams, WeightVector, require_paired

NUM_BATCHES = 32

# Below this many completions per class the batch-means machinery is too
# coarse to trust, so configs are rejected outright.
MIN_ARRIVALS_TARGET = 1000


@dataclass(frozen=True)
class SimConfig:
    """Run controls: seed, per-class completion target, warmup fraction.

    The run stops once every class has completed ``arrivals_target`` jobs;
    the first ``warmup_fraction`` of each class's completions are discarded
    from the statistics.
    """

    seed: int
    arrivals_target: int = 200_000
    warmup_fraction: float = 0.1

    def __post_init__(self) -> None:
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError(f"seed must fit in 64 unsigned bits, got {self.seed}")
        if int(self.arrivals_target) < MIN_ARRIVALS_TARGET:
            raise ValueError(
                f"arrivals_target must be at least {MIN_ARRIVALS_TARGET} "
                f"for the statistics to be meaningful, got {self.arrivals_target}"
            )
        if not 0.0 <= float(self.warmup_fraction) < 1.0:
            raise ValueError(
                f"warmup_fraction must lie in [0, 1), got {self.warmup_fraction}"
            )
        object.__setattr__(self, "seed", int(self.seed))
        object.__setattr__(self, "arrivals_target", int(self.arrivals_target))
        object.__setattr__(self, "warmup_fraction", float(self.warmup_fraction))


@dataclass(frozen=True)
class SimEstimate:
    """Simulated per-class sojourn means with standard errors and run metadata.

    ``completed`` counts every observed completion per class (warmup and
    overshoot included); exactly ``arrivals_target - warmup`` samples per
    class enter the statistics. ``aggregate_mean`` is the completion-weighted
    mean, which estimates the arrival-share-weighted aggregate sojourn time.
    ``time_avg_jobs`` is the time-average number in system per class over the
    measurement window, and ``little_stderr`` the batch-means error of the
    implied occupancy/arrival-rate sojourn estimate, for Little's-law checks.
    """

    per_class_mean: np.ndarray
    per_class_stderr: np.ndarray
    aggregate_mean: float
    completed: np.ndarray
    sim_time: float
    time_avg_jobs: np.ndarray
    little_stderr: np.ndarray

    def __post_init__(self) -> None:
        for name in (
            "per_class_mean",
            "per_class_stderr",
            "completed",
            "time_avg_jobs",
            "little_stderr",
        ):
            arr = np.array(getattr(self, name), copy=True)
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)


def simulate(params: SystemParams, weights: WeightVector, cfg: SimConfig) -> SimEstimate:
    """Simulate the DPS queue until every class reaches its completion target.

    Deterministic for a fixed (params, weights, cfg): repeated calls return
    bit-identical estimates. Scaling all weights by a common power of two
    leaves the trajectory unchanged (service shares depend on weight ratios
    only).
    """
    require_paired(params, weights)
    target = cfg.arrivals_target
    warmup = int(cfg.warmup_fraction * target)
    n_rec = target - warmup
    nb = min(NUM_BATCHES, n_rec)

    hold_seed, pick_seed, victim_seed = np.random.SeedSequence(cfg.seed).spawn(3)
    gen_hold = np.random.Generator(np.random.PCG64(hold_seed))
    gen_pick = np.random.Generator(np.random.PCG64(pick_seed))
    gen_victim = np.random.Generator(np.random.PCG64(victim_seed))

    # Expected event count is ~2 * target * lam_tot / lam_min; the cap only
    # exists to turn a runaway loop into a diagnosable error.
    expected_events = 2.0 * target * params.total_arrival_rate / float(np.min(params.lam))
    max_events = max(10**7, int(50 * expected_events))

    end_time, completions, sums, batch_sum, batch_cnt, _, snap_t, snap_a, events = (
        run_dps_ctmc(
            params.lam,
            params.mu,
            weights.g,
            target,
            warmup,
            nb,
            max_events,
            gen_hold,
            gen_pick,
            gen_victim,
        )
    )

    if events >= max_events:
        starved = [
            str(k + 1) for k in range(params.class_count) if completions[k] == 0
        ]
        detail = (
            f"; classes with zero completions: {', '.join(starved)}" if starved else ""
        )
        raise NumericError(
            f"simulation hit the {max_events} event cap before every class "
            f"reached {target} completions (per-class counts: "
            f"{completions.tolist()}){detail}"
        )

    means = sums / n_rec
    if nb >= 2:
        batch_means = batch_sum / batch_cnt
        stderr = batch_means.std(axis=1, ddof=1) / np.sqrt(nb)
    else:
        stderr = np.zeros(params.class_count)

    window = snap_t[:, nb] - snap_t[:, 0]
    time_avg_jobs = (snap_a[:, nb] - snap_a[:, 0]) / window
    if nb >= 2:
        span_t = np.diff(snap_t, axis=1)
        span_a = np.diff(snap_a, axis=1)
        little_batches = span_a / span_t / params.lam[:, None]
        little_stderr = little_batches.std(axis=1, ddof=1) / np.sqrt(nb)
    else:
        little_stderr = np.zeros(params.class_count)

    total_completed = float(np.sum(completions))
    aggregate = float(np.sum(completions * means) / total_completed)

    return SimEstimate(
        per_class_mean=means,
        per_class_stderr=stderr,
        aggregate_mean=aggregate,
        completed=completions,
        sim_time=float(end_time),
        time_avg_jobs=time_avg_jobs,
        little_stderr=little_stderr,
    )
