"""Monte Carlo estimation of the overload probability.

Each replication is one equilibrium snapshot of the cell. Replications
are grouped in fixed-size blocks; block ``b`` draws from stream ``b`` of
the seed, so totals do not depend on how blocks are spread over workers.
"""

import csv
import io
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import stats

from . import ppp
from .model import (OUTAGE, Scenario, classify_attenuated, demand_deterministic,
                    effective_n_max)

BLOCK_SIZE = 10_000
CONFIDENCE = 0.99
CSV_FIELDS = ("alpha", "n0", "p_hat", "ci_low", "ci_high", "n_reps", "seed")


@dataclass(frozen=True)
class MCEstimate:
    p_hat: float
    ci_low: float
    ci_high: float
    n_reps: int
    seed: int
    hits: int
    method: str = "monte_carlo"

    def contains(self, p):
        return self.ci_low <= p <= self.ci_high


def wilson_interval(hits, n, confidence=CONFIDENCE):
    """Wilson score interval for a binomial proportion."""
    if n <= 0:
        raise ValueError("n must be positive")
    z = stats.norm.ppf(0.5 + 0.5 * confidence)
    p = hits / n
    denom = 1.0 + z * z / n
    centre = (p + z * z / (2 * n)) / denom
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom
    lo = 0.0 if hits == 0 else max(0.0, centre - half)
    hi = 1.0 if hits == n else min(1.0, centre + half)
    return float(min(lo, p)), float(max(hi, p))


def user_demand(scenario: Scenario, r, marks=None):
    """Demand of each user, with the outage policy applied (excluded users count 0)."""
    if scenario.mode == "deterministic":
        return demand_deterministic(r, scenario.radio)
    x = marks * np.asarray(r, dtype=float) ** scenario.radio.gamma
    d = np.asarray(classify_attenuated(x, scenario.radio))
    if scenario.outage_policy == "clamp_to_nmax":
        d = np.where(d == OUTAGE, effective_n_max(scenario.radio), d)
    return d


def sample_total_demand(scenario: Scenario, rng) -> int:
    """Total demand of one snapshot of the cell."""
    if scenario.mode == "deterministic":
        conf = ppp.sample_cell(scenario, rng)
        return int(np.sum(user_demand(scenario, conf.radii)))
    conf = ppp.sample_marked_cell(scenario, rng)
    return int(np.sum(user_demand(scenario, conf.radii, conf.marks)))


def _single_cell_block(scenario, seed, block, size):
    gen = ppp.RngSpec(seed, block).generator()
    counts = ppp.sample_count(scenario.mean_users, gen, size=size)
    n = int(counts.sum())
    pts = ppp.sample_disk(n, scenario.cell.radius, gen)
    r = np.hypot(pts[:, 0], pts[:, 1])
    if scenario.mode == "deterministic":
        d = user_demand(scenario, r)
    else:
        sh = scenario.shadowing
        marks = ppp.sample_attenuation(n, sh.mu_db, sh.sigma_db, gen)
        d = user_demand(scenario, r, marks)
    rep = np.repeat(np.arange(size), counts)
    return np.bincount(rep, weights=d, minlength=size).astype(np.int64)


def _block_sizes(n_reps):
    full, rest = divmod(n_reps, BLOCK_SIZE)
    return [BLOCK_SIZE] * full + ([rest] if rest else [])


def run_blocks(block_fn: Callable, scenario, n_reps: int, seed: int, workers: int = 1):
    """Evaluate ``block_fn(scenario, seed, block, size)`` for all blocks, in order."""
    sizes = _block_sizes(n_reps)
    args = [(scenario, seed, b, s) for b, s in enumerate(sizes)]
    if workers <= 1 or len(args) == 1:
        parts = [block_fn(*a) for a in args]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(block_fn, *zip(*args)))
    return np.concatenate(parts)


def simulate_total_demand(scenario: Scenario, n_reps: int, seed: int, workers: int = 1):
    """Total demand of ``n_reps`` independent snapshots (int64 array)."""
    if scenario.mode == "multicell":
        raise ValueError("use ofdmaloss.multicell for multicell scenarios")
    return run_blocks(_single_cell_block, scenario, n_reps, seed, workers)


def estimate_from_totals(totals, n0, seed, strict=True) -> MCEstimate:
    totals = np.asarray(totals)
    n = totals.size
    hits = int(np.count_nonzero(totals > n0 if strict else totals >= n0))
    p = hits / n
    if hits < 20:
        warnings.warn(f"only {hits} overload events in {n} replications; "
                      "the interval is unreliable", RuntimeWarning, stacklevel=2)
    lo, hi = wilson_interval(hits, n)
    return MCEstimate(p, lo, hi, n, seed, hits)


def estimate_loss(scenario: Scenario, n0: float, n_reps: int, seed: int,
                  workers: int = 1, strict: bool = True) -> MCEstimate:
    """Monte Carlo ``P(total demand > n0)`` with a 99% Wilson interval."""
    if n_reps < 1000:
        raise ValueError("n_reps must be >= 1000")
    totals = simulate_total_demand(scenario, n_reps, seed, workers)
    return estimate_from_totals(totals, n0, seed, strict)


def estimates_to_csv(rows: Sequence[tuple]) -> str:
    """CSV of ``(alpha, n0, MCEstimate)`` rows; floats written with ``repr``."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_FIELDS)
    for alpha, n0, est in rows:
        writer.writerow([repr(float(alpha)), repr(float(n0)), repr(float(est.p_hat)),
                         repr(float(est.ci_low)), repr(float(est.ci_high)), est.n_reps, est.seed])
    return buf.getvalue()
