"""Defines the Monte-Carlo success-rate campaign for the fault attack.

Trial ``i`` runs :func:`setfalab.attack.setfa.run_trial` with sub-seed
``seed ^ i``. Trials are independent, so they can be spread over worker
processes; results are gathered in trial order, which keeps every output byte
independent of the worker count.
"""

import csv
import functools
import logging
import math
import multiprocessing as mp
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from setfalab.attack.setfa import AttackConfig, TrialResult, run_trial
from setfalab.core.conf import field

logger = logging.getLogger(__name__)

CAMPAIGN_CSV_HEADER = ("trial", "sub_seed", "success", "queries_used", "survivors_max")
HISTOGRAM_CSV_HEADER = ("bucket_upper_bound", "success_count")

# Query-count bands for successful trials: the reported range, and the wider
# tolerance band checked by the acceptance runs.
STATED_BAND = (80, 250)
TOLERANCE_BAND = (60, 260)


@dataclass
class CampaignConfig:
    attack: AttackConfig = field(AttackConfig)
    trials: int = field(1000, help="The number of independent trials")
    bucket_width: int = field(20, help="The histogram bucket width, in queries")
    log_every: int = field(100, help="Log progress every N trials")

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ValueError(f"A campaign needs at least one trial, got {self.trials}")
        if self.bucket_width < 1:
            raise ValueError(f"The bucket width must be positive, got {self.bucket_width}")


@dataclass(frozen=True)
class CampaignReport:
    config: AttackConfig
    bucket_width: int
    trials: tuple[TrialResult, ...]

    @property
    def successes(self) -> list[TrialResult]:
        return [t for t in self.trials if t.success]

    @property
    def success_rate(self) -> float:
        return len(self.successes) / len(self.trials)

    def success_queries(self) -> np.ndarray:
        return np.array([t.queries_used for t in self.successes], dtype=np.int64)

    def query_stats(self) -> tuple[int, float, int] | None:
        """Returns the min, median and max query counts of successful trials."""
        queries = self.success_queries()
        if queries.size == 0:
            return None
        return int(queries.min()), float(np.median(queries)), int(queries.max())

    def band_fraction(self, low: int, high: int) -> float | None:
        """Fraction of successful trials whose query count lies in ``[low, high]``."""
        queries = self.success_queries()
        if queries.size == 0:
            return None
        return float(((queries >= low) & (queries <= high)).mean())

    def histogram(self) -> list[tuple[int, int]]:
        """Counts successful trials per bucket of query counts.

        A trial using ``q`` queries falls in the bucket with upper bound
        ``w * ceil(q / w)``. Every bucket from ``w`` up to the one holding
        ``max_queries`` is listed, including empty ones.

        Returns:
            ``(bucket_upper_bound, success_count)`` pairs, in increasing order.
        """
        w = self.bucket_width
        num_buckets = math.ceil(self.config.max_queries / w)
        counts = [0] * num_buckets
        for q in self.success_queries():
            counts[math.ceil(int(q) / w) - 1] += 1
        return [(w * (i + 1), c) for i, c in enumerate(counts)]

    def write_csvs(self, out_dir: str | Path) -> tuple[Path, Path]:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        campaign_path, histogram_path = out_dir / "campaign.csv", out_dir / "histogram.csv"
        with open(campaign_path, "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(CAMPAIGN_CSV_HEADER)
            for t in self.trials:
                writer.writerow([t.trial_index, t.sub_seed, int(t.success), t.queries_used, t.survivors_max])
        with open(histogram_path, "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(HISTOGRAM_CSV_HEADER)
            writer.writerows(self.histogram())
        return campaign_path, histogram_path

    def lines(self) -> list[str]:
        lines = [f"success rate: {len(self.successes)}/{len(self.trials)} ({self.success_rate:.1%})"]
        if (stats := self.query_stats()) is None:
            lines.append("queries among successes: n/a")
            return lines
        lo, med, hi = stats
        lines.append(f"queries among successes: min {lo}, median {med:g}, max {hi}")
        for name, (low, high) in (("stated", STATED_BAND), ("tolerance", TOLERANCE_BAND)):
            lines.append(f"successes within {name} band [{low}, {high}]: {self.band_fraction(low, high):.1%}")
        return lines


def campaign(
    cfg: AttackConfig,
    n_trials: int,
    bucket_width: int = 20,
    *,
    num_workers: int = 1,
    multiprocessing_context: str | None = None,
    log_every: int = 100,
) -> CampaignReport:
    """Runs independent seeded attack trials.

    Args:
        cfg: The attack configuration shared by every trial.
        n_trials: The number of trials.
        bucket_width: The histogram bucket width.
        num_workers: Worker processes to spread trials over.
        multiprocessing_context: The multiprocessing start method.
        log_every: Log progress every this many trials.

    Returns:
        The campaign report, with trials in index order.

    Raises:
        ValueError: If ``n_trials`` or ``bucket_width`` is not positive.
    """
    if n_trials < 1:
        raise ValueError(f"A campaign needs at least one trial, got {n_trials}")
    if bucket_width < 1:
        raise ValueError(f"The bucket width must be positive, got {bucket_width}")

    logger.info(
        "Running %d trials of %s (scope %s, %d queries, seed %d) on %d worker(s)",
        n_trials,
        cfg.fault or "the fault-free circuit",
        cfg.scope,
        cfg.max_queries,
        cfg.seed,
        num_workers,
    )

    worker = functools.partial(run_trial, cfg)
    results: list[TrialResult] = []

    def collect(result: TrialResult) -> None:
        results.append(result)
        if log_every > 0 and len(results) % log_every == 0:
            num_success = sum(r.success for r in results)
            logger.info("%d/%d trials done, %d successful", len(results), n_trials, num_success)

    if num_workers <= 1:
        for i in range(n_trials):
            collect(worker(i))
    else:
        ctx = mp.get_context(multiprocessing_context)
        with ctx.Pool(num_workers) as pool:
            for result in pool.imap(worker, range(n_trials), chunksize=max(1, n_trials // (4 * num_workers))):
                collect(result)

    return CampaignReport(config=cfg, bucket_width=bucket_width, trials=tuple(results))


def check_bands(report: CampaignReport, bands: Sequence[tuple[int, int]] = (STATED_BAND, TOLERANCE_BAND)) -> bool:
    """Logs a warning for each band that holds fewer than 90% of the successes."""
    ok = True
    for low, high in bands:
        frac = report.band_fraction(low, high)
        if frac is not None and frac < 0.9:
            logger.warning("Only %.1f%% of successful trials used between %d and %d queries", 100 * frac, low, high)
            ok = False
    return ok
