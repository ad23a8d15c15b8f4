"""Stochastic simulation of repeated detection attempts.

Attempts are independent, so only outcome tallies matter. Work is split
into fixed-size chunks, each driven by a stream seeded from
(master seed, hypothesis, chunk index); sums of integer counts make the
reduction independent of execution order and thread count.
"""

from __future__ import annotations

import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .detector import PhotocountModel, outcome_distribution
from .gaussian_core import RadarParams, receiver_means
from .uncertainty import Measured, delta_e


@dataclass(frozen=True)
class TrialConfig:
    m_trials: int
    seed: int = 0
    chunk: int = 500_000

    def __post_init__(self):
        if self.m_trials < 1:
            raise ValueError("m_trials must be >= 1")
        if self.chunk < 1:
            raise ValueError("chunk must be >= 1")


@dataclass(frozen=True)
class TrialTally:
    """Outcome counts over (gg, ge, eg, ee) for both hypotheses."""

    counts_yes: np.ndarray
    counts_no: np.ndarray
    m_trials: int

    def __post_init__(self):
        for c in (self.counts_yes, self.counts_no):
            if c.shape != (4,) or c.sum() != self.m_trials:
                raise ValueError("counts must be four outcomes summing to m_trials")

    def fractions(self) -> tuple[np.ndarray, np.ndarray]:
        return self.counts_yes / self.m_trials, self.counts_no / self.m_trials

    def nu_moments(self, nu) -> tuple[float, float, float, float]:
        """(mean_yes, sig_yes, mean_no, sig_no) of nu under the tally."""
        nu = np.asarray(nu, dtype=float)
        out = []
        for c in (self.counts_yes, self.counts_no):
            p = c / self.m_trials
            mean = float(p @ nu)
            var = float(p @ nu**2) - mean * mean
            out.extend([mean, np.sqrt(max(var, 0.0))])
        return tuple(out)


def sample_thermal(mu: float, rng: np.random.Generator, size=None):
    """Draw photon counts of a thermal state by inverting the geometric CDF."""
    if mu < 0.0:
        raise ValueError("mu must be >= 0")
    if mu == 0.0:
        return 0 if size is None else np.zeros(size, dtype=np.int64)
    u = rng.random(size)
    k = np.floor(np.log1p(-u) / np.log(mu / (1.0 + mu)))
    return int(k) if size is None else k.astype(np.int64)


def _stream(seed: int, hyp: int, chunk_idx: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(hyp, chunk_idx)))


def _chunk_counts(mu: float, model: PhotocountModel, n: int, rng: np.random.Generator) -> np.ndarray:
    k = sample_thermal(mu, rng, size=n)
    cls = np.minimum(k, 2)
    class_counts = np.bincount(cls, minlength=3)
    counts = np.zeros(4, dtype=np.int64)
    for c in range(3):
        if class_counts[c] == 0:
            continue
        row = model.confusion[c]
        hot = np.flatnonzero(row == 1.0)
        if hot.size == 1:  # deterministic row, skip the multinomial draw
            counts[hot[0]] += class_counts[c]
        else:
            counts += rng.multinomial(class_counts[c], row)
    return counts


def run_trials(
    params: RadarParams,
    model: PhotocountModel,
    cfg: TrialConfig,
    threads: int = 1,
) -> TrialTally:
    """Tally cfg.m_trials attempts per hypothesis."""
    mu_yes, mu_no = receiver_means(params)
    sizes = [cfg.chunk] * (cfg.m_trials // cfg.chunk)
    if cfg.m_trials % cfg.chunk:
        sizes.append(cfg.m_trials % cfg.chunk)
    jobs = [
        (hyp, mu, idx, n)
        for hyp, mu in enumerate((mu_yes, mu_no))
        for idx, n in enumerate(sizes)
    ]

    def work(job):
        hyp, mu, idx, n = job
        return hyp, _chunk_counts(mu, model, n, _stream(cfg.seed, hyp, idx))

    totals = [np.zeros(4, dtype=np.int64), np.zeros(4, dtype=np.int64)]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            for hyp, counts in pool.map(work, jobs):
                totals[hyp] += counts
    else:
        for job in jobs:
            hyp, counts = work(job)
            totals[hyp] += counts
    return TrialTally(counts_yes=totals[0], counts_no=totals[1], m_trials=cfg.m_trials)


def estimate_error_exponent(tally: TrialTally, nu) -> Measured:
    """Plug-in exponent from a tally, with its propagated uncertainty."""
    m_yes, s_yes, m_no, s_no = tally.nu_moments(nu)
    if s_yes == 0.0 or s_no == 0.0:
        raise ValueError("degenerate tally: zero spread under one hypothesis")
    return delta_e(m_yes, s_yes, m_no, s_no, tally.m_trials)


def error_probability_scaling(
    params: RadarParams,
    model: PhotocountModel,
    nu,
    m_list,
    reps: int,
    seed: int = 0,
) -> list[dict]:
    """Empirical error probability of the mean-nu threshold test vs M.

    The decision threshold sits midway between the two expected means; a
    campaign errs when its sample mean lands on the wrong side. Rows with
    fewer than 30 observed errors are flagged and a warning is emitted.
    """
    nu = np.asarray(nu, dtype=float)
    m_list = list(m_list)
    if any(m2 < m1 for m1, m2 in zip(m_list, m_list[1:])):
        raise ValueError("m_list must be sorted ascending")
    mu_yes, mu_no = receiver_means(params)
    p_yes = outcome_distribution(mu_yes, model)
    p_no = outcome_distribution(mu_no, model)
    mean_yes, mean_no = float(p_yes @ nu), float(p_no @ nu)
    theta = 0.5 * (mean_yes + mean_no)
    lo_side = mean_yes > mean_no  # which side of theta counts as "yes"
    rows = []
    for i, m in enumerate(m_list):
        rng = _stream(seed, 0, i)
        draws_yes = rng.multinomial(m, p_yes, size=reps) @ nu / m
        draws_no = rng.multinomial(m, p_no, size=reps) @ nu / m
        if lo_side:
            errors = int(np.sum(draws_yes <= theta) + np.sum(draws_no > theta))
        else:
            errors = int(np.sum(draws_yes >= theta) + np.sum(draws_no < theta))
        p_err = errors / (2.0 * reps)
        if errors < 30:
            warnings.warn(
                f"only {errors} error events at M={m}: estimate unreliable",
                RuntimeWarning,
            )
        rows.append({"m": m, "p_error": p_err, "events": errors})
    return rows


def fit_scaling_slope(rows: list[dict], min_events: int = 30) -> float:
    """Slope of -log(p_error) vs M over the reliably-estimated rows."""
    pts = [(r["m"], r["p_error"]) for r in rows if r["events"] >= min_events and r["p_error"] > 0]
    if len(pts) < 2:
        raise ValueError("not enough reliable points to fit a slope")
    m = np.array([p[0] for p in pts], dtype=float)
    y = -np.log(np.array([p[1] for p in pts]))
    return float(np.polyfit(m, y, 1)[0])
