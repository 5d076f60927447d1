"""Monte Carlo sweeps over (k, l) cells with deterministic per-trial seeding.

Each trial derives its own random stream from (master seed, k, l, trial index),
so results are independent of execution order and a sweep aggregates to the
same report whether it ran serially or on a thread pool.
"""

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .dictionary import coherence, make_instance, random_dictionary
from .errors import InvalidArgs, TargetUnreachable
from .greedy import RecoveryOutcome, classify, run
from .guarantees import coherence_threshold

THRESHOLD_SENTINEL = "threshold"
THRESHOLD_SAFETY = 1e-3  # generate strictly below the cell threshold by this relative margin

_VARIANT_CHOICES = ("omp", "ols", "both")


@dataclass(frozen=True)
class SweepConfig:
    """Sweep description, normally loaded from a JSON file.

    k_range and l_range are inclusive (lo, hi) pairs; cells run over every
    pair with l < k.  coherence_target is None (no constraint), a number
    (fixed ceiling for every cell), or the string "threshold" (per-cell
    ceiling just below 1/(2k-l-1), so every accepted trial sits strictly
    below the threshold).  With seed_partial the solver is seeded with l
    planted atoms per trial; otherwise it runs unseeded and l only selects
    the per-cell threshold.
    """

    m: int
    n: int
    k_range: tuple[int, int]
    l_range: tuple[int, int]
    trials: int
    coherence_target: float | str | None
    seed: int
    variant: str
    seed_partial: bool

    def __post_init__(self):
        if self.m < 1 or self.n < 2:
            raise InvalidArgs(f"need m >= 1 and n >= 2, got m={self.m}, n={self.n}")
        if self.trials < 1:
            raise InvalidArgs("trials must be positive")
        if self.variant not in _VARIANT_CHOICES:
            raise InvalidArgs(f"variant must be one of {_VARIANT_CHOICES}, got {self.variant!r}")
        for name, rng in (("k_range", self.k_range), ("l_range", self.l_range)):
            if len(rng) != 2 or rng[0] > rng[1] or rng[0] < 0:
                raise InvalidArgs(f"{name} must be an inclusive (lo, hi) pair, got {rng}")
        if not self.cells():
            raise InvalidArgs("no cell satisfies l < k <= min(m, n)")
        if isinstance(self.coherence_target, str) and self.coherence_target != THRESHOLD_SENTINEL:
            raise InvalidArgs(
                f"coherence_target must be null, a number or \"{THRESHOLD_SENTINEL}\"")
        if self.seed < 0:
            raise InvalidArgs("seed must be non-negative")

    def cells(self) -> list[tuple[int, int]]:
        return [(k, l)
                for k in range(self.k_range[0], self.k_range[1] + 1)
                for l in range(self.l_range[0], self.l_range[1] + 1)
                if l < k <= min(self.m, self.n)]

    def cell_target(self, k: int, l: int) -> float | None:
        if self.coherence_target is None:
            return None
        if self.coherence_target == THRESHOLD_SENTINEL:
            return (1.0 - THRESHOLD_SAFETY) * coherence_threshold(k, l)
        return float(self.coherence_target)

    @staticmethod
    def from_dict(raw: dict) -> "SweepConfig":
        known = {"m", "n", "k_range", "l_range", "trials", "coherence_target",
                 "seed", "variant", "seed_partial"}
        extra = set(raw) - known
        if extra:
            raise InvalidArgs(f"unknown sweep config fields: {sorted(extra)}")
        try:
            return SweepConfig(
                m=int(raw["m"]),
                n=int(raw["n"]),
                k_range=tuple(int(x) for x in raw["k_range"]),
                l_range=tuple(int(x) for x in raw["l_range"]),
                trials=int(raw["trials"]),
                coherence_target=raw.get("coherence_target"),
                seed=int(raw.get("seed", 0)),
                variant=str(raw.get("variant", "both")).lower(),
                seed_partial=bool(raw.get("seed_partial", False)),
            )
        except KeyError as exc:
            raise InvalidArgs(f"sweep config is missing field {exc}") from None

    def to_dict(self) -> dict:
        return {
            "m": self.m, "n": self.n,
            "k_range": list(self.k_range), "l_range": list(self.l_range),
            "trials": self.trials, "coherence_target": self.coherence_target,
            "seed": self.seed, "variant": self.variant, "seed_partial": self.seed_partial,
        }


@dataclass
class CellResult:
    """Aggregated counts for one (variant, k, l) cell."""

    variant: str
    k: int
    l: int
    threshold: float
    requested: int
    accepted: int = 0
    successes: int = 0
    wrong_atoms: int = 0
    wrong_ties: int = 0
    early_stops: int = 0
    mu_sum: float = 0.0
    mu_max: float = 0.0
    skipped: bool = False
    skip_reason: str | None = None

    @property
    def mu_mean(self) -> float:
        return self.mu_sum / self.accepted if self.accepted else float("nan")

    @property
    def success_rate(self) -> float:
        return self.successes / self.accepted if self.accepted else float("nan")

    @property
    def tie_rate(self) -> float:
        return self.wrong_ties / self.accepted if self.accepted else float("nan")

    def to_dict(self) -> dict:
        return {
            "variant": self.variant, "k": self.k, "l": self.l,
            "threshold": self.threshold, "requested": self.requested,
            "accepted": self.accepted, "successes": self.successes,
            "wrong_atoms": self.wrong_atoms, "wrong_ties": self.wrong_ties,
            "early_stops": self.early_stops, "mu_mean": self.mu_mean,
            "mu_max": self.mu_max, "success_rate": self.success_rate,
            "tie_rate": self.tie_rate, "skipped": self.skipped,
            "skip_reason": self.skip_reason,
        }


@dataclass(frozen=True)
class SweepReport:
    config: SweepConfig
    cells: tuple

    def to_dict(self) -> dict:
        return {"config": self.config.to_dict(), "cells": [c.to_dict() for c in self.cells]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_csv(self) -> str:
        lines = ["variant,k,l,mu_mean,threshold,success_rate,tie_rate"]
        for c in self.cells:
            lines.append(",".join([
                c.variant, str(c.k), str(c.l),
                f"{c.mu_mean:.17g}", f"{c.threshold:.17g}",
                f"{c.success_rate:.17g}", f"{c.tie_rate:.17g}",
            ]))
        return "\n".join(lines) + "\n"


def _trial(config: SweepConfig, k: int, l: int, t: int):
    """One Monte Carlo trial; returns (mu, {variant: outcome}) or None if the
    cell target was unreachable for this draw."""
    target = config.cell_target(k, l)
    try:
        d = random_dictionary(config.m, config.n, target, seed=[config.seed, k, l, t])
    except TargetUnreachable:
        return None
    mu = coherence(d)
    if target is not None and config.coherence_target == THRESHOLD_SENTINEL:
        if not mu < coherence_threshold(k, l):
            return None  # defensive; the generation target already sits below
    rng = np.random.default_rng([config.seed, k, l, t, 1])
    support = [int(i) for i in rng.choice(config.n, size=k, replace=False)]
    coeffs = rng.uniform(0.5, 1.5, size=k) * rng.choice([-1.0, 1.0], size=k)
    inst = make_instance(d, support, coeffs)
    seed_support = None
    if config.seed_partial and l > 0:
        picks = rng.choice(k, size=l, replace=False)
        seed_support = [support[int(i)] for i in picks]
    variants = ("omp", "ols") if config.variant == "both" else (config.variant,)
    outcomes = {}
    for v in variants:
        trace = run(v, d, inst.observation, k, seed_support=seed_support)
        outcomes[v] = classify(trace, support)
    return mu, outcomes


def run_sweep(config: SweepConfig, jobs: int = 1) -> SweepReport:
    """Execute the sweep and aggregate per-cell counts.

    jobs > 1 runs trials on a thread pool; the per-trial seeding makes the
    report identical either way.  Cells whose coherence target is unreachable
    for the configured shape are marked skipped rather than failed.
    """
    if jobs < 1:
        raise InvalidArgs(f"jobs must be >= 1, got {jobs}")
    variants = ("omp", "ols") if config.variant == "both" else (config.variant,)
    work = [(k, l, t) for (k, l) in config.cells() for t in range(config.trials)]
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            raw = list(pool.map(lambda a: _trial(config, *a), work))
    else:
        raw = [_trial(config, *a) for a in work]
    results = dict(zip(work, raw))

    cells = []
    for (k, l) in config.cells():
        per_variant = {v: CellResult(variant=v, k=k, l=l,
                                     threshold=coherence_threshold(k, l),
                                     requested=config.trials)
                       for v in variants}
        for t in range(config.trials):
            res = results[(k, l, t)]
            if res is None:
                continue
            mu, outcomes = res
            for v in variants:
                cell = per_variant[v]
                cell.accepted += 1
                cell.mu_sum += mu
                cell.mu_max = max(cell.mu_max, mu)
                kind = outcomes[v].kind
                if kind == RecoveryOutcome.SUCCESS:
                    cell.successes += 1
                elif kind == RecoveryOutcome.WRONG_ATOM:
                    cell.wrong_atoms += 1
                elif kind == RecoveryOutcome.TIE_WITH_WRONG_ATOM:
                    cell.wrong_ties += 1
                else:
                    cell.early_stops += 1
        for v in variants:
            cell = per_variant[v]
            if cell.accepted == 0:
                cell.skipped = True
                cell.skip_reason = "coherence target unreachable for this shape"
            cells.append(cell)
    return SweepReport(config=config, cells=tuple(cells))
