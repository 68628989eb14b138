"""Data generators and the experiment runner for the size / power studies.

Generators cover a single spiked Gaussian (the null) and symmetric
two-Gaussian mixtures with the signal in one or in all coordinates.  The
runner repeats: draw one dataset, run every configured method on it with
method-private random streams, and tabulate rejections at a level alpha.
Reports are byte-stable for a fixed seed regardless of worker count.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
from numpy.random import SeedSequence, default_rng

from ._rng import parallel_map, seed_of
from .assigners import AssignerSpec
from .dataset import NEG, POS, PartiallyLabeledDataset
from .engines import TestResult, diproperm, sigclust, sigpal
from .errors import SigPalError
from .spectrum import known_spectrum

CASES = ("one_cluster", "mixture_one_direction", "mixture_all_directions")


@dataclass(frozen=True)
class GeneratorSpec:
    """A simulation case: sample size, dimension, spike shape and labeling.

    The covariance is diagonal with ``w`` leading entries ``v`` and ones
    elsewhere.  ``a`` is the mixture signal (per the case's signal mode);
    ``labeled_total`` rows get arbitrary +-1 labels under the one-cluster
    null, while mixtures reveal ``labeled_per_class`` true labels per class.
    """

    case: str
    n: int = 40
    d: int = 300
    v: float = 1.0
    w: int = 1
    a: float = 0.0
    labeled_total: int = 20
    labeled_per_class: int = 10
    balanced_labels: bool = True

    def __post_init__(self) -> None:
        if self.case not in CASES:
            raise SigPalError(f"unknown case {self.case!r}; choose from {CASES}")
        if self.n < 2 or self.d < 1:
            raise SigPalError("need n >= 2 and d >= 1")
        if not 1 <= self.w <= self.d:
            raise SigPalError("spike count w must satisfy 1 <= w <= d")
        if self.v <= 0 or self.a < 0:
            raise SigPalError("need v > 0 and a >= 0")
        # only the labeling field the case uses is constrained
        if self.case == "one_cluster":
            if not 0 <= self.labeled_total <= self.n:
                raise SigPalError("labeled_total must lie in [0, n]")
        elif not 0 <= 2 * self.labeled_per_class <= self.n:
            raise SigPalError("labeled_per_class must satisfy 2 * count <= n")

    @property
    def diagonal(self) -> np.ndarray:
        return np.concatenate([np.full(self.w, self.v), np.ones(self.d - self.w)])

    def signal_vector(self) -> np.ndarray:
        mu = np.zeros(self.d)
        if self.case == "mixture_one_direction":
            mu[0] = self.a
        elif self.case == "mixture_all_directions":
            mu[:] = self.a
        return mu

    def to_dict(self) -> dict:
        return {
            "case": self.case,
            "n": self.n,
            "d": self.d,
            "v": self.v,
            "w": self.w,
            "a": self.a,
            "labeled_total": self.labeled_total,
            "labeled_per_class": self.labeled_per_class,
            "balanced_labels": self.balanced_labels,
        }

    @staticmethod
    def from_dict(payload: dict) -> "GeneratorSpec":
        base = GeneratorSpec(case=str(payload["case"]))
        fields = {k: v for k, v in payload.items() if k != "case" and k in base.to_dict()}
        return replace(base, **fields)


def gen_one_cluster(spec: GeneratorSpec, rng: np.random.Generator) -> PartiallyLabeledDataset:
    """Single Gaussian draw with uninformative labels on random rows."""
    X = rng.standard_normal((spec.n, spec.d)) * np.sqrt(spec.diagonal)
    labels = np.zeros(spec.n, dtype=np.int8)
    if spec.labeled_total:
        idx = rng.choice(spec.n, size=spec.labeled_total, replace=False)
        if spec.balanced_labels:
            half = spec.labeled_total // 2
            placed = np.concatenate(
                [np.full(spec.labeled_total - half, POS), np.full(half, NEG)]
            ).astype(np.int8)
            rng.shuffle(placed)
        else:
            placed = rng.choice(np.array([POS, NEG], dtype=np.int8), size=spec.labeled_total)
        labels[idx] = placed
    return PartiallyLabeledDataset(X, labels)


def gen_mixture(
    spec: GeneratorSpec, rng: np.random.Generator
) -> tuple[PartiallyLabeledDataset, np.ndarray]:
    """Symmetric two-Gaussian mixture draw ``0.5 N(-mu, D) + 0.5 N(mu, D)``.

    Reveals ``labeled_per_class`` true labels per class (the +mu component
    is positive) and returns the full truth for power accounting.  The
    component draw is retried up to 100 times when a class comes up too
    small to label.
    """
    if spec.case == "one_cluster":
        raise SigPalError("gen_mixture needs a mixture case")
    mu = spec.signal_vector()
    root = np.sqrt(spec.diagonal)
    for _ in range(100):
        signs = rng.integers(0, 2, size=spec.n).astype(np.int8) * 2 - 1
        if spec.labeled_per_class == 0:
            break
        if min((signs == POS).sum(), (signs == NEG).sum()) >= spec.labeled_per_class:
            break
    else:
        raise SigPalError("mixture draw never produced enough rows in both classes")
    X = rng.standard_normal((spec.n, spec.d)) * root + np.outer(signs, mu)
    labels = np.zeros(spec.n, dtype=np.int8)
    if spec.labeled_per_class:
        for value in (POS, NEG):
            pool = np.flatnonzero(signs == value)
            idx = rng.choice(pool, size=spec.labeled_per_class, replace=False)
            labels[idx] = value
    return PartiallyLabeledDataset(X, labels), signs


@dataclass(frozen=True)
class MethodConfig:
    """One engine configuration participating in an experiment."""

    id: str
    engine: str  # sigpal | sigclust | diproperm
    assigner: Optional[AssignerSpec] = None
    sim_assigner: Optional[AssignerSpec] = None
    eigen: str = "soft"  # hard | soft | known
    statistic: str = "mean_diff"

    def __post_init__(self) -> None:
        if self.engine not in ("sigpal", "sigclust", "diproperm"):
            raise SigPalError(f"unknown engine {self.engine!r}")
        if self.engine == "sigpal" and self.assigner is None:
            raise SigPalError("sigpal methods need an assigner")
        if self.eigen not in ("hard", "soft", "known"):
            raise SigPalError("eigen must be 'hard', 'soft' or 'known'")

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "engine": self.engine,
            "assigner": self.assigner.to_dict() if self.assigner else None,
            "sim_assigner": self.sim_assigner.to_dict() if self.sim_assigner else None,
            "eigen": self.eigen,
            "statistic": self.statistic,
        }

    @staticmethod
    def from_dict(payload: dict) -> "MethodConfig":
        return MethodConfig(
            id=str(payload["id"]),
            engine=str(payload["engine"]),
            assigner=AssignerSpec.from_dict(payload["assigner"]) if payload.get("assigner") else None,
            sim_assigner=(
                AssignerSpec.from_dict(payload["sim_assigner"])
                if payload.get("sim_assigner")
                else None
            ),
            eigen=payload.get("eigen", "soft"),
            statistic=payload.get("statistic", "mean_diff"),
        )


@dataclass(frozen=True)
class ReportRow:
    replicate: int
    method: str
    p_value: float
    seed: int


@dataclass(frozen=True)
class ExperimentReport:
    """Per-replication p-values plus rejection counts at a level alpha."""

    generator: GeneratorSpec
    rows: tuple
    failures: tuple
    reps: int
    n_sim: int
    alpha: float
    seed: int

    def rejections(self, alpha: Optional[float] = None) -> dict:
        """Method -> count of p-values strictly below alpha (recomputable)."""
        level = self.alpha if alpha is None else alpha
        counts: dict[str, int] = {}
        for row in self.rows:
            counts.setdefault(row.method, 0)
            if row.p_value < level:
                counts[row.method] += 1
        return counts

    def pvalues(self, method: str) -> np.ndarray:
        return np.array([r.p_value for r in self.rows if r.method == method])

    def to_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["replicate", "method", "p_value", "seed"])
            for row in self.rows:
                writer.writerow([row.replicate, row.method, repr(row.p_value), row.seed])

    def summary_dict(self) -> dict:
        return {
            "generator": self.generator.to_dict(),
            "reps": self.reps,
            "n_sim": self.n_sim,
            "alpha": self.alpha,
            "seed": self.seed,
            "rejections": self.rejections(),
            "failures": [list(f) for f in self.failures],
        }

    def write_summary_json(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.summary_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")


def _run_method(
    method: MethodConfig,
    data: PartiallyLabeledDataset,
    truth: Optional[np.ndarray],
    gen: GeneratorSpec,
    n_sim: int,
    seed: int,
) -> TestResult:
    if method.engine == "sigclust":
        eigen = known_spectrum(gen.diagonal) if method.eigen == "known" else method.eigen
        return sigclust(data.X, eigen_method=eigen, n_sim=n_sim, seed=seed)
    if method.engine == "sigpal":
        if method.eigen == "known":
            if gen.case != "one_cluster":
                raise SigPalError("known-spectrum runs are defined for the one_cluster case")
            eigen = known_spectrum(gen.diagonal)
        else:
            eigen = method.eigen
        return sigpal(
            data,
            method.assigner,
            sim_assigner=method.sim_assigner,
            eigen_method=eigen,
            n_sim=n_sim,
            seed=seed,
        )
    if truth is None:
        raise SigPalError("diproperm needs fully labeled data (mixture cases only)")
    return diproperm(data.X, truth, statistic=method.statistic, n_perm=n_sim, seed=seed)


def run_experiment(
    gen: GeneratorSpec,
    methods: list,
    reps: int,
    n_sim: int = 100,
    alpha: float = 0.05,
    seed: int = 0,
    workers: int = 1,
) -> ExperimentReport:
    """Repeat: generate one dataset, run every method on it, record p-values.

    Each replicate owns a spawned stream; within it, the generator and every
    method get private substreams, so any parallel schedule reproduces the
    same report.  A method failure is recorded and does not abort the run.
    """
    if reps < 1:
        raise SigPalError("reps must be >= 1")
    ids = [m.id for m in methods]
    if len(set(ids)) != len(ids):
        raise SigPalError("method ids must be unique")

    rep_streams = SeedSequence(seed).spawn(reps)

    def one_replicate(item: tuple[int, SeedSequence]) -> tuple[list, list]:
        r, stream = item
        subs = stream.spawn(len(methods) + 1)
        gen_rng = default_rng(subs[0])
        if gen.case == "one_cluster":
            data, truth = gen_one_cluster(gen, gen_rng), None
        else:
            data, truth = gen_mixture(gen, gen_rng)
        rows, failures = [], []
        for m, method in enumerate(methods):
            method_seed = seed_of(subs[m + 1])
            try:
                result = _run_method(method, data, truth, gen, n_sim, method_seed)
                rows.append(ReportRow(r, method.id, result.p_value, method_seed))
            except SigPalError as exc:
                failures.append((r, method.id, str(exc)))
        return rows, failures

    outcomes = parallel_map(one_replicate, list(enumerate(rep_streams)), workers)
    rows = tuple(row for rep_rows, _ in outcomes for row in rep_rows)
    failures = tuple(f for _, rep_failures in outcomes for f in rep_failures)
    return ExperimentReport(
        generator=gen,
        rows=rows,
        failures=failures,
        reps=reps,
        n_sim=n_sim,
        alpha=alpha,
        seed=int(seed),
    )
