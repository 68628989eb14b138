"""The 2-means cluster index (CI) and its exhaustive oracle.

CI = (within-cluster sum of squares about the cluster means)
     / (sum of squares about the overall mean),

a dimensionless statistic in [0, 1]; smaller means better-separated
clusters.  It is invariant to translation, rotation and scaling of the
data for a fixed assignment.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import DegenerateDataError, InfeasibleConstraintsError, SigPalError


@dataclass(frozen=True)
class ClusterAssignment:
    """A 2-partition of the rows plus the CI it attains.

    ``observed`` marks rows whose cluster came from an observed label
    rather than a prediction.
    """

    clusters: np.ndarray
    ci: float
    observed: np.ndarray

    def __post_init__(self) -> None:
        clusters = np.array(self.clusters, dtype=np.int8)
        if not np.all(np.isin(clusters, (1, 2))):
            raise SigPalError("cluster ids must be 1 or 2")
        if not (np.any(clusters == 1) and np.any(clusters == 2)):
            raise SigPalError("both clusters must be nonempty")
        if not 0.0 <= self.ci <= 1.0:
            raise SigPalError(f"CI must lie in [0, 1], got {self.ci}")
        observed = np.array(self.observed, dtype=bool)
        if observed.shape != clusters.shape:
            raise SigPalError("observed mask must match cluster vector length")
        clusters.setflags(write=False)
        observed.setflags(write=False)
        object.__setattr__(self, "clusters", clusters)
        object.__setattr__(self, "observed", observed)


def cluster_index(X: np.ndarray, clusters: np.ndarray) -> float:
    """CI of a fixed 2-partition; raises on an empty cluster or zero TSS."""
    X = np.asarray(X, dtype=float)
    clusters = np.asarray(clusters)
    mask1 = clusters == 1
    mask2 = clusters == 2
    if not mask1.any() or not mask2.any():
        raise SigPalError("both clusters must be nonempty")
    tss = float(((X - X.mean(axis=0)) ** 2).sum())
    if tss <= 0.0:
        raise DegenerateDataError("zero total sum of squares: CI undefined")
    wss = 0.0
    for mask in (mask1, mask2):
        block = X[mask]
        wss += float(((block - block.mean(axis=0)) ** 2).sum())
    return min(max(wss / tss, 0.0), 1.0)


def _check_constraint_pairs(pairs, n: int, name: str) -> list[tuple[int, int]]:
    out = []
    for i, j in pairs or ():
        i, j = int(i), int(j)
        if not (0 <= i < n and 0 <= j < n) or i == j:
            raise SigPalError(f"invalid {name} pair ({i}, {j}) for n={n}")
        out.append((min(i, j), max(i, j)))
    return out


def brute_force_min_ci(
    X: np.ndarray,
    must_links: Optional[Iterable[Sequence[int]]] = None,
    cannot_links: Optional[Iterable[Sequence[int]]] = None,
) -> tuple[ClusterAssignment, float]:
    """Global minimum CI over all feasible 2-partitions (n <= 16).

    Enumerates every split of the must-link components with row 0 pinned to
    cluster 1; ties are broken by the lexicographically smallest cluster-1
    index set.  Serves as the test oracle for the iterative assigners.
    """
    X = np.asarray(X, dtype=float)
    n = X.shape[0]
    if n > 16:
        raise SigPalError(f"brute force bounded at n <= 16, got n={n}")
    must = _check_constraint_pairs(must_links, n, "must-link")
    cannot = _check_constraint_pairs(cannot_links, n, "cannot-link")

    # union-find over must-link components
    parent = list(range(n))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i, j in must:
        parent[find(i)] = find(j)
    roots = sorted({find(i) for i in range(n)})
    comp_of = {r: k for k, r in enumerate(roots)}
    comp = np.array([comp_of[find(i)] for i in range(n)])
    m = len(roots)

    cannot_comp = set()
    for i, j in cannot:
        a, b = comp[i], comp[j]
        if a == b:
            raise InfeasibleConstraintsError(
                f"rows {i} and {j} are must-linked but also cannot-linked"
            )
        cannot_comp.add((min(a, b), max(a, b)))

    first = int(comp[0])  # component holding row 0, pinned to cluster 1
    others = [k for k in range(m) if k != first]

    best_ci = np.inf
    best_key: tuple[int, ...] | None = None
    best_clusters: np.ndarray | None = None
    for mask in range(1 << len(others)):
        side = np.empty(m, dtype=np.int8)
        side[first] = 1
        for b, k in enumerate(others):
            side[k] = 1 if (mask >> b) & 1 else 2
        clusters = side[comp]
        if not (np.any(clusters == 1) and np.any(clusters == 2)):
            continue
        if any(side[a] == side[b] for a, b in cannot_comp):
            continue
        ci = cluster_index(X, clusters)
        key = tuple(np.flatnonzero(clusters == 1))
        if ci < best_ci or (ci == best_ci and (best_key is None or key < best_key)):
            best_ci, best_key, best_clusters = ci, key, clusters
    if best_clusters is None:
        raise InfeasibleConstraintsError("no feasible 2-partition under the constraints")
    assignment = ClusterAssignment(
        clusters=best_clusters, ci=best_ci, observed=np.zeros(n, dtype=bool)
    )
    return assignment, best_ci


def all_pairs(indices: Sequence[int]) -> list[tuple[int, int]]:
    """All unordered pairs of the given indices."""
    return list(combinations(indices, 2))
