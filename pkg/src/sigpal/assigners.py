"""Label assigners: strategies that turn a partially labeled dataset into a
full 2-cluster assignment.

Four strategies are provided:

* ``two_means``   -- plain 2-means (labels ignored),
* ``cop_kmeans``  -- constrained 2-means honoring must-link / cannot-link
  constraints derived from the observed labels,
* ``s3lda``       -- semi-supervised least-squares direction on the unit
  sphere with a hinge reward for spreading the unlabeled projections,
* ``l1_lda``      -- lasso-penalized least squares on the labeled rows only.

Every assigner is a pure function of ``(input, spec, seed)``; cluster 1 is
the side holding the positive labeled rows (row 0 when nothing is labeled).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .cluster_index import ClusterAssignment, all_pairs, cluster_index
from .dataset import NEG, POS, UNLABELED, PartiallyLabeledDataset
from .errors import InfeasibleConstraintsError, SigPalError, ZeroDirectionError

ASSIGNER_KINDS = ("two_means", "cop_kmeans", "s3lda", "l1_lda")


@dataclass(frozen=True)
class AssignerSpec:
    """Configuration of a label assigner.

    ``restarts``/``max_iters`` drive the k-means variants, ``C`` weights the
    unlabeled hinge term of s3lda, ``penalty`` is the l1_lda lasso penalty
    and ``steps`` the subgradient iteration count.
    """

    kind: str
    restarts: int = 10
    max_iters: int = 100
    C: float = 1.0
    penalty: float = 0.1
    steps: int = 500

    def __post_init__(self) -> None:
        if self.kind not in ASSIGNER_KINDS:
            raise SigPalError(f"unknown assigner kind {self.kind!r}; choose from {ASSIGNER_KINDS}")
        if self.restarts < 1 or self.max_iters < 1 or self.steps < 1:
            raise SigPalError("restarts, max_iters and steps must all be >= 1")
        if self.C < 0 or self.penalty < 0:
            raise SigPalError("C and penalty must be nonnegative")

    def needs_labels(self) -> bool:
        return self.kind in ("s3lda", "l1_lda")

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "restarts": self.restarts,
            "max_iters": self.max_iters,
            "C": self.C,
            "penalty": self.penalty,
            "steps": self.steps,
        }

    @staticmethod
    def from_dict(payload: dict) -> "AssignerSpec":
        payload = dict(payload)
        kind = str(payload.pop("kind")).replace("-", "_")
        spec = AssignerSpec(kind=kind)
        return replace(spec, **{k: v for k, v in payload.items() if k in spec.to_dict()})


@dataclass(frozen=True)
class Direction:
    """A unit vector in covariate space; the intercept is fixed at 0."""

    omega: np.ndarray
    intercept: float = 0.0

    def __post_init__(self) -> None:
        omega = np.array(self.omega, dtype=float).reshape(-1)
        norm = float(np.linalg.norm(omega))
        if abs(norm - 1.0) > 1e-10:
            raise SigPalError(f"direction must be unit length, got norm {norm}")
        if self.intercept != 0.0:
            raise SigPalError("intercept is fixed at 0")
        omega.setflags(write=False)
        object.__setattr__(self, "omega", omega)


# ---------------------------------------------------------------------------
# weighted 2-means core (shared by two_means and cop_kmeans)
# ---------------------------------------------------------------------------


def _weighted_wss(P: np.ndarray, w: np.ndarray, labels: np.ndarray) -> float:
    wss = 0.0
    for k in (0, 1):
        mask = labels == k
        if not mask.any():
            continue
        wk = w[mask]
        c = (wk[:, None] * P[mask]).sum(axis=0) / wk.sum()
        wss += float((wk * ((P[mask] - c) ** 2).sum(axis=1)).sum())
    return wss


def _sq_distances(P: np.ndarray, centers: np.ndarray) -> np.ndarray:
    d2 = (P**2).sum(axis=1)[:, None] - 2.0 * P @ centers.T + (centers**2).sum(axis=1)[None, :]
    return np.maximum(d2, 0.0)


def _kmeanspp_two(P: np.ndarray, w: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    m = P.shape[0]
    i1 = int(rng.choice(m, p=w / w.sum()))
    d2 = ((P - P[i1]) ** 2).sum(axis=1)
    mass = w * d2
    total = mass.sum()
    if total <= 0.0:
        i2 = 0 if i1 != 0 else 1  # all points coincide
    else:
        i2 = int(rng.choice(m, p=mass / total))
    return P[[i1, i2]].astype(float).copy()


def _lloyd_once(
    P: np.ndarray,
    w: np.ndarray,
    pair: Optional[tuple[int, int]],
    max_iters: int,
    rng: np.random.Generator,
    trace: Optional[list] = None,
) -> np.ndarray:
    """One seeded Lloyd run; returns per-point labels in {0, 1}.

    The constrained pair (cannot-link) is assigned jointly to the cheaper of
    its two feasible configurations, which keeps the objective monotone.
    """
    m = P.shape[0]
    centers = _kmeanspp_two(P, w, rng)
    labels = np.full(m, -1, dtype=np.int8)
    for _ in range(max_iters):
        D = _sq_distances(P, centers)
        new = np.argmin(D, axis=1).astype(np.int8)
        if pair is not None:
            i, j = pair
            if w[i] * D[i, 0] + w[j] * D[j, 1] <= w[i] * D[i, 1] + w[j] * D[j, 0]:
                new[i], new[j] = 0, 1
            else:
                new[i], new[j] = 1, 0
        for k in (0, 1):
            if not (new == k).any():
                # empty cluster: the farthest point (by weighted cost) moves to it
                new[int(np.argmax(w * D[np.arange(m), new]))] = k
        if trace is not None:
            trace.append(_weighted_wss(P, w, new))
        if np.array_equal(new, labels):
            break
        labels = new
        for k in (0, 1):
            mask = labels == k
            wk = w[mask]
            centers[k] = (wk[:, None] * P[mask]).sum(axis=0) / wk.sum()
    return labels


def _lloyd_best(
    P: np.ndarray,
    w: np.ndarray,
    pair: Optional[tuple[int, int]],
    spec: AssignerSpec,
    rng: np.random.Generator,
    trace: Optional[list] = None,
) -> np.ndarray:
    """Best-of-restarts Lloyd; selection by (objective, restart index)."""
    if P.shape[0] < 2:
        raise InfeasibleConstraintsError("need at least 2 (super-)points to form 2 clusters")
    best_wss = np.inf
    best_labels: np.ndarray | None = None
    for child in rng.spawn(spec.restarts):
        run_trace: list | None = [] if trace is not None else None
        labels = _lloyd_once(P, w, pair, spec.max_iters, child, run_trace)
        if trace is not None:
            trace.append(run_trace)
        wss = _weighted_wss(P, w, labels)
        if wss < best_wss:
            best_wss, best_labels = wss, labels
    assert best_labels is not None
    return best_labels


def two_means(
    X: np.ndarray,
    spec: AssignerSpec,
    rng: np.random.Generator,
    _trace: Optional[list] = None,
) -> ClusterAssignment:
    """Best-of-restarts 2-means with k-means++ seeding; labels are ignored.

    Cluster 1 is the cluster containing row 0 (a fixed reporting convention;
    the CI itself is label-symmetric).
    """
    X = np.asarray(X, dtype=float)
    n = X.shape[0]
    raw = _lloyd_best(X, np.ones(n), None, spec, rng, _trace)
    clusters = np.where(raw == raw[0], 1, 2).astype(np.int8)
    return ClusterAssignment(
        clusters=clusters,
        ci=cluster_index(X, clusters),
        observed=np.zeros(n, dtype=bool),
    )


def derive_constraints(labels: np.ndarray) -> tuple[list, list]:
    """Pairwise constraints implied by observed labels (0-based row indices).

    Must-link every pair sharing a label; cannot-link every (+1, -1) pair;
    unlabeled rows are unconstrained.
    """
    labels = np.asarray(labels)
    pos = np.flatnonzero(labels == POS)
    neg = np.flatnonzero(labels == NEG)
    must = all_pairs(list(map(int, pos))) + all_pairs(list(map(int, neg)))
    cannot = [(int(i), int(j)) for i in pos for j in neg]
    return must, cannot


def cop_kmeans(
    dataset: PartiallyLabeledDataset,
    spec: AssignerSpec,
    rng: np.random.Generator,
    _trace: Optional[list] = None,
) -> ClusterAssignment:
    """Constrained 2-means: must-link components collapse to weighted
    super-points, and the positive / negative super-points are kept in
    different clusters.

    With no labeled rows this reduces exactly to :func:`two_means` (same
    seed, same assignment).  The cluster holding the positive component is
    reported as cluster 1.
    """
    X = dataset.X
    labels = dataset.labels
    pos = np.flatnonzero(labels == POS)
    neg = np.flatnonzero(labels == NEG)
    unl = np.flatnonzero(labels == UNLABELED)

    groups: list[np.ndarray] = []
    if pos.size:
        groups.append(pos)
    if neg.size:
        groups.append(neg)
    groups.extend(np.array([i]) for i in unl)
    if len(groups) < 2:
        raise InfeasibleConstraintsError(
            "constraints collapse all rows into a single cluster"
        )
    P = np.stack([X[g].mean(axis=0) for g in groups])
    w = np.array([float(g.size) for g in groups])
    pair = (0, 1) if (pos.size and neg.size) else None

    raw_super = _lloyd_best(P, w, pair, spec, rng, _trace)
    raw = np.empty(dataset.n, dtype=np.int8)
    for g, side in zip(groups, raw_super):
        raw[g] = side

    if pos.size:
        anchor, anchor_cluster = raw[pos[0]], 1
    elif neg.size:
        anchor, anchor_cluster = raw[neg[0]], 2
    else:
        anchor, anchor_cluster = raw[0], 1
    clusters = np.where(raw == anchor, anchor_cluster, 3 - anchor_cluster).astype(np.int8)
    return ClusterAssignment(
        clusters=clusters,
        ci=cluster_index(X, clusters),
        observed=dataset.labeled_mask,
    )


# ---------------------------------------------------------------------------
# direction-based assigners
# ---------------------------------------------------------------------------


def _labeled_design(dataset: PartiallyLabeledDataset) -> tuple[np.ndarray, np.ndarray]:
    mask = dataset.labeled_mask
    if dataset.n_pos == 0 or dataset.n_neg == 0:
        raise SigPalError("both labeled classes must be present")
    return dataset.X[mask], dataset.labels[mask].astype(float)


def _s3lda_objective(
    w: np.ndarray, Xl: np.ndarray, y: np.ndarray, X: np.ndarray, C: float
) -> float:
    fit = float(((y - Xl @ w) ** 2).mean())
    hinge = float(np.maximum(1.0 - np.abs(X @ w), 0.0).mean())
    return fit + C * hinge


def s3lda_fit(
    dataset: PartiallyLabeledDataset,
    spec: AssignerSpec,
    rng: Optional[np.random.Generator] = None,
) -> Direction:
    """Semi-supervised direction by projected subgradient on the unit sphere.

    Minimizes ``mean_labeled (y - w'x)^2 + C * mean_all (1 - |w'x|)_+`` with
    normalized subgradient steps ``0.5 / sqrt(t)`` (unit-length updates keep
    the schedule meaningful for any C), starting from the normalized labeled
    mean difference (the first coordinate axis when that difference
    vanishes).  The best iterate seen is returned, so the reported objective
    never exceeds the initial one.  Deterministic: ``rng`` is accepted for
    interface uniformity only.
    """
    Xl, y = _labeled_design(dataset)
    X = dataset.X
    n_l = Xl.shape[0]
    if n_l < 2:
        raise SigPalError("s3lda needs at least 2 labeled rows")
    C = spec.C

    w = X[dataset.labels == POS].mean(axis=0) - X[dataset.labels == NEG].mean(axis=0)
    norm = np.linalg.norm(w)
    if norm <= 1e-12 * max(1.0, float(np.abs(X).max())):
        w = np.zeros(dataset.d)
        w[0] = 1.0
    else:
        w = w / norm

    best_w = w
    best_obj = _s3lda_objective(w, Xl, y, X, C)
    for t in range(1, spec.steps + 1):
        grad = (2.0 / n_l) * (Xl.T @ (Xl @ w - y))
        proj = X @ w
        active = np.abs(proj) < 1.0
        if C > 0 and active.any():
            grad = grad - (C / dataset.n) * ((np.sign(proj) * active) @ X)
        gnorm = np.linalg.norm(grad)
        if gnorm <= 0.0:
            break  # subgradient vanished: w is stationary
        w = w - (0.5 / np.sqrt(t)) * grad / gnorm
        norm = np.linalg.norm(w)
        if norm <= 0.0:
            w = best_w  # step collapsed to the origin; restart from the incumbent
            continue
        w = w / norm
        obj = _s3lda_objective(w, Xl, y, X, C)
        if obj < best_obj:
            best_w, best_obj = w, obj
    return Direction(omega=best_w)


def l1_lda_fit(dataset: PartiallyLabeledDataset, spec: AssignerSpec) -> Direction:
    """Lasso direction from the labeled rows only, scaled to the unit sphere.

    Coordinate descent on ``mean (y - w'x)^2 + penalty * ||w||_1``; raises
    :class:`ZeroDirectionError` when the penalty zeroes every coordinate
    (which happens exactly when ``penalty >= max_j |(2/n_l) sum_i y_i x_ij|``).
    """
    Xl, y = _labeled_design(dataset)
    n_l, d = Xl.shape
    a = (2.0 / n_l) * (Xl**2).sum(axis=0)
    w = np.zeros(d)
    resid = y.copy()
    for _ in range(spec.max_iters):
        biggest_move = 0.0
        for j in range(d):
            if a[j] <= 0.0:
                continue
            rho = (2.0 / n_l) * float(Xl[:, j] @ resid) + a[j] * w[j]
            new = np.sign(rho) * max(abs(rho) - spec.penalty, 0.0) / a[j]
            if new != w[j]:
                resid -= Xl[:, j] * (new - w[j])
                biggest_move = max(biggest_move, abs(new - w[j]))
                w[j] = new
        if biggest_move <= 1e-12 * max(1.0, float(np.abs(w).max())):
            break
    if float(np.abs(w).max()) <= 1e-10:
        raise ZeroDirectionError(
            f"penalty {spec.penalty} zeroes every coordinate; decrease it"
        )
    return Direction(omega=w / np.linalg.norm(w))


def assign_by_direction(
    dataset: PartiallyLabeledDataset, direction: Direction
) -> ClusterAssignment:
    """Clusters from a direction: labeled rows keep their labels, unlabeled
    rows split by the sign of the centered projection.

    The direction's sign is first oriented so the labeled positive
    projections have nonnegative mean, which makes the output invariant to
    flipping ``omega``.  Projections exactly 0 go to cluster 1.
    """
    w = direction.omega
    proj = (dataset.X - dataset.X.mean(axis=0)) @ w
    pos_mask = dataset.labels == POS
    if pos_mask.any() and proj[pos_mask].mean() < 0:
        proj = -proj
    clusters = np.where(proj >= 0, 1, 2).astype(np.int8)
    clusters[pos_mask] = 1
    clusters[dataset.labels == NEG] = 2
    return ClusterAssignment(
        clusters=clusters,
        ci=cluster_index(dataset.X, clusters),
        observed=dataset.labeled_mask,
    )


def run_assigner(
    spec: AssignerSpec,
    dataset: PartiallyLabeledDataset,
    rng: np.random.Generator,
) -> ClusterAssignment:
    """Dispatch a dataset to the assigner selected by ``spec.kind``."""
    if spec.kind == "two_means":
        return two_means(dataset.X, spec, rng)
    if spec.kind == "cop_kmeans":
        return cop_kmeans(dataset, spec, rng)
    if spec.kind == "s3lda":
        return assign_by_direction(dataset, s3lda_fit(dataset, spec, rng))
    if spec.kind == "l1_lda":
        return assign_by_direction(dataset, l1_lda_fit(dataset, spec))
    raise SigPalError(f"unknown assigner kind {spec.kind!r}")
