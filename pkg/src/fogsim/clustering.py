"""Training-phase pipeline: blended similarities, spectral clustering with
eigengap model selection, per-cluster popularity orderings and cloudlet
preferred-cluster assignment."""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

log = logging.getLogger(__name__)


@dataclass
class ClusterAssignment:
    k: int
    labels: np.ndarray  # per-UN cluster index in 0..k-1


@dataclass
class PopularityMatrix:
    """Per-cluster cacheable task ids ordered most popular first."""
    per_cluster: list  # list of np.ndarray of task ids


def distance_similarity(v_i: np.ndarray, v_j: np.ndarray, sigma_d_sq: float) -> float:
    """Gaussian kernel on UN coordinates."""
    if sigma_d_sq <= 0:
        raise ValueError("sigma_d_sq must be positive")
    d2 = float(((np.asarray(v_i, dtype=float) - np.asarray(v_j, dtype=float)) ** 2).sum())
    return float(np.exp(-d2 / (2.0 * sigma_d_sq)))


def distance_similarity_matrix(positions: np.ndarray, sigma_d_sq: float) -> np.ndarray:
    if sigma_d_sq <= 0:
        raise ValueError("sigma_d_sq must be positive")
    diff = positions[:, None, :] - positions[None, :, :]
    d2 = (diff ** 2).sum(axis=2)
    return np.exp(-d2 / (2.0 * sigma_d_sq))


def popularity_similarity(n_i: np.ndarray, n_j: np.ndarray) -> float:
    """Cosine similarity of request histograms; zero if either is all-zero."""
    a = np.asarray(n_i, dtype=float)
    b = np.asarray(n_j, dtype=float)
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        return 0.0
    return float(a @ b / (na * nb))


def popularity_similarity_matrix(histograms: np.ndarray) -> np.ndarray:
    """Pairwise cosine similarities; all-zero histograms get 0 against
    everyone and 1 on the diagonal."""
    h = np.asarray(histograms, dtype=float)
    norms = np.linalg.norm(h, axis=1)
    safe = np.where(norms == 0.0, 1.0, norms)
    normalized = h / safe[:, None]
    s = normalized @ normalized.T
    zero = norms == 0.0
    s[zero, :] = 0.0
    s[:, zero] = 0.0
    np.fill_diagonal(s, 1.0)
    return np.clip(s, 0.0, 1.0)


def blend_similarity(s_d: np.ndarray, s_p: np.ndarray, theta: float) -> np.ndarray:
    if not 0.0 <= theta <= 1.0:
        raise ValueError("theta must lie in [0, 1]")
    if s_d.shape != s_p.shape:
        raise ValueError("similarity matrices must have identical shape")
    return theta * s_d + (1.0 - theta) * s_p


def normalized_laplacian(s: np.ndarray) -> np.ndarray:
    """Symmetric-normalised Laplacian D^-1/2 (D - S) D^-1/2."""
    degrees = s.sum(axis=1)
    inv_sqrt = 1.0 / np.sqrt(degrees)
    lap = np.diag(degrees) - s
    return inv_sqrt[:, None] * lap * inv_sqrt[None, :]


def _kmeans_pp_init(x: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = x.shape[0]
    centers = np.empty((k, x.shape[1]))
    centers[0] = x[rng.integers(n)]
    d2 = ((x - centers[0]) ** 2).sum(axis=1)
    for c in range(1, k):
        total = d2.sum()
        if total <= 0:
            centers[c] = x[rng.integers(n)]
            continue
        probs = d2 / total
        centers[c] = x[rng.choice(n, p=probs)]
        d2 = np.minimum(d2, ((x - centers[c]) ** 2).sum(axis=1))
    return centers


def _lloyd(x: np.ndarray, centers: np.ndarray, max_iter: int, tol: float):
    n, k = x.shape[0], centers.shape[0]
    prev_inertia = np.inf
    labels = np.zeros(n, dtype=int)
    for _ in range(max_iter):
        d2 = ((x[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        labels = d2.argmin(axis=1)
        inertia = float(d2[np.arange(n), labels].sum())
        for c in range(k):
            mask = labels == c
            if mask.any():
                centers[c] = x[mask].mean(axis=0)
            else:
                # re-seed an empty cluster on the point farthest from its center
                far = d2[np.arange(n), labels].argmax()
                centers[c] = x[far]
        if abs(prev_inertia - inertia) <= tol:
            break
        prev_inertia = inertia
    d2 = ((x[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
    labels = d2.argmin(axis=1)
    inertia = float(d2[np.arange(n), labels].sum())
    return labels, inertia


def _kmeans(x: np.ndarray, k: int, rng: np.random.Generator,
            restarts: int = 20, max_iter: int = 300, tol: float = 1e-6) -> np.ndarray:
    best_labels, best_inertia = None, np.inf
    for _ in range(restarts):
        centers = _kmeans_pp_init(x, k, rng)
        labels, inertia = _lloyd(x, centers.copy(), max_iter, tol)
        if inertia < best_inertia:
            best_labels, best_inertia = labels, inertia
    return best_labels


def _relabel_by_lowest_member(labels: np.ndarray) -> np.ndarray:
    """Deterministic label ids: the cluster containing the lowest UN id
    becomes 0, the next unseen cluster 1, and so on."""
    mapping: dict[int, int] = {}
    out = np.empty_like(labels)
    nxt = 0
    for i, lab in enumerate(labels):
        if lab not in mapping:
            mapping[int(lab)] = nxt
            nxt += 1
        out[i] = mapping[int(lab)]
    return out


def spectral_cluster(s: np.ndarray, k_min: int, k_max: int,
                     rng: np.random.Generator) -> ClusterAssignment:
    """Normalised spectral clustering with eigengap model selection.

    k is the argmax of the gap between consecutive ascending Laplacian
    eigenvalues over {k_min..min(k_max, U-1)}; UNs are embedded in the k
    smallest eigenvectors, row-normalised and clustered with k-means.
    """
    s = np.asarray(s, dtype=float)
    if s.ndim != 2 or s.shape[0] != s.shape[1]:
        raise ValueError("similarity matrix must be square")
    if not np.allclose(s, s.T, atol=1e-10):
        raise ValueError("similarity matrix must be symmetric")
    u = s.shape[0]
    if u < k_min:
        raise ValueError("need at least k_min nodes")

    lap = normalized_laplacian(s)
    lap = 0.5 * (lap + lap.T)  # guard symmetry against rounding
    eigvals, eigvecs = np.linalg.eigh(lap)

    hi = min(k_max, u - 1)
    gaps = eigvals[k_min:hi + 1] - eigvals[k_min - 1:hi]
    if gaps.max() <= 1e-12:
        # Flat spectrum past k_min: no cluster structure at any admissible k
        # (e.g. a rank-1 all-ones similarity).
        log.warning("degenerate similarity structure: no eigengap in "
                    "[%d, %d]; falling back to k=%d round-robin labels",
                    k_min, hi, k_min)
        return ClusterAssignment(k=k_min, labels=np.arange(u) % k_min)
    k = int(k_min + np.argmax(gaps))

    embedding = eigvecs[:, :k]
    norms = np.linalg.norm(embedding, axis=1)
    embedding = embedding / np.where(norms == 0.0, 1.0, norms)[:, None]

    spread = np.abs(embedding - embedding[0]).max()
    if spread < 1e-9:
        log.warning("degenerate similarity structure: identical spectral "
                    "embedding rows; falling back to k=%d round-robin labels", k_min)
        return ClusterAssignment(k=k_min, labels=np.arange(u) % k_min)

    labels = _kmeans(embedding, k, rng)
    return ClusterAssignment(k=k, labels=_relabel_by_lowest_member(labels))


def build_popularity_matrix(assignment: ClusterAssignment, histograms: np.ndarray,
                            cacheable_ids: np.ndarray) -> PopularityMatrix:
    """Per cluster, order cacheable task ids by descending aggregated request
    counts; ties break toward the lower task id."""
    h = np.asarray(histograms, dtype=float)
    cacheable_ids = np.asarray(cacheable_ids)
    if h.shape[1] != len(cacheable_ids):
        raise ValueError("histogram width must match the cacheable task set")
    per_cluster = []
    for c in range(assignment.k):
        totals = h[assignment.labels == c].sum(axis=0)
        order = np.lexsort((cacheable_ids, -totals))
        per_cluster.append(cacheable_ids[order])
    return PopularityMatrix(per_cluster=per_cluster)


def assign_preferred_clusters(service_counts: np.ndarray, assignment: ClusterAssignment,
                              nearest_un: np.ndarray) -> np.ndarray:
    """Per cloudlet, the cluster that generated the most served requests
    during training; ties go to the lower cluster id and a cloudlet that
    served nothing adopts its nearest UN's cluster."""
    counts = np.asarray(service_counts, dtype=float)
    if counts.ndim != 2:
        raise ValueError("service_counts must be (cloudlets x UNs)")
    n_cl = counts.shape[0]
    out = np.empty(n_cl, dtype=int)
    cluster_of = assignment.labels
    for e in range(n_cl):
        per_cluster = np.zeros(assignment.k)
        np.add.at(per_cluster, cluster_of, counts[e])
        if per_cluster.sum() == 0.0:
            out[e] = cluster_of[nearest_un[e]]
        else:
            out[e] = int(per_cluster.argmax())
    return out
