"""PCA projection, per-class convex hulls and the Davies-Bouldin index."""
import csv
import hashlib
import io
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import (DegenerateClustersError, InsufficientDataError, ManifestError,
                     ParameterError, UndefinedIndexError)

GROUPINGS = ("structure", "fluence", "angle")
SUBSETS = ("both", "walls", "holes")


@dataclass(frozen=True, eq=False)
class PcaModel:
    mean: np.ndarray
    components: np.ndarray          # (k, d), orthonormal rows
    explained_variance: np.ndarray  # (k,), non-increasing

    @property
    def n_components(self):
        return self.components.shape[0]

    def components_digest(self):
        data = np.ascontiguousarray(self.components, dtype="<f8").tobytes()
        return hashlib.sha256(data).hexdigest()


def pca_fit(X, k=2):
    """Top-``k`` principal axes of ``X`` via SVD of the centered matrix.

    Each axis is oriented so its largest-magnitude loading is positive
    (first index wins ties). Variances use the N - 1 normalization.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ParameterError(f"expected an (N, d) matrix, got shape {X.shape}")
    n, d = X.shape
    if n < 2:
        raise InsufficientDataError(f"PCA needs at least 2 samples, got {n}")
    if not 1 <= k <= min(n, d):
        raise ParameterError(f"k must lie in [1, {min(n, d)}], got {k}")
    mean = X.mean(axis=0)
    _, s, vt = np.linalg.svd(X - mean, full_matrices=False)
    comps = vt[:k].copy()
    lead = np.argmax(np.abs(comps), axis=1)
    signs = np.where(comps[np.arange(k), lead] < 0, -1.0, 1.0)
    comps *= signs[:, None]
    return PcaModel(mean, comps, s[:k] ** 2 / (n - 1))


def pca_project(model, X):
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != model.mean.shape[0]:
        raise ParameterError(
            f"expected data with {model.mean.shape[0]} columns, got shape {X.shape}")
    return (X - model.mean) @ model.components.T


def pca_reconstruct(model, Y):
    return model.mean + np.asarray(Y, dtype=np.float64) @ model.components


def _sorted_labels(labels):
    uniq = set(labels)
    try:
        return sorted(uniq)
    except TypeError:
        return sorted(uniq, key=str)


@dataclass(eq=False)
class DbiReport:
    labels: list
    sizes: np.ndarray
    centroids: np.ndarray  # (K, d)
    scatters: np.ndarray   # (K,)
    distances: np.ndarray  # (K, K) centroid distances
    dbi: float
    grouping: str = ""
    subset: str = ""
    extra: dict = field(default_factory=dict)

    @property
    def K(self):
        return len(self.labels)

    def recompute(self):
        """Recompute the index from the stored scatters and distances."""
        return _dbi_from_parts(self.scatters, self.distances)

    def to_dict(self):
        doc = {
            "grouping": self.grouping,
            "subset": self.subset,
            "K": self.K,
            "dbi": float(self.dbi),
            "clusters": [
                {"label": lab, "size": int(sz), "centroid": [float(v) for v in c],
                 "scatter": float(s)}
                for lab, sz, c, s in zip(self.labels, self.sizes, self.centroids, self.scatters)
            ],
            "pairwise_distances": self.distances.tolist(),
        }
        doc.update(self.extra)
        return doc


def _dbi_from_parts(scatters, distances):
    K = len(scatters)
    total = 0.0
    for i in range(K):
        worst = max((scatters[i] + scatters[j]) / distances[i, j] for j in range(K) if j != i)
        total += worst
    return total / K


def davies_bouldin(points, labels, grouping="", subset=""):
    """Davies-Bouldin index of ground-truth clusters.

    Scatter is the mean Euclidean distance of members to their centroid.
    """
    P = np.asarray(points, dtype=np.float64)
    if P.ndim == 1:
        P = P[:, None]
    labels = list(labels)
    if len(labels) != P.shape[0]:
        raise ParameterError(f"{P.shape[0]} points but {len(labels)} labels")
    classes = _sorted_labels(labels)
    if len(classes) < 2:
        raise UndefinedIndexError(f"need at least 2 clusters, got {len(classes)}")
    lab_arr = np.empty(len(labels), dtype=object)
    lab_arr[:] = labels
    centroids, scatters, sizes = [], [], []
    for c in classes:
        members = P[lab_arr == c]
        mu = members.mean(axis=0)
        centroids.append(mu)
        scatters.append(float(np.mean(np.linalg.norm(members - mu, axis=1))))
        sizes.append(len(members))
    centroids = np.array(centroids)
    scatters = np.array(scatters)
    K = len(classes)
    distances = np.zeros((K, K))
    for i in range(K):
        for j in range(i + 1, K):
            d = float(np.linalg.norm(centroids[i] - centroids[j]))
            if d == 0.0:
                raise DegenerateClustersError(classes[i], classes[j])
            distances[i, j] = distances[j, i] = d
    return DbiReport(classes, np.array(sizes), centroids, scatters, distances,
                     _dbi_from_parts(scatters, distances), grouping, subset)


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points):
    """Counter-clockwise hull vertices (monotone chain), collinear points dropped.

    One distinct point gives ``[p]``; collinear input gives its two extremes.
    """
    pts = sorted(set(map(tuple, np.asarray(points, dtype=np.float64).reshape(-1, 2).tolist())))
    if len(pts) <= 2:
        return pts
    lower = []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper = []
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    return hull if len(hull) > 1 else hull[:1]


def convex_hulls(points, labels):
    P = np.asarray(points, dtype=np.float64)
    if P.ndim != 2 or P.shape[1] != 2:
        raise ParameterError(f"convex hulls need 2-D points, got shape {P.shape}")
    labels = list(labels)
    return {c: convex_hull(P[[lab == c for lab in labels]]) for c in _sorted_labels(labels)}


# -- grouping protocol -------------------------------------------------------

def split_graph_id(graph_id):
    """``"<image_id>-wall"`` -> ``("<image_id>", "wall")``."""
    image_id, sep, structure = graph_id.rpartition("-")
    if not sep or structure not in ("wall", "hole"):
        raise ManifestError(f"graph id {graph_id!r} lacks a -wall/-hole suffix")
    return image_id, structure


@dataclass(eq=False)
class GroupingResult:
    report: DbiReport
    model: PcaModel
    graph_ids: list
    labels: list
    projection: np.ndarray
    hulls: dict

    def report_json(self):
        return json.dumps(self.report.to_dict(), sort_keys=True, indent=1) + "\n"

    def scatter_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        cols = [f"pc{k + 1}" for k in range(self.projection.shape[1])]
        writer.writerow(["graph_id", "label"] + cols)
        for gid, lab, row in zip(self.graph_ids, self.labels, self.projection):
            writer.writerow([gid, lab] + ["%.17g" % v for v in row])
        return buf.getvalue()

    def scatter_svg(self, size=400, pad=30):
        return scatter_svg(self.projection, self.labels, self.hulls,
                           title=f"{self.report.grouping} / {self.report.subset}  "
                                 f"DBI={self.report.dbi:.4g}", size=size, pad=pad)


def grouping_labels(graph_ids, entries, grouping):
    if grouping not in GROUPINGS:
        raise ParameterError(f"grouping must be one of {GROUPINGS}, got {grouping!r}")
    by_id = {e.image_id: e for e in entries}
    labels, unmatched = [], []
    for gid in graph_ids:
        image_id, structure = split_graph_id(gid)
        entry = by_id.get(image_id)
        if entry is None:
            unmatched.append(gid)
            continue
        if grouping == "structure":
            labels.append(structure)
        elif grouping == "fluence":
            labels.append(entry.fluence_class)
        else:
            labels.append(entry.angle_class)
    if unmatched:
        raise ManifestError("no manifest labels for", unmatched)
    return labels


def run_grouping_analysis(embeddings, entries, grouping, subset="both",
                          n_components=2, dbi_space="projected"):
    """Select a subset, fit PCA, project and score the grouping's clusters.

    ``embeddings`` maps graph ids (``<image_id>-wall|hole``) to vectors.
    """
    if subset not in SUBSETS:
        raise ParameterError(f"subset must be one of {SUBSETS}, got {subset!r}")
    if dbi_space not in ("projected", "embedding"):
        raise ParameterError(f"dbi_space must be projected or embedding, got {dbi_space!r}")
    keep = {"both": ("wall", "hole"), "walls": ("wall",), "holes": ("hole",)}[subset]
    gids = [g for g in sorted(embeddings) if split_graph_id(g)[1] in keep]
    labels = grouping_labels(gids, entries, grouping)
    if len(set(labels)) < 2:
        raise UndefinedIndexError(
            f"{grouping}/{subset} selects {len(set(labels))} class(es); need at least 2")
    X = np.array([embeddings[g] for g in gids])
    model = pca_fit(X, n_components)
    Y = pca_project(model, X)
    scored = Y if dbi_space == "projected" else X
    report = davies_bouldin(scored, labels, grouping, subset)
    report.extra = {
        "space": dbi_space,
        "pca": {"explained_variance": [float(v) for v in model.explained_variance],
                "components_digest": model.components_digest()},
    }
    plane = Y[:, :2] if Y.shape[1] >= 2 else np.column_stack([Y[:, 0], np.zeros(len(Y))])
    return GroupingResult(report, model, gids, labels, Y, convex_hulls(plane, labels))


_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def scatter_svg(projection, labels, hulls, title="", size=400, pad=30):
    """Minimal deterministic SVG scatter of the first two PCs with class hulls."""
    P = np.asarray(projection, dtype=np.float64)
    xy = P[:, :2] if P.shape[1] >= 2 else np.column_stack([P[:, 0], np.zeros(len(P))])
    lo = xy.min(axis=0)
    span = np.maximum(xy.max(axis=0) - lo, 1e-300)
    inner = size - 2 * pad

    def to_px(p):
        x = pad + (p[0] - lo[0]) / span[0] * inner
        y = size - pad - (p[1] - lo[1]) / span[1] * inner
        return f"{x:.2f},{y:.2f}"

    classes = _sorted_labels(labels)
    color = {c: _PALETTE[k % len(_PALETTE)] for k, c in enumerate(classes)}
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}">',
           f'<text x="{pad}" y="{pad // 2 + 5}" font-size="12">{title}</text>']
    for c in classes:
        hull = hulls.get(c, [])
        if len(hull) >= 2:
            pts = " ".join(to_px(p) for p in hull)
            out.append(f'<polygon points="{pts}" fill="none" stroke="{color[c]}"/>')
    for p, lab in zip(xy, labels):
        x, y = to_px(p).split(",")
        out.append(f'<circle cx="{x}" cy="{y}" r="3" fill="{color[lab]}"/>')
    for k, c in enumerate(classes):
        out.append(f'<text x="{size - pad - 60}" y="{pad + 14 * k}" font-size="11" '
                   f'fill="{color[c]}">{c}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
