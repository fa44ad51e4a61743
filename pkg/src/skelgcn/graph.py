"""Skeleton image -> undirected pixel-adjacency graph.

Nodes are skeleton pixels with at least one 8-neighbour in the skeleton;
ids follow row-major pixel order. Edges join 8-adjacent node pixels and are
stored once each as ``(u, v)`` with ``u < v``, sorted lexicographically.
"""
import json
import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import GraphFormatError, ParameterError

log = logging.getLogger(__name__)

BRANCH = "branch"
ENDPOINT = "endpoint"

YELLOW = (255, 255, 0)
RED = (255, 0, 0)
GREEN = (0, 255, 0)

# forward half of the 8-neighbourhood: E, SW, S, SE
_FORWARD = ((0, 1), (1, -1), (1, 0), (1, 1))


@dataclass(frozen=True, eq=False)
class SkeletonGraph:
    dims: tuple
    coords: np.ndarray   # (n, 2) int64 rows/cols
    edges: np.ndarray    # (m, 2) int64, u < v, lexicographically sorted
    degrees: np.ndarray  # (n,) int64
    isolated_pixels: int = field(default=0)

    @property
    def n_nodes(self):
        return int(self.coords.shape[0])

    @property
    def n_edges(self):
        return int(self.edges.shape[0])

    def __eq__(self, other):
        if not isinstance(other, SkeletonGraph):
            return NotImplemented
        return (tuple(self.dims) == tuple(other.dims)
                and np.array_equal(self.coords, other.coords)
                and np.array_equal(self.edges, other.edges)
                and np.array_equal(self.degrees, other.degrees))

    def to_json(self):
        doc = {
            "dims": [int(d) for d in self.dims],
            "nodes": [{"id": i, "coord": [int(r), int(c)], "degree": int(d)}
                      for i, ((r, c), d) in enumerate(zip(self.coords, self.degrees))],
            "edges": [[int(u), int(v)] for u, v in self.edges],
        }
        return json.dumps(doc, sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, text):
        try:
            doc = json.loads(text)
            dims = tuple(int(d) for d in doc["dims"])
            nodes = doc["nodes"]
            ids = [int(n["id"]) for n in nodes]
            if ids != list(range(len(nodes))):
                raise GraphFormatError("node ids must be 0..n-1 in order")
            coords = np.array([n["coord"] for n in nodes], dtype=np.int64).reshape(-1, 2)
            degrees = np.array([n["degree"] for n in nodes], dtype=np.int64)
            edges = np.array(doc["edges"], dtype=np.int64).reshape(-1, 2)
        except (KeyError, TypeError, ValueError) as exc:
            raise GraphFormatError(f"malformed graph JSON: {exc}") from exc
        g = cls(dims, coords, edges, degrees)
        check_graph(g)
        return g


def check_graph(g):
    """Raise ``GraphFormatError`` unless ``g`` satisfies the structural invariants."""
    n = g.n_nodes
    e = g.edges
    if e.size:
        if (e[:, 0] >= e[:, 1]).any():
            raise GraphFormatError("edges must satisfy u < v (no self-loops)")
        if e.min() < 0 or e.max() >= n:
            raise GraphFormatError("edge references unknown node")
        order = np.lexsort((e[:, 1], e[:, 0]))
        if not np.array_equal(order, np.arange(len(e))):
            raise GraphFormatError("edges must be sorted lexicographically")
        if (np.diff(e, axis=0) == 0).all(axis=1).any():
            raise GraphFormatError("duplicate edge")
    recount = np.bincount(e.ravel(), minlength=n) if n else np.zeros(0, np.int64)
    if not np.array_equal(recount, g.degrees):
        raise GraphFormatError("stored degrees disagree with edge incidence")


def from_edges(n_nodes, edges, coords=None, dims=(0, 0)):
    """Build a graph from arbitrary ids; edges are canonicalised and deduplicated."""
    e = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    e = np.sort(e, axis=1)
    e = e[e[:, 0] != e[:, 1]]
    e = np.unique(e, axis=0) if e.size else e
    if coords is None:
        coords = np.zeros((n_nodes, 2), dtype=np.int64)
    degrees = np.bincount(e.ravel(), minlength=n_nodes).astype(np.int64)
    return SkeletonGraph(tuple(dims), np.asarray(coords, dtype=np.int64), e, degrees)


def build_pixel_graph(skeleton):
    skel = np.asarray(skeleton) != 0
    if skel.ndim != 2:
        raise ParameterError(f"expected a 2-D skeleton image, got shape {skel.shape}")
    h, w = skel.shape
    coords = np.argwhere(skel).astype(np.int64)
    index = np.full((h, w), -1, dtype=np.int64)
    index[coords[:, 0], coords[:, 1]] = np.arange(len(coords))

    pairs = []
    for dr, dc in _FORWARD:
        r0 = coords[:, 0] + dr
        c0 = coords[:, 1] + dc
        ok = (r0 >= 0) & (r0 < h) & (c0 >= 0) & (c0 < w)
        src = np.nonzero(ok)[0]
        dst = index[r0[ok], c0[ok]]
        hit = dst >= 0
        pairs.append(np.stack([src[hit], dst[hit]], axis=1))
    edges = np.concatenate(pairs) if pairs else np.zeros((0, 2), np.int64)
    degrees = np.bincount(edges.ravel(), minlength=len(coords))

    keep = degrees > 0
    isolated = int((~keep).sum())
    if isolated:
        log.debug("dropped %d isolated skeleton pixels", isolated)
    remap = np.cumsum(keep) - 1
    edges = remap[edges]
    edges = edges[np.lexsort((edges[:, 1], edges[:, 0]))]
    return SkeletonGraph((h, w), coords[keep], edges.astype(np.int64),
                         degrees[keep].astype(np.int64), isolated)


@dataclass(frozen=True)
class NodeClass:
    node_id: int
    cls: str


def classify_nodes(g):
    """Degree >= 3 is a branch point; everything else is labelled endpoint."""
    return [NodeClass(i, BRANCH if d >= 3 else ENDPOINT) for i, d in enumerate(g.degrees)]


def strict_endpoint_count(g):
    """Nodes of degree exactly 1, the conventional notion of a skeleton tip."""
    return int((g.degrees == 1).sum())


def adjacency_lists(g):
    nbrs = [[] for _ in range(g.n_nodes)]
    for u, v in g.edges.tolist():
        nbrs[u].append(v)
        nbrs[v].append(u)
    return nbrs


@dataclass(frozen=True)
class CondensedEdge:
    u: int  # condensed node index
    v: int
    path: tuple  # interior pixel-graph ids, in walk order from u to v

    @property
    def path_length_pixels(self):
        return len(self.path)


@dataclass(frozen=True)
class CondensedGraph:
    dims: tuple
    anchors: tuple  # pixel-graph ids of condensed nodes, ascending
    coords: np.ndarray
    edges: tuple    # CondensedEdge, sorted by (u, v, path)

    @property
    def n_nodes(self):
        return len(self.anchors)

    def path_lengths(self):
        return [e.path_length_pixels for e in self.edges]

    def as_simple_graph(self):
        """Collapse parallel edges and drop self-paths, e.g. for embedding.

        Nodes left without neighbours keep degree 0.
        """
        return from_edges(self.n_nodes, [(e.u, e.v) for e in self.edges],
                          coords=self.coords, dims=self.dims)


def condense_graph(g):
    """Contract chains of degree-2 pixels into single edges between anchors.

    Anchors are the pixels of degree != 2. A component made only of degree-2
    pixels (a closed loop) is represented by its lowest-id pixel with a
    self-path through the rest of the loop.
    """
    nbrs = adjacency_lists(g)
    deg = g.degrees
    anchor = deg != 2
    visited = np.zeros(g.n_nodes, dtype=bool)
    found = []

    anchor_ids = [int(i) for i in np.nonzero(anchor)[0]]
    for a in anchor_ids:
        for n in sorted(nbrs[a]):
            if anchor[n]:
                if a < n:
                    found.append((a, n, ()))
                continue
            if visited[n]:
                continue
            path = []
            prev, cur = a, n
            while not anchor[cur]:
                visited[cur] = True
                path.append(cur)
                step = nbrs[cur][0] if nbrs[cur][0] != prev else nbrs[cur][1]
                prev, cur = cur, step
            if cur < a:
                found.append((cur, a, tuple(reversed(path))))
            else:
                found.append((a, cur, tuple(path)))

    loop_reps = []
    for start in range(g.n_nodes):
        if anchor[start] or visited[start]:
            continue
        # closed loop of degree-2 pixels; walk it from its lowest id
        visited[start] = True
        path = []
        prev, cur = start, min(nbrs[start])
        while cur != start:
            visited[cur] = True
            path.append(cur)
            step = nbrs[cur][0] if nbrs[cur][0] != prev else nbrs[cur][1]
            prev, cur = cur, step
        loop_reps.append(start)
        found.append((start, start, tuple(path)))

    members = sorted(anchor_ids + loop_reps)
    pos = {pid: k for k, pid in enumerate(members)}
    edges = [CondensedEdge(pos[u], pos[v], p) for u, v, p in found]
    edges.sort(key=lambda e: (e.u, e.v, e.path))
    coords = g.coords[members] if members else np.zeros((0, 2), np.int64)
    return CondensedGraph(tuple(g.dims), tuple(members), coords, tuple(edges))


def _line(r0, c0, r1, c1):
    """Integer pixels on the segment between two points (Bresenham)."""
    pts = []
    dr, dc = abs(r1 - r0), abs(c1 - c0)
    sr = 1 if r1 >= r0 else -1
    sc = 1 if c1 >= c0 else -1
    err = dc - dr
    r, c = r0, c0
    while True:
        pts.append((r, c))
        if r == r1 and c == c1:
            return pts
        e2 = 2 * err
        if e2 > -dr:
            err -= dr
            c += sc
        if e2 < dc:
            err += dc
            r += sr


def render_overlay(binary, g, classes=None, skeleton=None):
    """RGB overlay: binary background, yellow skeleton and edge segments,
    red branch nodes, green endpoints.

    ``g`` may be a ``SkeletonGraph`` or a ``CondensedGraph``.
    """
    binary = np.asarray(binary)
    h, w = binary.shape
    coords = np.asarray(g.coords, dtype=np.int64).reshape(-1, 2)
    if coords.size and (coords.min() < 0 or (coords[:, 0] >= h).any() or (coords[:, 1] >= w).any()):
        raise ParameterError("graph coordinates fall outside the image")
    canvas = np.repeat(((binary != 0) * 255).astype(np.uint8)[:, :, None], 3, axis=2)
    if skeleton is not None:
        canvas[np.asarray(skeleton) != 0] = YELLOW

    if isinstance(g, CondensedGraph):
        pairs = [(e.u, e.v) for e in g.edges if e.u != e.v]
        degrees = np.bincount(np.array(pairs, dtype=np.int64).ravel(), minlength=g.n_nodes) \
            if pairs else np.zeros(g.n_nodes, np.int64)
        if classes is None:
            classes = [NodeClass(i, BRANCH if d >= 3 else ENDPOINT) for i, d in enumerate(degrees)]
    else:
        pairs = g.edges.tolist()
        if classes is None:
            classes = classify_nodes(g)
    for u, v in pairs:
        for r, c in _line(*coords[u], *coords[v]):
            canvas[r, c] = YELLOW
    for nc in classes:
        r, c = coords[nc.node_id]
        canvas[r, c] = RED if nc.cls == BRANCH else GREEN
    return canvas
