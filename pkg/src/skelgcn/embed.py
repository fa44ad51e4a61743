"""Untrained two-layer graph convolution with a mean-pooling readout.

Every node starts from the constant feature 1. Each layer propagates through
the symmetrically normalized adjacency with self-loops, then applies ReLU.
The weights stay at their seeded Glorot-uniform initialization, so the
encoder is a fixed random-feature map and ``(graph, seed)`` determines the
embedding.

Weights come from numpy's PCG64 bit generator (64-bit state, fixed
algorithm), filling ``W1`` then ``W2`` in row-major order.
"""
import csv
import io
import json
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import EmptyGraphError, GraphFormatError

HIDDEN = 32
DEFAULT_SEED = 42


@dataclass(frozen=True, eq=False)
class GcnWeights:
    seed: int
    w1: np.ndarray  # (1, hidden)
    w2: np.ndarray  # (hidden, hidden)
    b1: np.ndarray = None
    b2: np.ndarray = None

    @property
    def hidden(self):
        return self.w2.shape[0]

    def to_json(self):
        doc = {"seed": int(self.seed), "W1": self.w1.tolist(), "W2": self.w2.tolist()}
        if self.b1 is not None:
            doc["b1"] = self.b1.tolist()
            doc["b2"] = self.b2.tolist()
        return json.dumps(doc, sort_keys=True)

    @classmethod
    def from_json(cls, text):
        doc = json.loads(text)
        w1 = np.array(doc["W1"], dtype=np.float64)
        w2 = np.array(doc["W2"], dtype=np.float64)
        b1 = np.array(doc["b1"], dtype=np.float64) if "b1" in doc else None
        b2 = np.array(doc["b2"], dtype=np.float64) if "b2" in doc else None
        return cls(int(doc["seed"]), w1, w2, b1, b2)


def glorot_bound(fan_in, fan_out):
    return np.sqrt(6.0 / (fan_in + fan_out))


def init_weights(seed=DEFAULT_SEED, hidden=HIDDEN, bias=False):
    """Draw ``W1`` (1×hidden) and ``W2`` (hidden×hidden) from U(-a, a), a = sqrt(6/(fan_in+fan_out)).

    With ``bias=True`` two bias vectors are drawn afterwards with the same
    per-layer bound.
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    a1 = glorot_bound(1, hidden)
    a2 = glorot_bound(hidden, hidden)
    w1 = rng.uniform(-a1, a1, size=(1, hidden))
    w2 = rng.uniform(-a2, a2, size=(hidden, hidden))
    b1 = b2 = None
    if bias:
        b1 = rng.uniform(-a1, a1, size=hidden)
        b2 = rng.uniform(-a2, a2, size=hidden)
    return GcnWeights(int(seed), w1, w2, b1, b2)


def normalized_adjacency(g):
    """Sparse ``D^-1/2 (A + I) D^-1/2`` with D the degree matrix of ``A + I``."""
    n = g.n_nodes
    if n == 0:
        raise EmptyGraphError("embedding is undefined for a graph without nodes")
    edges = np.asarray(g.edges, dtype=np.int64).reshape(-1, 2)
    if edges.size and (edges[:, 0] == edges[:, 1]).any():
        raise GraphFormatError("adjacency input must not contain self-loops")
    rows = np.concatenate([edges[:, 0], edges[:, 1], np.arange(n)])
    cols = np.concatenate([edges[:, 1], edges[:, 0], np.arange(n)])
    deg = np.bincount(rows, minlength=n).astype(np.float64)
    # the degree product is an exact integer, so symmetric entries round identically
    vals = 1.0 / np.sqrt(deg[rows] * deg[cols])
    return sp.csr_matrix((vals, (rows, cols)), shape=(n, n))


def node_features(g, weights):
    """Second-layer node representations, shape (n, hidden)."""
    a_hat = normalized_adjacency(g)
    x = np.ones((g.n_nodes, 1), dtype=np.float64)
    h1 = a_hat @ (x @ weights.w1)
    if weights.b1 is not None:
        h1 = h1 + weights.b1
    h1 = np.maximum(h1, 0.0)
    h2 = a_hat @ (h1 @ weights.w2)
    if weights.b2 is not None:
        h2 = h2 + weights.b2
    return np.maximum(h2, 0.0)


def embed(g, weights):
    """Mean over nodes (summed in ascending id order) of the second-layer features."""
    h2 = node_features(g, weights)
    return np.cumsum(h2, axis=0)[-1] / g.n_nodes


def write_embeddings_csv(embeddings):
    """Serialize ``{graph_id: vector}`` as CSV text, rows sorted by id, 17 significant digits."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    width = len(next(iter(embeddings.values()))) if embeddings else HIDDEN
    writer.writerow(["graph_id"] + [f"e{k:02d}" for k in range(width)])
    for gid in sorted(embeddings):
        writer.writerow([gid] + ["%.17g" % v for v in embeddings[gid]])
    return buf.getvalue()


def read_embeddings_csv(text):
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise GraphFormatError("empty embeddings CSV") from None
    if not header or header[0] != "graph_id":
        raise GraphFormatError("embeddings CSV must start with a graph_id column")
    out = {}
    for row in reader:
        if not row:
            continue
        if len(row) != len(header):
            raise GraphFormatError(f"row for {row[0]!r} has {len(row)} fields, expected {len(header)}")
        out[row[0]] = np.array([float(v) for v in row[1:]], dtype=np.float64)
    return out
