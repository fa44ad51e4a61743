"""Skeleton-graph embeddings of binarized micrographs, scored by PCA cluster separability."""
__version__ = "0.1.0"

from ._accel import backend_name
from .analysis import convex_hulls, davies_bouldin, pca_fit, pca_project, run_grouping_analysis
from .embed import embed, init_weights, normalized_adjacency
from .graph import build_pixel_graph, classify_nodes, condense_graph, render_overlay
from .imaging import gaussian_blur, invert, load_grayscale, threshold_binarize
from .skeleton import skeletonize, thinning_pass

__all__ = [
    "backend_name", "build_pixel_graph", "classify_nodes", "condense_graph", "convex_hulls",
    "davies_bouldin", "embed", "gaussian_blur", "init_weights", "invert", "load_grayscale",
    "normalized_adjacency", "pca_fit", "pca_project", "render_overlay", "run_grouping_analysis",
    "skeletonize", "thinning_pass", "threshold_binarize",
]
