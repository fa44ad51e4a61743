"""End-to-end orchestration and the on-disk artifact layout.

Layout under an output directory::

    binary/<gid>.pgm      skeleton/<gid>.pgm    graph/<gid>.json
    overlay/<gid>.ppm     embeddings.csv        weights.json
    analysis/<grouping>-<subset>.{json,csv,svg}
    summary.json

where ``gid`` is ``<image_id>-wall`` or ``<image_id>-hole``. Every stage
writes through the same functions whether it runs alone or inside
:func:`run_pipeline`, so staged and monolithic runs produce identical bytes.
"""
import hashlib
import json
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path

from . import __version__
from .analysis import run_grouping_analysis
from .embed import GcnWeights, embed, init_weights, read_embeddings_csv, write_embeddings_csv
from .errors import ManifestError, ParameterError, SkelGcnError
from .graph import SkeletonGraph, build_pixel_graph, condense_graph, render_overlay
from .imaging import (_atomic_write, gaussian_blur, invert, load_binary_pgm, load_grayscale,
                      save_binary_pgm, save_ppm, threshold_binarize)
from .manifest import resolve_path
from .skeleton import skeletonize

log = logging.getLogger(__name__)

OUT_ROOT_ENV = "SKELGCN_OUT_ROOT"
STRUCTURES = ("wall", "hole")


@dataclass(frozen=True)
class PipelineConfig:
    blur_sigma: float = 1.0
    blur_radius: int = 2
    threshold: int = 100
    gcn_seed: int = 42
    pca_components: int = 2
    dbi_space: str = "projected"
    graph_variant: str = "pixel"
    analyze_holes: bool = True

    def validate(self):
        if not 0 <= self.threshold <= 255:
            raise ParameterError(f"threshold must lie in [0, 255], got {self.threshold}")
        if not 1 <= self.pca_components <= 32:
            raise ParameterError(f"pca_components must lie in [1, 32], got {self.pca_components}")
        if self.dbi_space not in ("projected", "embedding"):
            raise ParameterError(f"dbi_space must be projected or embedding, got {self.dbi_space!r}")
        if self.graph_variant not in ("pixel", "condensed"):
            raise ParameterError(f"graph_variant must be pixel or condensed, got {self.graph_variant!r}")
        if not self.blur_sigma > 0 or self.blur_radius < 1:
            raise ParameterError("blur sigma must be > 0 and radius >= 1")
        return self

    def structures(self):
        return STRUCTURES if self.analyze_holes else ("wall",)

    def analyses(self):
        subsets = ("both", "walls", "holes") if self.analyze_holes else ("walls",)
        plan = [("structure", "both")] if self.analyze_holes else []
        for grouping in ("fluence", "angle"):
            plan.extend((grouping, s) for s in subsets)
        return plan


def default_out_dir():
    return Path(os.environ.get(OUT_ROOT_ENV, "skelgcn-out"))


# -- per-image stages ----------------------------------------------------------

def preprocess_image(gray, config, structure="wall"):
    """Blur, binarize, invert; the hole pass inverts once more."""
    wall = invert(threshold_binarize(gaussian_blur(gray, config.blur_sigma, config.blur_radius),
                                     config.threshold))
    return wall if structure == "wall" else invert(wall)


def graph_for(skel, config):
    g = build_pixel_graph(skel)
    if config.graph_variant == "condensed":
        return condense_graph(g).as_simple_graph()
    return g


def write_preprocess(out_dir, entries, config, base_dir=None):
    out_dir = Path(out_dir)
    for e in entries:
        gray = load_grayscale(resolve_path(e, base_dir))
        for s in config.structures():
            save_binary_pgm(out_dir / "binary" / f"{e.image_id}-{s}.pgm",
                            preprocess_image(gray, config, s))


def write_skeleton(binary_path, skeleton_path, trace_dir=None):
    binary = load_binary_pgm(binary_path)
    trace = None
    if trace_dir is not None:
        stem = Path(skeleton_path).stem

        def trace(iteration, sub_pass, img):
            save_binary_pgm(Path(trace_dir) / f"{stem}-it{iteration:03d}-p{sub_pass}.pgm", img)
    save_binary_pgm(skeleton_path, skeletonize(binary, trace=trace))


def write_graph(skeleton_path, graph_path, config, binary_path=None, overlay_path=None):
    skel = load_binary_pgm(skeleton_path)
    g = graph_for(skel, config)
    _atomic_write(graph_path, (g.to_json() + "\n").encode())
    if overlay_path is not None:
        binary = load_binary_pgm(binary_path) if binary_path is not None else skel
        pixel = g if config.graph_variant == "pixel" else build_pixel_graph(skel)
        save_ppm(overlay_path, render_overlay(binary, pixel, skeleton=skel))
    return g


def load_graph(path):
    return SkeletonGraph.from_json(Path(path).read_text())


def embed_graph_files(paths, weights):
    """Embed graph JSON files keyed by file stem; graphs without nodes are reported."""
    out, failures = {}, {}
    for p in sorted(map(Path, paths)):
        try:
            out[p.stem] = embed(load_graph(p), weights)
        except SkelGcnError as exc:
            failures[p.stem] = str(exc)
    return out, failures


def write_embeddings(out_dir, embeddings, weights):
    out_dir = Path(out_dir)
    _atomic_write(out_dir / "embeddings.csv", write_embeddings_csv(embeddings).encode())
    _atomic_write(out_dir / "weights.json", (weights.to_json() + "\n").encode())


def write_analyses(out_dir, embeddings, entries, config):
    """Run every grouping analysis; return ``{name: error}`` for those that failed."""
    out_dir = Path(out_dir) / "analysis"
    failures = {}
    for grouping, subset in config.analyses():
        name = f"{grouping}-{subset}"
        try:
            res = run_grouping_analysis(embeddings, entries, grouping, subset,
                                        config.pca_components, config.dbi_space)
        except SkelGcnError as exc:
            failures[name] = str(exc)
            log.error("analysis %s failed: %s", name, exc)
            continue
        _atomic_write(out_dir / f"{name}.json", res.report_json().encode())
        _atomic_write(out_dir / f"{name}.csv", res.scatter_csv().encode())
        _atomic_write(out_dir / f"{name}.svg", res.scatter_svg().encode())
        log.info("%s: K=%d DBI=%.6g", name, res.report.K, res.report.dbi)
    return failures


# -- workspace stages (all images under one output directory) ---------------

def stage_preprocess(out_dir, entries, config, base_dir=None):
    write_preprocess(out_dir, entries, config, base_dir)


def stage_skeletonize(out_dir, trace_dir=None):
    out_dir = Path(out_dir)
    for b in sorted((out_dir / "binary").glob("*.pgm")):
        write_skeleton(b, out_dir / "skeleton" / b.name, trace_dir)


def stage_graph(out_dir, config):
    out_dir = Path(out_dir)
    for s in sorted((out_dir / "skeleton").glob("*.pgm")):
        write_graph(s, out_dir / "graph" / f"{s.stem}.json", config,
                    binary_path=out_dir / "binary" / s.name,
                    overlay_path=out_dir / "overlay" / f"{s.stem}.ppm")


def stage_embed(out_dir, config):
    out_dir = Path(out_dir)
    weights = init_weights(config.gcn_seed)
    embeddings, failures = embed_graph_files((out_dir / "graph").glob("*.json"), weights)
    write_embeddings(out_dir, embeddings, weights)
    return failures


def stage_analyze(out_dir, entries, config, embeddings_path=None):
    out_dir = Path(out_dir)
    path = Path(embeddings_path) if embeddings_path else out_dir / "embeddings.csv"
    return write_analyses(out_dir, read_embeddings_csv(path.read_text()), entries, config)


# -- monolithic run -----------------------------------------------------------

def _process_entry(entry, out_dir, config, base_dir):
    """All per-image stages for one manifest entry; returns graph files written."""
    write_preprocess(out_dir, [entry], config, base_dir)
    written = []
    for s in config.structures():
        gid = f"{entry.image_id}-{s}"
        binary = out_dir / "binary" / f"{gid}.pgm"
        skel = out_dir / "skeleton" / f"{gid}.pgm"
        write_skeleton(binary, skel)
        write_graph(skel, out_dir / "graph" / f"{gid}.json", config,
                    binary_path=binary, overlay_path=out_dir / "overlay" / f"{gid}.ppm")
        written.append(out_dir / "graph" / f"{gid}.json")
    return written


def file_digests(out_dir, exclude=("summary.json",)):
    out_dir = Path(out_dir)
    digests = {}
    for p in sorted(out_dir.rglob("*")):
        rel = p.relative_to(out_dir).as_posix()
        if p.is_file() and rel not in exclude and not rel.endswith(".tmp"):
            digests[rel] = hashlib.sha256(p.read_bytes()).hexdigest()
    return digests


def verify_summary(out_dir):
    """Return the files whose content no longer matches ``summary.json``."""
    out_dir = Path(out_dir)
    recorded = json.loads((out_dir / "summary.json").read_text())["digests"]
    actual = file_digests(out_dir)
    return sorted(k for k in set(recorded) | set(actual) if recorded.get(k) != actual.get(k))


def run_pipeline(entries, out_dir, config=PipelineConfig(), base_dir=None, workers=1):
    """Run every stage over ``entries``; return a summary dict.

    Per-image failures are recorded under ``"failures"`` and skipped.
    """
    config.validate()
    if not entries:
        raise ManifestError("no inputs")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    failures = {}

    def work(entry):
        try:
            return entry.image_id, _process_entry(entry, out_dir, config, base_dir), None
        except SkelGcnError as exc:
            return entry.image_id, [], str(exc)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(work, entries))
        # analysis joins here, after every per-image stage has finished
    else:
        results = [work(e) for e in entries]
    graph_files = []
    for image_id, files, err in results:
        if err is not None:
            failures[image_id] = err
            log.error("image %s failed: %s", image_id, err)
        graph_files.extend(files)

    weights = init_weights(config.gcn_seed)
    embeddings, embed_failures = embed_graph_files(graph_files, weights)
    failures.update(embed_failures)
    write_embeddings(out_dir, embeddings, weights)
    analysis_failures = write_analyses(out_dir, embeddings, entries, config) if embeddings else {
        name: "no embeddings" for name in (f"{g}-{s}" for g, s in config.analyses())}
    failures.update({f"analysis/{k}": v for k, v in analysis_failures.items()})

    summary = {
        "version": __version__,
        "config": asdict(config),
        "seeds": {"gcn": config.gcn_seed},
        "images": sorted(e.image_id for e in entries),
        "failures": dict(sorted(failures.items())),
        "digests": file_digests(out_dir),
    }
    _atomic_write(out_dir / "summary.json", (json.dumps(summary, sort_keys=True, indent=1) + "\n").encode())
    return summary


def load_weights(path):
    return GcnWeights.from_json(Path(path).read_text())
