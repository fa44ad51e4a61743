"""Command-line entry point: ``skelgcn <subcommand> ...``."""
import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import pipeline as pl
from . import synth
from .embed import init_weights, write_embeddings_csv
from .errors import SkelGcnError
from .imaging import _atomic_write, load_grayscale, save_binary_pgm
from .manifest import load_manifest

log = logging.getLogger("skelgcn")


def _add_config_flags(p):
    d = pl.PipelineConfig()
    p.add_argument("--blur-sigma", type=float, default=d.blur_sigma)
    p.add_argument("--blur-radius", type=int, default=d.blur_radius)
    p.add_argument("--threshold", type=int, default=d.threshold)
    p.add_argument("--gcn-seed", type=int, default=d.gcn_seed)
    p.add_argument("--pca-components", type=int, default=d.pca_components)
    p.add_argument("--dbi-space", choices=("projected", "embedding"), default=d.dbi_space)
    p.add_argument("--graph-variant", choices=("pixel", "condensed"), default=d.graph_variant)
    p.add_argument("--no-holes", dest="analyze_holes", action="store_false",
                   help="skip the inverted (hole) pass")


def _config(args):
    return pl.PipelineConfig(args.blur_sigma, args.blur_radius, args.threshold, args.gcn_seed,
                             args.pca_components, args.dbi_space, args.graph_variant,
                             args.analyze_holes).validate()


def _out_dir(args):
    return Path(args.out_dir) if args.out_dir else pl.default_out_dir()


def build_parser():
    parser = argparse.ArgumentParser(prog="skelgcn", description=__doc__)
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pipeline", help="run every stage over a manifest")
    p.add_argument("manifest")
    p.add_argument("--out-dir", help=f"output directory (default ${pl.OUT_ROOT_ENV} or ./skelgcn-out)")
    p.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    _add_config_flags(p)

    p = sub.add_parser("preprocess", help="blur, binarize and invert")
    p.add_argument("input", nargs="?", help="single image; omit to process --manifest")
    p.add_argument("-o", "--output")
    p.add_argument("--hole", action="store_true", help="emit the hole (re-inverted) foreground")
    p.add_argument("--manifest")
    p.add_argument("--out-dir")
    _add_config_flags(p)

    p = sub.add_parser("skeletonize", help="Zhang-Suen thinning of binary PGMs")
    p.add_argument("input", nargs="?")
    p.add_argument("-o", "--output")
    p.add_argument("--out-dir")
    p.add_argument("--trace-dir", help="dump one PGM per thinning sub-pass")

    p = sub.add_parser("graph", help="skeleton PGM -> graph JSON (+ overlay)")
    p.add_argument("input", nargs="?")
    p.add_argument("-o", "--output")
    p.add_argument("--binary", help="binary PGM used as overlay background")
    p.add_argument("--overlay", help="write an RGB overlay PPM here")
    p.add_argument("--out-dir")
    _add_config_flags(p)

    p = sub.add_parser("embed", help="graph JSON -> embeddings CSV")
    p.add_argument("inputs", nargs="*")
    p.add_argument("-o", "--output")
    p.add_argument("--out-dir")
    _add_config_flags(p)

    p = sub.add_parser("analyze", help="PCA + Davies-Bouldin over the manifest groupings")
    p.add_argument("--manifest", required=True)
    p.add_argument("--embeddings", help="embeddings CSV (default <out-dir>/embeddings.csv)")
    p.add_argument("--out-dir")
    _add_config_flags(p)

    p = sub.add_parser("synth", help="generate a labeled synthetic corpus")
    p.add_argument("out_dir")
    p.add_argument("--kind", choices=("ripples", "holes"), default="ripples")
    p.add_argument("--replicates", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--size", type=int, default=128)
    p.add_argument("--noise-sigma", type=float, default=6.0)
    p.add_argument("--coarseness", type=float, nargs="+", default=list(synth.DEFAULT_FLUENCE_LEVELS))
    p.add_argument("--angles", type=float, nargs="+", default=list(synth.DEFAULT_ANGLE_LEVELS))
    return parser


def _single_or_workspace(args):
    if args.input and not args.output:
        raise SkelGcnError("single-file mode needs -o/--output")
    return bool(args.input)


def cmd_pipeline(args):
    entries = load_manifest(args.manifest)
    summary = pl.run_pipeline(entries, _out_dir(args), _config(args),
                              base_dir=Path(args.manifest).parent, workers=args.workers)
    for name, err in summary["failures"].items():
        print(f"FAILED {name}: {err}", file=sys.stderr)
    return 1 if summary["failures"] else 0


def cmd_preprocess(args):
    config = _config(args)
    if _single_or_workspace(args):
        structure = "hole" if args.hole else "wall"
        save_binary_pgm(args.output, pl.preprocess_image(load_grayscale(args.input), config, structure))
        return 0
    if not args.manifest:
        raise SkelGcnError("give an input image or --manifest")
    pl.stage_preprocess(_out_dir(args), load_manifest(args.manifest), config,
                        base_dir=Path(args.manifest).parent)
    return 0


def cmd_skeletonize(args):
    if _single_or_workspace(args):
        pl.write_skeleton(args.input, args.output, args.trace_dir)
    else:
        pl.stage_skeletonize(_out_dir(args), args.trace_dir)
    return 0


def cmd_graph(args):
    config = _config(args)
    if _single_or_workspace(args):
        pl.write_graph(args.input, args.output, config, args.binary, args.overlay)
    else:
        pl.stage_graph(_out_dir(args), config)
    return 0


def cmd_embed(args):
    config = _config(args)
    if args.inputs:
        weights = init_weights(config.gcn_seed)
        embeddings, failures = pl.embed_graph_files(args.inputs, weights)
        text = write_embeddings_csv(embeddings)
        if args.output:
            _atomic_write(args.output, text.encode())
        else:
            sys.stdout.write(text)
    else:
        failures = pl.stage_embed(_out_dir(args), config)
    for gid, err in failures.items():
        print(f"FAILED {gid}: {err}", file=sys.stderr)
    return 1 if failures else 0


def cmd_analyze(args):
    failures = pl.stage_analyze(_out_dir(args), load_manifest(args.manifest, check_files=False),
                                _config(args), args.embeddings)
    for name, err in failures.items():
        print(f"FAILED {name}: {err}", file=sys.stderr)
    return 1 if failures else 0


def cmd_synth(args):
    entries = synth.generate_corpus(args.out_dir, tuple(args.coarseness), tuple(args.angles),
                                    args.replicates, args.seed, args.kind,
                                    (args.size, args.size), args.noise_sigma)
    print(json.dumps({"entries": len(entries), "manifest": str(Path(args.out_dir) / "manifest.csv")}))
    return 0


COMMANDS = {
    "pipeline": cmd_pipeline, "preprocess": cmd_preprocess, "skeletonize": cmd_skeletonize,
    "graph": cmd_graph, "embed": cmd_embed, "analyze": cmd_analyze, "synth": cmd_synth,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except SkelGcnError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
