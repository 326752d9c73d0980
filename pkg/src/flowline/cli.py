"""Command line entry points for every pipeline stage.

Exit codes: 0 success, 1 usage error, 2 runtime error. The ``train``
subcommand keeps the historical network tokens (i2f, lcr, dfg) as its
stable external vocabulary.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

from . import __version__
from .dataset import build_dataset, iter_pairs
from .etf import EtfParams, compute_etf, visualize_field
from .fdog import render_line_drawing, render_with_lcm
from .metrics import evaluate_batch
from .raster import load_image, save_image, to_grayscale
from .vectorfield import read_flo, write_flo

__all__ = ["main", "build_parser"]


class _Parser(argparse.ArgumentParser):
    """argparse with usage failures mapped to exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(1)


def _levels(text: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot parse levels {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="flowline", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"flowline {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("etf", help="compute an edge tangent flow field")
    p.add_argument("-i", "--input", required=True, help="source image (PNG/JPEG)")
    p.add_argument("-o", "--output", required=True, help="tangent field output (.flo)")
    p.add_argument("--radius", type=int, default=5, help="smoothing kernel radius")
    p.add_argument("--iterations", type=int, default=3, help="refinement iterations")
    p.add_argument("--viz", help="also write a field visualization PNG here")
    p.set_defaults(func=_cmd_etf)

    p = sub.add_parser("draw", help="render a line drawing")
    p.add_argument("-i", "--input", required=True, help="source image (PNG/JPEG)")
    p.add_argument("-o", "--output", required=True, help="drawing output PNG")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--alpha", type=float, help="global control value in [0, 1]")
    group.add_argument("--lcm", help="per-pixel control matrix PNG")
    p.add_argument("--etf", help="precomputed tangent field (.flo); computed on the fly when absent")
    p.add_argument("--passes", type=int, default=None, help="rendering passes")
    p.set_defaults(func=_cmd_draw)

    p = sub.add_parser("dataset", help="dataset preparation")
    dataset_sub = p.add_subparsers(dest="dataset_command", required=True, parser_class=_Parser)
    b = dataset_sub.add_parser("build", help="build a training dataset from a directory of images")
    b.add_argument("--src", required=True, help="directory of source images")
    b.add_argument("--out", required=True, help="output dataset directory")
    b.add_argument("--levels", type=_levels, default=[0.1, 0.3, 0.5, 0.7, 0.9],
                   help="comma separated control levels")
    b.add_argument("--size", type=int, default=1024, help="square working resolution")
    b.add_argument("--split", type=float, default=0.76, help="train fraction")
    b.add_argument("--seed", type=int, default=0, help="split assignment seed")
    b.add_argument("--passes", type=int, default=2, help="rendering passes")
    b.set_defaults(func=_cmd_dataset_build)

    p = sub.add_parser("eval", help="score generated drawings against ground truth")
    p.add_argument("--pred", required=True, help="directory of generated drawings")
    p.add_argument("--gt", required=True, help="directory of ground truth drawings")
    p.add_argument("--json", dest="json_out", help="also write results as JSON here")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("train", help="train one of the networks")
    p.add_argument("network", choices=("i2f", "lcr", "dfg"), help="which network to train")
    p.add_argument("--data", required=True, help="dataset directory (with manifest.json)")
    p.add_argument("--size", type=int, default=64, help="training resolution")
    p.add_argument("--epochs", type=int, default=200, help="training epochs")
    p.add_argument("--seed", type=int, default=0, help="training seed")
    p.add_argument("--base-ch", type=int, default=8, help="network width")
    p.add_argument("--batch-size", type=int, default=1, help="samples per step")
    p.add_argument("--out", help="checkpoint output (default DATA/checkpoints/NETWORK.ckpt)")
    p.add_argument("--log", help="JSON-lines loss log (default DATA/logs/NETWORK.jsonl)")
    p.add_argument("--i2f", dest="i2f_ckpt", help="frozen flow generator checkpoint (dfg only)")
    p.add_argument("--lcr", dest="lcr_ckpt", help="frozen control regressor checkpoint (dfg only)")
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--port", type=int, default=8080, help="listen port (FLOWLINE_PORT overrides)")
    p.add_argument("--host", default="127.0.0.1", help="listen address")
    p.add_argument("--cache-mb", type=int, default=512, help="session store budget")
    p.add_argument("--max-side", type=int, default=2048, help="largest accepted image side")
    p.add_argument("--ui-dir", help="static UI directory to serve under /")
    p.set_defaults(func=_cmd_serve)

    return parser


def _cmd_etf(args) -> int:
    params = EtfParams(kernel_radius=args.radius, iterations=args.iterations)
    field = compute_etf(load_image(args.input), params)
    write_flo(field, args.output)
    if args.viz:
        save_image(visualize_field(field), args.viz)
    print(f"wrote {args.output} ({field.width}x{field.height})")
    return 0


def _cmd_draw(args) -> int:
    img = load_image(args.input)
    field = read_flo(args.etf) if args.etf else compute_etf(img)
    if args.lcm is not None:
        lcm = to_grayscale(load_image(args.lcm))
        drawing = render_with_lcm(img, field, lcm, passes=args.passes)
    else:
        drawing = render_line_drawing(img, field, args.alpha, passes=args.passes)
    save_image(drawing, args.output)
    print(f"wrote {args.output}")
    return 0


def _cmd_dataset_build(args) -> int:
    manifest = build_dataset(
        args.src,
        args.out,
        levels=args.levels,
        size=args.size,
        split_ratio=args.split,
        seed=args.seed,
        passes=args.passes,
    )
    drawings = sum(len(e.drawings) for e in manifest.entries)
    print(
        f"built {len(manifest.entries)} images, {drawings} drawings "
        f"-> {Path(args.out) / 'manifest.json'}"
    )
    return 0


def _format_metric(value: float) -> str:
    return f"{value:10.4f}" if math.isfinite(value) else f"{'inf':>10}"


def _cmd_eval(args) -> int:
    pairs, aggregate = evaluate_batch(args.pred, args.gt)
    width = max(len(name) for name, _ in pairs)
    width = max(width, len("mean"))
    print(f"{'name':<{width}} {'SSIM':>10} {'PSNR':>10} {'FFT':>10}")
    for name, report in pairs:
        print(
            f"{name:<{width}} {_format_metric(report.ssim)} "
            f"{_format_metric(report.psnr)} {_format_metric(report.fft_distance)}"
        )
    print(
        f"{'mean':<{width}} {_format_metric(aggregate.ssim)} "
        f"{_format_metric(aggregate.psnr)} {_format_metric(aggregate.fft_distance)}"
    )
    print("FID: not supported")
    if args.json_out:
        def row(name, report):
            return {
                "name": name,
                "ssim": report.ssim,
                "psnr": report.psnr if math.isfinite(report.psnr) else None,
                "fft_distance": report.fft_distance,
            }

        payload = {
            "pairs": [row(name, report) for name, report in pairs],
            "aggregate": row("mean", aggregate),
        }
        with open(args.json_out, "w") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return 0


def _cmd_train(args) -> int:
    # torch import deferred so the classical commands stay light.
    from .neural.checkpoint import load_checkpoint, save_checkpoint
    from .neural.losses import TrainConfig
    from .neural.training import (
        train_control_regressor,
        train_drawing_generator,
        train_flow_generator,
    )

    data = Path(args.data)
    manifest = data / "manifest.json"
    config = TrainConfig(
        epochs=args.epochs,
        image_size=args.size,
        base_ch=args.base_ch,
        batch_size=args.batch_size,
        seed=args.seed,
    )
    out = Path(args.out) if args.out else data / "checkpoints" / f"{args.network}.ckpt"
    log = Path(args.log) if args.log else data / "logs" / f"{args.network}.jsonl"
    out.parent.mkdir(parents=True, exist_ok=True)
    log.parent.mkdir(parents=True, exist_ok=True)

    if args.network == "i2f":
        samples = iter_pairs(manifest, "train", "etf", seed=args.seed)
        network, history = train_flow_generator(samples, config, log_path=log)
    elif args.network == "lcr":
        samples = iter_pairs(manifest, "train", "drawing", seed=args.seed)
        network, history = train_control_regressor(samples, config, log_path=log)
    else:
        samples = iter_pairs(manifest, "train", "drawing", seed=args.seed)
        i2f_path = Path(args.i2f_ckpt) if args.i2f_ckpt else data / "checkpoints" / "i2f.ckpt"
        lcr_path = Path(args.lcr_ckpt) if args.lcr_ckpt else data / "checkpoints" / "lcr.ckpt"
        network, history = train_drawing_generator(
            samples,
            config,
            load_checkpoint(i2f_path),
            load_checkpoint(lcr_path),
            log_path=log,
        )
    save_checkpoint(network, out)
    print(f"trained {args.network} for {len(history)} steps -> {out} (log: {log})")
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    port = int(os.environ.get("FLOWLINE_PORT", args.port))
    app = create_app(cache_mb=args.cache_mb, max_side=args.max_side, ui_dir=args.ui_dir)
    uvicorn.run(app, host=args.host, port=port)
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
