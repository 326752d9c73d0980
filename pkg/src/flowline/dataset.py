"""Dataset builder: photographs to (image, flow field, drawing ladder) triples.

Layout under the output directory:

    images/<stem>.png            resized source image
    etf/<stem>.flo (+ .mag)      tangent field of the resized image
    drawings/<stem>_a<level>.png one drawing per control level
    manifest.json                entries, recorded parameters, splits

The build is deterministic: same inputs and seed produce byte identical
files. The train/test split hashes the file stem together with the
seed, so membership never depends on directory order.
"""
from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass, field as dataclass_field
from pathlib import Path
from typing import Iterable, NamedTuple

import numpy as np
from PIL import Image

from .etf import EtfParams, compute_etf
from .fdog import ANCHOR_LEVELS, render_line_drawing
from .raster import load_image, resize, save_image
from .vectorfield import magnitude_path, read_flo, write_flo

__all__ = [
    "DatasetManifest",
    "ManifestEntry",
    "EtfSample",
    "DrawingSample",
    "build_dataset",
    "load_manifest",
    "validate_manifest",
    "iter_pairs",
]

MANIFEST_NAME = "manifest.json"
MANIFEST_VERSION = "1"
_IMAGE_EXTS = {".png", ".jpg", ".jpeg"}


@dataclass
class ManifestEntry:
    image: str
    etf: str
    split: str
    drawings: list[dict]  # {"path": str, "alpha": float}


@dataclass
class DatasetManifest:
    version: str
    size: int
    seed: int
    split_ratio: float
    levels: list[float]
    etf_params: dict
    fdog_passes: int
    entries: list[ManifestEntry] = dataclass_field(default_factory=list)

    def to_json(self) -> str:
        payload = {
            "version": self.version,
            "params": {
                "size": self.size,
                "seed": self.seed,
                "split_ratio": self.split_ratio,
                "anchor_levels": self.levels,
                "etf": self.etf_params,
                "fdog_passes": self.fdog_passes,
            },
            "entries": [
                {
                    "image": e.image,
                    "etf": e.etf,
                    "split": e.split,
                    "drawings": e.drawings,
                }
                for e in self.entries
            ],
        }
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "DatasetManifest":
        raw = json.loads(text)
        params = raw["params"]
        return cls(
            version=raw["version"],
            size=params["size"],
            seed=params["seed"],
            split_ratio=params["split_ratio"],
            levels=list(params["anchor_levels"]),
            etf_params=dict(params["etf"]),
            fdog_passes=params["fdog_passes"],
            entries=[
                ManifestEntry(
                    image=e["image"],
                    etf=e["etf"],
                    split=e["split"],
                    drawings=list(e["drawings"]),
                )
                for e in raw["entries"]
            ],
        )


class EtfSample(NamedTuple):
    image: Path
    field: Path


class DrawingSample(NamedTuple):
    image: Path
    field: Path
    drawing: Path
    alpha: float


def _assign_split(stem: str, seed: int, ratio: float) -> str:
    digest = hashlib.sha256(f"{seed}:{stem}".encode()).hexdigest()
    frac = int(digest[:8], 16) / float(0xFFFFFFFF)
    return "train" if frac < ratio else "test"


def build_dataset(
    src_dir,
    out_dir,
    levels: Iterable[float] = ANCHOR_LEVELS,
    size: int = 1024,
    split_ratio: float = 0.76,
    seed: int = 0,
    etf_params: EtfParams | None = None,
    passes: int = 2,
) -> DatasetManifest:
    """Resize, compute fields, render the drawing ladder, write the manifest."""
    src_dir = Path(src_dir)
    out_dir = Path(out_dir)
    levels = [float(a) for a in levels]
    if sorted(levels) != levels or len(set(levels)) != len(levels):
        raise ValueError(f"levels must be strictly increasing, got {levels}")
    if not (0.0 < split_ratio < 1.0):
        raise ValueError(f"split_ratio must be in (0, 1), got {split_ratio}")
    if size < 3:
        raise ValueError(f"size must be at least 3, got {size}")
    etf_params = etf_params or EtfParams()

    sources = sorted(
        p for p in src_dir.iterdir() if p.suffix.lower() in _IMAGE_EXTS
    )
    if not sources:
        raise ValueError(f"no images found in {src_dir}")

    for sub in ("images", "etf", "drawings"):
        (out_dir / sub).mkdir(parents=True, exist_ok=True)

    manifest = DatasetManifest(
        version=MANIFEST_VERSION,
        size=size,
        seed=seed,
        split_ratio=split_ratio,
        levels=levels,
        etf_params={
            "kernel_radius": etf_params.kernel_radius,
            "eta": etf_params.eta,
            "iterations": etf_params.iterations,
        },
        fdog_passes=passes,
    )

    for src in sources:
        stem = src.stem
        img = resize(load_image(src), size, size)
        image_rel = f"images/{stem}.png"
        save_image(img, out_dir / image_rel)

        field = compute_etf(img, etf_params)
        etf_rel = f"etf/{stem}.flo"
        write_flo(field, out_dir / etf_rel)

        drawings = []
        for alpha in levels:
            drawing = render_line_drawing(img, field, alpha, passes=passes)
            rel = f"drawings/{stem}_a{alpha:.2f}.png"
            save_image(drawing, out_dir / rel)
            drawings.append({"path": rel, "alpha": alpha})

        manifest.entries.append(
            ManifestEntry(
                image=image_rel,
                etf=etf_rel,
                split=_assign_split(stem, seed, split_ratio),
                drawings=drawings,
            )
        )

    (out_dir / MANIFEST_NAME).write_text(manifest.to_json())
    return manifest


def load_manifest(path) -> tuple[DatasetManifest, Path]:
    """Read a manifest file, returning it with its root directory."""
    path = Path(path)
    if path.is_dir():
        path = path / MANIFEST_NAME
    try:
        manifest = DatasetManifest.from_json(path.read_text())
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise ValueError(f"cannot parse manifest {path}: {exc}") from exc
    return manifest, path.parent


def validate_manifest(path) -> list[str]:
    """Collect consistency violations; an empty list means the dataset is clean."""
    manifest, root = load_manifest(path)
    problems: list[str] = []
    for entry in manifest.entries:
        image_path = root / entry.image
        if not image_path.is_file():
            problems.append(f"{entry.image}: missing image file")
            continue
        with Image.open(image_path) as im:
            img_size = im.size

        alphas = [d["alpha"] for d in entry.drawings]
        if len(alphas) != len(manifest.levels):
            problems.append(
                f"{entry.image}: {len(alphas)} drawings, expected {len(manifest.levels)}"
            )
        if any(b <= a for a, b in zip(alphas, alphas[1:])):
            problems.append(f"{entry.image}: drawing alphas not strictly increasing")
        for d in entry.drawings:
            if not (root / d["path"]).is_file():
                problems.append(f"{d['path']}: missing drawing file")

        flo_path = root / entry.etf
        if not flo_path.is_file():
            problems.append(f"{entry.etf}: missing field file")
            continue
        if not Path(magnitude_path(flo_path)).is_file():
            problems.append(f"{entry.etf}: missing magnitude sibling")
            continue
        try:
            fld = read_flo(flo_path)
        except ValueError as exc:
            problems.append(f"{entry.etf}: {exc}")
            continue
        if (fld.width, fld.height) != img_size:
            problems.append(
                f"{entry.etf}: field {fld.width}x{fld.height} does not match "
                f"image {img_size[0]}x{img_size[1]}"
            )
    return problems


def iter_pairs(manifest_path, split: str, mode: str, seed: int = 0):
    """Deterministic, seed permuted sample list for one split.

    ``mode='etf'`` yields one :class:`EtfSample` per entry,
    ``mode='drawing'`` one :class:`DrawingSample` per (entry, level).
    """
    if split not in ("train", "test"):
        raise ValueError(f"split must be 'train' or 'test', got {split!r}")
    if mode not in ("etf", "drawing"):
        raise ValueError(f"mode must be 'etf' or 'drawing', got {mode!r}")
    manifest, root = load_manifest(manifest_path)
    entries = [e for e in manifest.entries if e.split == split]
    if not entries:
        raise ValueError(f"split {split!r} is empty")

    samples: list = []
    for entry in sorted(entries, key=lambda e: e.image):
        if mode == "etf":
            samples.append(EtfSample(root / entry.image, root / entry.etf))
        else:
            for d in entry.drawings:
                samples.append(
                    DrawingSample(
                        root / entry.image,
                        root / entry.etf,
                        root / d["path"],
                        float(d["alpha"]),
                    )
                )
    random.Random(seed).shuffle(samples)
    return samples
