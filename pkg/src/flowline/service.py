"""HTTP service around the classical pipeline.

Upload an image, inspect its tangent field, render line drawings with a
scalar alpha or an uploaded per-pixel control matrix. All state lives
in an in-memory LRU session store; rendering and field construction run
in the request threadpool so the event loop (and the health endpoint)
stay responsive, and the tangent field of each image is computed at
most once no matter how many requests race for it.
"""
from __future__ import annotations

import io
import json
import secrets
import threading
from collections import OrderedDict
from dataclasses import dataclass, field as dc_field

import numpy as np
from fastapi import FastAPI, HTTPException, Query, Request, Response
from starlette.concurrency import run_in_threadpool
from starlette.staticfiles import StaticFiles

from . import __version__
from .etf import compute_etf, visualize_field
from .fdog import render_line_drawing, render_with_lcm
from .raster import encode_png, load_image, to_grayscale
from .vectorfield import FlowField, flo_bytes

__all__ = ["SessionStore", "create_app", "DEFAULT_CACHE_MB", "DEFAULT_MAX_SIDE"]

DEFAULT_CACHE_MB = 512
DEFAULT_MAX_SIDE = 2048


@dataclass
class _Record:
    kind: str  # "image" or "lcm"
    array: np.ndarray
    png: bytes = b""
    field: FlowField | None = None
    field_png: bytes | None = None
    field_flo: bytes | None = None
    etf_lock: threading.Lock = dc_field(default_factory=threading.Lock)

    def size(self) -> int:
        total = len(self.png) + self.array.nbytes
        if self.field is not None:
            total += self.field.tangents.nbytes + self.field.magnitude.nbytes
        for cached in (self.field_png, self.field_flo):
            if cached is not None:
                total += len(cached)
        return total


class SessionStore:
    """Byte-bounded LRU map of opaque hex ids to session records.

    Mutation happens under one lock; the per-record ``etf_lock`` keeps
    duplicate field computations for the same id from running twice
    while letting distinct ids proceed in parallel.
    """

    def __init__(self, capacity_bytes: int):
        if capacity_bytes < 1:
            raise ValueError(f"capacity must be positive, got {capacity_bytes}")
        self.capacity_bytes = capacity_bytes
        self._records: "OrderedDict[str, _Record]" = OrderedDict()
        self._lock = threading.Lock()

    def _evict(self, keep: str) -> None:
        # Caller holds the lock. Never evicts the record just touched.
        total = sum(r.size() for r in self._records.values())
        while total > self.capacity_bytes and len(self._records) > 1:
            victim = next(k for k in self._records if k != keep)
            total -= self._records.pop(victim).size()

    def put(self, record: _Record) -> str:
        key = secrets.token_hex(16)
        with self._lock:
            self._records[key] = record
            self._evict(keep=key)
        return key

    def get(self, key: str) -> _Record | None:
        with self._lock:
            record = self._records.get(key)
            if record is not None:
                self._records.move_to_end(key)
            return record

    def ensure_field(self, key: str, record: _Record) -> FlowField:
        with record.etf_lock:
            if record.field is None:
                computed = compute_etf(record.array)
                record.field = computed
                record.field_png = encode_png(visualize_field(computed))
                record.field_flo = flo_bytes(computed)
                with self._lock:
                    if key in self._records:
                        self._evict(keep=key)
            return record.field

    def __len__(self) -> int:
        with self._lock:
            return len(self._records)

    def __contains__(self, key: str) -> bool:
        with self._lock:
            return key in self._records


def _decode(data: bytes, what: str) -> np.ndarray:
    if not data:
        raise HTTPException(400, f"empty {what} body")
    try:
        return load_image(io.BytesIO(data))
    except ValueError:
        raise HTTPException(400, f"cannot decode {what} body as an image")


def create_app(
    cache_mb: int = DEFAULT_CACHE_MB,
    max_side: int = DEFAULT_MAX_SIDE,
    ui_dir=None,
) -> FastAPI:
    """Build the application; state is private to the instance."""
    app = FastAPI(title="flowline", version=__version__, docs_url=None, redoc_url=None)
    store = SessionStore(cache_mb * 2**20)
    app.state.store = store
    max_pixels = max_side * max_side

    def _get_or_404(key: str, kind: str) -> _Record:
        record = store.get(key)
        if record is None or record.kind != kind:
            raise HTTPException(404, f"unknown {kind} id")
        return record

    @app.get("/api/health")
    async def health():
        return {"status": "ok", "version": __version__}

    @app.post("/api/images")
    async def upload_image(request: Request):
        data = await request.body()
        array = _decode(data, "image")
        h, w = array.shape[:2]
        if h * w > max_pixels:
            raise HTTPException(413, f"image exceeds the {max_side}x{max_side} pixel limit")
        image_id = store.put(_Record(kind="image", array=array, png=bytes(data)))
        return {"image_id": image_id, "width": w, "height": h}

    @app.get("/api/images/{image_id}")
    async def get_image(image_id: str):
        record = _get_or_404(image_id, "image")
        return Response(record.png, media_type="image/png")

    @app.get("/api/images/{image_id}/etf")
    def get_etf(image_id: str, format: str = Query("png")):
        if format not in ("png", "flo"):
            raise HTTPException(400, f"format must be 'png' or 'flo', got {format!r}")
        record = _get_or_404(image_id, "image")
        store.ensure_field(image_id, record)
        if format == "png":
            return Response(record.field_png, media_type="image/png")
        return Response(record.field_flo, media_type="application/octet-stream")

    @app.post("/api/lcm")
    async def upload_lcm(request: Request, image_id: str | None = Query(None)):
        if image_id is None:
            raise HTTPException(400, "image_id query parameter is required")
        record = _get_or_404(image_id, "image")
        data = await request.body()
        lcm = to_grayscale(_decode(data, "control matrix"))
        if lcm.shape != record.array.shape[:2]:
            raise HTTPException(
                400,
                f"control matrix is {lcm.shape[1]}x{lcm.shape[0]}, "
                f"image is {record.array.shape[1]}x{record.array.shape[0]}",
            )
        lcm_id = store.put(_Record(kind="lcm", array=lcm))
        return {"lcm_id": lcm_id}

    @app.post("/api/render")
    async def render(request: Request):
        try:
            body = json.loads(await request.body())
        except (json.JSONDecodeError, UnicodeDecodeError):
            raise HTTPException(400, "request body must be JSON")
        if not isinstance(body, dict):
            raise HTTPException(400, "request body must be a JSON object")

        image_id = body.get("image_id")
        if not isinstance(image_id, str):
            raise HTTPException(400, "image_id must be a string")
        alpha = body.get("alpha")
        lcm_id = body.get("lcm_id")
        if (alpha is None) == (lcm_id is None):
            raise HTTPException(400, "exactly one of alpha and lcm_id is required")
        passes = body.get("passes")
        if passes is not None and (isinstance(passes, bool) or not isinstance(passes, int) or passes < 1):
            raise HTTPException(400, "passes must be a positive integer")

        record = _get_or_404(image_id, "image")
        lcm = None
        if lcm_id is not None:
            if not isinstance(lcm_id, str):
                raise HTTPException(400, "lcm_id must be a string")
            lcm = _get_or_404(lcm_id, "lcm").array
        else:
            if isinstance(alpha, bool) or not isinstance(alpha, (int, float)):
                raise HTTPException(400, "alpha must be a number")
            if not 0.0 <= float(alpha) <= 1.0:
                raise HTTPException(422, f"alpha must lie in [0, 1], got {alpha}")

        def run() -> bytes:
            tangent_field = store.ensure_field(image_id, record)
            if lcm is not None:
                drawing = render_with_lcm(record.array, tangent_field, lcm, passes=passes)
            else:
                drawing = render_line_drawing(record.array, tangent_field, float(alpha), passes=passes)
            return encode_png(drawing)

        return Response(await run_in_threadpool(run), media_type="image/png")

    if ui_dir is not None:
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
