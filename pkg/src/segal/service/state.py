"""Single-writer owner of the experiment session behind the HTTP API.

All mutations run under one lock; readers get immutable snapshots, so
responses can never observe a half-applied transition. Cycle advancement
runs on a worker thread and the status endpoint reports ``busy`` until it
lands. Every mutation checkpoints to the state directory, which is what
makes a crash/restart preserve the queue and pool exactly.
"""

from __future__ import annotations

import io
import logging
import threading
from pathlib import Path

import numpy as np
from PIL import Image as PilImage

from ..dataset_io import default_color_map, load_dataset, read_manifest
from ..loop import ExperimentConfig, ExperimentSession
from ..pool import BudgetExhaustedError, DoubleLabelError, PoolError
from ..types import Mask

logger = logging.getLogger(__name__)


class ServiceError(Exception):
    def __init__(self, status_code: int, code: str, message: str):
        super().__init__(message)
        self.status_code = status_code
        self.code = code
        self.message = message


def _png_bytes(arr: np.ndarray, mode: str) -> bytes:
    buf = io.BytesIO()
    PilImage.fromarray(arr, mode=mode).save(buf, format="PNG")
    return buf.getvalue()


class AnnotationService:
    """Owns the session, serializes writes, checkpoints every transition."""

    def __init__(self, dataset_dir, cfg: ExperimentConfig, state_dir):
        if cfg.annotation_mode != "human":
            raise ValueError("the annotation service requires annotation_mode='human'")
        self.dataset_dir = Path(dataset_dir)
        self.state_dir = Path(state_dir)
        self.dataset = load_dataset(self.dataset_dir)
        manifest = read_manifest(self.dataset_dir)
        self.color_map = manifest.get("color_map") or default_color_map(self.dataset.num_classes)

        self._lock = threading.Lock()
        self._busy = False
        self._error: str | None = None

        if (self.state_dir / "pool.json").is_file():
            self.session = ExperimentSession.resume(self.dataset, self.state_dir, keep_pixel_maps=True)
            if self.session.cfg.to_mapping() != cfg.to_mapping():
                logger.warning(
                    "state dir %s was created with a different config; the stored one wins",
                    self.state_dir,
                )
            logger.info("resumed session from %s (cycle %d)", self.state_dir, self.session.pool.cycle)
        else:
            self.session = ExperimentSession(self.dataset, cfg, keep_pixel_maps=True)
            # Prime the first cycle so annotators get a queue immediately.
            self.session.propose_cycle()
            self.session.save(self.state_dir)

    # -- read side -----------------------------------------------------------

    def status(self) -> dict:
        with self._lock:
            pool = self.session.pool
            return {
                "cycle": pool.cycle,
                "labeled": len(pool.labeled_ids),
                "unlabeled": len(pool.unlabeled_ids),
                "pending": len(pool.pending_ids),
                "consumed": pool.consumed,
                "total_budget": pool.total_budget,
                "strategy": self.session.cfg.strategy,
                "busy": self._busy,
                "done": self.session.is_complete(),
                "error": self._error,
            }

    def meta(self) -> dict:
        first = self.dataset.samples[0][0]
        return {
            "num_classes": self.dataset.num_classes,
            "class_names": list(self.dataset.class_names),
            "color_map": [list(c) for c in self.color_map],
            "height": first.height,
            "width": first.width,
        }

    def queue(self) -> list[dict]:
        with self._lock:
            plan = self.session.plan
            if plan is None:
                return []
            items = [
                {"sample_id": i, "status": "pending", "score": p.score}
                for i, p in plan.queue.items()
            ]
        items.sort(key=lambda it: (-(it["score"] if it["score"] is not None else 0.0), it["sample_id"]))
        return items

    def _queue_item(self, sample_id: str):
        plan = self.session.plan
        if plan is None or sample_id not in plan.queue:
            raise ServiceError(404, "unknown_sample", f"sample {sample_id!r} is not in the queue")
        return plan.queue[sample_id]

    def image_png(self, sample_id: str) -> bytes:
        try:
            img = self.dataset.image(sample_id)
        except KeyError:
            raise ServiceError(404, "unknown_sample", f"unknown sample {sample_id!r}") from None
        arr = np.round(np.asarray(img.data, dtype=np.float64) * 255.0).astype(np.uint8)
        if img.channels == 1:
            return _png_bytes(arr[:, :, 0], "L")
        return _png_bytes(arr, "RGB")

    def prediction_png(self, sample_id: str) -> bytes:
        with self._lock:
            item = self._queue_item(sample_id)
            return _png_bytes(item.prediction.astype(np.uint8), "L")

    def uncertainty_png(self, sample_id: str) -> bytes:
        """Per-pixel uncertainty as an 8-bit grayscale PNG, normalized by the
        map's own maximum (a flat map renders black)."""
        with self._lock:
            item = self._queue_item(sample_id)
            unc = item.uncertainty
            top = float(unc.max())
            scaled = np.zeros_like(unc) if top <= 0 else unc / top
            return _png_bytes(np.round(scaled * 255.0).astype(np.uint8), "L")

    def metrics(self) -> list[dict]:
        with self._lock:
            return [r.to_dict() for r in self.session.records]

    # -- write side ----------------------------------------------------------

    def _decode_mask(self, sample_id: str, png_bytes: bytes) -> Mask:
        try:
            with PilImage.open(io.BytesIO(png_bytes)) as pil:
                if pil.mode in ("L", "P"):
                    arr = np.asarray(pil, dtype=np.uint8)
                elif pil.mode in ("RGB", "RGBA"):
                    rgb = np.asarray(pil.convert("RGB"), dtype=np.uint8)
                    if not (rgb[:, :, 0] == rgb[:, :, 1]).all() or not (rgb[:, :, 0] == rgb[:, :, 2]).all():
                        raise ServiceError(
                            422, "malformed_mask", "RGB mask channels must be identical index values"
                        )
                    arr = rgb[:, :, 0]
                else:
                    raise ServiceError(422, "malformed_mask", f"unsupported PNG mode {pil.mode!r}")
        except ServiceError:
            raise
        except Exception as exc:
            raise ServiceError(422, "malformed_mask", f"cannot decode PNG: {exc}") from None
        first = self.dataset.samples[0][0]
        if arr.shape != (first.height, first.width):
            raise ServiceError(
                422,
                "malformed_mask",
                f"mask is {arr.shape[0]}x{arr.shape[1]}, expected {first.height}x{first.width}",
            )
        if int(arr.max(initial=0)) >= self.dataset.num_classes:
            raise ServiceError(
                422,
                "malformed_mask",
                f"label {int(arr.max())} out of range for {self.dataset.num_classes} classes",
            )
        return Mask(sample_id, arr)

    def submit_label(self, sample_id: str, png_bytes: bytes) -> dict:
        mask = self._decode_mask(sample_id, png_bytes)
        with self._lock:
            if self._busy:
                raise ServiceError(409, "busy", "cycle advance in progress")
            pool = self.session.pool
            if sample_id in pool.labeled_ids:
                raise ServiceError(409, "double_label", f"sample {sample_id!r} is already labeled")
            if sample_id not in pool.pending_ids:
                raise ServiceError(404, "unknown_sample", f"sample {sample_id!r} is not pending")
            try:
                self.session.commit([sample_id], [mask])
            except (DoubleLabelError, BudgetExhaustedError) as exc:
                raise ServiceError(409, "conflict", str(exc)) from None
            except PoolError as exc:
                raise ServiceError(422, "invalid_commit", str(exc)) from None
            self.session.save(self.state_dir)
            pool = self.session.pool
            return {
                "id": sample_id,
                "labeled": len(pool.labeled_ids),
                "pending": len(pool.pending_ids),
                "cycle": pool.cycle,
            }

    def advance(self) -> dict:
        with self._lock:
            if self._busy:
                raise ServiceError(409, "busy", "cycle advance already in progress")
            if self.session.pool.pending_ids:
                raise ServiceError(
                    409, "pending_not_empty", "labels are still pending; submit or discard them first"
                )
            if self.session.is_complete():
                return {"advancing": False, "reason": "experiment complete"}
            self._busy = True
            self._error = None
        worker = threading.Thread(target=self._advance_worker, name="cycle-advance", daemon=True)
        worker.start()
        return {"advancing": True, "reason": None}

    def _advance_worker(self) -> None:
        try:
            self.session.propose_cycle()
            self.session.save(self.state_dir)
        except Exception as exc:  # surfaced via /status
            logger.exception("cycle advance failed")
            self._error = str(exc)
        finally:
            with self._lock:
                self._busy = False

    def wait_idle(self, timeout: float = 60.0) -> None:
        """Block until no advance is running (used by tests and the CLI)."""
        import time

        deadline = time.monotonic() + timeout
        while time.monotonic() < deadline:
            with self._lock:
                if not self._busy:
                    return
            time.sleep(0.01)
        raise TimeoutError("cycle advance did not finish in time")
