"""Selection-loop orchestration.

One cycle runs: fit the learner on the labeled set, evaluate per-class IoU
on the validation split, derive class weights from the gaps, score every
unlabeled sample, threshold and select, commit annotations, record the
cycle. Oracle mode commits ground-truth masks synchronously; human mode
parks the selection in the pending queue and the session stays resumable
via checkpoints until the annotation service commits the labels.
"""

from __future__ import annotations

import json
import logging
import time
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from . import acquisition
from .acquisition import DcauScore, SelectionResult, ThresholdStats, WeightVector
from .learner import (
    LearnerConfig,
    LearnerState,
    fit_arrays,
    load_state,
    pixel_features,
    predict_proba_features,
    save_state,
)
from .metrics import ClassIouReport, ConfusionCounts, accumulate, iou_report, predict_mask
from .pool import PoolState, commit_labels, init_pool, mark_pending
from .types import Dataset, Mask

logger = logging.getLogger(__name__)

STRATEGIES = ("dcau", "entropy", "random", "coreset")
ANNOTATION_MODES = ("oracle", "human")
SWEEP_AXES = ("per_cycle_k", "learning_rate", "alpha", "gamma")

# Flat config-file keys. Learner fields live at top level; the learner's own
# seed is "learner_seed" to avoid clashing with the experiment seed.
_LEARNER_KEYS = {
    "learning_rate": "learning_rate",
    "epochs": "epochs",
    "batch_pixels": "batch_pixels",
    "feature_mode": "feature_mode",
    "learner_seed": "seed",
    "warm_start": "warm_start",
}
_EXPERIMENT_KEYS = (
    "strategy",
    "alpha",
    "gamma",
    "per_cycle_k",
    "cycles",
    "initial_labeled",
    "eval_split",
    "seed",
    "annotation_mode",
    "total_budget",
    "eq5_variant",
)


@dataclass(frozen=True)
class ExperimentConfig:
    strategy: str = "dcau"
    alpha: float = 0.5
    gamma: float = 0.5
    per_cycle_k: int = 20
    cycles: int = 10
    initial_labeled: int = 50
    learner: LearnerConfig = field(default_factory=LearnerConfig)
    eval_split: tuple[float, float, float] = (0.7, 0.15, 0.15)
    seed: int = 0
    annotation_mode: str = "oracle"
    total_budget: int | None = None
    eq5_variant: str = "literal"

    def __post_init__(self) -> None:
        if self.strategy not in STRATEGIES:
            raise ValueError(f"strategy must be one of {STRATEGIES}, got {self.strategy!r}")
        if self.annotation_mode not in ANNOTATION_MODES:
            raise ValueError(f"annotation_mode must be one of {ANNOTATION_MODES}")
        if self.eq5_variant not in acquisition.EQ_VARIANTS:
            raise ValueError(f"eq5_variant must be one of {acquisition.EQ_VARIANTS}")
        if self.alpha <= 0:
            raise ValueError("alpha must be > 0")
        if self.gamma < 0:
            raise ValueError("gamma must be >= 0")
        if self.per_cycle_k < 1 or self.cycles < 1 or self.initial_labeled < 1:
            raise ValueError("per_cycle_k, cycles and initial_labeled must be >= 1")
        split = tuple(float(f) for f in self.eval_split)
        if len(split) != 3 or min(split) < 0 or abs(sum(split) - 1.0) > 1e-9:
            raise ValueError("eval_split must be three non-negative fractions summing to 1")
        object.__setattr__(self, "eval_split", split)
        if self.total_budget is not None and self.total_budget < 1:
            raise ValueError("total_budget must be >= 1 when given")
        if self.strategy != "dcau":
            ignored = [
                name
                for name, default in (("alpha", 0.5), ("gamma", 0.5))
                if getattr(self, name) != default
            ]
            if self.strategy in ("random", "coreset") and self.eq5_variant != "literal":
                ignored.append("eq5_variant")
            if ignored:
                logger.warning(
                    "strategy %r ignores parameter(s): %s", self.strategy, ", ".join(ignored)
                )

    @property
    def budget(self) -> int:
        return self.total_budget if self.total_budget is not None else self.per_cycle_k * self.cycles

    def to_mapping(self) -> dict:
        flat = {key: getattr(self, key) for key in _EXPERIMENT_KEYS}
        flat["eval_split"] = list(self.eval_split)
        for file_key, attr in _LEARNER_KEYS.items():
            flat[file_key] = getattr(self.learner, attr)
        return flat

    @classmethod
    def from_mapping(cls, mapping: dict) -> "ExperimentConfig":
        unknown = set(mapping) - set(_EXPERIMENT_KEYS) - set(_LEARNER_KEYS)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        learner_kwargs = {
            attr: mapping[file_key] for file_key, attr in _LEARNER_KEYS.items() if file_key in mapping
        }
        exp_kwargs = {k: mapping[k] for k in _EXPERIMENT_KEYS if k in mapping}
        if "eval_split" in exp_kwargs:
            exp_kwargs["eval_split"] = tuple(exp_kwargs["eval_split"])
        return cls(learner=LearnerConfig(**learner_kwargs), **exp_kwargs)

    def to_file(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_mapping(), indent=2) + "\n", encoding="utf-8")

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        return cls.from_mapping(json.loads(Path(path).read_text(encoding="utf-8")))


@dataclass(frozen=True)
class CycleRecord:
    """One completed cycle: a row of the experiment's progression table."""

    cycle: int
    miou: float | None
    iou: tuple
    weights: tuple | None
    theta: ThresholdStats | None
    selected_ids: tuple[str, ...]
    filled_below_threshold: int
    wall_time_s: float

    def to_dict(self) -> dict:
        return {
            "cycle": self.cycle,
            "miou": self.miou,
            "iou": list(self.iou),
            "weights": None if self.weights is None else list(self.weights),
            "theta": None if self.theta is None else self.theta.to_dict(),
            "selected_ids": list(self.selected_ids),
            "filled_below_threshold": self.filled_below_threshold,
            "wall_time_s": self.wall_time_s,
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "CycleRecord":
        theta = payload.get("theta")
        weights = payload.get("weights")
        return cls(
            cycle=int(payload["cycle"]),
            miou=payload["miou"],
            iou=tuple(payload["iou"]),
            weights=None if weights is None else tuple(weights),
            theta=None if theta is None else ThresholdStats.from_dict(theta),
            selected_ids=tuple(payload["selected_ids"]),
            filled_below_threshold=int(payload["filled_below_threshold"]),
            wall_time_s=float(payload["wall_time_s"]),
        )


@dataclass
class QueuePayload:
    """Annotator guidance for one pending sample: the model's argmax mask and
    the per-pixel uncertainty used to pick the sample."""

    prediction: np.ndarray
    uncertainty: np.ndarray
    score: float | None


@dataclass
class CyclePlan:
    """Everything known about a cycle at selection time; finalized into a
    CycleRecord once all selected ids are committed."""

    cycle: int
    report: ClassIouReport
    weights: WeightVector | None
    stats: ThresholdStats | None
    scores: list[DcauScore] | None
    selected_ids: tuple[str, ...]
    filled_below_threshold: int
    wall_time_s: float
    queue: dict[str, QueuePayload] = field(default_factory=dict)


def split_dataset(ds: Dataset, fractions, seed) -> tuple[Dataset, Dataset, Dataset]:
    """Deterministic seeded train/val/test split by sample id."""
    fractions = tuple(float(f) for f in fractions)
    ids = sorted(ds.ids)
    n = len(ids)
    n_val = round(fractions[1] * n)
    n_test = round(fractions[2] * n)
    n_train = n - n_val - n_test
    if n_train < 1:
        raise ValueError("split leaves no training samples")
    rng = np.random.default_rng([seed, 101])
    perm = rng.permutation(n)
    train = [ids[i] for i in perm[:n_train]]
    val = [ids[i] for i in perm[n_train : n_train + n_val]]
    test = [ids[i] for i in perm[n_train + n_val :]]
    return ds.subset(sorted(train)), ds.subset(sorted(val)), ds.subset(sorted(test))


class ExperimentSession:
    """Re-entrant engine driving one experiment.

    ``propose_cycle`` runs train/evaluate/score/select and leaves the cycle
    in flight; ``commit`` moves annotated ids into the labeled set and
    finalizes the cycle record once the whole selection is in. Oracle runs
    just alternate the two. The session checkpoints to a directory and can
    be resumed, which is how the annotation service survives restarts.
    """

    def __init__(self, ds: Dataset, cfg: ExperimentConfig, keep_pixel_maps: bool = False):
        self.cfg = cfg
        self.keep_pixel_maps = keep_pixel_maps
        self.train_ds, self.val_ds, self.test_ds = split_dataset(ds, cfg.eval_split, cfg.seed)
        if len(self.val_ds) < 1:
            raise ValueError("validation split is empty; IoU feedback needs at least one sample")
        channels = self.train_ds.samples[0][0].channels
        self.pool: PoolState = init_pool(
            self.train_ds,
            cfg.initial_labeled,
            seed=[cfg.seed, 202],
            per_cycle_k=cfg.per_cycle_k,
            total_budget=cfg.budget,
        )
        self.learner_state: LearnerState = LearnerState.zeros(
            ds.num_classes, channels, cfg.learner.feature_mode
        )
        self._truth = {mask.id: mask for _, mask in self.train_ds.samples}
        self.labels: dict[str, Mask] = {i: self._truth[i] for i in self.pool.labeled_ids}
        self._submitted: set[str] = set()
        self.records: list[CycleRecord] = []
        self.plan: CyclePlan | None = None
        self._images = {img.id: img for ds_part in (self.train_ds, self.val_ds, self.test_ds)
                        for img, _ in ds_part.samples}
        self._feat_cache: dict[str, np.ndarray] = {}

    # -- cycle state -------------------------------------------------------

    def _feats(self, sample_id: str) -> np.ndarray:
        cached = self._feat_cache.get(sample_id)
        if cached is None:
            cached = pixel_features(self._images[sample_id], self.cfg.learner.feature_mode)
            self._feat_cache[sample_id] = cached
        return cached

    def _predict(self, sample_id: str):
        img = self._images[sample_id]
        return predict_proba_features(
            self.learner_state, self._feats(sample_id), sample_id, img.height, img.width
        )

    @property
    def num_classes(self) -> int:
        return self.train_ds.num_classes

    def is_complete(self) -> bool:
        if self.plan is not None:
            return False
        next_cycle = len(self.records) + 1
        k_eff = min(self.cfg.per_cycle_k, len(self.pool.unlabeled_ids), self.pool.budget_left)
        return next_cycle > self.cfg.cycles or k_eff <= 0

    def _evaluate(self, split: Dataset, cycle: int) -> ClassIouReport:
        conf = ConfusionCounts.zeros(self.num_classes)
        for img, mask in split.samples:
            conf = accumulate(conf, predict_mask(self._predict(img.id)), mask)
        return iou_report(conf, cycle)

    def _score_pool(self, weights: WeightVector | None) -> list[DcauScore]:
        scored = []
        for sample_id in self.pool.unlabeled_ids:  # id order; assembly is deterministic
            pm = self._predict(sample_id)
            if weights is None:
                scored.append(acquisition.baseline_entropy_score(pm, self.keep_pixel_maps))
            else:
                scored.append(
                    acquisition.dcau_score(pm, weights, self.cfg.eq5_variant, self.keep_pixel_maps)
                )
        return scored

    def propose_cycle(self) -> CyclePlan | None:
        """Run one cycle up to (and including) selection.

        Returns None when the experiment is over: all cycles run, pool empty,
        or budget exhausted. In human mode the selection is parked in the
        pending queue; in oracle mode the caller commits it directly.
        """
        if self.plan is not None:
            raise RuntimeError("a cycle is already in flight")
        cycle = len(self.records) + 1
        if cycle > self.cfg.cycles:
            return None
        k_eff = min(self.cfg.per_cycle_k, len(self.pool.unlabeled_ids), self.pool.budget_left)
        if k_eff <= 0:
            return None

        started = time.perf_counter()
        x = np.concatenate([self._feats(i) for i in self.pool.labeled_ids])
        y = np.concatenate(
            [np.asarray(self.labels[i].labels, dtype=np.int64).reshape(-1) for i in self.pool.labeled_ids]
        )
        self.learner_state = fit_arrays(
            self.learner_state, x, y, self.cfg.learner, trained_on=len(self.pool.labeled_ids)
        )
        report = self._evaluate(self.val_ds, cycle)

        weights: WeightVector | None = None
        stats: ThresholdStats | None = None
        scores: list[DcauScore] | None = None
        if self.cfg.strategy == "dcau":
            weights = acquisition.dynamic_weights(report, self.cfg.alpha)
            scores = self._score_pool(weights)
            stats = acquisition.adaptive_threshold(scores, self.cfg.gamma)
            selection = acquisition.select(scores, stats, k_eff)
        elif self.cfg.strategy == "entropy":
            scores = self._score_pool(None)
            selection = acquisition.select(scores, None, k_eff)
        elif self.cfg.strategy == "random":
            chosen = acquisition.baseline_random_select(
                self.pool.unlabeled_ids, k_eff, seed=[self.cfg.seed, 303, cycle]
            )
            selection = SelectionResult(candidate_ids=(), selected_ids=chosen, filled_below_threshold=0)
        else:  # coreset
            features = {}
            for sample_id in self.pool.labeled_ids + self.pool.unlabeled_ids:
                features[sample_id] = acquisition.mean_probability_features(self._predict(sample_id))
            chosen = acquisition.baseline_coreset_select(features, self.pool.labeled_ids, k_eff)
            selection = SelectionResult(candidate_ids=(), selected_ids=chosen, filled_below_threshold=0)

        plan = CyclePlan(
            cycle=cycle,
            report=report,
            weights=weights,
            stats=stats,
            scores=scores,
            selected_ids=selection.selected_ids,
            filled_below_threshold=selection.filled_below_threshold,
            wall_time_s=time.perf_counter() - started,
        )
        if self.cfg.annotation_mode == "human":
            self.pool = mark_pending(self.pool, plan.selected_ids)
            plan.queue = self._build_queue(plan)
        self.plan = plan
        return plan

    def _build_queue(self, plan: CyclePlan) -> dict[str, QueuePayload]:
        score_by_id = {s.sample_id: s for s in plan.scores or []}
        queue = {}
        for sample_id in plan.selected_ids:
            pm = self._predict(sample_id)
            scored = score_by_id.get(sample_id)
            if scored is not None and scored.pixel_dyn is not None:
                unc = scored.pixel_dyn.reshape(pm.height, pm.width)
            elif plan.weights is not None:
                unc = acquisition.uncertainty_map(pm.probs, plan.weights, self.cfg.eq5_variant)
            else:
                # random/coreset give no per-pixel signal; fall back to entropy
                unc = acquisition.entropy_map(pm.probs)
            queue[sample_id] = QueuePayload(
                prediction=predict_mask(pm).labels,
                uncertainty=unc,
                score=None if scored is None else scored.score,
            )
        return queue

    def commit(self, ids: Sequence[str], masks: Sequence[Mask]) -> None:
        """Attach annotations for selected ids; finalizes the in-flight cycle
        once every selected id is labeled."""
        if self.plan is None:
            raise RuntimeError("no cycle in flight")
        for mask in masks:
            if (mask.height, mask.width) != (
                self.train_ds.samples[0][0].height,
                self.train_ds.samples[0][0].width,
            ):
                raise ValueError(f"mask {mask.id!r} does not match dataset dimensions")
            if int(mask.labels.max()) >= self.num_classes:
                raise ValueError(f"mask {mask.id!r} has labels out of range")
        self.pool = commit_labels(self.pool, ids, masks)
        for sample_id, mask in zip(ids, masks):
            self.labels[sample_id] = mask
            self._submitted.add(sample_id)
            if self.plan is not None:
                self.plan.queue.pop(sample_id, None)
        labeled = set(self.pool.labeled_ids)
        if all(i in labeled for i in self.plan.selected_ids):
            self._finalize()

    def _finalize(self) -> None:
        plan = self.plan
        assert plan is not None
        self.records.append(
            CycleRecord(
                cycle=plan.cycle,
                miou=plan.report.miou,
                iou=plan.report.iou,
                weights=None if plan.weights is None else tuple(plan.weights.tolist()),
                theta=plan.stats,
                selected_ids=plan.selected_ids,
                filled_below_threshold=plan.filled_below_threshold,
                wall_time_s=plan.wall_time_s,
            )
        )
        self.plan = None

    def run_oracle(self) -> list[CycleRecord]:
        """Run the full loop with the simulated oracle revealing ground truth."""
        if self.cfg.annotation_mode != "oracle":
            raise RuntimeError("run_oracle requires annotation_mode='oracle'")
        while True:
            plan = self.propose_cycle()
            if plan is None:
                break
            self.commit(plan.selected_ids, [self._truth[i] for i in plan.selected_ids])
        return list(self.records)

    def evaluate_test(self) -> ClassIouReport:
        """Final-reporting evaluation of the current model on the test split."""
        if len(self.test_ds) < 1:
            raise ValueError("test split is empty")
        return self._evaluate(self.test_ds, cycle=len(self.records))

    # -- checkpointing -----------------------------------------------------

    def save(self, state_dir) -> None:
        state_dir = Path(state_dir)
        state_dir.mkdir(parents=True, exist_ok=True)

        def write_atomic(path: Path, text: str) -> None:
            tmp = path.with_suffix(".tmp")
            tmp.write_text(text, encoding="utf-8")
            tmp.replace(path)

        write_atomic(state_dir / "config.json", json.dumps(self.cfg.to_mapping(), indent=2) + "\n")
        self.pool.save(state_dir / "pool.json")
        save_state(self.learner_state, state_dir / "learner.ckpt")
        write_atomic(
            state_dir / "records.json",
            json.dumps([r.to_dict() for r in self.records], indent=2) + "\n",
        )
        labels_dir = state_dir / "labels"
        labels_dir.mkdir(exist_ok=True)
        for sample_id in sorted(self._submitted):
            np.save(labels_dir / f"{sample_id}.npy", self.labels[sample_id].labels)
        inflight_path = state_dir / "inflight.json"
        queue_dir = state_dir / "queue"
        if self.plan is None:
            inflight_path.unlink(missing_ok=True)
            if queue_dir.is_dir():
                for stale in queue_dir.glob("*.npy"):
                    stale.unlink()
        else:
            plan = self.plan
            payload = {
                "cycle": plan.cycle,
                "report": plan.report.to_dict(),
                "weights": None if plan.weights is None else plan.weights.tolist(),
                "weights_alpha": None if plan.weights is None else plan.weights.alpha,
                "stats": None if plan.stats is None else plan.stats.to_dict(),
                "selected_ids": list(plan.selected_ids),
                "filled_below_threshold": plan.filled_below_threshold,
                "wall_time_s": plan.wall_time_s,
                "queue_scores": {i: p.score for i, p in plan.queue.items()},
            }
            queue_dir.mkdir(exist_ok=True)
            for sample_id, item in plan.queue.items():
                np.save(queue_dir / f"{sample_id}.pred.npy", item.prediction)
                np.save(queue_dir / f"{sample_id}.unc.npy", item.uncertainty)
            keep = {f"{i}.{kind}.npy" for i in plan.queue for kind in ("pred", "unc")}
            for stale in queue_dir.glob("*.npy"):
                if stale.name not in keep:
                    stale.unlink()
            # payloads land before the inflight pointer, so a crash between
            # the two leaves a resumable (previous) state
            write_atomic(inflight_path, json.dumps(payload, indent=2) + "\n")

    @classmethod
    def resume(cls, ds: Dataset, state_dir, keep_pixel_maps: bool = False) -> "ExperimentSession":
        state_dir = Path(state_dir)
        cfg = ExperimentConfig.from_file(state_dir / "config.json")
        session = cls(ds, cfg, keep_pixel_maps=keep_pixel_maps)
        session.pool = PoolState.load(state_dir / "pool.json")
        session.learner_state = load_state(state_dir / "learner.ckpt")
        records = json.loads((state_dir / "records.json").read_text(encoding="utf-8"))
        session.records = [CycleRecord.from_dict(r) for r in records]
        labels_dir = state_dir / "labels"
        if labels_dir.is_dir():
            for path in sorted(labels_dir.glob("*.npy")):
                mask = Mask(path.stem, np.load(path))
                session.labels[path.stem] = mask
                session._submitted.add(path.stem)
        for sample_id in session.pool.labeled_ids:
            session.labels.setdefault(sample_id, session._truth[sample_id])
        inflight_path = state_dir / "inflight.json"
        if inflight_path.is_file():
            payload = json.loads(inflight_path.read_text(encoding="utf-8"))
            weights = None
            if payload["weights"] is not None:
                weights = WeightVector(
                    np.array([np.nan if v is None else v for v in payload["weights"]]),
                    alpha=payload["weights_alpha"],
                    cycle=payload["cycle"],
                )
            stats = None if payload["stats"] is None else ThresholdStats.from_dict(payload["stats"])
            queue = {}
            queue_dir = state_dir / "queue"
            for sample_id, score in payload["queue_scores"].items():
                queue[sample_id] = QueuePayload(
                    prediction=np.load(queue_dir / f"{sample_id}.pred.npy"),
                    uncertainty=np.load(queue_dir / f"{sample_id}.unc.npy"),
                    score=score,
                )
            session.plan = CyclePlan(
                cycle=int(payload["cycle"]),
                report=ClassIouReport.from_dict(payload["report"]),
                weights=weights,
                stats=stats,
                scores=None,
                selected_ids=tuple(payload["selected_ids"]),
                filled_below_threshold=int(payload["filled_below_threshold"]),
                wall_time_s=float(payload["wall_time_s"]),
                queue=queue,
            )
        return session


def run_experiment(ds: Dataset, cfg: ExperimentConfig) -> list[CycleRecord]:
    """Run a full oracle-mode experiment and return its cycle records."""
    if cfg.annotation_mode != "oracle":
        raise ValueError("run_experiment is synchronous; use ExperimentSession for human mode")
    return ExperimentSession(ds, cfg).run_oracle()


def fully_supervised_reference(ds: Dataset, cfg: ExperimentConfig) -> dict:
    """Upper-bound run: train once on the entire training split and evaluate
    on the validation split. Returns a summary row for comparison reports."""
    session = ExperimentSession(ds, replace(cfg, initial_labeled=1))
    started = time.perf_counter()
    x = np.concatenate([session._feats(i) for i in session.train_ds.ids])
    y = np.concatenate(
        [np.asarray(session.train_ds.mask(i).labels, dtype=np.int64).reshape(-1) for i in session.train_ds.ids]
    )
    session.learner_state = fit_arrays(
        session.learner_state, x, y, cfg.learner, trained_on=len(session.train_ds)
    )
    report = session._evaluate(session.val_ds, cycle=0)
    return {
        "miou": report.miou,
        "iou": list(report.iou),
        "labeled": len(session.train_ds),
        "wall_time_s": time.perf_counter() - started,
    }


@dataclass(frozen=True)
class SweepRow:
    value: float
    final_miou: float | None
    final_iou: tuple
    records: tuple[CycleRecord, ...]


@dataclass(frozen=True)
class SweepReport:
    axis: str
    rows: tuple[SweepRow, ...]

    def to_dict(self) -> dict:
        return {
            "axis": self.axis,
            "rows": [
                {
                    "value": row.value,
                    "final_miou": row.final_miou,
                    "final_iou": list(row.final_iou),
                    "cycles_run": len(row.records),
                }
                for row in self.rows
            ],
        }


def _config_with(base: ExperimentConfig, axis: str, value) -> ExperimentConfig:
    if axis == "learning_rate":
        return replace(base, learner=replace(base.learner, learning_rate=float(value)))
    if axis == "per_cycle_k":
        return replace(base, per_cycle_k=int(value))
    return replace(base, **{axis: float(value)})


def run_sweep(ds: Dataset, base_cfg: ExperimentConfig, axis: str, values) -> SweepReport:
    """One experiment per value on a shared seed; rows report final mIoU."""
    if axis not in SWEEP_AXES:
        raise ValueError(f"sweep axis must be one of {SWEEP_AXES}, got {axis!r}")
    values = list(values)
    if not values:
        raise ValueError("sweep needs at least one value")
    rows = []
    for value in values:
        records = run_experiment(ds, _config_with(base_cfg, axis, value))
        last = records[-1]
        rows.append(
            SweepRow(
                value=float(value),
                final_miou=last.miou,
                final_iou=last.iou,
                records=tuple(records),
            )
        )
    return SweepReport(axis=axis, rows=tuple(rows))
