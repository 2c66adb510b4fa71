"""Active-learning pool state machine.

Tracks the labeled / unlabeled partition, the pending queue used in
human-in-the-loop mode, the cycle counter, and budget accounting. States are
immutable; transitions return new states and enforce the invariants, so any
reachable PoolState is valid. A single owner serializes mutations; snapshots
can be handed freely to scoring workers and the service layer.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .types import Dataset, Mask


class PoolError(ValueError):
    """Invalid pool transition."""


class UnknownSampleError(PoolError):
    pass


class DoubleLabelError(PoolError):
    pass


class BudgetExhaustedError(PoolError):
    pass


@dataclass(frozen=True)
class PoolState:
    labeled_ids: tuple[str, ...]
    unlabeled_ids: tuple[str, ...]
    pending_ids: tuple[str, ...]
    cycle: int
    per_cycle_k: int
    total_budget: int
    consumed: int

    def __post_init__(self) -> None:
        labeled = tuple(sorted(self.labeled_ids))
        unlabeled = tuple(sorted(self.unlabeled_ids))
        pending = tuple(sorted(self.pending_ids))
        object.__setattr__(self, "labeled_ids", labeled)
        object.__setattr__(self, "unlabeled_ids", unlabeled)
        object.__setattr__(self, "pending_ids", pending)
        sets = (set(labeled), set(unlabeled), set(pending))
        if len(labeled) + len(unlabeled) + len(pending) != len(sets[0] | sets[1] | sets[2]):
            raise PoolError("labeled/unlabeled/pending sets must be disjoint")
        if self.consumed > self.total_budget:
            raise BudgetExhaustedError(
                f"consumed {self.consumed} exceeds budget {self.total_budget}"
            )
        if self.consumed < 0 or self.total_budget < 0:
            raise PoolError("negative budget accounting")
        if len(pending) > self.per_cycle_k:
            raise PoolError(f"pending set larger than per-cycle budget {self.per_cycle_k}")

    @property
    def all_ids(self) -> tuple[str, ...]:
        return tuple(sorted(self.labeled_ids + self.unlabeled_ids + self.pending_ids))

    @property
    def budget_left(self) -> int:
        return self.total_budget - self.consumed

    def to_json(self) -> str:
        return json.dumps(
            {
                "labeled_ids": list(self.labeled_ids),
                "unlabeled_ids": list(self.unlabeled_ids),
                "pending_ids": list(self.pending_ids),
                "cycle": self.cycle,
                "per_cycle_k": self.per_cycle_k,
                "total_budget": self.total_budget,
                "consumed": self.consumed,
            },
            indent=2,
        )

    @classmethod
    def from_json(cls, payload: str) -> "PoolState":
        data = json.loads(payload)
        return cls(
            labeled_ids=tuple(data["labeled_ids"]),
            unlabeled_ids=tuple(data["unlabeled_ids"]),
            pending_ids=tuple(data["pending_ids"]),
            cycle=int(data["cycle"]),
            per_cycle_k=int(data["per_cycle_k"]),
            total_budget=int(data["total_budget"]),
            consumed=int(data["consumed"]),
        )

    def save(self, path) -> None:
        # tmp + rename so a crash mid-write cannot leave a torn checkpoint
        path = Path(path)
        tmp = path.with_suffix(".tmp")
        tmp.write_text(self.to_json() + "\n", encoding="utf-8")
        tmp.replace(path)

    @classmethod
    def load(cls, path) -> "PoolState":
        return cls.from_json(Path(path).read_text(encoding="utf-8"))


def init_pool(
    ds: Dataset, initial_labeled: int, seed, per_cycle_k: int = 1, total_budget: int = 0
) -> PoolState:
    """Seeded uniform split of the dataset into initial labeled set and pool."""
    ids = sorted(ds.ids)
    if initial_labeled > len(ids):
        raise PoolError(f"initial_labeled {initial_labeled} exceeds dataset size {len(ids)}")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(len(ids))
    labeled = tuple(ids[i] for i in perm[:initial_labeled])
    unlabeled = tuple(ids[i] for i in perm[initial_labeled:])
    return PoolState(
        labeled_ids=labeled,
        unlabeled_ids=unlabeled,
        pending_ids=(),
        cycle=0,
        per_cycle_k=per_cycle_k,
        total_budget=total_budget,
        consumed=0,
    )


def mark_pending(pool: PoolState, ids) -> PoolState:
    """Move selected ids from the unlabeled pool into the pending queue
    (human-in-the-loop mode parks selections here until labels arrive)."""
    ids = list(ids)
    if pool.pending_ids:
        raise PoolError("pending queue is not empty")
    unknown = [i for i in ids if i not in set(pool.unlabeled_ids)]
    if unknown:
        raise UnknownSampleError(f"ids not in unlabeled pool: {unknown}")
    if len(set(ids)) != len(ids):
        raise PoolError("duplicate ids in selection")
    remaining = tuple(i for i in pool.unlabeled_ids if i not in set(ids))
    return replace(pool, unlabeled_ids=remaining, pending_ids=tuple(ids))


def commit_labels(pool: PoolState, ids, masks) -> PoolState:
    """Commit annotations: ids move to the labeled set and the budget is charged.

    With a non-empty pending queue (human mode) ids must come from it; the
    cycle counter advances when the queue drains. With an empty queue
    (oracle mode) ids come straight from the unlabeled pool and the cycle
    advances immediately.
    """
    ids = list(ids)
    masks = list(masks)
    if len(ids) != len(masks):
        raise PoolError(f"{len(ids)} ids but {len(masks)} masks")
    if len(set(ids)) != len(ids):
        raise DoubleLabelError("duplicate ids in commit")
    for mask in masks:
        if not isinstance(mask, Mask):
            raise PoolError("labels must be Mask instances")

    labeled = set(pool.labeled_ids)
    already = [i for i in ids if i in labeled]
    if already:
        raise DoubleLabelError(f"double-labeling: {already}")
    source = set(pool.pending_ids) if pool.pending_ids else set(pool.unlabeled_ids)
    outside = [i for i in ids if i not in source]
    if outside:
        if pool.pending_ids:
            raise UnknownSampleError(f"ids not in pending queue: {outside}")
        raise UnknownSampleError(f"unknown or unavailable ids: {outside}")
    if pool.consumed + len(ids) > pool.total_budget:
        raise BudgetExhaustedError(
            f"budget exhausted: consumed {pool.consumed} + {len(ids)} > {pool.total_budget}"
        )

    committed = set(ids)
    was_pending = bool(pool.pending_ids)
    new_pending = tuple(i for i in pool.pending_ids if i not in committed)
    new_unlabeled = (
        pool.unlabeled_ids if was_pending else tuple(i for i in pool.unlabeled_ids if i not in committed)
    )
    cycle = pool.cycle
    if not was_pending or not new_pending:
        cycle += 1
    return replace(
        pool,
        labeled_ids=pool.labeled_ids + tuple(ids),
        unlabeled_ids=new_unlabeled,
        pending_ids=new_pending,
        cycle=cycle,
        consumed=pool.consumed + len(ids),
    )
