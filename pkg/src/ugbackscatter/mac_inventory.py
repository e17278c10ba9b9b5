"""Tag anti-collision: framed slotted ALOHA and the EPC C1G2-style Q algorithm.

No capture effect is modelled: two or more replies in one slot always
collide.  Every run takes an explicit seed and draws from its own
``numpy.random.Generator``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

Q_MAX = 15.0
Q_STEP = 0.3


class Scheme(str, enum.Enum):
    FSA = "fsa"
    Q = "q"


@dataclass
class InventoryResult:
    identified: frozenset = frozenset()
    slots_used: int = 0
    collisions: int = 0
    idle_slots: int = 0
    rounds: int = 0

    @property
    def successes(self) -> int:
        return len(self.identified)


@dataclass
class QState:
    q: float
    round_index: int = 0

    def __post_init__(self):
        if not 0.0 <= self.q <= Q_MAX:
            raise ValueError(f"q must be in [0, {Q_MAX:g}], got {self.q}")

    @property
    def big_q(self) -> int:
        # round half up; python's round() would send 0.5 to 0
        return int(math.floor(self.q + 0.5))

    @property
    def frame_size(self) -> int:
        return 2 ** self.big_q


def _rng(seed):
    if seed is None:
        raise ValueError("a seed is required")
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def expected_successes(n_tags: int, frame_size: int) -> float:
    """Expected singleton slots when ``n_tags`` pick uniformly among ``frame_size``."""
    if n_tags < 0 or frame_size < 1:
        raise ValueError("need n_tags >= 0 and frame_size >= 1")
    if n_tags == 0:
        return 0.0
    return n_tags * (1.0 - 1.0 / frame_size) ** (n_tags - 1)


def framed_slotted_aloha(n_tags: int, frame_size: int, seed) -> InventoryResult:
    """One ALOHA frame; tags that land alone in a slot are identified."""
    if n_tags < 0 or frame_size < 1:
        raise ValueError("need n_tags >= 0 and frame_size >= 1")
    rng = _rng(seed)
    slots = rng.integers(0, frame_size, size=n_tags)
    occupancy = np.bincount(slots, minlength=frame_size)
    winners = np.flatnonzero(occupancy[slots] == 1)
    return InventoryResult(
        identified=frozenset(int(i) for i in winners),
        slots_used=frame_size,
        collisions=int(np.count_nonzero(occupancy > 1)),
        idle_slots=int(np.count_nonzero(occupancy == 0)),
        rounds=1,
    )


class FsaStats(NamedTuple):
    mean_successes: float
    mean_collisions: float
    mean_idle: float


def fsa_monte_carlo(n_tags: int, frame_size: int, trials: int, seed) -> FsaStats:
    """Vectorised repetition of :func:`framed_slotted_aloha` over ``trials`` frames."""
    rng = _rng(seed)
    slots = rng.integers(0, frame_size, size=(trials, n_tags))
    # per-frame slot occupancy via an offset bincount
    flat = (slots + frame_size * np.arange(trials)[:, None]).ravel()
    occ = np.bincount(flat, minlength=trials * frame_size).reshape(trials, frame_size)
    return FsaStats(float(np.mean(np.sum(occ == 1, axis=1))),
                    float(np.mean(np.sum(occ > 1, axis=1))),
                    float(np.mean(np.sum(occ == 0, axis=1))))


def _q_inventory(tag_ids, q_init, max_slots, rng, step=Q_STEP):
    """Slot-level Q algorithm over the given tag ids.

    Each round, remaining tags draw a counter in ``[0, 2^Q - 1]``.  A slot's
    outcome adjusts ``q`` (collision +step, idle -step); when the rounded Q
    changes, or the frame runs out, a new round starts and every remaining
    tag redraws.  Collided tags sit out the rest of their round.
    """
    state = QState(float(q_init))
    remaining = np.asarray(list(tag_ids))
    identified = []
    slots = collisions = idle = 0
    rounds = 0

    counters = None
    slot_in_frame = 0
    while True:
        if counters is None:
            rounds += 1
            state.round_index = rounds
            counters = rng.integers(0, state.frame_size, size=remaining.size)
            slot_in_frame = 0
            frame_q = state.big_q

        replying = np.flatnonzero(counters == 0)
        slots += 1
        slot_in_frame += 1
        if replying.size == 0:
            idle += 1
            state.q = max(state.q - step, 0.0)
        elif replying.size == 1:
            identified.append(int(remaining[replying[0]]))
            keep = np.ones(remaining.size, dtype=bool)
            keep[replying[0]] = False
            remaining, counters = remaining[keep], counters[keep]
        else:
            collisions += 1
            state.q = min(state.q + step, Q_MAX)
            counters[replying] = -1  # silent until the next round

        if remaining.size == 0 or slots >= max_slots:
            break
        if state.big_q != frame_q or slot_in_frame >= 2 ** frame_q:
            counters = None
        else:
            counters = np.where(counters > 0, counters - 1, counters)

    return InventoryResult(frozenset(identified), slots, collisions, idle, rounds)


def q_protocol_inventory(n_tags: int, q_init: float, max_slots: int, seed) -> InventoryResult:
    """Run the Q algorithm until every tag is identified or ``max_slots`` runs out.

    Tag ids are ``0 .. n_tags-1``.  With no tags the reader still spends one
    (idle) slot before concluding the field is empty.
    """
    if n_tags < 0:
        raise ValueError("n_tags must be >= 0")
    if max_slots < 1:
        raise ValueError("max_slots must be >= 1")
    return _q_inventory(range(n_tags), q_init, max_slots, _rng(seed))


def identify_within_window(tag_ids, window_slots: int, scheme, rng, *, frame_size: int = 16,
                           q_init: float = 4.0) -> frozenset:
    """Ids identified when ``tag_ids`` contend for at most ``window_slots`` slots."""
    tag_ids = list(tag_ids)
    if window_slots <= 0 or not tag_ids:
        return frozenset()
    scheme = Scheme(scheme)
    if scheme is Scheme.Q:
        return _q_inventory(tag_ids, q_init, window_slots, rng).identified

    found = set()
    pending = list(tag_ids)
    budget = window_slots
    while pending and budget > 0:
        f = min(frame_size, budget)
        res = framed_slotted_aloha(len(pending), f, rng)
        found.update(pending[i] for i in res.identified)
        pending = [t for i, t in enumerate(pending) if i not in res.identified]
        budget -= f
    return frozenset(found)


def inventory_within_window(participants: int, window_slots: int, scheme, seed, *,
                            frame_size: int = 16, q_init: float = 4.0) -> int:
    """Number of tags identified within a slot budget (FSA or Q), deterministic under ``seed``.

    FSA runs repeated frames of ``frame_size`` slots, the last one shrunk to
    the remaining budget; Q starts from ``q_init``.
    """
    if window_slots < 0:
        raise ValueError("window_slots must be >= 0")
    ids = identify_within_window(range(participants), window_slots, scheme, _rng(seed),
                                 frame_size=frame_size, q_init=q_init)
    return len(ids)
