"""
Participant-level stratified splits.

One participant -> side map is shared by all tasks, so a participant's
recordings never sit on both sides of any task. Strata are (task, class)
participant sets; each gets round(test_fraction * n) test participants, clamped
to [1, n - 1], as far as overlapping strata allow.
"""

import logging
import math
from dataclasses import replace
from typing import Dict, List, Tuple

import numpy as np

from .exceptions import CannotStratify
from .models import CorpusManifest, Label, Side, SplitConfig

logger = logging.getLogger(__name__)


def test_count(n: int, fraction: float) -> int:
    """Largest-remainder share of `n` for the test side, keeping both sides non-empty."""
    exact = n * fraction
    share = math.floor(exact)
    # two parts: the larger remainder gets the leftover unit
    if exact - share > (n - exact) - math.floor(n - exact):
        share += 1
    return min(max(share, 1), n - 1)


def _strata(manifest: CorpusManifest) -> List[Tuple[str, Label, List[str]]]:
    strata = []
    for task in manifest.task_names:
        for label in (Label.POSITIVE, Label.NEGATIVE):
            members = manifest.participants_for(task, label)
            if len(members) < 2:
                logger.error(f'Cannot stratify {task}: {len(members)} {label.name.lower()} participant(s)')
                raise CannotStratify(
                    f'Task {task!r} has fewer than 2 {label.name.lower()} participants.',
                    task=task, label=label.value, participants=len(members),
                )
            strata.append((task, label, members))
    # smallest strata are placed first, they have the least slack
    return sorted(strata, key=lambda item: (len(item[2]), item[0], item[1].value))


def _repair(strata, sides: Dict[str, Side]):
    """Move participants until every stratum has both sides populated."""
    membership: Dict[str, List[int]] = {}
    for index, (_, _, members) in enumerate(strata):
        for pid in members:
            membership.setdefault(pid, []).append(index)

    def counts(index):
        members = strata[index][2]
        test = sum(1 for pid in members if sides[pid] is Side.TEST)
        return len(members) - test, test

    for index, (task, label, members) in enumerate(strata):
        train, test = counts(index)
        if train and test:
            continue
        needed = Side.TEST if test == 0 else Side.TRAIN
        for pid in members:
            if sides[pid] is needed:
                continue
            sides[pid] = needed
            # the move must not empty the other side of any stratum it touches
            if all(min(counts(other)) > 0 for other in membership[pid] if other != index):
                break
            sides[pid] = Side.TEST if needed is Side.TRAIN else Side.TRAIN
        else:
            raise CannotStratify(
                f'Task {task!r} cannot keep both classes on both sides of the split.',
                task=task, label=label.value,
            )


def make_splits(manifest: CorpusManifest, cfg: SplitConfig) -> CorpusManifest:
    referenced = {recording.participant_id for recording in manifest.recordings}
    rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, 17]))
    strata = _strata(manifest)

    sides: Dict[str, Side] = {}
    for task, label, members in strata:
        target = test_count(len(members), cfg.test_fraction)
        placed_test = sum(1 for pid in members if sides.get(pid) is Side.TEST)
        unplaced = [pid for pid in members if pid not in sides]
        order = [unplaced[i] for i in rng.permutation(len(unplaced))]
        wanted = max(0, min(target - placed_test, len(order)))
        for position, pid in enumerate(order):
            sides[pid] = Side.TEST if position < wanted else Side.TRAIN

    # participants outside every task stratum still need a side
    for pid in sorted(referenced - set(sides)):
        sides[pid] = Side.TRAIN

    _repair(strata, sides)

    train = frozenset(pid for pid, side in sides.items() if side is Side.TRAIN)
    test = frozenset(pid for pid, side in sides.items() if side is Side.TEST)
    validation = frozenset()
    if cfg.validation_fraction > 0:
        pool = sorted(train)
        size = int(round(cfg.validation_fraction * len(pool)))
        picked = np.random.default_rng(np.random.SeedSequence([cfg.seed, 23])).choice(len(pool), size, replace=False)
        validation = frozenset(pool[i] for i in picked)

    logger.info(f'Split {len(sides)} participants: {len(train)} train ({len(validation)} validation), {len(test)} test')
    return replace(manifest, train=train, test=test, validation=validation)


def validate_manifest(manifest: CorpusManifest) -> List[str]:
    """Every violated manifest invariant, one message each; empty when clean."""
    violations = []
    participant_ids = {participant.participant_id for participant in manifest.participants}
    task_names = set(manifest.task_names)

    if len(task_names) != len(manifest.tasks):
        violations.append('tasks: duplicate task names')

    seen = set()
    with_recordings = set()
    for recording in manifest.recordings:
        if recording.recording_id in seen:
            violations.append(f'recording {recording.recording_id}: duplicate recording_id')
        seen.add(recording.recording_id)
        with_recordings.add(recording.participant_id)
        if recording.participant_id not in participant_ids:
            violations.append(f'recording {recording.recording_id}: unknown participant {recording.participant_id}')
        for task in sorted(set(recording.labels) - task_names):
            violations.append(f'recording {recording.recording_id}: label for unknown task {task!r}')

    for pid in sorted(participant_ids - with_recordings):
        violations.append(f'participant {pid}: no recordings')

    if not manifest.has_split:
        return violations

    for pid in sorted(manifest.train & manifest.test):
        violations.append(f'participant {pid}: assigned to both train and test')
    for pid in sorted(with_recordings - manifest.train - manifest.test):
        violations.append(f'participant {pid}: not assigned to a split side')
    for pid in sorted(manifest.validation - manifest.train):
        violations.append(f'participant {pid}: validation participant outside train')

    for task in manifest.task_names:
        for side in (Side.TRAIN, Side.TEST):
            for label in (Label.POSITIVE, Label.NEGATIVE):
                if not manifest.select(task, side, label, include_validation=True):
                    violations.append(f'task {task!r}: no {label.name.lower()} recordings in {side.value}')
    return violations
