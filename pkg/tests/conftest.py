import numpy as np
import pytest

from kinemotion.joints import N_JOINTS
from kinemotion.skeleton_io import SkeletonSequence


def make_sequence(frames, subject_id="s1", task_id="T2A1", rate=10.0, label=None):
    return SkeletonSequence(subject_id=subject_id, task_id=task_id, rate=rate,
                            frames=np.asarray(frames, dtype=float), label=label)


def constant_sequence(n_frames=10, rate=10.0):
    """All joints at rest, spread out so grids are non-degenerate."""
    base = np.zeros((N_JOINTS, 3))
    base[:, 0] = np.linspace(-0.5, 0.5, N_JOINTS)
    base[:, 1] = np.linspace(0.0, 1.2, N_JOINTS)
    return make_sequence(np.repeat(base[None], n_frames, axis=0), rate=rate)


def linear_sequence(n_frames=11, velocity=(0.5, 0.0, 0.0), rate=10.0):
    """Whole skeleton translating at constant velocity."""
    seq = constant_sequence(n_frames, rate)
    t = np.arange(n_frames) / rate
    seq.frames = seq.frames + t[:, None, None] * np.asarray(velocity)[None, None, :]
    return seq


def log_line(timestamp, body_id, joints):
    coords = " ".join(str(c) for c in np.asarray(joints).ravel())
    return f"{timestamp}\t{body_id}\t{coords}"


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
