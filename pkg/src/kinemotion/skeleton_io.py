"""Raw tracker-log parsing and the cleaned-sequence on-disk container.

Raw log: one entry per line, whitespace-separated, 98 fields:
``timestamp  body_id  x0 y0 z0 ... x31 y31 z31`` with coordinates in meters
and the literal token ``nan`` for a missing coordinate.

Cleaned sequence (``.kseq``): little-endian binary, layout documented in
docs/formats.md and golden-file tested.
"""

from __future__ import annotations

import io
import struct
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyLogError, LogParseError, SequenceFormatError
from .joints import N_JOINTS

N_FIELDS = 2 + 3 * N_JOINTS  # timestamp, body_id, 96 coordinates

KSEQ_MAGIC = b"KSEQ"
KSEQ_VERSION = 1


@dataclass(frozen=True)
class RawEntry:
    """One tracker frame for one body; missing coordinates are NaN."""

    timestamp: float
    body_id: int
    joints: np.ndarray  # (32, 3) float64, NaN where missing

    def __eq__(self, other):
        if not isinstance(other, RawEntry):
            return NotImplemented
        return (
            self.timestamp == other.timestamp
            and self.body_id == other.body_id
            and np.array_equal(self.joints, other.joints, equal_nan=True)
        )


@dataclass
class RawTrackingLog:
    entries: list[RawEntry]
    source_id: str = ""
    issues: list[tuple[int, str]] = field(default_factory=list)  # lenient-mode rejects

    def body_ids(self) -> set[int]:
        return {e.body_id for e in self.entries}


@dataclass
class SkeletonSequence:
    """Uniformly sampled, gap-free 32-joint trajectory for one subject x task."""

    subject_id: str
    task_id: str
    rate: float
    frames: np.ndarray  # (N, 32, 3) float64, no NaN
    label: int | None = None

    def __post_init__(self):
        self.frames = np.ascontiguousarray(self.frames, dtype=np.float64)
        if self.frames.ndim != 3 or self.frames.shape[1:] != (N_JOINTS, 3):
            raise ValueError(f"frames must be (N, {N_JOINTS}, 3), got {self.frames.shape}")
        if self.rate <= 0:
            raise ValueError("rate must be positive")

    @property
    def n_frames(self) -> int:
        return self.frames.shape[0]

    @property
    def duration(self) -> float:
        return (self.n_frames - 1) / self.rate

    def __eq__(self, other):
        if not isinstance(other, SkeletonSequence):
            return NotImplemented
        return (
            self.subject_id == other.subject_id
            and self.task_id == other.task_id
            and self.rate == other.rate
            and self.label == other.label
            and self.frames.shape == other.frames.shape
            and np.array_equal(self.frames, other.frames)
        )


def _parse_line(fields: list[str], line_number: int) -> RawEntry:
    try:
        timestamp = float(fields[0])
    except ValueError:
        raise LogParseError(
            f"line {line_number}: non-numeric timestamp {fields[0]!r}", line_number
        ) from None
    if not np.isfinite(timestamp) or timestamp < 0:
        raise LogParseError(
            f"line {line_number}: timestamp must be a non-negative real, got {fields[0]!r}",
            line_number,
        )
    try:
        body_id = int(fields[1])
    except ValueError:
        raise LogParseError(
            f"line {line_number}: non-integer body_id {fields[1]!r}", line_number
        ) from None
    try:
        coords = np.array([float(f) for f in fields[2:]], dtype=np.float64)
    except ValueError:
        raise LogParseError(f"line {line_number}: non-numeric coordinate", line_number) from None
    if np.isinf(coords).any():
        raise LogParseError(f"line {line_number}: non-finite coordinate", line_number)
    return RawEntry(timestamp, body_id, coords.reshape(N_JOINTS, 3))


def parse_tracking_log(data: bytes | str, source_id: str = "", lenient: bool = False) -> RawTrackingLog:
    """Parse a raw tracker log; entries come back sorted by timestamp.

    Strict mode raises LogParseError naming the first bad line. Lenient mode
    records rejected lines in ``log.issues`` instead, so that
    len(entries) + len(issues) == number of non-empty input lines.
    """
    if isinstance(data, bytes):
        try:
            text = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise LogParseError(f"log is not UTF-8 text: {exc}") from None
    else:
        text = data

    entries: list[RawEntry] = []
    issues: list[tuple[int, str]] = []
    for line_number, line in enumerate(text.splitlines(), start=1):
        fields = line.split()
        if not fields:
            continue
        if len(fields) != N_FIELDS:
            err = LogParseError(
                f"line {line_number}: expected {N_FIELDS} fields, got {len(fields)}",
                line_number,
            )
        else:
            try:
                entries.append(_parse_line(fields, line_number))
                continue
            except LogParseError as exc:
                err = exc
        if lenient:
            issues.append((err.line_number, str(err)))
        else:
            raise err

    if not entries:
        raise EmptyLogError(f"no entries in log {source_id!r}")
    entries.sort(key=lambda e: e.timestamp)  # stable: preserves same-timestamp order
    return RawTrackingLog(entries=entries, source_id=source_id, issues=issues)


def format_tracking_log(log: RawTrackingLog) -> bytes:
    """Inverse of parse_tracking_log for synthetic-data emission."""
    out = io.StringIO()
    for e in log.entries:
        coords = " ".join(repr(float(c)) for c in e.joints.ravel())
        out.write(f"{float(e.timestamp)!r}\t{e.body_id}\t{coords}\n")
    return out.getvalue().encode("utf-8")


def _write_str(buf: io.BytesIO, s: str) -> None:
    raw = s.encode("utf-8")
    buf.write(struct.pack("<H", len(raw)))
    buf.write(raw)


def _read_str(buf: io.BytesIO) -> str:
    (n,) = struct.unpack("<H", buf.read(2))
    return buf.read(n).decode("utf-8")


def write_sequence(seq: SkeletonSequence) -> bytes:
    """Serialize to the versioned .kseq container (bit-stable round trip)."""
    buf = io.BytesIO()
    buf.write(KSEQ_MAGIC)
    buf.write(struct.pack("<I", KSEQ_VERSION))
    _write_str(buf, seq.subject_id)
    _write_str(buf, seq.task_id)
    buf.write(struct.pack("<d", seq.rate))
    buf.write(struct.pack("<b", -1 if seq.label is None else int(seq.label)))
    buf.write(struct.pack("<I", seq.n_frames))
    buf.write(np.ascontiguousarray(seq.frames, dtype="<f8").tobytes())
    return buf.getvalue()


def read_sequence(data: bytes) -> SkeletonSequence:
    buf = io.BytesIO(data)
    magic = buf.read(4)
    if magic != KSEQ_MAGIC:
        raise SequenceFormatError(f"bad magic {magic!r}, expected {KSEQ_MAGIC!r}")
    (version,) = struct.unpack("<I", buf.read(4))
    if version != KSEQ_VERSION:
        raise SequenceFormatError(f"unsupported format version {version}")
    subject_id = _read_str(buf)
    task_id = _read_str(buf)
    (rate,) = struct.unpack("<d", buf.read(8))
    (label_code,) = struct.unpack("<b", buf.read(1))
    (n_frames,) = struct.unpack("<I", buf.read(4))
    payload = buf.read(n_frames * N_JOINTS * 3 * 8)
    if len(payload) != n_frames * N_JOINTS * 3 * 8:
        raise SequenceFormatError("truncated frame payload")
    frames = np.frombuffer(payload, dtype="<f8").reshape(n_frames, N_JOINTS, 3).copy()
    label = None if label_code < 0 else int(label_code)
    return SkeletonSequence(subject_id=subject_id, task_id=task_id, rate=rate, frames=frames, label=label)
