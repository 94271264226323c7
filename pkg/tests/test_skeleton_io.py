import numpy as np
import pytest

from kinemotion.errors import EmptyLogError, LogParseError, SequenceFormatError
from kinemotion.joints import N_JOINTS
from kinemotion.skeleton_io import (format_tracking_log, parse_tracking_log,
                                    read_sequence, write_sequence)

from conftest import constant_sequence, log_line, make_sequence


class TestParse:
    def test_single_line(self):
        joints = np.arange(96) * 0.01
        log = parse_tracking_log(log_line(0.0, 1, joints).encode())
        assert len(log.entries) == 1
        assert log.body_ids() == {1}
        assert log.entries[0].timestamp == 0.0
        np.testing.assert_array_equal(log.entries[0].joints, joints.reshape(32, 3))

    def test_two_bodies_same_timestamp(self):
        joints = np.zeros(96)
        text = "\n".join([log_line(0.5, 1, joints), log_line(0.5, 2, joints)])
        log = parse_tracking_log(text)
        assert len(log.entries) == 2
        assert log.body_ids() == {1, 2}

    def test_31_joints_is_an_error(self):
        joints = np.zeros(93)  # 31 joints
        with pytest.raises(LogParseError, match="line 1"):
            parse_tracking_log(log_line(0.0, 1, joints))

    def test_error_names_offending_line(self):
        good = log_line(0.0, 1, np.zeros(96))
        bad = log_line(1.0, 1, np.zeros(95)) + " oops"
        with pytest.raises(LogParseError, match="line 3"):
            parse_tracking_log("\n".join([good, good.replace("0.0", "0.1"), bad]))

    def test_non_numeric_coordinate(self):
        line = log_line(0.0, 1, np.zeros(96)).replace("0.0\t", "0.0\t", 1)
        line = line.rsplit(" ", 1)[0] + " abc"
        with pytest.raises(LogParseError):
            parse_tracking_log(line)

    def test_empty_file(self):
        with pytest.raises(EmptyLogError):
            parse_tracking_log(b"")

    def test_nan_preserved_per_coordinate(self):
        joints = np.zeros(96)
        line = log_line(0.0, 1, joints).split()
        line[5] = "nan"  # one coordinate of joint 1
        log = parse_tracking_log(" ".join(line))
        assert np.isnan(log.entries[0].joints[1, 0])
        assert np.isfinite(log.entries[0].joints).sum() == 95

    def test_unsorted_input_is_sorted(self):
        joints = np.zeros(96)
        text = "\n".join([log_line(2.0, 1, joints), log_line(1.0, 1, joints)])
        log = parse_tracking_log(text)
        assert [e.timestamp for e in log.entries] == [1.0, 2.0]

    def test_lenient_mode_accounts_for_every_line(self, rng):
        lines = []
        n_good = n_bad = 0
        for i in range(40):
            if rng.random() < 0.3:
                lines.append(f"{i}.0\tbadline")
                n_bad += 1
            else:
                lines.append(log_line(float(i), 1, rng.normal(size=96)))
                n_good += 1
        log = parse_tracking_log("\n".join(lines), lenient=True)
        assert len(log.entries) == n_good
        assert len(log.issues) == n_bad

    def test_roundtrip_through_formatter(self, rng):
        joints = rng.normal(size=96)
        joints[7] = np.nan
        log = parse_tracking_log(log_line(0.125, 3, joints))
        again = parse_tracking_log(format_tracking_log(log))
        assert again.entries[0] == log.entries[0]


class TestSequenceRoundTrip:
    def test_two_frame_roundtrip_identity(self, rng):
        seq = make_sequence(rng.normal(size=(2, N_JOINTS, 3)), label=1)
        assert read_sequence(write_sequence(seq)) == seq

    def test_unknown_magic(self):
        with pytest.raises(SequenceFormatError, match="magic"):
            read_sequence(b"NOPE" + b"\x00" * 64)

    def test_version_mismatch(self):
        data = bytearray(write_sequence(constant_sequence(2)))
        data[4] = 99
        with pytest.raises(SequenceFormatError, match="version"):
            read_sequence(bytes(data))

    def test_rate_preserved(self):
        seq = constant_sequence(3, rate=10.0)
        assert read_sequence(write_sequence(seq)).rate == 10.0

    def test_label_none_preserved(self):
        seq = constant_sequence(2)
        assert read_sequence(write_sequence(seq)).label is None

    def test_roundtrip_is_bit_stable(self, rng):
        for _ in range(20):
            n = int(rng.integers(2, 30))
            seq = make_sequence(rng.normal(size=(n, N_JOINTS, 3)) * 1e3,
                                subject_id="weird id", task_id="EF",
                                label=int(rng.integers(0, 2)))
            blob = write_sequence(seq)
            assert write_sequence(read_sequence(blob)) == blob

    def test_truncated_payload(self):
        blob = write_sequence(constant_sequence(4))
        with pytest.raises(SequenceFormatError, match="truncated"):
            read_sequence(blob[:-5])


def test_golden_kseq_layout(tmp_path):
    """Freeze the on-disk layout; docs/formats.md documents these bytes."""
    frames = np.zeros((1, N_JOINTS, 3))
    frames[0, 0] = (1.0, 2.0, 3.0)
    seq = make_sequence(frames, subject_id="ab", task_id="EF", rate=10.0, label=1)
    blob = write_sequence(seq)
    assert blob[:4] == b"KSEQ"
    assert blob[4:8] == (1).to_bytes(4, "little")
    assert blob[8:10] == (2).to_bytes(2, "little")
    assert blob[10:12] == b"ab"
    expected_head = bytes.fromhex(
        "4b53455101000000020061620200454600000000000024400101000000")
    assert blob[: len(expected_head)] == expected_head
    assert len(blob) == len(expected_head) + N_JOINTS * 3 * 8
