import math
import threading

import pytest
from hypothesis import given, strategies as st

from fbginsole.gateway import (BadCRC, BadFieldCount, BadMagic, BadMode, ConfigError, EncodeError, Ingestor,
                               NonFiniteInSorTMode, ParseError, Reading, TelemetryFrame, UdpReceiver,
                               check_rate, decode_frame, emit_stream, encode_frame, ingest_stream)

values = st.floats(-1e6, 1e6, allow_nan=False).map(lambda v: round(v, 3))


@st.composite
def frames(draw):
    ids = draw(st.lists(st.integers(0, 40), unique=True, max_size=30))
    readings = []
    for sid in ids:
        mode = draw(st.sampled_from("STC"))
        readings.append(Reading(sid, mode, math.nan if mode == "C" else draw(values)))
    return TelemetryFrame(draw(st.integers(0, 2**32 - 1)), draw(st.integers(0, 2**64 - 1)), tuple(readings))


def _norm(v):
    return 0.0 if v == 0 else v


@given(frames())
def test_roundtrip(frame):
    back = decode_frame(encode_frame(frame))
    assert back.seq == frame.seq and back.t_ms == frame.t_ms
    assert len(back.readings) == len(frame.readings)
    for a, b in zip(back.readings, frame.readings):
        assert a.sensor_id == b.sensor_id and a.mode == b.mode
        assert (math.isnan(a.value) and math.isnan(b.value)) or a.value == _norm(b.value)


def test_wire_format_literal():
    f = TelemetryFrame(7, 175, (Reading(0, "S", 12.3456), Reading(6, "T", -0.0001), Reading(3, "C", math.nan)))
    data = encode_frame(f)
    body, crc = data.rstrip(b"\n").split(b"CRC32=")
    assert body == b"FBGX;v1;7;175;3;0:S:12.346;6:T:0.000;3:C:NaN;"
    import zlib
    assert crc == f"{zlib.crc32(body):08X}".encode()


def test_every_single_byte_flip_rejected():
    data = encode_frame(TelemetryFrame(3, 75, (Reading(1, "S", 4.5), Reading(6, "T", 30.25))))
    accepted = 0
    for i in range(len(data)):
        for b in range(256):
            if b == data[i]:
                continue
            bad = data[:i] + bytes([b]) + data[i + 1:]
            try:
                decode_frame(bad)
                accepted += 1
            except ParseError:
                pass
    assert accepted == 0


def test_specific_errors():
    good = encode_frame(TelemetryFrame(1, 25, (Reading(0, "S", 1.0),)))
    with pytest.raises(BadMagic):
        decode_frame(b"XBGX" + good[4:])
    with pytest.raises(BadCRC):
        decode_frame(good.replace(b"1.000", b"2.000"))

    def resign(body):
        import zlib
        return body + b"CRC32=" + f"{zlib.crc32(body):08X}".encode() + b"\n"
    with pytest.raises(BadFieldCount):
        decode_frame(resign(b"FBGX;v1;1;25;2;0:S:1.000;"))
    with pytest.raises(BadMode):
        decode_frame(resign(b"FBGX;v1;1;25;1;0:Q:1.000;"))
    with pytest.raises(NonFiniteInSorTMode):
        decode_frame(resign(b"FBGX;v1;1;25;1;0:S:NaN;"))


def test_encode_rejects_bad_frames():
    with pytest.raises(EncodeError):
        encode_frame(TelemetryFrame(1, 0, (Reading(0, "S", math.nan),)))
    with pytest.raises(EncodeError):
        encode_frame(TelemetryFrame(-1, 0, ()))
    with pytest.raises(EncodeError):
        encode_frame(TelemetryFrame(1, 0, (Reading(0, "C", 1.0),)))


def _enc(seqs):
    return [encode_frame(TelemetryFrame(s, s * 25, (Reading(0, "S", float(s)),))) for s in seqs]


def test_gap_detection():
    frames, rep = ingest_stream(_enc([1, 2, 4]))
    assert [f.seq for f in frames] == [1, 2, 4]
    assert rep.missing == [3]


def test_reorder_within_window():
    frames, rep = ingest_stream(_enc([2, 1, 3, 5, 4]))
    assert [f.seq for f in frames] == [1, 2, 3, 4, 5]
    assert rep.out_of_order == 2 and rep.missing == []


def test_duplicates_and_garbage():
    frames, rep = ingest_stream(_enc([0, 1, 1, 2]) + [b"junk\n"])
    assert [f.seq for f in frames] == [0, 1, 2]
    assert rep.duplicates == 1 and rep.parse_errors == 1


def test_late_frame_beyond_window():
    seqs = [0] + list(range(2, 20)) + [1]
    frames, rep = ingest_stream(_enc(seqs), window=4)
    assert 1 not in [f.seq for f in frames]
    assert rep.missing == [1] and rep.late == 1


@given(st.permutations(list(range(12))))
def test_any_permutation_within_window_is_repaired(perm):
    # displacement below the window size guarantees full repair
    from hypothesis import assume
    assume(all(abs(p - i) < 8 for i, p in enumerate(perm)))
    frames, rep = ingest_stream(_enc(perm))
    assert [f.seq for f in frames] == list(range(12))
    assert rep.missing == []


@given(st.lists(st.integers(0, 60), max_size=80))
def test_ingest_never_raises_and_delivers_in_order(seqs):
    frames, rep = ingest_stream(_enc(seqs))
    out = [f.seq for f in frames]
    assert out == sorted(set(out))
    assert rep.delivered == len(out)


def test_rate_bounds():
    assert check_rate(1) == 1.0 and check_rate(100) == 100.0
    for bad in (0.5, 101):
        with pytest.raises(ConfigError):
            check_rate(bad)
    with pytest.raises(ConfigError):
        Ingestor(window=0)


def test_udp_loopback():
    source = [[Reading(0, "S", float(k))] for k in range(200)]
    with UdpReceiver(("127.0.0.1", 0)) as rx:
        def run():
            emit_stream(iter(source), 100.0, rx.address)
            rx.stop.set()
        th = threading.Thread(target=run)
        th.start()
        data = list(rx.datagrams(idle_timeout=0.3))
        th.join()
    frames, rep = ingest_stream(data)
    assert len(frames) == 200 and rep.parse_errors == 0 and rep.missing == []
    assert frames[40].t_ms == 400
