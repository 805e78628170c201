"""Datagram wire format for interrogator telemetry, with emitter and ingestor.

One frame per datagram, ASCII::

    FBGX;v1;<seq>;<t_ms>;<n>;<id>:<mode>:<value>;...;CRC32=<8 upper-case hex>\\n

``value`` carries exactly three decimals, or ``NaN`` in compensation mode.
The CRC-32 (zlib polynomial) covers every byte before ``CRC32=``.
"""

from __future__ import annotations

import heapq
import math
import re
import socket
import threading
import time
import zlib
from dataclasses import dataclass, field

MAGIC = b"FBGX"
VERSION = b"v1"
CRC_TAG = b"CRC32="
MODES = ("S", "T", "C")
U32_MAX = 2**32 - 1
U64_MAX = 2**64 - 1
DEFAULT_HOST = "127.0.0.1"
DEFAULT_PORT = 9750
REORDER_WINDOW = 8
MAX_DATAGRAM = 65507

_INT = re.compile(rb"0|[1-9][0-9]*\Z")
_VALUE = re.compile(rb"-?(0|[1-9][0-9]*)\.[0-9]{3}\Z")
_CRC = re.compile(rb"[0-9A-F]{8}\Z")


class ConfigError(ValueError):
    pass


class EncodeError(ValueError):
    pass


class ParseError(ValueError):
    """Malformed datagram; ``offset`` is the byte index where parsing failed."""

    def __init__(self, message: str, offset: int):
        self.offset = offset
        super().__init__(f"{message} (byte {offset})")


class BadMagic(ParseError):
    pass


class BadCRC(ParseError):
    pass


class BadFieldCount(ParseError):
    pass


class BadMode(ParseError):
    pass


class NonFiniteInSorTMode(ParseError):
    pass


class BadField(ParseError):
    pass


@dataclass(frozen=True, eq=False)
class Reading:
    sensor_id: int
    mode: str
    value: float

    def __eq__(self, other):
        if not isinstance(other, Reading):
            return NotImplemented
        same_value = (self.value == other.value
                      or (math.isnan(self.value) and math.isnan(other.value)))
        return self.sensor_id == other.sensor_id and self.mode == other.mode and same_value

    def __hash__(self):
        return hash((self.sensor_id, self.mode, None if math.isnan(self.value) else self.value))


@dataclass(frozen=True)
class TelemetryFrame:
    seq: int
    t_ms: int
    readings: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "readings", tuple(self.readings))

    def problems(self) -> list:
        out = []
        if not 0 <= self.seq <= U32_MAX:
            out.append(f"seq {self.seq} outside u32")
        if not 0 <= self.t_ms <= U64_MAX:
            out.append(f"t_ms {self.t_ms} outside u64")
        ids = [r.sensor_id for r in self.readings]
        if len(set(ids)) != len(ids):
            out.append("duplicate sensor ids")
        for r in self.readings:
            if r.sensor_id < 0:
                out.append(f"negative sensor id {r.sensor_id}")
            if r.mode not in MODES:
                out.append(f"sensor {r.sensor_id}: unknown mode {r.mode!r}")
            elif r.mode == "C" and not math.isnan(r.value):
                out.append(f"sensor {r.sensor_id}: mode C carries {r.value}, expected NaN")
            elif r.mode in "ST" and not math.isfinite(r.value):
                out.append(f"sensor {r.sensor_id}: mode {r.mode} carries non-finite value")
        return out


def _fmt_value(v: float) -> str:
    if math.isnan(v):
        return "NaN"
    s = f"{v:.3f}"
    return "0.000" if s == "-0.000" else s


def encode_frame(frame: TelemetryFrame) -> bytes:
    problems = frame.problems()
    if problems:
        raise EncodeError("; ".join(problems))
    parts = [MAGIC, VERSION, str(frame.seq).encode(), str(frame.t_ms).encode(),
             str(len(frame.readings)).encode()]
    parts += [f"{r.sensor_id}:{r.mode}:{_fmt_value(r.value)}".encode() for r in frame.readings]
    body = b";".join(parts) + b";"
    return body + CRC_TAG + f"{zlib.crc32(body):08X}".encode() + b"\n"


def decode_frame(data: bytes) -> TelemetryFrame:
    """Parse one datagram; raises a :class:`ParseError` subclass on any defect."""
    if not data.startswith(MAGIC + b";"):
        raise BadMagic("missing FBGX magic", 0)
    if not data.endswith(b"\n"):
        raise BadField("missing line terminator", len(data))
    tag = data.rfind(b";" + CRC_TAG)
    if tag < 0:
        raise BadField("missing CRC32 trailer", len(data))
    body = data[:tag + 1]
    crc_start = tag + 1 + len(CRC_TAG)
    crc_text = data[crc_start:-1]
    if not _CRC.match(crc_text):
        raise BadCRC("CRC field is not 8 upper-case hex digits", crc_start)
    if int(crc_text, 16) != zlib.crc32(body):
        raise BadCRC("CRC mismatch", crc_start)

    tokens = body[:-1].split(b";")
    offsets = []
    pos = 0
    for tok in tokens:
        offsets.append(pos)
        pos += len(tok) + 1
    if len(tokens) < 5:
        raise BadFieldCount(f"header has {len(tokens)} fields, expected 5", len(body))
    if tokens[1] != VERSION:
        raise BadField(f"unsupported version {tokens[1]!r}", offsets[1])

    def integer(k: int, limit: int, name: str) -> int:
        if not _INT.match(tokens[k]):
            raise BadField(f"{name} is not an unsigned integer", offsets[k])
        v = int(tokens[k])
        if v > limit:
            raise BadField(f"{name} out of range", offsets[k])
        return v

    seq = integer(2, U32_MAX, "seq")
    t_ms = integer(3, U64_MAX, "t_ms")
    n = integer(4, 10**6, "reading count")
    if len(tokens) - 5 != n:
        raise BadFieldCount(f"declared {n} readings, found {len(tokens) - 5}", offsets[4])

    readings = []
    seen = set()
    for k in range(5, len(tokens)):
        tok, off = tokens[k], offsets[k]
        fields = tok.split(b":")
        if len(fields) != 3:
            raise BadField("reading is not id:mode:value", off)
        sid_b, mode_b, val_b = fields
        if not _INT.match(sid_b):
            raise BadField("sensor id is not an unsigned integer", off)
        mode = mode_b.decode("ascii", "replace")
        if mode not in MODES:
            raise BadMode(f"unknown mode {mode!r}", off + len(sid_b) + 1)
        voff = off + len(sid_b) + len(mode_b) + 2
        if val_b == b"NaN":
            value = math.nan
            if mode != "C":
                raise NonFiniteInSorTMode(f"mode {mode} carries NaN", voff)
        elif _VALUE.match(val_b):
            value = float(val_b)
            if mode == "C":
                raise BadField("compensation reading must be NaN", voff)
        else:
            raise BadField(f"malformed value {val_b!r}", voff)
        sid = int(sid_b)
        if sid in seen:
            raise BadField(f"duplicate sensor id {sid}", off)
        seen.add(sid)
        readings.append(Reading(sid, mode, value))
    return TelemetryFrame(seq, t_ms, tuple(readings))


# -- emission -------------------------------------------------------------

def check_rate(rate: float) -> float:
    if not 1.0 <= rate <= 100.0:
        raise ConfigError(f"rate {rate} Hz outside [1, 100]")
    return float(rate)


def nominal_t_ms(seq: int, rate: float) -> int:
    return int(round(seq * 1000.0 / rate))


def frames_from_readings(source, rate: float):
    """Stamp successive reading lists with seq and nominal time."""
    rate = check_rate(rate)
    for seq, readings in enumerate(source):
        yield TelemetryFrame(seq, nominal_t_ms(seq, rate), tuple(readings))


def emit_stream(source, rate: float, destination=(DEFAULT_HOST, DEFAULT_PORT), sock=None,
                realtime: bool = False, pace: float = 0.0) -> int:
    """Send one datagram per tick; returns the number of frames sent.

    ``source`` yields reading lists. Timestamps are nominal, so pacing only
    affects wall-clock delivery, never ``t_ms``.
    """
    rate = check_rate(rate)
    own = sock is None
    if own:
        sock = socket.socket(socket.AF_INET, socket.SOCK_DGRAM)
    sent = 0
    start = time.monotonic()
    try:
        for frame in frames_from_readings(source, rate):
            if realtime:
                delay = start + frame.seq / rate - time.monotonic()
                if delay > 0:
                    time.sleep(delay)
            elif pace:
                time.sleep(pace)
            sock.sendto(encode_frame(frame), destination)
            sent += 1
    finally:
        if own:
            sock.close()
    return sent


# -- ingestion ------------------------------------------------------------

@dataclass
class GapReport:
    missing: list = field(default_factory=list)
    duplicates: int = 0
    out_of_order: int = 0
    late: int = 0
    parse_errors: int = 0
    delivered: int = 0

    def to_dict(self) -> dict:
        return {"missing": list(self.missing), "duplicates": self.duplicates,
                "out_of_order": self.out_of_order, "late": self.late,
                "parse_errors": self.parse_errors, "delivered": self.delivered}


class Ingestor:
    """Reorders datagrams within a bounded window and accounts for gaps.

    Until the first delivery the starting seq is unknown; it is taken as the
    smallest seq seen once the window fills or the stream ends.
    """

    def __init__(self, window: int = REORDER_WINDOW):
        if window < 1:
            raise ConfigError("reorder window must be at least 1")
        self.window = window
        self.report = GapReport()
        self._heap: list = []
        self._pending: set = set()
        self._next: int | None = None
        self._max_seen = -1

    def push(self, data: bytes) -> list:
        try:
            frame = decode_frame(data)
        except ParseError:
            self.report.parse_errors += 1
            return []
        return self.push_frame(frame)

    def push_frame(self, frame: TelemetryFrame) -> list:
        seq = frame.seq
        if seq in self._pending:
            self.report.duplicates += 1
            return []
        if self._next is not None and seq < self._next:
            if seq in self.report.missing:
                self.report.late += 1
                self.report.out_of_order += 1
            else:
                self.report.duplicates += 1
            return []
        if seq < self._max_seen:
            self.report.out_of_order += 1
        self._max_seen = max(self._max_seen, seq)
        heapq.heappush(self._heap, (seq, frame))
        self._pending.add(seq)
        return self._drain(force=False)

    def _drain(self, force: bool) -> list:
        out = []
        while self._heap:
            head = self._heap[0][0]
            if self._next is None:
                if not force and len(self._heap) < self.window:
                    break
                self._next = head
            if head != self._next:
                # wait for the gap to fill until the window is full
                if not force and len(self._heap) < self.window:
                    break
                self.report.missing.extend(range(self._next, head))
                self._next = head
            _, frame = heapq.heappop(self._heap)
            self._pending.discard(frame.seq)
            self._next = frame.seq + 1
            self.report.delivered += 1
            out.append(frame)
        return out

    def flush(self) -> list:
        return self._drain(force=True)


def ingest_stream(source, window: int = REORDER_WINDOW) -> tuple[list, GapReport]:
    """Decode an iterable of datagrams into seq-ordered frames plus a gap report."""
    ing = Ingestor(window)
    frames = []
    for data in source:
        frames.extend(ing.push(data))
    frames.extend(ing.flush())
    return frames, ing.report


class UdpReceiver:
    """Bound UDP socket yielding datagrams until idle after ``stop`` is set."""

    def __init__(self, bind=(DEFAULT_HOST, DEFAULT_PORT), rcvbuf: int = 4 << 20):
        self.sock = socket.socket(socket.AF_INET, socket.SOCK_DGRAM)
        try:
            self.sock.setsockopt(socket.SOL_SOCKET, socket.SO_RCVBUF, rcvbuf)
        except OSError:
            pass
        self.sock.bind(bind)
        self.stop = threading.Event()

    @property
    def address(self):
        return self.sock.getsockname()

    def datagrams(self, idle_timeout: float = 0.3, max_wait: float | None = None):
        self.sock.settimeout(idle_timeout)
        start = time.monotonic()
        while True:
            try:
                data, _ = self.sock.recvfrom(MAX_DATAGRAM)
            except socket.timeout:
                if self.stop.is_set():
                    return
                if max_wait is not None and time.monotonic() - start > max_wait:
                    return
                continue
            yield data

    def close(self):
        self.sock.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
