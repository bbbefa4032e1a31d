"""Feed sampled vectors to a target process over its standard input.

Vectors travel as newline-terminated :func:`render_vector` lines.  A producer
thread samples into a bounded queue and the calling thread writes to the
target, so a slow target stalls sampling instead of growing a buffer.
"""

from __future__ import annotations

import logging
import queue
import subprocess
import threading
import time
from dataclasses import asdict, dataclass
from typing import Callable, Sequence

log = logging.getLogger(__name__)

_DONE = object()


@dataclass
class FuzzReport:
    mode: str
    requested: int | None
    delivered: int = 0
    crashes: int = 0
    spawns: int = 0
    first_crash: str | None = None
    first_crash_status: int | None = None
    elapsed_seconds: float = 0.0

    @property
    def vectors_per_second(self) -> float:
        return self.delivered / self.elapsed_seconds if self.elapsed_seconds > 0 else 0.0

    def as_dict(self) -> dict:
        d = asdict(self)
        d["vectors_per_second"] = round(self.vectors_per_second, 1)
        d["elapsed_seconds"] = round(self.elapsed_seconds, 4)
        return d


class SpawnError(Exception):
    pass


class _Target:
    def __init__(self, argv: Sequence[str], stdout=subprocess.DEVNULL):
        try:
            self.proc = subprocess.Popen(list(argv), stdin=subprocess.PIPE, stdout=stdout,
                                         stderr=stdout, bufsize=0)
        except OSError as exc:
            raise SpawnError(f"cannot start {argv[0]!r}: {exc}") from exc
        self.last_line: bytes | None = None

    def write(self, line: bytes) -> bool:
        try:
            self.proc.stdin.write(line)
        except (BrokenPipeError, ConnectionResetError, ValueError):
            return False
        self.last_line = line
        return True

    def finish(self, timeout: float | None = None) -> int:
        try:
            self.proc.stdin.close()
        except OSError:
            pass
        return self.proc.wait(timeout)


class Fuzzer:
    """Drives ``argv`` with lines produced by ``next_line``.

    In stream mode one target instance consumes many lines and is respawned
    after it dies; the crash is attributed to the last line it accepted.  In
    per-vector mode every line gets a fresh target, so attribution is exact.
    """

    def __init__(self, next_line: Callable[[], str], argv: Sequence[str],
                 per_vector: bool = False, queue_size: int = 1024,
                 max_respawns: int = 10_000, show_output: bool = False):
        if not argv:
            raise SpawnError("empty target command")
        self.next_line = next_line
        self.argv = list(argv)
        self.per_vector = per_vector
        self.queue_size = queue_size
        self.max_respawns = max_respawns
        self.stdout = None if show_output else subprocess.DEVNULL

    def _produce(self, q: queue.Queue, count, deadline, stop: threading.Event, errors: list):
        try:
            i = 0
            while not stop.is_set():
                if count is not None and i >= count:
                    break
                if deadline is not None and time.monotonic() >= deadline:
                    break
                item = (self.next_line() + "\n").encode()
                while not stop.is_set():
                    try:
                        q.put(item, timeout=0.1)
                        break
                    except queue.Full:
                        continue
                i += 1
        except BaseException as exc:  # surfaced in the consumer thread
            errors.append(exc)
        finally:
            while not stop.is_set():
                try:
                    q.put(_DONE, timeout=0.1)
                    break
                except queue.Full:
                    continue

    def run(self, count: int | None = None, seconds: float | None = None) -> FuzzReport:
        if count is None and seconds is None:
            raise ValueError("give a vector count or a duration")
        report = FuzzReport("per-vector" if self.per_vector else "stream", count)
        q: queue.Queue = queue.Queue(maxsize=self.queue_size)
        stop = threading.Event()
        errors: list = []
        start = time.monotonic()
        deadline = start + seconds if seconds is not None else None
        producer = threading.Thread(target=self._produce, args=(q, count, deadline, stop, errors),
                                    daemon=True)
        producer.start()
        try:
            if self.per_vector:
                self._run_per_vector(q, report)
            else:
                self._run_stream(q, report)
        finally:
            stop.set()
            producer.join()
        report.elapsed_seconds = time.monotonic() - start
        if errors:
            raise errors[0]
        return report

    def _record(self, report: FuzzReport, status: int, line: bytes | None):
        if status == 0:
            return
        report.crashes += 1
        if report.first_crash is None:
            report.first_crash = line.decode().rstrip("\n") if line else None
            report.first_crash_status = status
        log.info("target exited with status %s", status)

    def _spawn(self, report: FuzzReport) -> _Target:
        if report.spawns > self.max_respawns:
            raise SpawnError(f"target died more than {self.max_respawns} times")
        report.spawns += 1
        return _Target(self.argv, self.stdout)

    def _run_stream(self, q: queue.Queue, report: FuzzReport):
        target = self._spawn(report)
        while True:
            item = q.get()
            if item is _DONE:
                break
            while not target.write(item):
                self._record(report, target.finish(), target.last_line)
                target = self._spawn(report)
            report.delivered += 1
        self._record(report, target.finish(), target.last_line)

    def _run_per_vector(self, q: queue.Queue, report: FuzzReport):
        while True:
            item = q.get()
            if item is _DONE:
                break
            target = self._spawn(report)
            if target.write(item):
                report.delivered += 1
            self._record(report, target.finish(), item)
