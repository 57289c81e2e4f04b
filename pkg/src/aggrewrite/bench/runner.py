"""Run every (encoding, instance) pair through a solver under a time limit."""

from __future__ import annotations

import csv
import logging
import os
import shlex
import signal
import subprocess
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, List, Optional, Sequence

import psutil

log = logging.getLogger(__name__)

DEFAULT_TIME_LIMIT = 200.0
HAMILTONIAN_TIME_LIMIT = 400.0

FINISHED = "finished"
TIMEOUT = "timeout"


class SolverLaunchFailure(RuntimeError):
    pass


@dataclass(frozen=True)
class RunRecord:
    encoding: str
    instance: str
    seconds: Optional[float]  # None for a timeout
    limit: float

    def __post_init__(self):
        if self.seconds is not None and not 0 <= self.seconds <= self.limit:
            raise ValueError(f"finished time {self.seconds} outside [0, {self.limit}]")

    @property
    def outcome(self) -> str:
        return TIMEOUT if self.seconds is None else FINISHED

    @property
    def finished(self) -> bool:
        return self.seconds is not None


def _run_one(argv: List[str], encoding: str, instance: str, limit: float) -> RunRecord:
    start = time.perf_counter()
    try:
        proc = subprocess.Popen(argv + [encoding, instance], stdout=subprocess.DEVNULL,
                                stderr=subprocess.DEVNULL, start_new_session=True)
    except OSError as exc:
        raise SolverLaunchFailure(f"cannot launch {argv[0]}: {exc.strerror or exc}") from exc
    try:
        proc.wait(timeout=limit)
    except subprocess.TimeoutExpired:
        try:
            os.killpg(proc.pid, signal.SIGKILL)
        except ProcessLookupError:
            pass
        proc.wait()
        return RunRecord(encoding, instance, None, limit)
    elapsed = time.perf_counter() - start
    # solver exit codes (10 = SAT, 20 = UNSAT, ...) all count as finished
    if elapsed > limit:
        return RunRecord(encoding, instance, None, limit)
    return RunRecord(encoding, instance, elapsed, limit)


def run_matrix(encodings: Sequence[str], instances: Sequence[str], solver_command: str,
               time_limit: float = DEFAULT_TIME_LIMIT, parallelism: int = 1,
               sink=None) -> List[RunRecord]:
    """One record per (encoding, instance), in encoding-major order.

    ``sink`` is called with each record as it completes, under a lock.
    """
    if time_limit <= 0:
        raise ValueError("time limit must be positive")
    cores = psutil.cpu_count(logical=False) or os.cpu_count() or 1
    if parallelism > cores:
        log.warning("parallelism %d exceeds %d physical cores; timings will be noisy",
                    parallelism, cores)
    argv = shlex.split(solver_command)
    pairs = [(e, i) for e in encodings for i in instances]
    lock = threading.Lock()

    def task(pair):
        record = _run_one(argv, pair[0], pair[1], time_limit)
        if sink is not None:
            with lock:
                sink(record)
        return record

    with ThreadPoolExecutor(max_workers=max(1, parallelism)) as pool:
        futures = [pool.submit(task, pair) for pair in pairs]
        try:
            return [f.result() for f in futures]
        except SolverLaunchFailure:
            for f in futures:
                f.cancel()
            raise


CSV_COLUMNS = ("encoding", "instance", "outcome", "seconds", "limit")


def write_csv(records: Iterable[RunRecord], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(CSV_COLUMNS)
        for r in records:
            writer.writerow([r.encoding, r.instance, r.outcome,
                             "" if r.seconds is None else f"{r.seconds:.6f}", f"{r.limit:g}"])


def read_csv(path) -> List[RunRecord]:
    with open(path, newline="", encoding="utf-8") as handle:
        rows = list(csv.DictReader(handle))
    out = []
    for row in rows:
        seconds = float(row["seconds"]) if row["outcome"] == FINISHED else None
        out.append(RunRecord(row["encoding"], row["instance"], seconds, float(row["limit"])))
    return out


def expand_instances(spec) -> List[str]:
    """A directory expands to its files (sorted); a list is taken as is."""
    if isinstance(spec, str):
        path = Path(spec)
        if path.is_dir():
            return sorted(str(p) for p in path.iterdir() if p.is_file())
        return [spec]
    return [str(p) for p in spec]
