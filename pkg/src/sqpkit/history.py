"""Iteration telemetry: append-only save files, summary table, loading.

Save-file format (UTF-8 JSON Lines, one self-describing record per line)::

    {"kind":"header","version":1,"n":...,"m":...,"meq":...,"save_vars":[...],"options":{...},"timestamp":"..."}
    {"kind":"major","majiter":0,"x":[...],...}
    {"kind":"eval","x":[...],"objective":...,"constraints":[...]}

The writer flushes after every record so a concurrent reader always sees
every completed iteration.  Floats are encoded with shortest round-trip
decimal representations, so loading restores values bit-exactly.  Major
records carry the configured ``save_vars`` (``optimality``/``feasibility``
expand to a scaled and an ``_unscaled`` key); ``eval`` records always carry
``x``, ``objective`` and ``constraints``, and are written only when
``save_itr='all'``.

All stored x/objective/constraints/derivative/multiplier values are
unscaled (user space).
"""

import json
from dataclasses import dataclass, field

import numpy as np

from .exceptions import FormatError, InvalidVarName

__all__ = [
    "ALLOWED_SAVE_VARS",
    "FORMAT_VERSION",
    "DEFAULT_SUMMARY_PATH",
    "SaveConfig",
    "HistoryRecord",
    "History",
    "Writer",
    "open_writer",
    "append_record",
    "load_history",
    "SummaryWriter",
    "write_summary_row",
]

ALLOWED_SAVE_VARS = (
    "majiter",
    "x",
    "objective",
    "constraints",
    "gradient",
    "jacobian",
    "optimality",
    "feasibility",
    "multipliers",
    "step",
    "nfev",
    "ngev",
)

FORMAT_VERSION = 1
DEFAULT_SUMMARY_PATH = "slsqp_summary.out"

# Keys with a scaled value next to the unscaled one in major records.
_TWIN_KEYS = {"optimality", "feasibility"}


@dataclass(frozen=True)
class SaveConfig:
    """Where and what to save.

    ``save_itr='major'`` stores one record per major iteration;
    ``'all'`` additionally stores one record per function evaluation.
    """

    path: str
    save_itr: str = "major"
    save_vars: tuple = ALLOWED_SAVE_VARS

    def __post_init__(self):
        if self.save_itr not in ("major", "all"):
            raise ValueError(f"save_itr must be 'major' or 'all', got {self.save_itr!r}")
        if not self.save_vars:
            raise InvalidVarName("save_vars must not be empty")
        for name in self.save_vars:
            if name not in ALLOWED_SAVE_VARS:
                raise InvalidVarName(f"unknown save variable {name!r}; allowed: {', '.join(ALLOWED_SAVE_VARS)}")


@dataclass(frozen=True)
class HistoryRecord:
    """One save-file line: ``kind`` is 'header', 'major', or 'eval'."""

    kind: str
    payload: dict


@dataclass
class History:
    """A loaded save file."""

    header: dict
    records: list = field(default_factory=list)
    truncated: bool = False

    @property
    def major_records(self):
        return [r for r in self.records if r.kind == "major"]

    @property
    def eval_records(self):
        return [r for r in self.records if r.kind == "eval"]


def _plain(value):
    """Convert numpy scalars/arrays to plain Python types for JSON."""
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    return value


class Writer:
    """Append-only save-file writer; one writer per file."""

    def __init__(self, cfg, header):
        self.cfg = cfg
        self._fh = open(cfg.path, "w", encoding="utf-8")
        head = {"kind": "header", "version": FORMAT_VERSION}
        head.update({k: _plain(v) for k, v in header.items()})
        head["save_vars"] = list(cfg.save_vars)
        self._write_line(head)

    def _write_line(self, obj):
        self._fh.write(json.dumps(obj, separators=(",", ":")) + "\n")
        self._fh.flush()

    def append(self, rec):
        if rec.kind == "eval":
            if self.cfg.save_itr != "all":
                return
            line = {"kind": "eval"}
            for key in ("x", "objective", "constraints"):
                line[key] = _plain(rec.payload[key])
            self._write_line(line)
            return
        line = {"kind": "major"}
        for name in self.cfg.save_vars:
            if name in rec.payload:
                line[name] = _plain(rec.payload[name])
            if name in _TWIN_KEYS and f"{name}_unscaled" in rec.payload:
                line[f"{name}_unscaled"] = _plain(rec.payload[f"{name}_unscaled"])
        self._write_line(line)

    def close(self):
        if not self._fh.closed:
            self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def open_writer(cfg, header):
    """Create/truncate the save file and write the header record."""
    return Writer(cfg, header)


def append_record(w, rec):
    """Append one record, subject to the writer's save_itr/save_vars filter."""
    w.append(rec)


def load_history(path):
    """Parse a save file into a :class:`History`.

    A torn final line (interrupted write) is dropped and flagged with
    ``truncated=True``; a malformed header, version, or interior line
    raises :class:`FormatError`.
    """
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise FormatError(f"{path}: empty history file")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: bad header line: {exc}") from exc
    if not isinstance(header, dict) or header.get("kind") != "header":
        raise FormatError(f"{path}: first record is not a header")
    if header.get("version") != FORMAT_VERSION:
        raise FormatError(f"{path}: unsupported format version {header.get('version')!r}")

    records = []
    truncated = False
    for i, line in enumerate(lines[1:], start=2):
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            if i == len(lines):
                truncated = True
                break
            raise FormatError(f"{path}: bad record on line {i}: {exc}") from exc
        kind = obj.pop("kind", None)
        if kind not in ("major", "eval"):
            raise FormatError(f"{path}: line {i} has unknown kind {kind!r}")
        records.append(HistoryRecord(kind=kind, payload=obj))
    return History(header=header, records=records, truncated=truncated)


_SUMMARY_COLUMNS = ("MAJOR", "NFEV", "NGEV", "OBJFUN", "OPTIMALITY", "FEASIBILITY", "STEP")
_SUMMARY_HEADER = "%5s %7s %7s %15s %15s %15s %11s" % _SUMMARY_COLUMNS
_SUMMARY_ROW = "%5d %7d %7d %15.8e %15.8e %15.8e %11.4e"


class SummaryWriter:
    """Fixed-width live summary table, one row per major iteration."""

    def __init__(self, path=None):
        self.path = path if path else DEFAULT_SUMMARY_PATH
        self._fh = None

    def write_row(self, it):
        if self._fh is None:
            self._fh = open(self.path, "w", encoding="utf-8")
            self._fh.write(_SUMMARY_HEADER + "\n")
        row = _SUMMARY_ROW % (it.majiter, it.nfev, it.ngev, it.f, it.optimality, it.feasibility, it.alpha)
        self._fh.write(row + "\n")
        self._fh.flush()

    def close(self):
        if self._fh is not None and not self._fh.closed:
            self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def write_summary_row(s, it):
    """Append one summary row (header row precedes the first one)."""
    s.write_row(it)
