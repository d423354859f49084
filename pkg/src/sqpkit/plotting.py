"""Plot emission for live monitoring and post-processing.

"Live" visualization re-renders an image file after each major iteration;
any auto-reloading image viewer then tracks the run.  Rendering happens on
a worker thread fed through an ordered queue, so the solver never blocks on
it: records may coalesce into one render, but their order is preserved and
a final render on close always includes every record.

Series selectors are scalar telemetry names (``objective``, ``optimality``,
``feasibility``, ``step``, ...) or indexed vector entries such as ``x[0]``
or ``constraints[1]``.
"""

import queue
import re
import threading
from dataclasses import dataclass

import numpy as np
from matplotlib.figure import Figure

from .exceptions import IndexOutOfRange, UnknownSeries
from .history import HistoryRecord

__all__ = ["VizConfig", "DEFAULT_VIZ_VARS", "render_series", "live_update", "LiveRenderer", "extract_series"]

DEFAULT_VIZ_VARS = ("objective", "optimality", "feasibility")

_SCALAR_VARS = (
    "objective",
    "optimality",
    "feasibility",
    "optimality_unscaled",
    "feasibility_unscaled",
    "step",
    "nfev",
    "ngev",
    "majiter",
)
_VECTOR_VARS = {"x": "n", "gradient": "n", "constraints": "m", "multipliers": "m"}
_SELECTOR_RE = re.compile(r"^([A-Za-z_]+)(?:\[(\d+)\])?$")


@dataclass(frozen=True)
class VizConfig:
    """Plot configuration: series selectors, output image, refresh policy.

    ``refresh='every_major'`` re-renders after each major iteration;
    ``'final'`` renders once at the end of the run.
    """

    vars: tuple
    out_path: str = "slsqp_plots.png"
    refresh: str = "every_major"

    def __post_init__(self):
        if not self.vars:
            raise UnknownSeries("at least one series selector is required")
        if self.refresh not in ("every_major", "final"):
            raise ValueError(f"refresh must be 'every_major' or 'final', got {self.refresh!r}")
        for sel in self.vars:
            parse_selector(sel)


def parse_selector(selector):
    """Split ``"name"`` / ``"name[i]"`` into (name, index-or-None)."""
    match = _SELECTOR_RE.match(selector)
    if not match:
        raise UnknownSeries(f"malformed series selector {selector!r}")
    name, idx = match.group(1), match.group(2)
    if name in _SCALAR_VARS:
        if idx is not None:
            raise UnknownSeries(f"{name!r} is a scalar series; drop the index")
        return name, None
    if name in _VECTOR_VARS:
        if idx is None:
            raise UnknownSeries(f"{name!r} is a vector; select a component like {name}[0]")
        return name, int(idx)
    raise UnknownSeries(f"unknown series {name!r}")


def validate_selectors(selectors, n=None, m=None):
    """Range-check indexed selectors against the problem dimensions."""
    for sel in selectors:
        name, idx = parse_selector(sel)
        if idx is None:
            continue
        limit = n if _VECTOR_VARS[name] == "n" else m
        if limit is not None and not (0 <= idx < limit):
            raise IndexOutOfRange(f"{sel}: index out of range for length {limit}")


def _payloads(records):
    out = []
    for rec in records:
        if isinstance(rec, HistoryRecord):
            if rec.kind != "major":
                continue
            out.append(rec.payload)
        else:
            out.append(rec)
    return out


def extract_series(records, selectors):
    """Per-selector (iteration, value) arrays; missing entries become NaN."""
    payloads = _payloads(records)
    iters = np.array([
        rec.get("majiter", i) for i, rec in enumerate(payloads)
    ], dtype=float)
    series = {}
    for sel in selectors:
        name, idx = parse_selector(sel)
        values = np.full(len(payloads), np.nan)
        for i, rec in enumerate(payloads):
            if name not in rec:
                continue
            entry = rec[name]
            if idx is None:
                values[i] = float(entry)
            else:
                vec = np.asarray(entry, dtype=float).reshape(-1)
                if idx >= vec.shape[0]:
                    raise IndexOutOfRange(f"{sel}: index out of range for length {vec.shape[0]}")
                values[i] = vec[idx]
        series[sel] = (iters, values)
    return series


def build_figure(records, selectors):
    """One stacked panel per selector, plotted against major iteration."""
    series = extract_series(records, selectors)
    k = len(selectors)
    fig = Figure(figsize=(7.0, 2.2 * k + 0.8), dpi=100)
    axes = fig.subplots(k, 1, squeeze=False)[:, 0]
    for ax, sel in zip(axes, selectors):
        iters, values = series[sel]
        ax.plot(iters, values, marker="o", markersize=3.5, linewidth=1.2)
        ax.set_ylabel(sel)
        ax.grid(True, alpha=0.3)
    axes[-1].set_xlabel("major iteration")
    fig.subplots_adjust(hspace=0.45, left=0.14, right=0.97, top=0.97, bottom=0.6 / (2.2 * k + 0.8))
    return fig


def render_series(history, cfg):
    """Render the selected series of a loaded history to ``cfg.out_path``.

    The layout is deterministic: identical histories and configs produce
    identical image bytes.  Returns the output path.
    """
    header = history.header
    validate_selectors(cfg.vars, n=header.get("n"), m=header.get("m"))
    majors = [r for r in history.records if r.kind == "major"]
    _require_known(cfg.vars, majors)
    fig = build_figure(majors, cfg.vars)
    fig.savefig(cfg.out_path)
    return cfg.out_path


def _require_known(selectors, records):
    payloads = _payloads(records)
    for sel in selectors:
        name, _ = parse_selector(sel)
        if payloads and not any(name in rec for rec in payloads):
            raise UnknownSeries(f"series {name!r} was not saved in this history")


class LiveRenderer:
    """Re-renders the configured image as major records arrive.

    Records are handed over through an unbounded queue; a worker thread
    drains it (coalescing bursts) and renders.  ``close()`` stops the
    worker and performs one final render covering every record received.
    """

    def __init__(self, cfg, n=None, m=None):
        validate_selectors(cfg.vars, n=n, m=m)
        self.cfg = cfg
        self.render_count = 0
        self._all_records = []
        self._queue = queue.SimpleQueue()
        self._thread = None
        if cfg.refresh == "every_major":
            self._thread = threading.Thread(target=self._worker, daemon=True)
            self._thread.start()

    def update(self, rec):
        payload = rec.payload if isinstance(rec, HistoryRecord) else rec
        if isinstance(rec, HistoryRecord) and rec.kind != "major":
            return
        self._all_records.append(payload)
        if self._thread is not None:
            self._queue.put(payload)

    def _worker(self):
        seen = []
        while True:
            item = self._queue.get()
            if item is None:
                return
            seen.append(item)
            # Coalesce whatever else is already queued into this render.
            while True:
                try:
                    extra = self._queue.get_nowait()
                except queue.Empty:
                    break
                if extra is None:
                    self._render(seen)
                    return
                seen.append(extra)
            self._render(seen)

    def _render(self, records):
        try:
            fig = build_figure(records, self.cfg.vars)
            fig.savefig(self.cfg.out_path)
            self.render_count += 1
        except OSError:
            pass  # rendering must never take the run down

    def close(self):
        if self._thread is not None:
            self._queue.put(None)
            self._thread.join()
            self._thread = None
        if self._all_records:
            self._render(self._all_records)

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def live_update(r, rec):
    """Feed one record to a :class:`LiveRenderer` (non-blocking)."""
    r.update(rec)
