"""Data series ownership: ingestion, validation, z-normalization, rolling statistics.

A series is an ordered sequence of finite float64 samples. Ordering is purely
positional; there are no timestamps. All downstream artifacts hold references
to an immutable value buffer and never mutate it.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError, ParseError


@dataclass(frozen=True)
class SeriesRecord:
    """An ingested data series plus provenance.

    ``values`` is a read-only float64 array; ``length`` is its size. Construct
    through :func:`make_series` or :func:`ingest_series` so validation and
    buffer freezing happen exactly once.
    """

    values: np.ndarray
    length: int
    name: str = "series"
    source: str = ""

    def window(self, offset: int, length: int) -> np.ndarray:
        return self.values[offset:offset + length]


@dataclass(frozen=True)
class SubsequenceRef:
    """A contiguous window: ``offset`` is 0-based, ``length`` its point count."""

    offset: int
    length: int

    def validate(self, series: SeriesRecord) -> None:
        if self.length < 1 or self.offset < 0:
            raise ParameterError(f"invalid subsequence {self}")
        if self.offset + self.length > series.length:
            raise ParameterError(
                f"subsequence [{self.offset}, {self.offset + self.length}) exceeds "
                f"series length {series.length}"
            )


@dataclass(frozen=True)
class RollingStats:
    """Per-offset mean/stddev for every window of one length.

    Population convention (divide by the window length). ``degenerate`` marks
    constant windows, detected exactly via sliding min == max; ``sigma`` is 0.0
    exactly on those offsets and positive elsewhere.
    """

    window: int
    mu: np.ndarray
    sigma: np.ndarray
    degenerate: np.ndarray
    csum: np.ndarray = field(repr=False)
    csum2: np.ndarray = field(repr=False)

    @property
    def count(self) -> int:
        return self.mu.shape[0]


def make_series(values, name: str = "series", source: str = "") -> SeriesRecord:
    """Validate and freeze a value buffer into a SeriesRecord."""
    arr = np.asarray(values, dtype=np.float64).copy()
    if arr.ndim != 1:
        raise ParameterError("series values must be one-dimensional")
    if arr.size < 2:
        raise ParameterError(f"series needs at least 2 values, got {arr.size}")
    if not np.isfinite(arr).all():
        bad = int(np.flatnonzero(~np.isfinite(arr))[0])
        raise ParameterError(f"non-finite value at position {bad}")
    arr.setflags(write=False)
    return SeriesRecord(values=arr, length=arr.size, name=name, source=source)


def _parse_token(token: str, line_no: int) -> float:
    try:
        value = float(token)
    except ValueError:
        raise ParseError(f"non-numeric value {token!r}", line=line_no) from None
    return value


def _interpolate_missing(values: np.ndarray, missing: np.ndarray) -> np.ndarray:
    if missing[0] or missing[-1]:
        edge = 1 if missing[0] else int(np.flatnonzero(missing)[-1]) + 1
        raise ParseError("cannot interpolate a non-finite value at the series boundary",
                         line=edge)
    idx = np.arange(values.size)
    values = values.copy()
    values[missing] = np.interp(idx[missing], idx[~missing], values[~missing])
    return values


def ingest_series(stream, fmt: str = "plain", *, column: str | int | None = None,
                  delimiter: str = ",", header: bool | None = None,
                  interpolate: bool = False, name: str = "series",
                  source: str = "") -> SeriesRecord:
    """Read a series from a byte/text stream or path.

    Two formats are supported: ``plain`` (one decimal value per line, blank
    lines ignored) and ``delimited`` (configurable delimiter, one selected
    column by name or 0-based index, optional header row). Non-finite samples
    are rejected with their line number unless ``interpolate`` is set, in
    which case interior ones are filled linearly.
    """
    if fmt not in ("plain", "delimited"):
        raise ParameterError(f"unknown format {fmt!r}")
    text = _read_text(stream)
    lines = text.splitlines()

    if fmt == "plain":
        tokens = [(i + 1, ln.strip()) for i, ln in enumerate(lines) if ln.strip()]
    else:
        tokens = _delimited_tokens(lines, column, delimiter, header)

    values = np.empty(len(tokens))
    line_nos = np.empty(len(tokens), dtype=np.int64)
    for k, (line_no, token) in enumerate(tokens):
        values[k] = _parse_token(token, line_no)
        line_nos[k] = line_no

    missing = ~np.isfinite(values)
    if missing.any():
        if not interpolate:
            first = int(np.flatnonzero(missing)[0])
            raise ParseError("non-finite value (pass interpolate to fill)",
                             line=int(line_nos[first]))
        values = _interpolate_missing(values, missing)

    if values.size < 2:
        raise ParseError(f"series needs at least 2 values, got {values.size}")
    origin = source or f"{fmt} stream"
    return make_series(values, name=name, source=f"{origin} ({values.size} rows read)")


def _read_text(stream) -> str:
    if isinstance(stream, (str, bytes)) and not isinstance(stream, bytes):
        # a filesystem path
        with open(stream, "rb") as fh:
            return fh.read().decode("utf-8")
    if isinstance(stream, bytes):
        return stream.decode("utf-8")
    data = stream.read()
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    return data


def _delimited_tokens(lines: list[str], column, delimiter: str,
                      header: bool | None) -> list[tuple[int, str]]:
    if column is None:
        raise ParameterError("delimited format requires a column selector")
    rows = [(i + 1, ln) for i, ln in enumerate(lines) if ln.strip()]
    if not rows:
        return []
    first_cells = [c.strip() for c in rows[0][1].split(delimiter)]
    col_idx: int
    if isinstance(column, str) and not column.lstrip("-").isdigit():
        if column not in first_cells:
            raise ParseError(f"column {column!r} not found in header {first_cells}", line=rows[0][0])
        col_idx = first_cells.index(column)
        rows = rows[1:]  # named column implies a header row
    else:
        col_idx = int(column)
        if header or (header is None and _looks_like_header(first_cells, col_idx)):
            rows = rows[1:]
    out = []
    for line_no, ln in rows:
        cells = ln.split(delimiter)
        if col_idx >= len(cells):
            raise ParseError(f"row has {len(cells)} columns, need index {col_idx}", line=line_no)
        out.append((line_no, cells[col_idx].strip()))
    return out


def _looks_like_header(cells: list[str], col_idx: int) -> bool:
    if col_idx >= len(cells):
        return False
    try:
        float(cells[col_idx])
        return False
    except ValueError:
        return True


def write_series(series: SeriesRecord, path_or_stream) -> None:
    """Serialize as plain lines using round-trip float repr."""
    body = "\n".join(repr(float(v)) for v in series.values) + "\n"
    if isinstance(path_or_stream, (str,)):
        with open(path_or_stream, "w") as fh:
            fh.write(body)
    else:
        path_or_stream.write(body)


def series_to_text(series: SeriesRecord) -> str:
    buf = io.StringIO()
    write_series(series, buf)
    return buf.getvalue()


def _sliding_extreme(values: np.ndarray, window: int, op) -> np.ndarray:
    """Exact sliding max/min in O(n log window) by span doubling."""
    out = values.copy()
    span = 1
    while span < window:
        step = min(span, window - span)
        out[:out.size - step] = op(out[:out.size - step], out[step:])
        span += step
    return out[:values.size - window + 1]


def rolling_stats(series: SeriesRecord, window: int) -> RollingStats:
    """Mean and population stddev for every window, in O(|D|) via cumulative sums.

    The series is centered on its global mean before accumulating so the
    second-moment subtraction stays well conditioned; means are shifted back.
    Constant windows are detected exactly (sliding min == max) and get sigma 0.
    """
    if window < 2 or window > series.length:
        raise ParameterError(
            f"window length {window} out of range [2, {series.length}]")
    from . import _kernels

    x = series.values
    shift = float(x.mean())
    xc = x - shift
    csum, csum2 = _kernels.kahan_cumsums(xc)
    mu_c = (csum[window:] - csum[:-window]) / window
    var = (csum2[window:] - csum2[:-window]) / window - mu_c * mu_c
    np.maximum(var, 0.0, out=var)

    hi = _sliding_extreme(x, window, np.maximum)
    lo = _sliding_extreme(x, window, np.minimum)
    degenerate = hi == lo
    var[degenerate] = 0.0
    # compensated sums keep the absolute rounding near eps * max(xc^2), but a
    # variance small relative to that still carries a large relative error,
    # which downstream correlations amplify; recompute such windows directly
    # (floor = noise / (2 * 1e-12): keeps sigma-induced correlation error
    # below 1e-12 everywhere)
    eps = float(np.finfo(np.float64).eps)
    floor = (4.0e12 * eps) * float((xc * xc).max()) / window
    suspect = np.flatnonzero((var <= floor) & ~degenerate)
    if suspect.size:
        chunk = max(1, (1 << 22) // window)
        taps = np.arange(window)[None, :]
        for s in range(0, suspect.size, chunk):
            sel = suspect[s:s + chunk]
            wins = xc[sel[:, None] + taps]
            mu_w = wins.mean(axis=1)
            var[sel] = np.mean((wins - mu_w[:, None]) ** 2, axis=1)
            mu_c[sel] = mu_w
        still = suspect[var[suspect] == 0.0]
        degenerate[still] = True

    sigma = np.sqrt(var)
    mu = mu_c + shift
    mu.setflags(write=False)
    sigma.setflags(write=False)
    degenerate.setflags(write=False)
    return RollingStats(window=window, mu=mu, sigma=sigma, degenerate=degenerate,
                        csum=csum, csum2=csum2)


def window_stats(stats: RollingStats, offset: int) -> tuple[float, float]:
    return float(stats.mu[offset]), float(stats.sigma[offset])


def znorm(series: SeriesRecord, sub: SubsequenceRef) -> np.ndarray:
    """Z-normalize one window: (x - mu) / sigma, all zeros when constant."""
    sub.validate(series)
    return znorm_values(series.window(sub.offset, sub.length))


def znorm_values(window: np.ndarray) -> np.ndarray:
    window = np.asarray(window, dtype=np.float64)
    if window.max() == window.min():
        return np.zeros_like(window)
    mu = window.mean()
    sd = math.sqrt(float(np.mean((window - mu) ** 2)))
    if sd == 0.0:
        return np.zeros_like(window)
    return (window - mu) / sd
