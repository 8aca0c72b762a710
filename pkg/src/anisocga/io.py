"""CSV and PGM emission.

Numbers are written with ``format(x, ".10g")`` so output is locale-free and
byte-identical across runs with the same seed.
"""

import csv
from pathlib import Path

import numpy as np

from .grid import TorusGrid
from .niching import PALETTE

GROWTH_HEADER = ("generation", "n_best", "delta")
SUMMARY_HEADER = ("label", "avg", "std", "min", "max", "replicates")
NICHING_HEADER = ("generation", "count_a", "count_b", "count_empty", "mixing_index")
SWEEP_HEADER = ("alpha", "mean_best", "std_best", "min_best", "runs")
TRACE_HEADER = ("generation", "global_best_cost")
EQUIVALENCE_HEADER = ("label", "ratio", "takeover", "alpha")


def fmt(value) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, str):
        return value
    return format(float(value), ".10g")


def write_rows(path, header, rows):
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) for v in row])
    return path


def read_rows(path):
    with Path(path).open(newline="") as fh:
        return list(csv.reader(fh))


def write_growth_csv(path, n_of_t):
    n = np.asarray(n_of_t)
    delta = np.diff(n, prepend=n[:1])
    return write_rows(path, GROWTH_HEADER, zip(range(len(n)), n, delta))


def write_summary_csv(path, rows):
    """``rows`` of ``(label, avg, std, min, max, replicates)``."""
    return write_rows(path, SUMMARY_HEADER, rows)


def write_niching_csv(path, report):
    rows = (
        (t, a, b, e, m)
        for t, ((a, b, e), m) in enumerate(zip(report.counts, report.mixing))
    )
    return write_rows(path, NICHING_HEADER, rows)


def write_sweep_csv(path, sweep_rows):
    rows = ((r.alpha, r.mean_best, r.std_best, r.min_best, r.runs) for r in sweep_rows)
    return write_rows(path, SWEEP_HEADER, rows)


def write_trace_csv(path, trace):
    return write_rows(path, TRACE_HEADER, enumerate(trace))


def write_pgm(path, image):
    """Binary (P5) greyscale image, one byte per cell."""
    image = np.asarray(image, dtype=np.uint8)
    h, w = image.shape
    path = Path(path)
    with path.open("wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        fh.write(np.ascontiguousarray(image).tobytes())
    return path


def read_pgm(path) -> np.ndarray:
    data = Path(path).read_bytes()
    fields = []
    pos = 0
    while len(fields) < 4:
        while data[pos:pos + 1].isspace():
            pos += 1
        if data[pos:pos + 1] == b"#":
            pos = data.index(b"\n", pos) + 1
            continue
        end = pos
        while not data[end:end + 1].isspace():
            end += 1
        fields.append(data[pos:end])
        pos = end
    if fields[0] != b"P5":
        raise ValueError("not a binary PGM")
    w, h, maxval = (int(f) for f in fields[1:])
    if maxval > 255:
        raise ValueError("16-bit PGM not supported")
    pos += 1
    return np.frombuffer(data[pos:pos + w * h], dtype=np.uint8).reshape(h, w)


def takeover_image(grid: TorusGrid) -> np.ndarray:
    """0 for null fitness, 255 for a best copy."""
    return np.where(grid.cells > 0, 255, 0).astype(np.uint8)


def niching_image(grid: TorusGrid) -> np.ndarray:
    lut = np.zeros(256, dtype=np.uint8)
    for label, grey in PALETTE.items():
        lut[int(label)] = grey
    return lut[grid.cells.astype(np.uint8)]


def alpha_tag(alpha: float) -> str:
    return format(float(alpha), "g")
