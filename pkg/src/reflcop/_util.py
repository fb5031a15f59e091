"""Small shared helpers: broadcasting and CSV formatting."""

from __future__ import annotations

from typing import Iterable

import numpy as np


def broadcast_floats(*args: object) -> tuple[list[np.ndarray], bool]:
    """Broadcast inputs to common-shape float arrays.

    Returns the arrays plus a flag telling whether every input was a
    scalar, so callers can unwrap the result symmetrically.
    """
    scalar = all(np.ndim(a) == 0 for a in args)
    arrays = np.broadcast_arrays(*[np.asarray(a, dtype=float) for a in args])
    return list(arrays), scalar


def maybe_scalar(out: np.ndarray, scalar: bool):
    return float(out[()]) if scalar else out


def fmt17(x: float) -> str:
    """Render a float with 17 significant digits (round-trip exact)."""
    return format(float(x), ".17g")


def write_csv(path, header: Iterable[str], rows: Iterable[Iterable[object]]) -> None:
    """Write a CSV file with LF line endings, UTF-8, '.' decimal marks.

    Floats are rendered with 17 significant digits so a re-run of the
    producing command yields a byte-identical file.
    """
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(
                ",".join(
                    fmt17(item) if isinstance(item, float) else str(item)
                    for item in row
                )
                + "\n"
            )
