import csv
import io
import math
from fractions import Fraction
from typing import Iterable, List, Sequence, TextIO, Tuple

import numpy as np

from .billiards import BaseTile
from .exceptions import IsodrumError
from .tori import Lattice, lattice_from_rows, standard_lattice


def parse_fraction(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise IsodrumError(f"Invalid rational number {text!r}")


def parse_numbers(text: str, count: int) -> List[float]:
    parts = [p for p in text.split(",") if p.strip()]
    if len(parts) != count:
        raise IsodrumError(f"Expected {count} comma-separated numbers, got {text!r}")
    try:
        return [float(parse_fraction(p)) for p in parts]
    except IsodrumError:
        raise IsodrumError(f"Invalid number list {text!r}")


def parse_base(spec: str) -> BaseTile:
    """Base tile from ``half-square[:d]``, ``rectangle:w,h``, ``triangle:x1,y1,x2,y2,x3,y3``,
    ``angles:a1,a2,a3`` (multiples of pi) or ``scalene``."""
    kind, _, args = spec.strip().partition(":")
    if kind == "half-square":
        return BaseTile.half_square(parse_numbers(args, 1)[0] if args else 1)
    if kind == "rectangle":
        return BaseTile.rectangle(*parse_numbers(args, 2))
    if kind == "triangle":
        v = parse_numbers(args, 6)
        return BaseTile.triangle([v[0:2], v[2:4], v[4:6]])
    if kind == "angles":
        parts = args.split(",")
        if len(parts) != 3:
            raise IsodrumError(f"Expected three angles, got {args!r}")
        return BaseTile.from_angles(*(parse_fraction(p) for p in parts))
    if kind == "scalene" and not args:
        return BaseTile.scalene()
    raise IsodrumError(f"Invalid base tile {spec!r}")


def parse_space(text: str) -> Tuple[int, int]:
    """``"n,q"`` for PG(n, q)."""
    try:
        n, q = (int(p) for p in text.split(","))
    except ValueError:
        raise IsodrumError(f"Invalid space {text!r}: expected n,q")
    if n < 1:
        raise IsodrumError(f"Invalid dimension {n}: must be at least 1")
    return n, q


def write_spectrum_csv(stream: TextIO, normalized: Iterable[float]) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["index", "eigenvalue_pi2_d2"])
    for i, value in enumerate(normalized, start=1):
        writer.writerow([i, repr(float(value))])


def read_spectrum_csv(stream: TextIO) -> np.ndarray:
    from .serializer import SpectrumRowSerializer

    values = []
    for row in csv.DictReader(stream):
        serializer = SpectrumRowSerializer(data=row)
        if not serializer.is_valid():
            raise IsodrumError(f"Invalid spectrum row {row}: {serializer.errors}")
        data = serializer.validated_data
        if data["index"] != len(values) + 1:
            raise IsodrumError(f"Spectrum rows out of order at index {data['index']}")
        values.append(data["eigenvalue_pi2_d2"])
    return np.array(values)


def compare_spectra(first: Sequence[float], second: Sequence[float], rel_tol: float) -> List[Tuple[int, float, float, float]]:
    """Per-mode ``(index, a, b, relative gap)`` over the common length; mismatching lengths are an error."""
    if len(first) != len(second):
        raise IsodrumError(f"Spectra have {len(first)} and {len(second)} values")
    rows = []
    for i, (a, b) in enumerate(zip(first, second), start=1):
        gap = abs(a - b) / max(abs(a), abs(b), 1e-300)
        rows.append((i, float(a), float(b), gap))
    return rows


def write_field_csv(stream: TextIO, image: np.ndarray) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    for row in image:
        writer.writerow(["nan" if math.isnan(v) else repr(float(v)) for v in row])


def write_pgm(stream: TextIO, image: np.ndarray) -> None:
    """Plain PGM; zero maps to 128, the largest magnitude to 0 or 255, outside the domain to 0."""
    height, width = image.shape
    peak = np.nanmax(np.abs(image)) if np.isfinite(image).any() else 0.0
    scaled = np.zeros(image.shape, dtype=int)
    inside = np.isfinite(image)
    if peak > 0:
        scaled[inside] = np.clip(np.rint(128 + 127 * image[inside] / peak), 1, 255).astype(int)
    else:
        scaled[inside] = 128
    stream.write(f"P2\n{width} {height}\n255\n")
    for row in scaled:
        stream.write(" ".join(str(v) for v in row) + "\n")


def read_lattice(text: str) -> Lattice:
    """A lattice file (rank line, scale line, then one integer generator row per line) or a standard name."""
    from .serializer import LatticeFileSerializer

    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise IsodrumError("Empty lattice file")
    try:
        rows = [[int(x) for x in ln.replace(",", " ").split()] for ln in lines[2:]]
        data = {"rank": int(lines[0]), "scale": int(lines[1]) if len(lines) > 1 else 0, "rows": rows}
    except ValueError:
        raise IsodrumError("Invalid lattice file: expected integers")
    serializer = LatticeFileSerializer(data=data)
    if not serializer.is_valid():
        raise IsodrumError(f"Invalid lattice file: {serializer.errors}")
    data = serializer.validated_data
    return lattice_from_rows(data["rank"], data["scale"], data["rows"])


def load_lattice(name_or_path: str) -> Lattice:
    try:
        return standard_lattice(name_or_path)
    except IsodrumError:
        pass
    try:
        with open(name_or_path, encoding="utf-8") as fh:
            return read_lattice(fh.read())
    except OSError as exc:
        raise IsodrumError(f"Unknown lattice {name_or_path!r}: {exc}")


def render_table(headers: Sequence[str], rows: Iterable[Sequence[object]]) -> str:
    rows = [[str(c) for c in row] for row in rows]
    widths = [len(h) for h in headers]
    for row in rows:
        widths = [max(w, len(c)) for w, c in zip(widths, row)]
    out = io.StringIO()
    out.write("  ".join(h.ljust(w) for h, w in zip(headers, widths)).rstrip() + "\n")
    out.write("  ".join("-" * w for w in widths) + "\n")
    for row in rows:
        out.write("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() + "\n")
    return out.getvalue()
