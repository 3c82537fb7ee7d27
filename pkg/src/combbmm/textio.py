"""Plain-text file formats.

Matrix, dense: ``rows cols`` then one line of 0/1 characters per row.
Matrix, sparse: ``rows cols nnz`` then one ``r c`` line per 1-entry.
Graph: three matrix files for ``A`` (X x Y), ``B`` (Y x Z) and ``C`` (X x Z).
Triangles: one ``x y z`` line each.
Decomposition dump: ``PIECES k eps_num/eps_den d``; per piece a
``PIECE cert |xs| |ys| [|zs|]`` line, one index line per part and the piece
matrices in the sparse format.
3-SUM: one integer per line.
All files are ASCII with ``\\n`` line endings.
"""

from __future__ import annotations

from fractions import Fraction
from pathlib import Path

import numpy as np

from ._rational import as_fraction, format_fraction
from .bitmatrix import BoolMatrix, TripartiteGraph
from .decompose import ABDecompPiece, ADecompPiece

__all__ = [
    "FormatError",
    "format_matrix",
    "parse_matrix",
    "read_matrix",
    "write_matrix",
    "read_graph",
    "write_graph",
    "graph_paths",
    "format_triangles",
    "format_decomposition",
    "parse_decomposition",
    "read_values",
    "format_values",
]


class FormatError(ValueError):
    """Malformed input file."""


def format_matrix(M: BoolMatrix, sparse: bool = False) -> str:
    if sparse:
        r, c = np.nonzero(M.dense)
        lines = [f"{M.rows} {M.cols} {r.size}"]
        lines += [f"{a} {b}" for a, b in zip(r.tolist(), c.tolist())]
    else:
        lines = [f"{M.rows} {M.cols}"]
        digits = np.where(M.dense, ord("1"), ord("0")).astype(np.uint8)
        lines += [row.tobytes().decode("ascii") for row in digits]
    return "\n".join(lines) + "\n"


def _ints(line: str, count: int, what: str) -> list[int]:
    parts = line.split()
    if len(parts) != count:
        raise FormatError(f"expected {count} integers in {what}, got {line!r}")
    try:
        return [int(p) for p in parts]
    except ValueError as exc:
        raise FormatError(f"non-integer in {what}: {line!r}") from exc


def _parse_sparse_lines(lines, pos: int):
    """Sparse matrix starting at ``lines[pos]``; returns (matrix, next pos)."""
    if pos >= len(lines):
        raise FormatError("missing sparse matrix header")
    rows, cols, nnz = _ints(lines[pos], 3, "sparse header")
    if min(rows, cols, nnz) < 0:
        raise FormatError("negative size in sparse header")
    if pos + 1 + nnz > len(lines):
        raise FormatError("sparse matrix is truncated")
    D = np.zeros((rows, cols), dtype=bool)
    for k in range(nnz):
        r, c = _ints(lines[pos + 1 + k], 2, "sparse entry")
        if not (0 <= r < rows and 0 <= c < cols):
            raise FormatError(f"entry ({r}, {c}) outside {rows}x{cols}")
        D[r, c] = True
    return BoolMatrix.from_dense(D), pos + 1 + nnz


def parse_matrix(text: str) -> BoolMatrix:
    lines = [ln for ln in text.split("\n") if ln.strip()]
    if not lines:
        raise FormatError("empty matrix file")
    head = lines[0].split()
    if len(head) == 3:
        M, end = _parse_sparse_lines(lines, 0)
        if end != len(lines):
            raise FormatError("trailing lines after sparse matrix")
        return M
    rows, cols = _ints(lines[0], 2, "matrix header")
    body = lines[1:]
    if len(body) != rows:
        raise FormatError(f"expected {rows} rows, found {len(body)}")
    D = np.zeros((rows, cols), dtype=bool)
    for i, row in enumerate(body):
        row = row.strip()
        if len(row) != cols or set(row) - {"0", "1"}:
            raise FormatError(f"row {i} is not {cols} characters of 0/1")
        D[i] = np.frombuffer(row.encode("ascii"), dtype=np.uint8) == ord("1")
    return BoolMatrix.from_dense(D)


def read_matrix(path) -> BoolMatrix:
    return parse_matrix(Path(path).read_text(encoding="ascii"))


def write_matrix(M: BoolMatrix, path, sparse: bool = False) -> None:
    Path(path).write_text(format_matrix(M, sparse), encoding="ascii", newline="\n")


def graph_paths(prefix) -> tuple[Path, Path, Path]:
    prefix = str(prefix)
    return Path(prefix + ".A"), Path(prefix + ".B"), Path(prefix + ".C")


def write_graph(G: TripartiteGraph, prefix, sparse: bool = False) -> None:
    for M, p in zip((G.A, G.B, G.C), graph_paths(prefix)):
        write_matrix(M, p, sparse)


def read_graph(a_path, b_path=None, c_path=None) -> TripartiteGraph:
    """Three matrix files, or a single prefix ``p`` meaning ``p.A p.B p.C``."""
    if b_path is None and c_path is None:
        a_path, b_path, c_path = graph_paths(a_path)
    return TripartiteGraph(read_matrix(a_path), read_matrix(b_path), read_matrix(c_path))


def format_triangles(tri: np.ndarray) -> str:
    return "".join(f"{x} {y} {z}\n" for x, y, z in np.asarray(tri).tolist())


def _index_line(idx) -> str:
    return " ".join(str(int(v)) for v in idx)


def format_decomposition(pieces, epsilon, d: int) -> str:
    """Dump of A-decomposition or AB-decomposition pieces (global labels)."""
    out = [f"PIECES {len(pieces)} {format_fraction(as_fraction(epsilon))} {d}"]
    for p in pieces:
        if isinstance(p, ABDecompPiece):
            out.append(f"PIECE {p.cert} {p.xs.size} {p.ys.size} {p.zs.size}")
            out += [_index_line(p.xs), _index_line(p.ys), _index_line(p.zs)]
            out.append(format_matrix(p.A_part, sparse=True).rstrip("\n"))
            out.append(format_matrix(p.B_part, sparse=True).rstrip("\n"))
        elif isinstance(p, ADecompPiece):
            out.append(f"PIECE {p.cert} {p.rows.size} {p.cols.size}")
            out += [_index_line(p.rows), _index_line(p.cols)]
            out.append(format_matrix(p.matrix, sparse=True).rstrip("\n"))
        else:
            raise TypeError(f"not a decomposition piece: {p!r}")
    return "\n".join(out) + "\n"


def _index_array(line: str, size: int) -> np.ndarray:
    try:
        arr = np.array([int(v) for v in line.split()], dtype=np.int64)
    except ValueError as exc:
        raise FormatError(f"bad index line {line!r}") from exc
    if arr.size != size:
        raise FormatError(f"index line has {arr.size} entries, header says {size}")
    if arr.size > 1 and np.any(np.diff(arr) <= 0):
        raise FormatError("index line must be strictly increasing")
    return arr


def parse_decomposition(text: str):
    """Returns ``(kind, epsilon, d, pieces)`` with kind ``"A"`` or ``"AB"``.

    Index lines may be empty, so lines are consumed positionally.
    """
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines or not lines[0].startswith("PIECES "):
        raise FormatError("missing PIECES header")
    head = lines[0].split()
    if len(head) != 4:
        raise FormatError(f"bad PIECES header {lines[0]!r}")
    try:
        k, epsilon, d = int(head[1]), Fraction(head[2]), int(head[3])
    except (ValueError, ZeroDivisionError) as exc:
        raise FormatError(f"bad PIECES header {lines[0]!r}") from exc
    pieces = []
    kind = None
    pos = 1
    for _ in range(k):
        if pos >= len(lines):
            raise FormatError("fewer pieces than announced")
        parts = lines[pos].split()
        if not parts or parts[0] != "PIECE" or len(parts) not in (4, 5):
            raise FormatError(f"bad PIECE line {lines[pos]!r}")
        cert = parts[1]
        try:
            sizes = [int(v) for v in parts[2:]]
        except ValueError as exc:
            raise FormatError(f"bad PIECE line {lines[pos]!r}") from exc
        this = "AB" if len(sizes) == 3 else "A"
        if kind is not None and this != kind:
            raise FormatError("mixed piece kinds in one dump")
        kind = this
        pos += 1
        if pos + len(sizes) > len(lines):
            raise FormatError("truncated index lines")
        idx = [_index_array(lines[pos + i], s) for i, s in enumerate(sizes)]
        pos += len(sizes)
        mats = []
        for shape in ([(sizes[0], sizes[1]), (sizes[1], sizes[2])] if this == "AB"
                      else [(sizes[0], sizes[1])]):
            M, pos = _parse_sparse_lines(lines, pos)
            if M.shape != shape:
                raise FormatError(f"piece matrix is {M.shape}, expected {shape}")
            mats.append(M)
        if this == "AB":
            xs, ys, zs = idx
            pieces.append(ABDecompPiece(xs, ys, zs, mats[0].with_labels(xs, ys),
                                        mats[1].with_labels(ys, zs), cert))
        else:
            rows, cols = idx
            pieces.append(ADecompPiece(rows, cols, mats[0].with_labels(rows, cols), cert))
    if pos != len(lines):
        raise FormatError("trailing lines after the last piece")
    return kind or "A", epsilon, d, pieces


def read_values(path) -> list[int]:
    vals = []
    for ln in Path(path).read_text(encoding="ascii").split("\n"):
        if ln.strip():
            try:
                vals.append(int(ln))
            except ValueError as exc:
                raise FormatError(f"not an integer: {ln!r}") from exc
    return vals


def format_values(values) -> str:
    return "".join(f"{int(v)}\n" for v in values)
