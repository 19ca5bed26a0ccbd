"""Reading and writing reaction-network instances.

Native format (UTF-8, whitespace-delimited, '#' starts a comment line):

    n m
    pi_1 ... pi_n          (one value per line)
    u v w                  (m lines; 1-based u < v; w = -L_uv = K_uv*pi_v > 0)

The edge list describes the symmetric Laplacian, so the resulting rate
matrix satisfies all axioms by construction.  A second reader accepts raw
directed triples "u v K_uv" (both orientations listed) followed by the same
pi block, and passes through full validation.
"""

from __future__ import annotations

import io

import numpy as np

from .errors import ParseError
from .model import RateConstantMatrix, from_edge_weights, to_laplacian, validate


def _tokens(text: str):
    """Yield (lineno, fields) for non-comment, non-blank lines."""
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line.split()


def _parse_common(text: str):
    lines = _tokens(text)
    try:
        lineno, head = next(lines)
    except StopIteration:
        raise ParseError(0, "empty instance file") from None
    if len(head) != 2:
        raise ParseError(lineno, f"expected 'n m' header, got {' '.join(head)!r}")
    try:
        n, m = int(head[0]), int(head[1])
    except ValueError:
        raise ParseError(lineno, "header fields must be integers") from None
    if n < 1 or m < 0:
        raise ParseError(lineno, f"bad sizes n={n}, m={m}")
    pi = np.empty(n, dtype=np.float64)
    for i in range(n):
        try:
            lineno, fields = next(lines)
        except StopIteration:
            raise ParseError(lineno, f"expected {n} pi lines, found {i}") from None
        if len(fields) != 1:
            raise ParseError(lineno, f"expected one pi value, got {len(fields)} fields")
        try:
            pi[i] = float(fields[0])
        except ValueError:
            raise ParseError(lineno, f"bad pi value {fields[0]!r}") from None
    triples = []
    for e in range(m):
        try:
            lineno, fields = next(lines)
        except StopIteration:
            raise ParseError(lineno, f"expected {m} edge lines, found {e}") from None
        if len(fields) != 3:
            raise ParseError(lineno, "edge lines must be 'u v value'")
        try:
            u, v, w = int(fields[0]), int(fields[1]), float(fields[2])
        except ValueError:
            raise ParseError(lineno, f"bad edge line {' '.join(fields)!r}") from None
        if not (1 <= u <= n and 1 <= v <= n):
            raise ParseError(lineno, f"edge endpoint outside 1..{n}")
        triples.append((lineno, u - 1, v - 1, w))
    return n, pi, triples


def read_instance(path_or_text, db_tol: float = 1e-9) -> RateConstantMatrix:
    """Read the native symmetric-edge format and build a validated matrix."""
    text = _read_text(path_or_text)
    n, pi, triples = _parse_common(text)
    edges = []
    for lineno, u, v, w in triples:
        if u == v:
            raise ParseError(lineno, "self-loops are not allowed")
        if not u < v:
            raise ParseError(lineno, "native edges require u < v")
        if not w > 0.0:
            raise ParseError(lineno, f"edge weight {w!r} must be > 0")
        edges.append((u, v, w))
    return from_edge_weights(n, edges, pi, db_tol=db_tol)


def read_raw_k(path_or_text, db_tol: float = 1e-9) -> RateConstantMatrix:
    """Read directed 'u v K_uv' triples and run full validation on them."""
    text = _read_text(path_or_text)
    n, pi, triples = _parse_common(text)
    return validate(n, [(u, v, w) for _, u, v, w in triples], pi, db_tol=db_tol)


def write_instance(K: RateConstantMatrix, path, header_lines=()) -> None:
    """Write the native format (deterministic: upper-triangle, sorted)."""
    L = to_laplacian(K)
    coo = L.off_diag.tocoo()
    mask = coo.row < coo.col
    order = np.lexsort((coo.col[mask], coo.row[mask]))
    rows, cols = coo.row[mask][order], coo.col[mask][order]
    weights = -coo.data[mask][order]
    buf = io.StringIO()
    for line in header_lines:
        buf.write(f"# {line}\n")
    buf.write(f"{K.n} {len(rows)}\n")
    for v in K.pi:
        buf.write(f"{float(v)!r}\n")
    for u, v, w in zip(rows, cols, weights):
        buf.write(f"{u + 1} {v + 1} {float(w)!r}\n")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(buf.getvalue())


def _read_text(path_or_text) -> str:
    text = str(path_or_text)
    if "\n" in text:
        return text
    with open(text, "r", encoding="utf-8") as fh:
        return fh.read()
