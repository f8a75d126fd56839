"""Pajek reader/writer.

The on-disk format that keeps big transaction graphs small: addresses are
replaced by 1-based integer indices, so arc lines are a few bytes instead
of two 40-character hex strings. Only the subset we emit is supported:

    *Vertices N
    1 "label"          (optional, exactly one line per vertex, in order)
    ...
    *Arcs
    s d                (one line per arc, 1-based)
    *Edges             (accepted on read; each line adds both directions)
    a b

Files are UTF-8 with LF line endings. The writer orders arc lines
lexicographically so output is byte-stable for a given graph.
"""

from __future__ import annotations

from typing import IO, Iterator

from .graph import DirectedGraph


class PajekParseError(ValueError):
    """Malformed Pajek input; `line` is 1-based."""

    def __init__(self, message: str, line: int):
        super().__init__(f"{message}, line {line}")
        self.line = line


def write_pajek(graph: DirectedGraph, stream: IO[str], include_labels: bool = False) -> None:
    """Serialize `graph` to `stream`.

    With `include_labels` the address table is written as vertex lines;
    every node must then carry a label. Labels are off by default: that is
    where the format's space saving comes from.
    """
    n = graph.node_count
    stream.write(f"*Vertices {n}\n")
    if include_labels:
        if not graph.has_labels():
            raise ValueError("cannot write labels: graph has unlabeled nodes")
        for node in range(n):
            label = graph.address_of(node)
            assert label is not None
            if '"' in label or "\n" in label or "\r" in label:
                raise ValueError(f"label {label!r} contains characters Pajek cannot quote")
            stream.write(f'{node + 1} "{label}"\n')
    stream.write("*Arcs\n")
    for src, dst in sorted(graph.arcs()):
        stream.write(f"{src + 1} {dst + 1}\n")


def dumps(graph: DirectedGraph, include_labels: bool = False) -> str:
    import io

    buf = io.StringIO()
    write_pajek(graph, buf, include_labels=include_labels)
    return buf.getvalue()


def _parse_int(token: str, what: str, lineno: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise PajekParseError(f"expected integer {what}, got {token!r}", lineno) from None


def _parse_label_line(line: str, lineno: int) -> tuple[int, str]:
    parts = line.split(None, 1)
    if len(parts) != 2:
        raise PajekParseError("vertex line must be '<index> \"<label>\"'", lineno)
    index = _parse_int(parts[0], "vertex index", lineno)
    raw = parts[1].strip()
    if len(raw) >= 2 and raw[0] == '"' and raw[-1] == '"':
        label = raw[1:-1]
    else:
        label = raw  # tolerate unquoted labels from other tools
    if not label:
        raise PajekParseError("empty vertex label", lineno)
    return index, label


def read_pajek(stream: IO[str]) -> DirectedGraph:
    """Parse a Pajek document into a DirectedGraph.

    `*Edges` sections are treated as symmetric arcs. Raises
    PajekParseError (with the offending line number) on malformed input.
    """
    lines: Iterator[tuple[int, str]] = (
        (i, line.rstrip("\n").rstrip("\r")) for i, line in enumerate(stream, start=1)
    )

    lineno, header = next(lines, (0, None))
    if header is None:
        raise PajekParseError("empty stream, expected '*Vertices N' header", 1)
    parts = header.split()
    if len(parts) != 2 or parts[0].lower() != "*vertices":
        raise PajekParseError(f"expected '*Vertices N' header, got {header!r}", lineno)
    n = _parse_int(parts[1], "vertex count", lineno)
    if n < 0:
        raise PajekParseError(f"vertex count must be >= 0, got {n}", lineno)

    graph = DirectedGraph.with_node_count(n)
    labels: dict[int, str] = {}
    section = "vertices"

    def apply_labels() -> None:
        if not labels:
            return
        if len(labels) != n or set(labels) != set(range(1, n + 1)):
            raise PajekParseError(
                f"labels must cover vertices 1..{n} exactly once, got {len(labels)} labels",
                lineno,
            )
        for index in range(1, n + 1):
            label = labels[index]
            if label in graph._addr_to_id:
                raise PajekParseError(f"duplicate label {label!r}", lineno)
            graph._id_to_addr[index - 1] = label
            graph._addr_to_id[label] = index - 1

    for lineno, line in lines:
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("*"):
            keyword = stripped.split()[0].lower()
            if keyword == "*arcs":
                if section == "vertices":
                    apply_labels()
                section = "arcs"
            elif keyword == "*edges":
                if section == "vertices":
                    apply_labels()
                section = "edges"
            else:
                raise PajekParseError(f"unsupported section {stripped!r}", lineno)
            continue
        if section == "vertices":
            index, label = _parse_label_line(stripped, lineno)
            if not (1 <= index <= n):
                raise PajekParseError(f"index out of range ({index} of {n})", lineno)
            if index in labels:
                raise PajekParseError(f"vertex {index} labeled twice", lineno)
            labels[index] = label
        else:
            parts = stripped.split()
            if len(parts) != 2:
                raise PajekParseError(f"arc line must be '<src> <dst>', got {stripped!r}", lineno)
            a = _parse_int(parts[0], "arc endpoint", lineno)
            b = _parse_int(parts[1], "arc endpoint", lineno)
            if not (1 <= a <= n and 1 <= b <= n):
                raise PajekParseError("index out of range", lineno)
            graph.add_arc(a - 1, b - 1)
            if section == "edges" and a != b:
                graph.add_arc(b - 1, a - 1)

    if section == "vertices":
        apply_labels()
        if n > 0 or labels:
            # a well-formed document always carries an *Arcs or *Edges marker
            raise PajekParseError("missing '*Arcs' or '*Edges' section", lineno)
    return graph


def loads(text: str) -> DirectedGraph:
    import io

    return read_pajek(io.StringIO(text))
