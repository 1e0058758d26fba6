"""graph6 encoding plus a plain "u v" edge-list reader."""

from __future__ import annotations

from typing import Iterator, List

from .errors import ParseError
from .graph import Graph

HEADER = ">>graph6<<"


def _encode_n(n: int) -> str:
    if n <= 62:
        return chr(n + 63)
    if n <= 258047:
        return "~" + "".join(chr(((n >> s) & 63) + 63) for s in (12, 6, 0))
    return "~~" + "".join(chr(((n >> s) & 63) + 63) for s in (30, 24, 18, 12, 6, 0))


def emit_graph6(g: Graph, header: bool = False) -> str:
    """graph6 string for g (no trailing newline)."""
    out = [HEADER] if header else []
    out.append(_encode_n(g.n))
    acc = 0
    nbits = 0
    chunks = []
    for j in range(1, g.n):
        row = g.adj[j]
        for i in range(j):
            acc = (acc << 1) | (row >> i & 1)
            nbits += 1
            if nbits == 6:
                chunks.append(chr(acc + 63))
                acc = nbits = 0
    if nbits:
        chunks.append(chr((acc << (6 - nbits)) + 63))
    out.extend(chunks)
    return "".join(out)


def parse_graph6(text: str) -> Graph:
    """Decode one graph6 string; an optional header and trailing newline are allowed."""
    base = 0
    if text.startswith(HEADER):
        base = len(HEADER)
    s = text[base:].rstrip("\r\n")
    if not s:
        raise ParseError("empty graph6 string", base)
    for pos, ch in enumerate(s):
        if not 63 <= ord(ch) <= 126:
            raise ParseError(f"invalid graph6 character {ch!r}", base + pos)
    vals = [ord(ch) - 63 for ch in s]
    if vals[0] != 63:
        n, pos = vals[0], 1
    elif len(vals) >= 2 and vals[1] == 63:
        if len(vals) < 8:
            raise ParseError("truncated 8-byte vertex count", base + len(s))
        n = 0
        for v in vals[2:8]:
            n = (n << 6) | v
        pos = 8
    else:
        if len(vals) < 4:
            raise ParseError("truncated 4-byte vertex count", base + len(s))
        n = (vals[1] << 12) | (vals[2] << 6) | vals[3]
        pos = 4
    total = n * (n - 1) // 2
    need = (total + 5) // 6
    body = vals[pos:]
    if len(body) != need:
        off = base + pos + min(len(body), need)
        raise ParseError(f"expected {need} data bytes for n={n}, got {len(body)}", off)
    pad = need * 6 - total
    if pad and body[-1] & ((1 << pad) - 1):
        raise ParseError("non-zero padding bits", base + len(s) - 1)
    masks = [0] * n
    b = 0
    for j in range(1, n):
        for i in range(j):
            if body[b // 6] >> (5 - b % 6) & 1:
                masks[i] |= 1 << j
                masks[j] |= 1 << i
            b += 1
    return Graph.from_masks(masks)


def parse_graph6_stream(text: str) -> Iterator[Graph]:
    """Graphs from newline-delimited graph6 text; blank lines are skipped."""
    offset = 0
    for line in text.splitlines(keepends=True):
        stripped = line.strip()
        if stripped and stripped != HEADER:
            try:
                yield parse_graph6(stripped)
            except ParseError as exc:
                raise ParseError(str(exc).rsplit(" (byte offset", 1)[0], offset + exc.offset) from None
        offset += len(line)


def parse_edge_list(text: str, n: int | None = None) -> Graph:
    """Read one "u v" pair per line (0-based); ``#`` starts a comment.

    A line holding a single integer declares an isolated vertex, which lets the
    format carry vertices without edges.  ``n`` overrides the inferred order.
    """
    edges: List[tuple] = []
    top = -1
    offset = 0
    for line in text.splitlines(keepends=True):
        content = line.split("#", 1)[0].split()
        if content:
            try:
                nums = [int(tok) for tok in content]
            except ValueError:
                raise ParseError("non-integer token in edge list", offset) from None
            if len(nums) > 2 or min(nums) < 0:
                raise ParseError("expected 'u v' with non-negative integers", offset)
            if len(nums) == 2:
                if nums[0] == nums[1]:
                    raise ParseError("self-loop in edge list", offset)
                edges.append((nums[0], nums[1]))
            top = max(top, *nums)
        offset += len(line)
    order = top + 1 if n is None else n
    if order <= top:
        raise ParseError(f"vertex {top} out of range for n={order}", 0)
    return Graph(order, edges)


def emit_edge_list(g: Graph) -> str:
    lines = [f"{u} {v}" for u, v in g.edges()]
    covered = {x for e in g.edges() for x in e}
    lines.extend(str(v) for v in range(g.n) if v not in covered)
    return "\n".join(lines) + ("\n" if lines else "")
