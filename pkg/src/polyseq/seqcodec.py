"""Build and parse the unified target sequence.

A target sequence lays out one referred object as
``[BOS, box-TL, box-BR, poly-1 vertices..., SEP, poly-2 vertices..., EOS]``
where every coordinate-bearing position is a COO token holding a continuous
normalized (x, y) pair.  The last polygon is terminated by EOS alone; SEP
only ever separates two polygons.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .errors import MalformedSequence
from .geometry import Box, MultiPolygon, Polygon

logger = logging.getLogger(__name__)

# a polygon run must reach this many vertices before SEP/EOS may close it
MIN_POLYGON_RUN = 3


class TokenKind(enum.Enum):
    BOS = "BOS"
    EOS = "EOS"
    SEP = "SEP"
    COO = "COO"


@dataclass(frozen=True)
class Token:
    kind: TokenKind
    coord: Optional[tuple[float, float]] = None

    def __post_init__(self):
        if self.kind is TokenKind.COO:
            if self.coord is None:
                raise ValueError("COO token needs a coordinate pair")
            x, y = self.coord
            if not (math.isfinite(x) and math.isfinite(y)):
                raise ValueError("COO coordinate is not finite")
            if not (0.0 <= x <= 1.0 and 0.0 <= y <= 1.0):
                raise ValueError(f"COO coordinate ({x}, {y}) outside [0, 1]")
            object.__setattr__(self, "coord", (float(x), float(y)))
        elif self.coord is not None:
            raise ValueError(f"{self.kind.value} token must not carry a coordinate")


def bos() -> Token:
    return Token(TokenKind.BOS)


def eos() -> Token:
    return Token(TokenKind.EOS)


def sep() -> Token:
    return Token(TokenKind.SEP)


def coo(x: float, y: float) -> Token:
    return Token(TokenKind.COO, (x, y))


@dataclass(frozen=True)
class TokenSequence:
    """Ordered token list; grammar validity is checked by the codec functions."""

    tokens: tuple[Token, ...]

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))

    def __len__(self) -> int:
        return len(self.tokens)


def encode_target(box: Box, mp: MultiPolygon) -> TokenSequence:
    """Lay out a box and its polygons as one target sequence.

    Polygons are emitted in the canonical order (ascending squared distance
    of their start vertex from the origin), re-sorting defensively if the
    input ordering disagrees.
    """
    polys = sorted(
        mp.polygons,
        key=lambda p: (
            p.vertices[0][0] ** 2 + p.vertices[0][1] ** 2,
            p.vertices[0][1],
            p.vertices[0][0],
        ),
    )
    tokens: list[Token] = [bos(), coo(box.x1, box.y1), coo(box.x2, box.y2)]
    for i, poly in enumerate(polys):
        if i > 0:
            tokens.append(sep())
        tokens.extend(coo(x, y) for x, y in poly.vertices)
    tokens.append(eos())
    return TokenSequence(tuple(tokens))


def _allowed_after(box_seen: int, run_len: int, in_sequence: bool) -> set[TokenKind]:
    """Token kinds that keep a (BOS-consumed) prefix completable."""
    if not in_sequence:
        return {TokenKind.BOS}
    if box_seen < 2 or run_len < MIN_POLYGON_RUN:
        return {TokenKind.COO}
    return {TokenKind.COO, TokenKind.SEP, TokenKind.EOS}


def validate_prefix(partial: TokenSequence) -> set[TokenKind]:
    """Return the token kinds that may legally extend ``partial``.

    The prefix must begin with BOS.  Raises MalformedSequence (with the
    offending position) for prefixes that are already invalid; a prefix that
    ends in EOS yields the empty set.
    """
    if not partial.tokens:
        raise MalformedSequence(0, "empty prefix; expected BOS")
    box_seen = 0
    run_len = 0
    in_sequence = False
    done = False
    for i, tok in enumerate(partial.tokens):
        if done:
            raise MalformedSequence(i, "token after EOS")
        allowed = _allowed_after(box_seen, run_len, in_sequence)
        if tok.kind not in allowed:
            names = "/".join(sorted(k.value for k in allowed))
            raise MalformedSequence(i, f"{tok.kind.value} not allowed; expected {names}")
        if tok.kind is TokenKind.BOS:
            in_sequence = True
        elif tok.kind is TokenKind.COO:
            if box_seen < 2:
                box_seen += 1
            else:
                run_len += 1
        elif tok.kind is TokenKind.SEP:
            run_len = 0
        elif tok.kind is TokenKind.EOS:
            done = True
    if done:
        return set()
    return _allowed_after(box_seen, run_len, in_sequence)


def decode_sequence(ts: TokenSequence) -> tuple[Box, MultiPolygon]:
    """Parse a complete token sequence back into (box, polygons).

    Exact inverse of encode_target on canonical inputs.  Box corners are
    taken verbatim from tokens 1-2; if a predicted pair is out of order it
    is sorted componentwise and a warning is logged.
    """
    remaining = validate_prefix(ts)
    last = len(ts.tokens) - 1
    if remaining:
        if TokenKind.EOS in remaining:
            raise MalformedSequence(last + 1, "sequence does not end with EOS")
        raise MalformedSequence(
            last + 1, "incomplete sequence; current polygon run is too short"
        )

    corner_a = ts.tokens[1].coord
    corner_b = ts.tokens[2].coord
    x1, x2 = min(corner_a[0], corner_b[0]), max(corner_a[0], corner_b[0])
    y1, y2 = min(corner_a[1], corner_b[1]), max(corner_a[1], corner_b[1])
    if (x1, y1) != corner_a or (x2, y2) != corner_b:
        logger.warning("box corners out of order; sorted componentwise")
    box = Box(x1, y1, x2, y2)

    polygons: list[Polygon] = []
    run: list[tuple[float, float]] = []
    for tok in ts.tokens[3:-1]:
        if tok.kind is TokenKind.COO:
            run.append(tok.coord)
        else:  # SEP
            polygons.append(Polygon(tuple(run)))
            run = []
    polygons.append(Polygon(tuple(run)))
    return box, MultiPolygon(tuple(polygons))


def format_tokens(ts: TokenSequence) -> str:
    """Serialize tokens to the one-per-line debug format (6-decimal coords)."""
    lines = []
    for tok in ts.tokens:
        if tok.kind is TokenKind.COO:
            lines.append(f"COO {tok.coord[0]:.6f} {tok.coord[1]:.6f}")
        else:
            lines.append(tok.kind.value)
    return "\n".join(lines) + "\n"


def parse_tokens(text: str) -> TokenSequence:
    """Inverse of format_tokens; raises MalformedSequence on bad lines."""
    tokens: list[Token] = []
    for i, line in enumerate(text.splitlines()):
        line = line.strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] in ("BOS", "EOS", "SEP") and len(parts) == 1:
            tokens.append(Token(TokenKind[parts[0]]))
        elif parts[0] == "COO" and len(parts) == 3:
            try:
                tokens.append(coo(float(parts[1]), float(parts[2])))
            except ValueError as exc:
                raise MalformedSequence(i, f"bad COO line: {exc}") from exc
        else:
            raise MalformedSequence(i, f"unrecognized token line {line!r}")
    return TokenSequence(tuple(tokens))
