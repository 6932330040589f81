# Copyright 2021 Canonical Ltd.
# See LICENSE file for licensing details.
"""
Module in charge of the 2 x n grid model

The grid G_n, its colourings, t-blocks and the strings of block symbols
whose realization interleaves colourful blocks with boring 4-blocks.
"""
from dataclasses import dataclass
from enum import Enum
import re
from typing import Any, Dict, FrozenSet, List, Sequence, Tuple

from anagram_forge import FileFormatError, PreconditionError
from anagram_forge.words import Word
import networkx as nx

BORING_WIDTH = 4

_LABEL = re.compile(r"^([ab])(\d+)$")


class Row(Enum):
    """Rows of the grid, named after their vertex letters"""

    TOP = "a"
    BOTTOM = "b"

    @property
    def index(self) -> int:
        return 0 if self is Row.TOP else 1

    @property
    def other(self) -> "Row":
        return Row.BOTTOM if self is Row.TOP else Row.TOP


@dataclass(frozen=True)
class GridVertex:
    row: Row
    column: int

    @classmethod
    def parse(cls, label: str) -> "GridVertex":
        """Parse labels such as `a0` or `b12`"""
        match = _LABEL.match(label.strip())
        if not match:
            raise FileFormatError("invalid vertex label {!r}".format(label))
        return cls(Row(match.group(1)), int(match.group(2)))

    @property
    def label(self) -> str:
        return "{}{}".format(self.row.value, self.column)

    @property
    def key(self) -> Tuple[int, int]:
        """Ordering key: column first, top before bottom"""
        return (self.column, self.row.index)

    @property
    def flat(self) -> int:
        return 2 * self.column + self.row.index

    @classmethod
    def from_flat(cls, index: int) -> "GridVertex":
        return cls(Row.TOP if index % 2 == 0 else Row.BOTTOM, index // 2)

    def __repr__(self) -> str:
        return self.label


def top(column: int) -> GridVertex:
    return GridVertex(Row.TOP, column)


def bottom(column: int) -> GridVertex:
    return GridVertex(Row.BOTTOM, column)


def neighbours(v: GridVertex, n: int) -> FrozenSet[GridVertex]:
    """
    Neighbours of v in G_n

    Raises:
        PreconditionError: if v is not a vertex of G_n
    """
    if not 0 <= v.column < n:
        raise PreconditionError("{} is not a vertex of G_{}".format(v.label, n))
    result = {GridVertex(v.row.other, v.column)}
    for column in (v.column - 1, v.column + 1):
        if 0 <= column < n:
            result.add(GridVertex(v.row, column))
    return frozenset(result)


def are_adjacent(u: GridVertex, v: GridVertex) -> bool:
    if u.column == v.column:
        return u.row is not v.row
    return u.row is v.row and abs(u.column - v.column) == 1


def grid_graph(n: int) -> nx.Graph:
    """G_n as a networkx graph with vertices labelled a<i> / b<i>"""
    graph = nx.grid_2d_graph(2, n)
    return nx.relabel_nodes(
        graph, {(r, c): "{}{}".format("ab"[r], c) for r, c in graph.nodes}
    )


def flat_adjacency(n: int) -> List[Tuple[int, ...]]:
    """Neighbour lists of G_n over flat vertex indices, sorted by vertex key"""
    graph = grid_graph(n)
    return [
        tuple(sorted(GridVertex.parse(u).flat for u in graph.neighbors(v.label)))
        for v in map(GridVertex.from_flat, range(2 * n))
    ]


@dataclass(frozen=True)
class GridColouring:
    """c-colouring of G_n given as its top (a) and bottom (b) rows"""

    n: int
    c: int
    top: Tuple[int, ...]
    bottom: Tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "top", tuple(int(x) for x in self.top))
        object.__setattr__(self, "bottom", tuple(int(x) for x in self.bottom))
        if self.n < 0 or self.c < 1:
            raise PreconditionError("need n >= 0 and c >= 1, got n={} c={}".format(self.n, self.c))
        if len(self.top) != self.n or len(self.bottom) != self.n:
            raise PreconditionError("both rows must have length n={}".format(self.n))
        for colour in self.top + self.bottom:
            if not 1 <= colour <= self.c:
                raise PreconditionError("colour {} outside [1, {}]".format(colour, self.c))

    @classmethod
    def from_flat(cls, flat: Sequence[int], c: int) -> "GridColouring":
        """Build from colours listed a0, b0, a1, b1, ..."""
        return cls(len(flat) // 2, c, tuple(flat[0::2]), tuple(flat[1::2]))

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "GridColouring":
        try:
            return cls(int(data["n"]), int(data["c"]), data["top"], data["bottom"])
        except (KeyError, TypeError, ValueError) as e:
            raise FileFormatError("malformed colouring: {}".format(e)) from e

    def to_dict(self) -> Dict[str, Any]:
        return {"n": self.n, "c": self.c, "top": list(self.top), "bottom": list(self.bottom)}

    def colour(self, v: GridVertex) -> int:
        if not 0 <= v.column < self.n:
            raise PreconditionError("{} is outside G_{}".format(v.label, self.n))
        return (self.top if v.row is Row.TOP else self.bottom)[v.column]

    def flat(self) -> Tuple[int, ...]:
        return tuple(x for pair in zip(self.top, self.bottom) for x in pair)

    def mirror(self) -> "GridColouring":
        """Left-right reflection"""
        return GridColouring(self.n, self.c, self.top[::-1], self.bottom[::-1])

    def permute_colours(self, pi: Sequence[int]) -> "GridColouring":
        """Recolour colour x as pi[x - 1]"""
        return GridColouring(
            self.n,
            self.c,
            tuple(pi[x - 1] for x in self.top),
            tuple(pi[x - 1] for x in self.bottom),
        )


@dataclass(frozen=True)
class BlockColouring:
    """Colouring of a t-block, re-indexed from column 0"""

    colouring: GridColouring

    @property
    def t(self) -> int:
        return self.colouring.n

    @classmethod
    def of(cls, c: int, top: Sequence[int], bottom: Sequence[int]) -> "BlockColouring":
        return cls(GridColouring(len(top), c, tuple(top), tuple(bottom)))


@dataclass(frozen=True)
class BlockSymbol:
    """Symbol (k, phi) with phi a colouring of a 4k-block"""

    k: int
    phi: BlockColouring

    def __post_init__(self) -> None:
        if self.k < 1:
            raise PreconditionError("block symbol needs k >= 1, got {}".format(self.k))
        if self.phi.t != 4 * self.k:
            raise PreconditionError(
                "block symbol with k={} needs width {}, got {}".format(
                    self.k, 4 * self.k, self.phi.t
                )
            )

    @property
    def label(self) -> str:
        col = self.phi.colouring
        return "{}:{}/{}".format(
            self.k, ".".join(map(str, col.top)), ".".join(map(str, col.bottom))
        )

    @property
    def sort_key(self) -> Tuple[int, Tuple[int, ...], Tuple[int, ...]]:
        return (self.k, self.phi.colouring.top, self.phi.colouring.bottom)

    def to_dict(self) -> Dict[str, Any]:
        return {"k": self.k, "phi": self.phi.colouring.to_dict()}


@dataclass(frozen=True)
class BlockString:
    """String s_1..s_m of block symbols plus the boring colouring phi*"""

    symbols: Tuple[BlockSymbol, ...]
    phi_star: BlockColouring
    ell: int
    c: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "symbols", tuple(self.symbols))
        if self.phi_star.t != BORING_WIDTH:
            raise PreconditionError(
                "phi* must colour a 4-block, got width {}".format(self.phi_star.t)
            )
        if self.ell < 1:
            raise PreconditionError("ell must be positive, got {}".format(self.ell))
        for i, symbol in enumerate(self.symbols, start=1):
            if symbol.k > self.ell:
                raise PreconditionError(
                    "symbol {} has k={} above ell={}".format(i, symbol.k, self.ell)
                )

    def __len__(self) -> int:
        return len(self.symbols)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "BlockString":
        try:
            return cls(
                symbols=tuple(
                    BlockSymbol(int(s["k"]), BlockColouring(GridColouring.from_dict(s["phi"])))
                    for s in data["symbols"]
                ),
                phi_star=BlockColouring(GridColouring.from_dict(data["phi_star"])),
                ell=int(data["ell"]),
                c=int(data["c"]),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise FileFormatError("malformed block string: {}".format(e)) from e

    def to_dict(self) -> Dict[str, Any]:
        return {
            "c": self.c,
            "ell": self.ell,
            "phi_star": self.phi_star.colouring.to_dict(),
            "symbols": [symbol.to_dict() for symbol in self.symbols],
        }

    def as_word(self) -> Word:
        """The string as a Word over its own symbol alphabet (equal k and identical phi)"""
        return Word.from_tokens([symbol.label for symbol in self.symbols])

    def alphabet(self) -> List[BlockSymbol]:
        """Distinct symbols in order of first occurrence"""
        return list(dict.fromkeys(self.symbols))


def extract_block(phi: GridColouring, i: int, j: int) -> BlockColouring:
    """
    Induced colouring of columns [i, j), re-indexed from 0

    Raises:
        PreconditionError: on a bad column range
    """
    if not 0 <= i <= j <= phi.n:
        raise PreconditionError("bad block range [{}, {}) in G_{}".format(i, j, phi.n))
    return BlockColouring(GridColouring(j - i, phi.c, phi.top[i:j], phi.bottom[i:j]))


def concat_blocks(blocks: Sequence[BlockColouring], c: int = None) -> GridColouring:
    """
    Concatenate blocks column-wise

    Args:
        blocks: Blocks sharing one colour count
        c: Colour count of the result, needed only for an empty sequence
    """
    counts = {block.colouring.c for block in blocks}
    if len(counts) > 1:
        raise PreconditionError("blocks use different colour counts {}".format(sorted(counts)))
    if counts:
        c = counts.pop()
    top_row, bottom_row = [], []
    for block in blocks:
        top_row.extend(block.colouring.top)
        bottom_row.extend(block.colouring.bottom)
    return GridColouring(len(top_row), c or 1, tuple(top_row), tuple(bottom_row))


def split_blocks(phi: GridColouring, width: int) -> List[BlockColouring]:
    """
    Split a colouring into consecutive blocks of the given width

    Raises:
        PreconditionError: if width does not divide phi.n
    """
    if width < 1 or phi.n % width:
        raise PreconditionError("width {} does not divide n={}".format(width, phi.n))
    return [extract_block(phi, i, i + width) for i in range(0, phi.n, width)]


def layout_offsets(s: BlockString) -> List[int]:
    """n_{s,i} = 4(i + k_1 + ... + k_i) for i = 0..m"""
    offsets = [0]
    total = 0
    for i, symbol in enumerate(s.symbols, start=1):
        total += symbol.k
        offsets.append(BORING_WIDTH * (i + total))
    return offsets


def colourful_range(offsets: Sequence[int], i: int) -> Tuple[int, int]:
    """Columns of colourful block H_i, i >= 1"""
    return offsets[i - 1] + BORING_WIDTH, offsets[i]


def boring_range(offsets: Sequence[int], i: int) -> Tuple[int, int]:
    """Columns of boring block Q_i, i >= 0"""
    return offsets[i], offsets[i] + BORING_WIDTH


def realize_sigma_string(s: BlockString) -> GridColouring:
    """
    Colouring of G_{n_s + 4}: boring blocks Q_0..Q_m coloured by phi*
    interleaved with colourful blocks H_1..H_m coloured by the symbols

    Raises:
        PreconditionError: if colour counts disagree
    """
    c = s.phi_star.colouring.c
    if c != s.c:
        raise PreconditionError("phi* uses {} colours but the string declares {}".format(c, s.c))
    for i, symbol in enumerate(s.symbols, start=1):
        if symbol.phi.colouring.c != c:
            raise PreconditionError(
                "symbol {} uses {} colours but phi* uses {}".format(i, symbol.phi.colouring.c, c)
            )
    blocks = [s.phi_star]
    for symbol in s.symbols:
        blocks.extend([symbol.phi, s.phi_star])
    return concat_blocks(blocks)
