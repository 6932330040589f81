# Copyright 2021 Canonical Ltd.
# See LICENSE file for licensing details.
"""
Module in charge of checking colourings against paths

Simple-path enumeration in G_n, anagram-free colouring verification and
exhaustive searches for the anagram-free chromatic number of small grids
and paths.
"""
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
import itertools
import logging
from typing import Any, Callable, Dict, Iterator, List, Optional, Sequence, Tuple

from anagram_forge import PreconditionError
from anagram_forge.files import Checkpoint
from anagram_forge.gridmodel import (
    are_adjacent,
    BlockColouring,
    BlockString,
    BlockSymbol,
    concat_blocks,
    flat_adjacency,
    GridColouring,
    GridVertex,
    realize_sigma_string,
)
from anagram_forge.words import Alphabet, longest_anagram_free, Word
import numpy as np

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GridPath:
    """Simple path given by its vertex sequence"""

    vertices: Tuple[GridVertex, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "vertices", tuple(self.vertices))
        if not self.vertices:
            raise PreconditionError("a path needs at least one vertex")
        if len(set(self.vertices)) != len(self.vertices):
            raise PreconditionError("path vertices must be distinct")
        for i, (u, v) in enumerate(zip(self.vertices, self.vertices[1:])):
            if not are_adjacent(u, v):
                raise PreconditionError(
                    "{} and {} at position {} are not adjacent".format(u.label, v.label, i)
                )

    @classmethod
    def from_labels(cls, labels: Sequence[str]) -> "GridPath":
        return cls(tuple(GridVertex.parse(label) for label in labels))

    @classmethod
    def from_flat(cls, indices: Sequence[int]) -> "GridPath":
        return cls(tuple(GridVertex.from_flat(i) for i in indices))

    def __len__(self) -> int:
        return len(self.vertices)

    def labels(self) -> List[str]:
        return [v.label for v in self.vertices]

    def reversed(self) -> "GridPath":
        return GridPath(self.vertices[::-1])

    def canonical(self) -> "GridPath":
        """Orientation whose first endpoint is the smaller one"""
        if self.vertices[-1].key < self.vertices[0].key:
            return self.reversed()
        return self


def is_simple_path(vertices: Sequence[GridVertex], n: int) -> bool:
    """Independent validity check: non-empty, inside G_n, distinct, consecutive adjacent"""
    if not vertices:
        return False
    if any(not 0 <= v.column < n for v in vertices):
        return False
    if len(set(vertices)) != len(vertices):
        return False
    return all(are_adjacent(u, v) for u, v in zip(vertices, vertices[1:]))


def _flat_paths(n: int, min_len: int, max_len: int) -> Iterator[Tuple[int, ...]]:
    """Canonically oriented simple paths of G_n as flat index tuples"""
    adjacency = flat_adjacency(n)
    path = []
    on_path = [False] * (2 * n)

    def extend() -> Iterator[Tuple[int, ...]]:
        length = len(path)
        if length >= min_len and (length == 1 or path[0] < path[-1]):
            yield tuple(path)
        if length == max_len:
            return
        for u in adjacency[path[-1]]:
            if not on_path[u]:
                on_path[u] = True
                path.append(u)
                yield from extend()
                path.pop()
                on_path[u] = False

    for start in range(2 * n):
        on_path[start] = True
        path.append(start)
        yield from extend()
        path.pop()
        on_path[start] = False


def enumerate_simple_paths(n: int, min_len: int, max_len: int) -> Iterator[GridPath]:
    """
    Every simple path of G_n with between min_len and max_len vertices

    Each path is yielded once, oriented so that its smaller endpoint comes
    first (flat index order: column first, top before bottom).
    """
    if n < 1:
        raise PreconditionError("n must be positive, got {}".format(n))
    for indices in _flat_paths(n, max(min_len, 1), max_len):
        yield GridPath.from_flat(indices)


def colour_trace(p: GridPath, phi: GridColouring) -> Word:
    """
    Colour sequence along a path, over the alphabet 1..c

    Raises:
        PreconditionError: if the path leaves the coloured grid
    """
    return Word(Alphabet.colours(phi.c), tuple(phi.colour(v) - 1 for v in p.vertices))


@dataclass(frozen=True)
class ColouringVerdict:
    anagram_free: bool
    witness: Optional[GridPath] = None

    def to_dict(self) -> Dict[str, Any]:
        content = {"anagram_free": self.anagram_free}
        if self.witness is not None:
            content["witness_path"] = self.witness.labels()
        return content


def _witness_key(path: Sequence[int]) -> Tuple[int, Tuple[int, ...]]:
    oriented = tuple(path) if path[0] < path[-1] else tuple(path[::-1])
    return (len(path), oriented)


def _smallest_witness_from(args: Tuple[Tuple[int, ...], int, int]) -> Optional[Tuple[int, ...]]:
    """Smallest anagramish path (by length, then canonical vertex order) starting at one vertex"""
    flat_colours, c, start = args
    n = len(flat_colours) // 2
    adjacency = flat_adjacency(n)
    eye = np.eye(c, dtype=np.int64)
    prefix = np.zeros((2 * n + 1, c), dtype=np.int64)
    path = [start]
    on_path = [False] * (2 * n)
    on_path[start] = True
    prefix[1] = eye[flat_colours[start] - 1]
    best = None

    def extend() -> None:
        nonlocal best
        length = len(path)
        if length % 2 == 0 and np.array_equal(2 * prefix[length // 2], prefix[length]):
            key = _witness_key(path)
            if best is None or key < best:
                best = key
            return
        if best is not None and length + 1 > best[0]:
            return
        for u in adjacency[path[-1]]:
            if not on_path[u]:
                on_path[u] = True
                path.append(u)
                prefix[length + 1] = prefix[length] + eye[flat_colours[u] - 1]
                extend()
                path.pop()
                on_path[u] = False

    extend()
    return best[1] if best is not None else None


def verify_colouring(phi: GridColouring, workers: int = 1) -> ColouringVerdict:
    """
    Decide whether phi is an anagram-free colouring of G_n

    The reported witness is the shortest anagramish path, ties broken by the
    vertex sequence of its canonical orientation; the search is split by
    start vertex and merged by that order, so it does not depend on workers.
    """
    if phi.n == 0:
        return ColouringVerdict(True)
    flat_colours = phi.flat()
    jobs = [(flat_colours, phi.c, start) for start in range(2 * phi.n)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            found = list(executor.map(_smallest_witness_from, jobs))
    else:
        found = [_smallest_witness_from(job) for job in jobs]
    keys = [_witness_key(path) for path in found if path is not None]
    if not keys:
        return ColouringVerdict(True)
    return ColouringVerdict(False, GridPath.from_flat(min(keys)[1]))


@lru_cache(maxsize=None)
def _paths_touching_last_column(width: int) -> Tuple[Tuple[int, ...], ...]:
    """Even-length canonical paths of G_width using a vertex of its last column"""
    last = 2 * (width - 1)
    return tuple(
        path
        for path in _flat_paths(width, 2, 2 * width)
        if len(path) % 2 == 0 and max(path) >= last
    )


def _column_is_safe(flat_colours: Sequence[int], width: int) -> bool:
    for path in _paths_touching_last_column(width):
        r = len(path) // 2
        first = sorted(flat_colours[v] for v in path[:r])
        second = sorted(flat_colours[v] for v in path[r:])
        if first == second:
            return False
    return True


def _canonical_columns(used: int, c: int) -> Iterator[Tuple[Tuple[int, int], int]]:
    """Column colour pairs respecting first-use order of colours"""
    for a in range(1, min(c, used + 1) + 1):
        after_a = max(used, a)
        for b in range(1, min(c, after_a + 1) + 1):
            yield (a, b), max(after_a, b)


def _afcn_unit(args: Tuple[int, int, Tuple[int, ...]]) -> Tuple[Optional[Tuple[int, ...]], int]:
    """Complete a fixed colouring prefix of whole columns; returns a colouring and node count"""
    n, c, prefix = args
    colours = list(prefix)
    nodes = 0
    for width in range(1, len(prefix) // 2 + 1):
        if not _column_is_safe(colours, width):
            return None, 1

    def extend(used: int) -> bool:
        nonlocal nodes
        width = len(colours) // 2
        if width == n:
            return True
        for pair, now_used in _canonical_columns(used, c):
            nodes += 1
            colours.extend(pair)
            if _column_is_safe(colours, width + 1) and extend(now_used):
                return True
            del colours[-2:]
        return False

    found = extend(max(colours, default=0))
    return (tuple(colours) if found else None), max(nodes, 1)


def _afcn_units(n: int, c: int) -> List[Tuple[int, ...]]:
    """Canonical colourings of the first min(n, 2) columns, a_0 coloured 1"""
    units = []
    for (a0, b0), used in _canonical_columns(0, c):
        if a0 != 1:
            continue
        if n == 1:
            units.append((a0, b0))
            continue
        for pair, _ in _canonical_columns(used, c):
            units.append((a0, b0) + pair)
    return units


@dataclass(frozen=True)
class AfcnResult:
    """Outcome of an afcn search: the value, a witness colouring and search statistics"""

    n: int
    c_max: int
    value: Optional[int]
    colouring: Optional[GridColouring]
    nodes: int
    resumed_units: int = 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "c_max": self.c_max,
            "afcn": self.value,
            "colouring": self.colouring.to_dict() if self.colouring else None,
            "nodes": self.nodes,
        }


def afcn_grid(
    n: int, c_max: int, workers: int = 1, checkpoint: Checkpoint = None
) -> AfcnResult:
    """
    Smallest c <= c_max admitting an anagram-free c-colouring of G_n

    Colour symmetry is broken by colouring a_0 with 1 and introducing new
    colours in order; columns are added one at a time and a prefix is
    abandoned as soon as a path inside it is anagramish. Work units are the
    colourings of the first two columns; completed units are recorded in the
    optional checkpoint and skipped when the search is resumed.
    """
    if n < 1 or c_max < 1:
        raise PreconditionError("n and c_max must be positive")
    nodes = 0
    resumed = 0
    for c in range(1, c_max + 1):
        units = _afcn_units(n, c)
        outcomes = {}
        pending = []
        for index in range(len(units)):
            saved = checkpoint.find(c=c, unit=index) if checkpoint else None
            if saved is not None:
                outcomes[index] = (saved["colouring"], saved["nodes"])
            else:
                pending.append(index)
        if outcomes:
            resumed += len(outcomes)
            logger.info(
                "c=%s: resumed %s work units from %s", c, len(outcomes), checkpoint.path
            )

        def record(index: int, outcome: Tuple[Optional[Tuple[int, ...]], int]) -> None:
            outcomes[index] = outcome
            if checkpoint is not None:
                colouring, unit_nodes = outcome
                checkpoint.append(
                    {
                        "c": c,
                        "unit": index,
                        "colouring": list(colouring) if colouring else None,
                        "nodes": unit_nodes,
                    }
                )

        if workers > 1 and len(pending) > 1:
            with ProcessPoolExecutor(max_workers=workers) as executor:
                jobs = [(n, c, units[index]) for index in pending]
                for index, outcome in zip(pending, executor.map(_afcn_unit, jobs)):
                    record(index, outcome)
        else:
            for index in pending:
                if any(outcomes[i][0] for i in outcomes if i < index):
                    break
                record(index, _afcn_unit((n, c, units[index])))

        for index in range(len(units)):
            colouring, unit_nodes = outcomes[index]
            nodes += unit_nodes
            if colouring:
                logger.debug("G_%s: %s colours suffice", n, c)
                return AfcnResult(
                    n, c_max, c, GridColouring.from_flat(colouring, c), nodes, resumed
                )
        logger.debug("G_%s: no anagram-free %s-colouring", n, c)
    return AfcnResult(n, c_max, None, None, nodes, resumed)


def afcn_grid_unpruned(n: int, c_max: int) -> Optional[int]:
    """Whole-space oracle: verify every colouring in Phi_{c,n} for c = 1..c_max"""
    for c in range(1, c_max + 1):
        for flat in itertools.product(range(1, c + 1), repeat=2 * n):
            if verify_colouring(GridColouring.from_flat(flat, c)).anagram_free:
                return c
    return None


def afcn_path(m: int, c_max: int) -> Optional[int]:
    """afcn of the m-vertex path: smallest alphabet with an anagram-free word of length m"""
    if m < 1:
        raise PreconditionError("m must be positive, got {}".format(m))
    for c in range(1, c_max + 1):
        result = longest_anagram_free(c, m, node_budget=10 ** 9, canonical=True)
        if len(result.word) == m:
            return c
    return None


def breaker_predicate(palette: Sequence[BlockColouring]) -> Callable[[Word], bool]:
    """
    Hereditary predicate over strings of 4-blocks: whether the strip they
    colour is anagram-free. Letter x of a word stands for palette[x].
    """

    def predicate(w: Word) -> bool:
        strip = concat_blocks([palette[x] for x in w.letters], palette[0].colouring.c)
        return verify_colouring(strip).anagram_free

    return predicate


def sigma_predicate(
    palette: Sequence[BlockSymbol], phi_star: BlockColouring, ell: int
) -> Callable[[Word], bool]:
    """Hereditary predicate over block-symbol strings: whether their realization is anagram-free"""
    c = phi_star.colouring.c

    def predicate(w: Word) -> bool:
        s = BlockString(tuple(palette[x] for x in w.letters), phi_star, ell, c)
        return verify_colouring(realize_sigma_string(s)).anagram_free

    return predicate
