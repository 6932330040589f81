# Copyright 2021 Canonical Ltd.
# See LICENSE file for licensing details.
"""
Module in charge of building anagramish paths through block-string colourings

Given an l-periodic block string s_1..s_2r that is close to anagramish, pick
colourful blocks to traverse along the top row, the bottom row or in a
zig-zag, route the boring blocks in between accordingly, and assemble one
path whose colour sequence is anagramish.
"""
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
import logging
from typing import Any, Dict, List, Optional, Sequence, Tuple

from anagram_forge import AdjacencyError, InfeasibleError, PreconditionError
from anagram_forge.gridmodel import (
    are_adjacent,
    BlockString,
    BlockSymbol,
    BORING_WIDTH,
    boring_range,
    colourful_range,
    GridVertex,
    layout_offsets,
    realize_sigma_string,
    Row,
)
from anagram_forge.pathcheck import colour_trace, GridPath, is_simple_path
from anagram_forge.words import (
    imbalance,
    is_anagramish,
    is_ell_periodic,
    RationalLike,
    to_fraction,
)

logger = logging.getLogger(__name__)


class Role(Enum):
    """How the path traverses a block"""

    TOP = "top"
    BOTTOM = "bottom"
    ZIGZAG = "zigzag"
    DOWN_UP = "downup"
    UP_DOWN = "updown"


@dataclass(frozen=True)
class DeltaProfile:
    """First-half minus second-half symbol counts of an even-length block string"""

    r: int
    symbols: Tuple[BlockSymbol, ...]
    per_symbol_delta: Tuple[int, ...]

    @property
    def beta(self) -> int:
        return sum(abs(d) for d in self.per_symbol_delta) // 2

    @property
    def tau(self) -> int:
        return sum(abs(d) for d in self.per_symbol_delta)

    def delta(self, symbol: BlockSymbol) -> int:
        return self.per_symbol_delta[self.symbols.index(symbol)]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "r": self.r,
            "beta": self.beta,
            "delta": {s.label: d for s, d in zip(self.symbols, self.per_symbol_delta)},
        }


@dataclass(frozen=True)
class Selection:
    """
    Chosen colourful block indices (1-based)

    a_sets[symbol] lies in 1..r-1, b_sets[symbol] in r+1..2r-1. pairs holds
    the (top, bottom) pairs of the doubled side of every symbol.
    """

    r: int
    a_sets: Dict[BlockSymbol, Tuple[int, ...]]
    b_sets: Dict[BlockSymbol, Tuple[int, ...]]
    pairs: Tuple[Tuple[int, int], ...]

    @property
    def chosen(self) -> List[int]:
        indices = []
        for sets in (self.a_sets, self.b_sets):
            for chosen in sets.values():
                indices.extend(chosen)
        return sorted(indices)

    @property
    def zigzags(self) -> List[int]:
        paired = {i for pair in self.pairs for i in pair}
        return [i for i in self.chosen if i not in paired]

    def independence_violations(self) -> List[Tuple[int, int]]:
        chosen = self.chosen
        return [(i, j) for i, j in zip(chosen, chosen[1:]) if j - i <= 1]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "a_sets": {s.label: list(v) for s, v in self.a_sets.items() if v},
            "b_sets": {s.label: list(v) for s, v in self.b_sets.items() if v},
            "pairs": [list(p) for p in self.pairs],
        }


@dataclass(frozen=True)
class RoleAssignment:
    """colourful[j - 1] is the role of H_j (j = 1..2r), boring[j] the role of Q_j (j = 0..2r-1)"""

    colourful: Tuple[Role, ...]
    boring: Tuple[Role, ...]

    def count(self, role: Role, first_half: bool) -> int:
        """Occurrences of role among H_1..H_r and Q_0..Q_{r-1} (or the second half)"""
        r = len(self.colourful) // 2
        if first_half:
            blocks = self.colourful[:r] + self.boring[:r]
        else:
            blocks = self.colourful[r:] + self.boring[r:]
        return blocks.count(role)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "colourful": [role.value for role in self.colourful],
            "boring": [role.value for role in self.boring],
        }


def compute_delta(s: BlockString) -> DeltaProfile:
    """
    Raises:
        PreconditionError: if the string has odd length
    """
    if not len(s) or len(s) % 2:
        raise PreconditionError("|s| = {} is not a positive even number".format(len(s)))
    r = len(s) // 2
    word = s.as_word()
    report = imbalance(word)
    by_label = {symbol.label: symbol for symbol in s.symbols}
    deltas = zip(word.alphabet.symbols, report.per_symbol_delta)
    pairs = sorted(((by_label[label], d) for label, d in deltas), key=lambda p: p[0].sort_key)
    return DeltaProfile(r, tuple(p[0] for p in pairs), tuple(p[1] for p in pairs))


def check_preconditions(s: BlockString, eps: RationalLike, ell: int = None) -> List[str]:
    """Every violated inequality of the construction, empty when all hold"""
    eps = to_fraction(eps)
    ell = s.ell if ell is None else ell
    if ell < 1:
        return ["ell >= 1 fails: ell={}".format(ell)]
    violations = []
    if len(s) % 2 or not len(s):
        return ["|s| = {} is not a positive even number".format(len(s))]
    r = len(s) // 2
    tau = compute_delta(s).tau
    if not is_ell_periodic(s.as_word(), ell):
        violations.append("s is not {}-periodic".format(ell))
    if r < 2 * ell:
        violations.append("r >= 2*ell fails: r={}, ell={}".format(r, ell))
    if not 0 < eps < Fraction(1, 4 * ell):
        violations.append("0 < eps < 1/(4*ell) fails: eps={}, ell={}".format(eps, ell))
    if tau > eps * r:
        violations.append("tau <= eps*r fails: tau={}, eps*r={}".format(tau, eps * r))
    if not 2 * eps * r < (r - 1) // ell:
        violations.append(
            "2*eps*r < floor((r-1)/ell) fails: {} >= {}".format(2 * eps * r, (r - 1) // ell)
        )
    return violations


def _greedy(
    s: BlockString,
    demands: Sequence[Tuple[BlockSymbol, int]],
    candidates: range,
) -> Dict[BlockSymbol, Tuple[int, ...]]:
    chosen = set()
    result = {}
    for symbol, need in demands:
        picked = []
        for i in candidates:
            if len(picked) == need:
                break
            if s.symbols[i - 1] != symbol or chosen & {i - 1, i, i + 1}:
                continue
            picked.append(i)
            chosen.add(i)
        if len(picked) < need:
            raise InfeasibleError(
                "ran out of candidates for {} in [{}, {}]: need {}, found {}".format(
                    symbol.label, candidates.start, candidates.stop - 1, need, len(picked)
                )
            )
        result[symbol] = tuple(picked)
    return result


def select_sets(s: BlockString, profile: DeltaProfile, eps: RationalLike) -> Selection:
    """
    Greedy choice of the A and B index sets under the independence constraint

    Symbols are handled in profile order; each scan goes left to right and
    skips indices next to an index already chosen on that side.

    Raises:
        PreconditionError: naming every violated inequality
        InfeasibleError: if the greedy scan runs out of candidates
    """
    violations = check_preconditions(s, eps)
    if violations:
        raise PreconditionError("; ".join(violations))
    r = profile.r
    a_demand, b_demand = [], []
    for symbol, delta in zip(profile.symbols, profile.per_symbol_delta):
        if delta > 0:
            a_demand.append((symbol, 2 * delta))
            b_demand.append((symbol, delta))
        elif delta < 0:
            a_demand.append((symbol, -delta))
            b_demand.append((symbol, -2 * delta))
    a_sets = _greedy(s, a_demand, range(1, r))
    b_sets = _greedy(s, b_demand, range(r + 1, 2 * r))

    pairs = []
    for symbol, delta in zip(profile.symbols, profile.per_symbol_delta):
        doubled = a_sets.get(symbol, ()) if delta > 0 else b_sets.get(symbol, ())
        if delta:
            pairs.extend(zip(doubled[0::2], doubled[1::2]))
    selection = Selection(r, a_sets, b_sets, tuple(sorted(pairs)))
    logger.debug("selected %s blocks, %s pairs", len(selection.chosen), len(pairs))
    return selection


def assign_roles(s: BlockString, selection: Selection) -> RoleAssignment:
    """
    Paired blocks become top (smaller index) and bottom, the other chosen
    blocks zig-zags, everything else top. A boring block right after a bottom
    block is a downup, right before one an updown.
    """
    size = 2 * selection.r
    if len(s) != size:
        raise PreconditionError("selection is for |s| = {}, got {}".format(size, len(s)))
    colourful = [Role.TOP] * size
    for _, bottom_index in selection.pairs:
        colourful[bottom_index - 1] = Role.BOTTOM
    for i in selection.zigzags:
        colourful[i - 1] = Role.ZIGZAG

    boring = []
    for j in range(size):
        after_bottom = j >= 1 and colourful[j - 1] is Role.BOTTOM
        before_bottom = colourful[j] is Role.BOTTOM
        if after_bottom and before_bottom:
            raise PreconditionError("Q_{} sits between two bottom blocks".format(j))
        if after_bottom:
            boring.append(Role.DOWN_UP)
        elif before_bottom:
            boring.append(Role.UP_DOWN)
        else:
            boring.append(Role.TOP)
    return RoleAssignment(tuple(colourful), tuple(boring))


def block_subpath(kind: Role, lo: int, hi: int) -> Tuple[GridVertex, ...]:
    """
    Fragment of the path through columns [lo, hi)

    Raises:
        PreconditionError: if the width does not suit the kind
    """
    width = hi - lo
    if width < 1:
        raise PreconditionError("empty block [{}, {})".format(lo, hi))
    if kind in (Role.DOWN_UP, Role.UP_DOWN) and width != BORING_WIDTH:
        raise PreconditionError(
            "{} needs width {}, got {}".format(kind.value, BORING_WIDTH, width)
        )
    if kind is Role.ZIGZAG and width % 4:
        raise PreconditionError("zigzag needs a width multiple of 4, got {}".format(width))

    columns = range(lo, hi)
    if kind is Role.TOP:
        return tuple(GridVertex(Row.TOP, j) for j in columns)
    if kind is Role.BOTTOM:
        return tuple(GridVertex(Row.BOTTOM, j) for j in columns)
    if kind is Role.DOWN_UP:
        return (GridVertex(Row.BOTTOM, lo),) + tuple(GridVertex(Row.TOP, j) for j in columns)
    if kind is Role.UP_DOWN:
        return (GridVertex(Row.TOP, lo),) + tuple(GridVertex(Row.BOTTOM, j) for j in columns)
    fragment = []
    for j in columns:
        first = Row.TOP if (j - lo) % 2 == 0 else Row.BOTTOM
        fragment.extend([GridVertex(first, j), GridVertex(first.other, j)])
    return tuple(fragment)


def assemble_path(s: BlockString, roles: RoleAssignment) -> Tuple[GridPath, int]:
    """
    Concatenate the fragments of Q_0, H_1, Q_1, ..., Q_{2r-1}, H_{2r}

    Returns:
        The path and the number of its vertices up to the end of H_r

    Raises:
        AdjacencyError: at the first junction whose ends are not adjacent
    """
    size = len(roles.colourful)
    if len(s) != size or len(roles.boring) != size:
        raise PreconditionError("roles do not match a block string of length {}".format(len(s)))
    offsets = layout_offsets(s)
    vertices = []
    midpoint = 0
    for j in range(size):
        fragments = [
            block_subpath(roles.boring[j], *boring_range(offsets, j)),
            block_subpath(roles.colourful[j], *colourful_range(offsets, j + 1)),
        ]
        for junction, fragment in enumerate(fragments, start=2 * j):
            if vertices and not are_adjacent(vertices[-1], fragment[0]):
                raise AdjacencyError(
                    "junction {}: {} is not adjacent to {}".format(
                        junction, vertices[-1].label, fragment[0].label
                    ),
                    junction,
                )
            vertices.extend(fragment)
        if j + 1 == size // 2:
            midpoint = len(vertices)
    return GridPath(tuple(vertices)), midpoint


@dataclass(frozen=True)
class ConstructionReport:
    """Independent check of a path against the colouring of a block string"""

    valid_path: bool
    anagramish: bool
    length: int
    first_half: Dict[int, int]
    second_half: Dict[int, int]
    first_difference: Optional[int]

    @property
    def residuals(self) -> Dict[int, int]:
        colours = sorted(set(self.first_half) | set(self.second_half))
        return {
            c: self.first_half.get(c, 0) - self.second_half.get(c, 0)
            for c in colours
            if self.first_half.get(c, 0) != self.second_half.get(c, 0)
        }

    def to_dict(self) -> Dict[str, Any]:
        content = {
            "valid_path": self.valid_path,
            "anagramish": self.anagramish,
            "length": self.length,
        }
        if not self.anagramish:
            content.update(
                {
                    "first_half": {str(c): n for c, n in sorted(self.first_half.items())},
                    "second_half": {str(c): n for c, n in sorted(self.second_half.items())},
                    "residuals": {str(c): n for c, n in self.residuals.items()},
                    "first_difference": self.first_difference,
                }
            )
        return content


def verify_construction(s: BlockString, path: Sequence[GridVertex]) -> ConstructionReport:
    """Re-check a path from scratch: simple in G_{n_s + 4}, and its colour trace anagramish"""
    vertices = tuple(path.vertices if isinstance(path, GridPath) else path)
    phi = realize_sigma_string(s)
    valid = is_simple_path(vertices, phi.n)
    colours = [phi.colour(v) for v in vertices] if valid else []
    half = len(colours) // 2
    first = Counter(colours[:half])
    second = Counter(colours[len(colours) - half:])
    differing = sorted(c for c in set(first) | set(second) if first[c] != second[c])
    anagramish = valid and is_anagramish(colour_trace(GridPath(vertices), phi))
    return ConstructionReport(
        valid_path=valid,
        anagramish=anagramish,
        length=len(vertices),
        first_half=dict(first),
        second_half=dict(second),
        first_difference=differing[0] if differing else None,
    )


@dataclass(frozen=True)
class ConstructionResult:
    profile: DeltaProfile
    selection: Selection
    roles: RoleAssignment
    path: GridPath
    midpoint_index: int
    report: ConstructionReport

    @property
    def midpoint_ok(self) -> bool:
        return 2 * self.midpoint_index == len(self.path)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "vertices": self.path.labels(),
            "anagramish": self.report.anagramish,
            "midpoint_index": self.midpoint_index,
            "midpoint_ok": self.midpoint_ok,
            "beta": self.profile.beta,
            "roles": self.roles.to_dict(),
        }


def construct_path(s: BlockString, eps: RationalLike, ell: int = None) -> ConstructionResult:
    """
    Run the whole construction and verify its output

    Raises:
        PreconditionError: if s violates an inequality of the construction
    """
    if ell is not None and ell != s.ell:
        s = BlockString(s.symbols, s.phi_star, ell, s.c)
    profile = compute_delta(s)
    selection = select_sets(s, profile, eps)
    roles = assign_roles(s, selection)
    path, midpoint = assemble_path(s, roles)
    report = verify_construction(s, path)
    logger.info(
        "built a path of %s vertices through G_%s, anagramish=%s",
        len(path),
        layout_offsets(s)[-1] + BORING_WIDTH,
        report.anagramish,
    )
    return ConstructionResult(profile, selection, roles, path, midpoint, report)