# Copyright 2021 Canonical Ltd.
# See LICENSE file for licensing details.
"""
Module in charge of the string machinery

Histograms over prefix sums, the imbalance measure tau, anagramish and
near-anagramish scans, l-periodicity, the backtracking search for long
anagram-free words and the probe-bounded minimal core alphabet search.
"""
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
import itertools
import logging
import math
import re
import string
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

from anagram_forge import FileFormatError, InfeasibleError, PreconditionError
import numpy as np

logger = logging.getLogger(__name__)

RationalLike = Union[int, float, str, Fraction]

_TOKEN_SEPARATORS = re.compile(r"[\s,]+")


def to_fraction(value: RationalLike) -> Fraction:
    """
    Convert a user supplied number into an exact rational

    Floats are converted through their shortest repr, so 0.1 becomes 1/10.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        value = repr(value)
    try:
        return Fraction(value)
    except (TypeError, ValueError, ZeroDivisionError) as e:
        raise PreconditionError("{!r} is not a rational number".format(value)) from e


@dataclass(frozen=True)
class Alphabet:
    """Ordered, duplicate-free list of symbol tokens"""

    symbols: Tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "symbols", tuple(str(s) for s in self.symbols))
        if not self.symbols:
            raise PreconditionError("an alphabet must not be empty")
        if len(set(self.symbols)) != len(self.symbols):
            raise PreconditionError("duplicate symbols in alphabet {}".format(self.symbols))

    @classmethod
    def letters(cls, k: int) -> "Alphabet":
        """Standard alphabet a, b, c, ... (s0, s1, ... beyond 26 symbols)"""
        if k < 1:
            raise PreconditionError("alphabet size must be at least 1, got {}".format(k))
        if k <= len(string.ascii_lowercase):
            return cls(tuple(string.ascii_lowercase[:k]))
        return cls(tuple("s{}".format(i) for i in range(k)))

    @classmethod
    def colours(cls, c: int) -> "Alphabet":
        """Colour alphabet 1..c"""
        if c < 1:
            raise PreconditionError("colour count must be at least 1, got {}".format(c))
        return cls(tuple(str(i) for i in range(1, c + 1)))

    @property
    def size(self) -> int:
        return len(self.symbols)

    def index(self, symbol: str) -> int:
        try:
            return self.symbols.index(str(symbol))
        except ValueError:
            raise PreconditionError(
                "symbol {!r} is not in alphabet {}".format(symbol, self.symbols)
            ) from None


class PrefixHistogram:
    """
    Prefix-sum table of a letter sequence

    Row p holds the histogram of the first p letters, so any window
    histogram is the difference of two rows.
    """

    def __init__(self, letters: Sequence[int], size: int) -> None:
        """
        Args:
            letters: Symbol indices
            size: Alphabet size
        """
        onehot = np.zeros((len(letters) + 1, size), dtype=np.int64)
        if len(letters):
            onehot[np.arange(1, len(letters) + 1), np.asarray(letters)] = 1
        self._table = np.cumsum(onehot, axis=0)

    @property
    def table(self) -> np.ndarray:
        return self._table

    def window(self, i: int, j: int) -> np.ndarray:
        return self._table[j] - self._table[i]

    def half_differences(self, i: int, rs: np.ndarray) -> np.ndarray:
        """First-half minus second-half histograms of the windows [i, i+2r) for every r in rs"""
        t = self._table
        return 2 * t[i + rs] - t[i] - t[i + 2 * rs]


@dataclass(frozen=True)
class Word:
    """Finite sequence of symbol indices over an alphabet"""

    alphabet: Alphabet
    letters: Tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "letters", tuple(int(x) for x in self.letters))
        for x in self.letters:
            if not 0 <= x < self.alphabet.size:
                raise PreconditionError(
                    "letter index {} outside alphabet of size {}".format(x, self.alphabet.size)
                )

    @classmethod
    def from_tokens(cls, tokens: Sequence[str], alphabet: Alphabet = None) -> "Word":
        """Build a word from tokens, inferring the alphabet in order of first occurrence"""
        if alphabet is None:
            seen = list(dict.fromkeys(str(t) for t in tokens))
            if not seen:
                raise FileFormatError("cannot infer an alphabet from an empty word")
            alphabet = Alphabet(tuple(seen))
        return cls(alphabet, tuple(alphabet.index(t) for t in tokens))

    @classmethod
    def parse(cls, text: str, alphabet: Alphabet = None) -> "Word":
        """
        Parse a word from text

        Tokens are separated by whitespace or commas; text without separators
        is read as one single-character token per character.
        """
        text = text.strip()
        if _TOKEN_SEPARATORS.search(text):
            tokens = [t for t in _TOKEN_SEPARATORS.split(text) if t]
        else:
            tokens = list(text)
        if not tokens and alphabet is not None:
            return cls(alphabet, ())
        return cls.from_tokens(tokens, alphabet)

    def __len__(self) -> int:
        return len(self.letters)

    def __getitem__(self, item: slice) -> "Word":
        if not isinstance(item, slice):
            raise TypeError("words are sliced, use .letters for single letters")
        return Word(self.alphabet, self.letters[item])

    @cached_property
    def prefix_table(self) -> PrefixHistogram:
        return PrefixHistogram(self.letters, self.alphabet.size)

    def tokens(self) -> List[str]:
        return [self.alphabet.symbols[x] for x in self.letters]

    def render(self) -> str:
        """Contiguous text for single-character alphabets, comma separated otherwise"""
        if all(len(s) == 1 for s in self.alphabet.symbols):
            return "".join(self.tokens())
        return ",".join(self.tokens())

    def occurring(self) -> Tuple[int, ...]:
        return tuple(sorted(set(self.letters)))

    def reverse(self) -> "Word":
        return Word(self.alphabet, self.letters[::-1])

    def permute(self, pi: Sequence[int]) -> "Word":
        """Relabel letter x as pi[x]"""
        return Word(self.alphabet, tuple(pi[x] for x in self.letters))


@dataclass(frozen=True)
class Histogram:
    alphabet: Alphabet
    counts: Tuple[int, ...]

    def __getitem__(self, symbol: Union[int, str]) -> int:
        if isinstance(symbol, str):
            symbol = self.alphabet.index(symbol)
        return self.counts[symbol]

    @property
    def total(self) -> int:
        return sum(self.counts)

    def as_dict(self) -> Dict[str, int]:
        return dict(zip(self.alphabet.symbols, self.counts))


@dataclass(frozen=True)
class ImbalanceReport:
    """Per-symbol half differences of an even-length word"""

    per_symbol_delta: Tuple[int, ...]
    per_symbol_tau: Tuple[int, ...]
    tau: int


@dataclass(frozen=True)
class SubstringWitness:
    offset: int
    length: int
    tau_value: int

    @property
    def half_length(self) -> int:
        return self.length // 2

    def to_dict(self) -> Dict[str, int]:
        return {
            "offset": self.offset,
            "length": self.length,
            "half_length": self.half_length,
            "tau": self.tau_value,
        }


def histogram(w: Word, i: int, j: int) -> Histogram:
    """
    Histogram of the window w[i:j]

    Raises:
        PreconditionError: if the window is malformed
    """
    if not 0 <= i <= j <= len(w):
        raise PreconditionError(
            "malformed window [{}, {}) for a word of length {}".format(i, j, len(w))
        )
    counts = w.prefix_table.window(i, j)
    return Histogram(w.alphabet, tuple(int(x) for x in counts))


def imbalance(w: Word) -> ImbalanceReport:
    """
    Imbalance of an even-length word

    Raises:
        PreconditionError: if the word has odd length
    """
    if len(w) % 2:
        raise PreconditionError("imbalance needs an even-length word, got {}".format(len(w)))
    r = len(w) // 2
    delta = w.prefix_table.half_differences(0, np.array([r]))[0]
    taus = np.abs(delta)
    return ImbalanceReport(
        per_symbol_delta=tuple(int(d) for d in delta),
        per_symbol_tau=tuple(int(t) for t in taus),
        tau=int(taus.sum()),
    )


def tau_of(w: Word, i: int, r: int) -> int:
    """tau of the window w[i:i+2r]"""
    if r < 0 or not 0 <= i <= i + 2 * r <= len(w):
        raise PreconditionError("window [{}, {}) outside word".format(i, i + 2 * r))
    return int(np.abs(w.prefix_table.half_differences(i, np.array([r]))[0]).sum())


def is_anagramish(w: Word) -> bool:
    """Odd-length and empty words are never anagramish"""
    if len(w) < 2 or len(w) % 2:
        return False
    return imbalance(w).tau == 0


def find_anagramish_substring(w: Word) -> Optional[SubstringWitness]:
    """First anagramish substring by offset, then length"""
    table = w.prefix_table
    n = len(w)
    for i in range(n - 1):
        rs = np.arange(1, (n - i) // 2 + 1)
        hits = np.flatnonzero(~table.half_differences(i, rs).any(axis=1))
        if hits.size:
            return SubstringWitness(i, 2 * int(rs[hits[0]]), 0)
    return None


def is_anagram_free(w: Word) -> bool:
    return find_anagramish_substring(w) is None


def is_ell_periodic(w: Word, ell: int, declared_alphabet: bool = False) -> bool:
    """
    Whether every length-ell window contains every symbol

    The symbols are those occurring in w, or the whole declared alphabet
    when declared_alphabet is set.
    """
    if ell < 1:
        raise PreconditionError("ell must be positive, got {}".format(ell))
    if len(w) < ell:
        return True
    required = list(range(w.alphabet.size)) if declared_alphabet else list(w.occurring())
    table = w.prefix_table.table
    windows = table[ell:] - table[:-ell]
    return bool((windows[:, required] > 0).all())


def find_near_anagramish(w: Word, r0: int, eps: RationalLike) -> Optional[SubstringWitness]:
    """
    Substring of length 2r >= 2*r0 with tau <= eps*r minimising tau/r

    Ties go to the smallest offset, then the smallest length.
    """
    eps = to_fraction(eps)
    if r0 < 1:
        raise PreconditionError("r0 must be positive, got {}".format(r0))
    if eps <= 0:
        raise PreconditionError("eps must be positive, got {}".format(eps))
    table = w.prefix_table
    n = len(w)
    best = None
    for i in range(n):
        rmax = (n - i) // 2
        if rmax < r0:
            break
        rs = np.arange(r0, rmax + 1)
        taus = np.abs(table.half_differences(i, rs)).sum(axis=1)
        ok = taus * eps.denominator <= rs * eps.numerator
        for r, tau in zip(rs[ok].tolist(), taus[ok].tolist()):
            if best is None or tau * best[1] < best[0] * r:
                best = (tau, r, i)
    if best is None:
        return None
    tau, r, i = best
    return SubstringWitness(i, 2 * r, tau)


def is_balanced(w: Word, i: int, length: int, eps: RationalLike, ell: int) -> bool:
    """Whether w[i:i+length] is a-balanced for every symbol: tau_a <= eps*length/ell"""
    eps = to_fraction(eps)
    if ell < 1:
        raise PreconditionError("ell must be positive, got {}".format(ell))
    if length % 2:
        raise PreconditionError("balance is defined for even lengths only")
    taus = np.abs(w.prefix_table.half_differences(i, np.array([length // 2]))[0])
    bound = eps * length / ell
    return all(Fraction(int(t)) <= bound for t in taus)


@dataclass(frozen=True)
class SearchResult:
    """Outcome of the anagram-free backtracking search"""

    word: Word
    nodes: int
    exhausted: bool

    def to_dict(self) -> Dict[str, object]:
        return {
            "word": self.word.render(),
            "length": len(self.word),
            "nodes": self.nodes,
            "exhausted": self.exhausted,
        }


class _Backtracker:
    """Depth-first extension of anagram-free words, checking only new suffixes"""

    def __init__(self, k: int, max_len: int, budget: int, canonical: bool) -> None:
        self.k = k
        self.max_len = max_len
        self.budget = budget
        self.canonical = canonical
        self.letters = []
        self.best = []
        self.nodes = 0
        self.reached_max = False
        self._prefix = np.zeros((max_len + 1, k), dtype=np.int64)
        self._eye = np.eye(k, dtype=np.int64)

    def _push(self, x: int) -> bool:
        m = len(self.letters) + 1
        p = self._prefix
        p[m] = p[m - 1] + self._eye[x]
        rs = np.arange(1, m // 2 + 1)
        if rs.size and (~(2 * p[m - rs] - p[m - 2 * rs] - p[m]).any(axis=1)).any():
            return False
        self.letters.append(x)
        return True

    def _candidates(self) -> range:
        if self.canonical:
            return range(min(self.k, max(self.letters, default=-1) + 2))
        return range(self.k)

    def _dfs(self) -> bool:
        if len(self.letters) > len(self.best):
            self.best = list(self.letters)
        if len(self.letters) == self.max_len:
            self.reached_max = True
            return False
        for x in self._candidates():
            if self.nodes >= self.budget:
                return False
            self.nodes += 1
            if self._push(x):
                keep_going = self._dfs()
                self.letters.pop()
                if not keep_going:
                    return False
        return True

    def run(self, first: int) -> Tuple[List[int], int, bool, bool]:
        self.nodes = 1
        self._push(first)
        exhausted = self._dfs()
        return self.best, self.nodes, exhausted, self.reached_max


def _search_branch(args: Tuple[int, int, int, bool, int]) -> Tuple[List[int], int, bool, bool]:
    k, max_len, budget, canonical, first = args
    return _Backtracker(k, max_len, budget, canonical).run(first)


def longest_anagram_free(
    k: int,
    max_len: int,
    node_budget: int = 10 ** 7,
    canonical: bool = False,
    workers: int = 1,
) -> SearchResult:
    """
    Backtracking search for the longest anagram-free word over k letters

    The search is split by first letter and the node budget is shared evenly
    between branches. Branch results are merged in branch order, stopping at
    the first branch that reaches max_len, so the result does not depend on
    the worker count.
    """
    if k < 1 or max_len < 1:
        raise PreconditionError("k and max_len must be positive")
    if node_budget < 1:
        raise PreconditionError("node budget must be positive")
    firsts = [0] if canonical else list(range(k))
    share = math.ceil(node_budget / len(firsts))
    jobs = [(k, max_len, share, canonical, first) for first in firsts]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            outcomes = list(executor.map(_search_branch, jobs))
    else:
        outcomes = map(_search_branch, jobs)

    best, nodes, exhausted = [], 0, True
    for first, (letters, branch_nodes, branch_exhausted, reached_max) in zip(firsts, outcomes):
        logger.debug("branch %s: best %s after %s nodes", first, len(letters), branch_nodes)
        nodes += branch_nodes
        exhausted = exhausted and branch_exhausted
        if len(letters) > len(best):
            best = letters
        if reached_max:
            break
    return SearchResult(Word(Alphabet.letters(k), tuple(best)), nodes, exhausted)


def anagram_free_predicate(w: Word) -> bool:
    """Hereditary predicate for minimal_core_alphabet: w contains no anagramish substring"""
    return is_anagram_free(w)


@dataclass(frozen=True)
class CoreAlphabet:
    """
    Probe-bounded stand-in for the minimal core alphabet of a hereditary predicate

    The result is an approximation: it only holds up to the probe length.
    """

    xi: Tuple[str, ...]
    ell: int
    probe: int
    witnesses: Tuple[Word, ...]
    approximate: bool = True

    def to_dict(self) -> Dict[str, object]:
        return {
            "xi": list(self.xi),
            "ell": self.ell,
            "probe": self.probe,
            "witness_count": len(self.witnesses),
            "witnesses": [w.render() for w in self.witnesses],
            "approximate": self.approximate,
        }


def _probe_subset(
    predicate: Callable[[Word], bool],
    alphabet: Alphabet,
    subset: Sequence[int],
    n_probe: int,
    witness_cap: int,
) -> Tuple[bool, List[Word]]:
    reached = [False] * (n_probe + 1)
    witnesses = []
    letters = []

    def dfs() -> None:
        if len(letters) == n_probe:
            witnesses.append(Word(alphabet, tuple(letters)))
            return
        for x in subset:
            if len(witnesses) >= witness_cap:
                return
            letters.append(x)
            if predicate(Word(alphabet, tuple(letters))):
                reached[len(letters)] = True
                dfs()
            letters.pop()

    dfs()
    return all(reached[1:]), witnesses


def minimal_core_alphabet(
    predicate: Callable[[Word], bool],
    alphabet: Alphabet,
    n_probe: int,
    witness_cap: int = 100000,
) -> CoreAlphabet:
    """
    Smallest sub-alphabet admitting predicate-words of every length up to n_probe

    Subsets are tried in increasing cardinality, in index order within a
    cardinality. The predicate must be hereditary: prefixes failing it are
    never extended.

    Raises:
        InfeasibleError: if no subset works up to n_probe
    """
    if n_probe < 1:
        raise PreconditionError("probe length must be positive")
    for size in range(1, alphabet.size + 1):
        for subset in itertools.combinations(range(alphabet.size), size):
            ok, witnesses = _probe_subset(predicate, alphabet, subset, n_probe, witness_cap)
            logger.debug("subset %s: %s (%s witnesses)", subset, ok, len(witnesses))
            if not ok:
                continue
            ell = next(
                e for e in range(1, n_probe + 1) if all(is_ell_periodic(w, e) for w in witnesses)
            )
            return CoreAlphabet(
                xi=tuple(alphabet.symbols[x] for x in subset),
                ell=ell,
                probe=n_probe,
                witnesses=tuple(witnesses),
            )
    raise InfeasibleError(
        "no sub-alphabet of {} admits accepted words of every length up to {}".format(
            alphabet.symbols, n_probe
        )
    )
