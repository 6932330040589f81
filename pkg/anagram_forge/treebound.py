# Copyright 2021 Canonical Ltd.
# See LICENSE file for licensing details.
"""
Module in charge of the weighted-tree argument for near-anagramish substrings

A word of length r0 * 2^h is split into a complete binary tree of substrings.
Nodes are classified as balanced or unbalanced per symbol; when no node is
balanced, the inequalities the argument relies on are evaluated exactly on
the tree and returned as a certificate.
"""
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction
import logging
import math
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from anagram_forge import CapExceededError, InfeasibleError, PreconditionError
from anagram_forge.words import (
    Alphabet,
    find_near_anagramish,
    is_balanced,
    is_ell_periodic,
    RationalLike,
    SubstringWitness,
    to_fraction,
    Word,
)
import numpy as np

logger = logging.getLogger(__name__)


class WeightedTree:
    """
    Complete binary tree over consecutive substrings of a word

    Nodes use heap indexing: the root is 0 and node i has children 2i+1 and
    2i+2. Leaves, left to right, are the length-r0 pieces of the word.
    """

    def __init__(self, source: Word, r0: int, h: int) -> None:
        """
        Args:
            source: Word of length r0 * 2^h
            r0: Leaf width
            h: Height
        """
        self.source = source
        self.r0 = r0
        self.h = h
        size = source.alphabet.size
        self.histograms = np.zeros((2 ** (h + 1) - 1, size), dtype=np.int64)
        table = source.prefix_table
        first_leaf = 2 ** h - 1
        for p in range(2 ** h):
            self.histograms[first_leaf + p] = table.window(p * r0, (p + 1) * r0)
        for v in range(first_leaf - 1, -1, -1):
            self.histograms[v] = self.histograms[2 * v + 1] + self.histograms[2 * v + 2]

    @property
    def size(self) -> int:
        return len(self.histograms)

    def is_leaf(self, v: int) -> bool:
        return 2 * v + 1 >= self.size

    def children(self, v: int) -> Tuple[int, int]:
        return 2 * v + 1, 2 * v + 2

    def depth(self, v: int) -> int:
        return (v + 1).bit_length() - 1

    def span(self, v: int) -> Tuple[int, int]:
        """Index range [i, j) of node v in the source word"""
        d = self.depth(v)
        width = self.r0 * 2 ** (self.h - d)
        position = v + 1 - 2 ** d
        return position * width, (position + 1) * width

    def length(self, v: int) -> int:
        return self.r0 * 2 ** (self.h - self.depth(v))

    def half_differences(self, v: int) -> np.ndarray:
        """First-half minus second-half histogram of node v (children, or halves for leaves)"""
        if not self.is_leaf(v):
            left, right = self.children(v)
            return self.histograms[left] - self.histograms[right]
        i, j = self.span(v)
        table = self.source.prefix_table
        middle = (i + j) // 2
        return table.window(i, middle) - table.window(middle, j)

    def ancestors(self, v: int) -> List[int]:
        result = []
        while v:
            v = (v - 1) // 2
            result.append(v)
        return result


def build_tree(w: Word, r0: int) -> WeightedTree:
    """
    Raises:
        PreconditionError: unless r0 is even and |w| = r0 * 2^h
    """
    if r0 < 2 or r0 % 2:
        raise PreconditionError("r0 must be a positive even number, got {}".format(r0))
    if not len(w) or len(w) % r0:
        raise PreconditionError("|w| = {} is not r0 * 2^h for r0 = {}".format(len(w), r0))
    leaves = len(w) // r0
    if leaves & (leaves - 1):
        raise PreconditionError("|w| / r0 = {} is not a power of two".format(leaves))
    return WeightedTree(w, r0, leaves.bit_length() - 1)


@dataclass(frozen=True)
class NodeStats:
    node: int
    span: Tuple[int, int]
    per_symbol_tau: Tuple[int, ...]
    unbalanced: Tuple[bool, ...]

    @property
    def length(self) -> int:
        return self.span[1] - self.span[0]

    @property
    def balanced(self) -> bool:
        return not any(self.unbalanced)


@dataclass(frozen=True)
class Classification:
    stats: Tuple[NodeStats, ...]
    unbalanced_sets: Tuple[Tuple[int, ...], ...]

    def first_balanced(self) -> Optional[NodeStats]:
        """Balanced node with the smallest heap index (breadth-first order)"""
        return next((s for s in self.stats if s.balanced), None)


def classify(tree: WeightedTree, eps: RationalLike, ell: int) -> Classification:
    """
    Per node and symbol: unbalanced iff tau_a(v) > eps * |v| / ell

    Comparisons are exact: tau_a * ell * eps.denominator > eps.numerator * |v|.
    """
    eps = to_fraction(eps)
    if eps <= 0 or ell < 1:
        raise PreconditionError("need eps > 0 and ell >= 1, got eps={} ell={}".format(eps, ell))
    stats = []
    sets = [[] for _ in range(tree.source.alphabet.size)]
    for v in range(tree.size):
        taus = np.abs(tree.half_differences(v))
        length = tree.length(v)
        flags = tuple(
            bool(int(t) * ell * eps.denominator > eps.numerator * length) for t in taus
        )
        for a, flag in enumerate(flags):
            if flag:
                sets[a].append(v)
        stats.append(NodeStats(v, tree.span(v), tuple(int(t) for t in taus), flags))
    return Classification(tuple(stats), tuple(tuple(s) for s in sets))


@dataclass(frozen=True)
class BalancedWitness:
    node: int
    span: Tuple[int, int]
    tau: int
    substring: Optional[SubstringWitness] = None

    def to_dict(self) -> Dict[str, Any]:
        content = {
            "result": "balanced",
            "node": self.node,
            "offset": self.span[0],
            "length": self.span[1] - self.span[0],
            "tau": self.tau,
        }
        if self.substring is not None:
            content["all_substrings"] = self.substring.to_dict()
        return content


@dataclass(frozen=True)
class Check:
    """One inequality evaluated exactly"""

    name: str
    lhs: Fraction
    rhs: Fraction
    holds: bool

    def to_dict(self) -> Dict[str, Any]:
        return {"name": self.name, "lhs": str(self.lhs), "rhs": str(self.rhs), "holds": self.holds}


@dataclass(frozen=True)
class LayerPartition:
    """
    X = S_{a*} split into layers X_0..X_h by the number of proper ancestors in X

    Attributes:
        a_star: Index of the symbol whose unbalanced set is the largest
        symbol: That symbol
        layers: Node indices of each X_i, in increasing order
        lengths: L(X_i), the total substring length of each layer
        weights: W(v) = occurrences of a* in the substring of every node
    """

    a_star: int
    symbol: str
    layers: Tuple[Tuple[int, ...], ...]
    lengths: Tuple[int, ...]
    weights: Tuple[int, ...] = field(repr=False)

    @property
    def members(self) -> List[int]:
        return sorted(v for layer in self.layers for v in layer)


@dataclass(frozen=True)
class UnbalancedCertificate:
    partition: LayerPartition
    t: int
    checks: Tuple[Check, ...]
    substring: Optional[SubstringWitness] = None

    @property
    def a_star(self) -> int:
        return self.partition.a_star

    @property
    def symbol(self) -> str:
        return self.partition.symbol

    @property
    def layer_lengths(self) -> Tuple[int, ...]:
        return self.partition.lengths

    @property
    def node_weights(self) -> Tuple[int, ...]:
        return self.partition.weights

    @property
    def holds(self) -> bool:
        return all(check.holds for check in self.checks)

    def failed(self) -> List[Check]:
        return [check for check in self.checks if not check.holds]

    def to_dict(self) -> Dict[str, Any]:
        content = {
            "result": "certificate",
            "a_star": self.symbol,
            "t": self.t,
            "layer_lengths": list(self.layer_lengths),
            "layers": [list(layer) for layer in self.partition.layers],
            "checks": len(self.checks),
            "holds": self.holds,
            "failed": [check.to_dict() for check in self.failed()],
            "weights": list(self.node_weights),
        }
        if self.substring is not None:
            content["all_substrings"] = self.substring.to_dict()
        return content


def _lighter_child(tree: WeightedTree, weights: np.ndarray, v: int) -> int:
    left, right = tree.children(v)
    return right if weights[right] < weights[left] else left


def _layers(tree: WeightedTree, members: Sequence[int]) -> List[List[int]]:
    """X_i: nodes of X with exactly i proper ancestors in X"""
    inside = set(members)
    layers = [[] for _ in range(tree.h + 1)]
    for v in sorted(members):
        layers[sum(1 for u in tree.ancestors(v) if u in inside)].append(v)
    return layers


def _descends_from(tree: WeightedTree, v: int, roots: set) -> bool:
    return v in roots or any(u in roots for u in tree.ancestors(v))


def chains(
    tree: WeightedTree, weights: np.ndarray, layers: Sequence[Sequence[int]], i: int, t: int
) -> List[List[int]]:
    """
    A_0 = X_i; A_j = nodes of X_{i+j} descending from R(A_{j-1}), for j = 1..t
    """
    result = [list(layers[i])]
    for j in range(1, t + 1):
        lighter = {_lighter_child(tree, weights, v) for v in result[-1] if not tree.is_leaf(v)}
        result.append([v for v in layers[i + j] if _descends_from(tree, v, lighter)])
    return result


def _check(
    name: str, lhs: Union[int, Fraction], rhs: Union[int, Fraction], equal: bool = False
) -> Check:
    lhs = lhs if isinstance(lhs, Fraction) else Fraction(int(lhs))
    rhs = rhs if isinstance(rhs, Fraction) else Fraction(int(rhs))
    return Check(name, lhs, rhs, lhs == rhs if equal else lhs <= rhs)


def _certificate(
    tree: WeightedTree, classification: Classification, eps: Fraction, ell: int
) -> UnbalancedCertificate:
    alphabet = tree.source.alphabet
    sums = [sum(tree.length(v) for v in members) for members in classification.unbalanced_sets]
    a_star = max(range(len(sums)), key=lambda a: (sums[a], -a))
    members = classification.unbalanced_sets[a_star]
    weights = tree.histograms[:, a_star]
    n = len(tree.source)
    occurring = len(tree.source.occurring())
    checks = [
        _check("(h+1)n <= sum_a L(S_a)", (tree.h + 1) * n, sum(sums)),
        _check("(h+1)n/|Sigma| <= L(X)", Fraction((tree.h + 1) * n, occurring), sums[a_star]),
    ]

    for v in range(tree.size):
        if not tree.is_leaf(v):
            left, right = tree.children(v)
            checks.append(
                _check(
                    "W({}) = W(children)".format(v),
                    weights[v],
                    weights[left] + weights[right],
                    equal=True,
                )
            )
        lower = Fraction(tree.length(v), ell)
        checks.append(_check("|v|/ell <= W({})".format(v), lower, weights[v]))

    for v in members:
        if tree.is_leaf(v):
            continue
        lighter = weights[_lighter_child(tree, weights, v)]
        checks.append(
            _check(
                "W(R({})) <= W/2 - eps|v|/(2 ell)".format(v),
                lighter,
                Fraction(int(weights[v]), 2) - eps * tree.length(v) / (2 * ell),
            )
        )
        checks.append(
            _check(
                "W(R({})) <= (1/2 - eps/(2 ell)) W".format(v),
                lighter,
                (Fraction(1, 2) - eps / (2 * ell)) * int(weights[v]),
            )
        )

    layers = _layers(tree, members)
    lengths = [sum(tree.length(v) for v in layer) for layer in layers]
    checks.append(_check("L(X_0) <= n", lengths[0], n))
    for i in range(1, len(lengths)):
        checks.append(_check("L(X_{}) <= L(X_{})".format(i, i - 1), lengths[i], lengths[i - 1]))
    checks.append(_check("sum L(X_i) = L(X)", sum(lengths), sums[a_star]))

    t = thresholds(eps, ell, tree.r0).t
    decay = 1 - Fraction(1, 2 ** (t + 1))
    for i in range(0, tree.h - t + 1):
        checks.append(
            _check("L(X_{}) <= decay L(X_{})".format(i + t, i), lengths[i + t], decay * lengths[i])
        )
        a_t = chains(tree, weights, layers, i, t)[-1]
        checks.append(
            _check(
                "L(A_{}) <= L(X_{})/2^{}".format(t, i),
                sum(tree.length(v) for v in a_t),
                Fraction(lengths[i], 2 ** (t + 1)),
            )
        )
    partition = LayerPartition(
        a_star=a_star,
        symbol=alphabet.symbols[a_star],
        layers=tuple(tuple(layer) for layer in layers),
        lengths=tuple(lengths),
        weights=tuple(int(x) for x in weights),
    )
    return UnbalancedCertificate(partition=partition, t=t, checks=tuple(checks))


def find_balanced_substring(
    w: Word, r0: int, eps: RationalLike, ell: int
) -> Optional[SubstringWitness]:
    """Shortest balanced substring of even length >= r0 over all offsets, then leftmost"""
    for length in range(r0 + r0 % 2, len(w) + 1, 2):
        for i in range(len(w) - length + 1):
            if is_balanced(w, i, length, eps, ell):
                r = length // 2
                tau = int(np.abs(w.prefix_table.half_differences(i, np.array([r]))[0]).sum())
                return SubstringWitness(i, length, tau)
    return None


def certify_or_refute(
    w: Word,
    r0: int,
    eps: RationalLike,
    ell: int,
    check_all_substrings: bool = False,
) -> Union[BalancedWitness, UnbalancedCertificate]:
    """
    Balanced tree node if there is one, otherwise the exact inequality certificate

    With check_all_substrings the word is also scanned for a balanced
    substring outside the tree nodes, and the result carries it.

    Raises:
        PreconditionError: if ell < 1, w is not l-periodic, r0 is not a multiple
            of ell, or |w| is not r0 * 2^h
    """
    eps = to_fraction(eps)
    if ell < 1:
        raise PreconditionError("ell must be positive, got {}".format(ell))
    tree = build_tree(w, r0)
    if r0 % ell:
        raise PreconditionError("r0 = {} is not a multiple of ell = {}".format(r0, ell))
    if not is_ell_periodic(w, ell):
        raise PreconditionError("w is not {}-periodic".format(ell))
    classification = classify(tree, eps, ell)
    substring = find_balanced_substring(w, r0, eps, ell) if check_all_substrings else None
    balanced = classification.first_balanced()
    if balanced is not None:
        logger.debug("node %s %s is balanced", balanced.node, balanced.span)
        tau = sum(balanced.per_symbol_tau)
        return BalancedWitness(balanced.node, balanced.span, tau, substring)
    certificate = _certificate(tree, classification, eps, ell)
    logger.info("no balanced node; certificate holds=%s", certificate.holds)
    return replace(certificate, substring=substring)


@dataclass(frozen=True)
class Thresholds:
    t: int
    h_min: int
    r0: int
    t_formula: int
    sufficient: bool

    @property
    def discrepancy(self) -> bool:
        return self.t != self.t_formula

    @property
    def n(self) -> int:
        return self.r0 * 2 ** self.h_min

    def to_dict(self) -> Dict[str, Any]:
        return {
            "t": self.t,
            "h_min": self.h_min,
            "n": "{}*2^{}".format(self.r0, self.h_min),
            "log2_n": math.log2(self.r0) + self.h_min,
            "t_formula": self.t_formula,
            "discrepancy": self.discrepancy,
            "sufficient": self.sufficient,
        }


def thresholds(eps: RationalLike, ell: int, r0: int) -> Thresholds:
    """
    Smallest t with l * (1/2 - eps/(2l))^t <= 2^-(t+1), then h_min = l t 2^(t+1)
    and n = r0 * 2^h_min

    The condition is equivalent to (1 - eps/l)^t <= 1/(2l) and is decided in
    exact arithmetic. t_formula is the closed-form logarithm ratio evaluated
    in floating point; the exact search starts there and is reported against it.

    Raises:
        PreconditionError: unless 0 < eps < ell
    """
    eps = to_fraction(eps)
    if ell < 1 or r0 < 1:
        raise PreconditionError("ell and r0 must be positive, got ell={} r0={}".format(ell, r0))
    if not 0 < eps < ell:
        raise PreconditionError("0 < eps < ell fails: eps={}, ell={}".format(eps, ell))
    ratio = 1 - eps / ell

    def within(t: int) -> bool:
        # (1 - eps/l)^t <= 1/(2l), cleared of denominators
        return 2 * ell * ratio.numerator ** t <= ratio.denominator ** t

    t_formula = max(1, math.ceil(math.log(2 * ell) / -math.log1p(-float(eps / ell))))
    t = t_formula
    while t > 1 and within(t - 1):
        t -= 1
    while not within(t):
        t += 1
    h_min = ell * t * 2 ** (t + 1)
    # l (1/2 - eps/(2l))^t <= 2^-(t+1) is the same inequality scaled by 2^-t
    sufficient = within(t)
    if t != t_formula:
        logger.info("closed-form t=%s differs from exact t=%s", t_formula, t)
    return Thresholds(t, h_min, r0, t_formula, sufficient)


@dataclass(frozen=True)
class EmpiricalBound:
    n: Optional[int]
    n_cap: int
    longest_bad: Tuple[int, ...]
    nodes: int

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "n_cap": self.n_cap,
            "found": self.n is not None,
            "longest_bad": "".join(chr(ord("a") + x) for x in self.longest_bad),
            "nodes": self.nodes,
        }


class _BadWordSearch:
    """
    Depth-first enumeration of l-periodic words with no qualifying substring

    Symbols are introduced in order (canonical relabelling) and only within
    the first l positions; a prefix with a qualifying substring is never
    extended, since every extension contains it too.
    """

    def __init__(
        self, k: int, ell: int, eps: Fraction, r0: int, n_cap: int, budget: int
    ) -> None:
        self.k = k
        self.ell = ell
        self.eps = eps
        self.r0 = r0
        self.n_cap = n_cap
        self.budget = budget
        self.nodes = 0
        self.letters = []
        self.best = ()
        self._prefix = np.zeros((n_cap + 1, k), dtype=np.int64)
        self._eye = np.eye(k, dtype=np.int64)

    def _accepts(self, x: int) -> bool:
        m = len(self.letters)
        used = max(self.letters, default=-1)
        if x > used and m >= self.ell:
            return False
        if x > used + 1:
            return False
        p = self._prefix
        p[m + 1] = p[m] + self._eye[x]
        if m + 1 >= self.ell:
            window = p[m + 1] - p[m + 1 - self.ell]
            if (window[: max(used, x) + 1] == 0).any():
                return False
        rs = np.arange(self.r0, (m + 1) // 2 + 1)
        if rs.size:
            end = m + 1
            taus = np.abs(2 * p[end - rs] - p[end - 2 * rs] - p[end]).sum(axis=1)
            if (taus * self.eps.denominator <= rs * self.eps.numerator).any():
                return False
        return True

    def _dfs(self) -> None:
        if len(self.letters) > len(self.best):
            self.best = tuple(self.letters)
        if len(self.letters) == self.n_cap:
            return
        for x in range(self.k):
            self.nodes += 1
            if self.nodes > self.budget:
                raise CapExceededError(
                    "empirical search exceeded {} nodes".format(self.budget)
                )
            if self._accepts(x):
                self.letters.append(x)
                self._dfs()
                self.letters.pop()

    def run(self, prefix: Sequence[int]) -> Tuple[Tuple[int, ...], int]:
        for x in prefix:
            if not self._accepts(x):
                return (), self.nodes
            self.letters.append(x)
        self._dfs()
        return self.best, self.nodes


def _bad_word_branch(args: Tuple[int, int, Fraction, int, int, int, Tuple[int, ...]]):
    k, ell, eps, r0, n_cap, budget, prefix = args
    return _BadWordSearch(k, ell, eps, r0, n_cap, budget).run(prefix)


def _branch_prefixes(k: int, depth: int) -> List[Tuple[int, ...]]:
    """Canonically relabelled prefixes of the given length"""
    prefixes = [()]
    for _ in range(depth):
        prefixes = [
            p + (x,) for p in prefixes for x in range(min(k, max(p, default=-1) + 2))
        ]
    return prefixes


def empirical_lemma_bound(
    k: int,
    ell: int,
    eps: RationalLike,
    r0: int,
    n_cap: int,
    workers: int = 1,
    node_budget: int = 10 ** 7,
) -> EmpiricalBound:
    """
    Smallest n such that every l-periodic word of length n over k letters has
    a substring of length 2r >= 2 r0 with tau <= eps * r

    Words without such a substring are closed under taking prefixes, so n is
    one more than the longest of them; n is None when one of length n_cap
    exists.

    Raises:
        CapExceededError: if the search needs more than node_budget nodes
    """
    eps = to_fraction(eps)
    if k < 1 or ell < 1 or r0 < 1 or n_cap < 1:
        raise PreconditionError("k, ell, r0 and n_cap must be positive")
    if eps <= 0:
        raise PreconditionError("eps must be positive, got {}".format(eps))
    depth = min(3, n_cap)
    prefixes = _branch_prefixes(k, depth)
    share = math.ceil(node_budget / (len(prefixes) + 1))
    # words shorter than the split depth form their own branch
    jobs = [(k, ell, eps, r0, depth - 1, share, ())]
    jobs.extend((k, ell, eps, r0, n_cap, share, p) for p in prefixes)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            outcomes = list(executor.map(_bad_word_branch, jobs))
    else:
        outcomes = [_bad_word_branch(job) for job in jobs]
    longest = max((word for word, _ in outcomes), key=lambda word: (len(word), [-x for x in word]))
    found = find_near_anagramish(Word(Alphabet.letters(k), longest), r0, eps) if longest else None
    if found is not None:
        raise InfeasibleError("pruned search kept a word with a qualifying substring")
    nodes = sum(n for _, n in outcomes)
    n = len(longest) + 1 if len(longest) < n_cap else None
    logger.debug("longest word without a qualifying substring: %s letters", len(longest))
    return EmpiricalBound(n, n_cap, longest, nodes)
