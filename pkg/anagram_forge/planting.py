# Copyright 2021 Canonical Ltd.
# See LICENSE file for licensing details.
"""
Module in charge of planting block strings for the path construction

Seeded generation of l-periodic block strings with an exact target tau that
satisfy every precondition of anaconstruct.select_sets.
"""
from dataclasses import dataclass
from fractions import Fraction
import logging
import random
from typing import Any, Dict, List, Optional

from anagram_forge import InfeasibleError, PreconditionError
from anagram_forge.anaconstruct import check_preconditions
from anagram_forge.gridmodel import BlockColouring, BlockString, BlockSymbol, BORING_WIDTH
from anagram_forge.words import (
    Alphabet,
    imbalance,
    is_ell_periodic,
    RationalLike,
    to_fraction,
    Word,
)

logger = logging.getLogger(__name__)

MAX_ATTEMPTS = 50


@dataclass(frozen=True)
class PlantedInstance:
    block_string: BlockString
    eps: Fraction
    seed: int
    tau: int
    attempts: int

    def to_dict(self) -> Dict[str, Any]:
        return {
            "block_string": self.block_string.to_dict(),
            "provenance": {
                "eps": str(self.eps),
                "ell": self.block_string.ell,
                "r": len(self.block_string) // 2,
                "seed": self.seed,
                "tau": self.tau,
                "attempts": self.attempts,
            },
        }


def default_eps(ell: int) -> Fraction:
    """Largest eps of the form 1/m strictly below 1/(4*ell)"""
    return Fraction(1, 4 * ell + 1)


def _check_parameters(ell: int, r: int, tau: int, eps: Fraction, c: int) -> None:
    if ell < 1 or c < 1:
        raise PreconditionError("ell >= 1 and c >= 1 fail: ell={}, c={}".format(ell, c))
    problems = []
    if r < 2 * ell:
        problems.append("r >= 2*ell fails: r={}, ell={}".format(r, ell))
    if not 0 < eps < Fraction(1, 4 * ell):
        problems.append("0 < eps < 1/(4*ell) fails: eps={}".format(eps))
    if tau < 0 or tau % 2:
        problems.append("tau must be a non-negative even number, got {}".format(tau))
    if tau > eps * r:
        problems.append("tau <= eps*r fails: tau={}, eps*r={}".format(tau, eps * r))
    if not 2 * eps * r < (r - 1) // ell:
        problems.append("2*eps*r < floor((r-1)/ell) fails for r={}".format(r))
    if problems:
        raise PreconditionError("; ".join(problems))


def _random_symbols(rng: random.Random, q: int, ell: int, c: int) -> List[BlockSymbol]:
    symbols = {}
    while len(symbols) < q:
        k = rng.randint(1, ell)
        width = BORING_WIDTH * k
        phi = BlockColouring.of(
            c,
            [rng.randint(1, c) for _ in range(width)],
            [rng.randint(1, c) for _ in range(width)],
        )
        symbol = BlockSymbol(k, phi)
        symbols.setdefault(symbol.label, symbol)
    return list(symbols.values())


def _periodic_start(rng: random.Random, q: int, ell: int, length: int) -> List[int]:
    """Repetitions of one window holding every symbol, hence l-periodic"""
    base = list(range(q)) + [rng.randrange(q) for _ in range(ell - q)]
    rng.shuffle(base)
    return [base[i % ell] for i in range(length)]


def _tau(letters: List[int], alphabet: Alphabet) -> int:
    return imbalance(Word(alphabet, tuple(letters))).tau


def _climb(
    rng: random.Random, letters: List[int], alphabet: Alphabet, ell: int, target: int
) -> Optional[List[int]]:
    """Single-letter mutations keeping l-periodicity, never moving tau away from target"""
    q = alphabet.size
    current = _tau(letters, alphabet)
    for _ in range(50 * len(letters)):
        if current == target:
            return letters
        if q == ell:
            # every window is a permutation, so any single mutation breaks periodicity
            return None
        p = rng.randrange(len(letters))
        x = rng.randrange(q - 1)
        x = x + 1 if x >= letters[p] else x
        candidate = letters[:p] + [x] + letters[p + 1:]
        if not is_ell_periodic(Word(alphabet, tuple(candidate)), ell, declared_alphabet=True):
            continue
        tau = _tau(candidate, alphabet)
        if abs(tau - target) <= abs(current - target):
            letters, current = candidate, tau
    return letters if current == target else None


def _phi_star(rng: random.Random, c: int) -> BlockColouring:
    return BlockColouring.of(
        c,
        [rng.randint(1, c) for _ in range(BORING_WIDTH)],
        [rng.randint(1, c) for _ in range(BORING_WIDTH)],
    )


def plant_instance(
    ell: int, r: int, tau: int, seed: int, c: int = 3, eps: RationalLike = None
) -> PlantedInstance:
    """
    Seeded l-periodic block string of length 2r with tau exactly equal to the target

    The result is re-checked against the construction preconditions before
    it is returned.

    Raises:
        PreconditionError: if the parameters themselves violate an inequality
        InfeasibleError: if no instance was found within the attempt limit
    """
    eps = default_eps(ell) if eps is None else to_fraction(eps)
    _check_parameters(ell, r, tau, eps, c)
    if tau and ell == 1:
        raise InfeasibleError("1-periodic strings use a single symbol, so tau is always 0")
    rng = random.Random(seed)
    for attempt in range(1, MAX_ATTEMPTS + 1):
        q = rng.randint(2 if tau else 1, ell)
        alphabet = Alphabet.letters(q)
        letters = _climb(rng, _periodic_start(rng, q, ell, 2 * r), alphabet, ell, tau)
        if letters is None:
            logger.debug("attempt %s with %s symbols missed tau=%s", attempt, q, tau)
            continue
        symbols = _random_symbols(rng, q, ell, c)
        s = BlockString(tuple(symbols[x] for x in letters), _phi_star(rng, c), ell, c)
        problems = check_preconditions(s, eps)
        if problems:
            raise InfeasibleError("planted string fails: {}".format("; ".join(problems)))
        logger.debug("planted after %s attempts", attempt)
        return PlantedInstance(s, eps, seed, tau, attempt)
    raise InfeasibleError(
        "no {}-periodic string with tau={} and r={} after {} attempts".format(
            ell, tau, r, MAX_ATTEMPTS
        )
    )


def permutation_instance(ell: int, r: int, seed: int, c: int = 3) -> PlantedInstance:
    """Instance whose second half repeats the first, so tau = 0 and every block is a top block"""
    eps = default_eps(ell)
    _check_parameters(ell, r, 0, eps, c)
    rng = random.Random(seed)
    for attempt in range(1, MAX_ATTEMPTS + 1):
        q = rng.randint(1, ell)
        alphabet = Alphabet.letters(q)
        half = _periodic_start(rng, q, ell, r)
        letters = half + half
        if not is_ell_periodic(Word(alphabet, tuple(letters)), ell, declared_alphabet=True):
            continue
        symbols = _random_symbols(rng, q, ell, c)
        s = BlockString(tuple(symbols[x] for x in letters), _phi_star(rng, c), ell, c)
        return PlantedInstance(s, eps, seed, 0, attempt)
    raise InfeasibleError("no {}-periodic square of half-length {} found".format(ell, r))
