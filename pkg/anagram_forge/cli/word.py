# Copyright 2021 Canonical Ltd.
# See LICENSE file for licensing details.
"""
This module takes care of the `anagram-forge word` commands.

Words are given inline (`aab`, `a,b,a`) or as a path to a file holding one.
"""
import logging

import click
from anagram_forge.cli import debug_option, emit, run_options
from anagram_forge.config import RunConfig
from anagram_forge.files import load_word
from anagram_forge.words import (
    Alphabet,
    anagram_free_predicate,
    find_anagramish_substring,
    find_near_anagramish,
    imbalance,
    is_anagram_free,
    is_ell_periodic,
    longest_anagram_free,
    minimal_core_alphabet,
    Word,
)

logger = logging.getLogger()


def _witness_content(w: Word, witness) -> dict:
    content = witness.to_dict()
    content["substring"] = w[witness.offset : witness.offset + witness.length].render()
    return content


@click.group()
def word():
    """Checks and searches on words"""


@word.command(options_metavar="[options]")
@click.argument("source", metavar="<word>")
@debug_option
@run_options
def check(config: RunConfig, source: str):
    """
    Checks that a word has no anagramish substring.

    Arguments:

        word: Inline word or path to a word file
    """
    w = load_word(source)
    witness = find_anagramish_substring(w)
    content = {"word": w.render(), "length": len(w), "anagram_free": witness is None}
    if witness is not None:
        content["witness"] = _witness_content(w, witness)
    return emit(config, content, witness is None)


@word.command(options_metavar="[options]")
@click.argument("source", metavar="<word>")
@debug_option
@run_options
def tau(config: RunConfig, source: str):
    """
    Prints the half imbalance of an even-length word.

    Arguments:

        word: Inline word or path to a word file
    """
    w = load_word(source)
    report = imbalance(w)
    content = {
        "word": w.render(),
        "tau": report.tau,
        "delta": dict(zip(w.alphabet.symbols, report.per_symbol_delta)),
        "anagramish": report.tau == 0,
    }
    return emit(config, content, True)


@word.command(options_metavar="[options]")
@click.argument("source", metavar="<word>")
@click.option(
    "--ell", type=click.IntRange(min=1), required=True, metavar="<ell>", help="Window length"
)
@click.option(
    "--alphabet",
    metavar="<symbols>",
    help="Comma separated alphabet; every symbol must then occur in every window",
)
@debug_option
@run_options
def periodic(config: RunConfig, source: str, ell: int, alphabet: str):
    """
    Checks that every window of length ell holds every symbol.

    Arguments:

        word: Inline word or path to a word file
    """
    declared = Alphabet(tuple(alphabet.split(","))) if alphabet else None
    w = load_word(source, declared)
    holds = is_ell_periodic(w, ell, declared_alphabet=declared is not None)
    content = {"word": w.render(), "ell": ell, "periodic": holds}
    return emit(config, content, holds)


@word.command(options_metavar="[options]")
@click.option("--k", "k", type=int, required=True, metavar="<k>", help="Alphabet size")
@click.option("--max", "max_len", type=int, required=True, metavar="<n>", help="Length goal")
@click.option("--budget", type=int, metavar="<nodes>", help="Node budget (default: cap)")
@click.option("--canonical", is_flag=True, help="Only search words in first-occurrence order")
@debug_option
@run_options
def longest(config: RunConfig, k: int, max_len: int, budget: int, canonical: bool):
    """
    Searches for the longest anagram-free word over k letters.
    """
    budget = budget or config.get_cap("word-nodes")
    config.check_cap("word-nodes", budget)
    result = longest_anagram_free(k, max_len, budget, canonical, config.workers)
    verified = is_anagram_free(result.word)
    logger.debug("independent check of the result: %s", verified)
    content = {**result.to_dict(), "k": k, "max": max_len, "verified": verified}
    return emit(config, content, verified)


@word.command(options_metavar="[options]")
@click.argument("source", metavar="<word>")
@click.option("--r0", type=int, required=True, metavar="<r0>", help="Minimum half length")
@click.option("--eps", required=True, metavar="<eps>", help="Tolerance, e.g. 0.5 or 1/3")
@debug_option
@run_options
def near(config: RunConfig, source: str, r0: int, eps: str):
    """
    Finds the substring of length 2r >= 2 r0 with tau <= eps r minimising tau/r.

    Arguments:

        word: Inline word or path to a word file
    """
    w = load_word(source)
    witness = find_near_anagramish(w, r0, eps)
    content = {"word": w.render(), "r0": r0, "eps": eps, "found": witness is not None}
    if witness is not None:
        content["witness"] = _witness_content(w, witness)
    return emit(config, content, witness is not None)


@word.command(options_metavar="[options]")
@click.option("--k", "k", type=int, required=True, metavar="<k>", help="Alphabet size")
@click.option("--probe", type=int, required=True, metavar="<n>", help="Probe length")
@debug_option
@run_options
def core(config: RunConfig, k: int, probe: int):
    """
    Smallest sub-alphabet with anagram-free words of every length up to the probe.

    The result only holds up to the probe length.
    """
    result = minimal_core_alphabet(
        anagram_free_predicate, Alphabet.letters(k), probe, config.get_cap("witness-cap")
    )
    content = result.to_dict()
    content["witnesses"] = content["witnesses"][:10]
    return emit(config, content, True)
