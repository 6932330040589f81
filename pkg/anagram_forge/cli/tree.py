# Copyright 2021 Canonical Ltd.
# See LICENSE file for licensing details.
"""
This module takes care of the `anagram-forge tree` commands.
"""
import logging

import click
from anagram_forge.cli import debug_option, emit, run_options
from anagram_forge.config import RunConfig
from anagram_forge.files import load_word
from anagram_forge.treebound import (
    BalancedWitness,
    build_tree,
    certify_or_refute,
    empirical_lemma_bound,
    thresholds as compute_thresholds,
)

logger = logging.getLogger()


@click.group()
def tree():
    """Balanced substrings and the weighted-tree bound"""


@tree.command(options_metavar="[options]")
@click.option("--word", "source", required=True, metavar="<word>", help="Inline word or file")
@click.option("--r0", type=int, required=True, metavar="<r0>", help="Leaf width")
@debug_option
@run_options
def build(config: RunConfig, source: str, r0: int):
    """
    Prints the nodes of the complete binary tree over a word.
    """
    w = load_word(source)
    t = build_tree(w, r0)
    rows = []
    for v in range(t.size):
        i, j = t.span(v)
        rows.append(
            {
                "node": v,
                "depth": t.depth(v),
                "span": "[{}, {})".format(i, j),
                "tau": int(abs(t.half_differences(v)).sum()),
            }
        )
    content = {"word": w.render(), "r0": r0, "h": t.h, "nodes": t.size}
    if config.output_format == "json":
        content["tree"] = rows
    return emit(config, content, True, {"Nodes": rows})


@tree.command(options_metavar="[options]")
@click.option("--word", "source", required=True, metavar="<word>", help="Inline word or file")
@click.option("--r0", type=int, required=True, metavar="<r0>", help="Leaf width")
@click.option("--eps", required=True, metavar="<eps>", help="Tolerance, e.g. 1/2")
@click.option(
    "--ell", type=click.IntRange(min=1), required=True, metavar="<ell>", help="Periodicity"
)
@click.option("--all-substrings", is_flag=True, help="Also scan substrings off the tree")
@debug_option
@run_options
def certify(config: RunConfig, source: str, r0: int, eps: str, ell: int, all_substrings: bool):
    """
    Finds a balanced tree node, or certifies that none exists.

    Exits with 0 when a balanced node is found and 1 with the certificate.
    """
    w = load_word(source)
    outcome = certify_or_refute(w, r0, eps, ell, check_all_substrings=all_substrings)
    content = outcome.to_dict()
    tables = None
    if not isinstance(outcome, BalancedWitness):
        tables = {"Failed checks": [check.to_dict() for check in outcome.failed()]}
        if not outcome.holds:
            logger.warning("%s certificate checks failed", len(outcome.failed()))
    return emit(config, content, isinstance(outcome, BalancedWitness), tables)


@tree.command(options_metavar="[options]")
@click.option("--eps", required=True, metavar="<eps>", help="Tolerance, 0 < eps < ell")
@click.option(
    "--ell", type=click.IntRange(min=1), required=True, metavar="<ell>", help="Periodicity"
)
@click.option("--r0", type=int, required=True, metavar="<r0>", help="Leaf width")
@debug_option
@run_options
def thresholds(config: RunConfig, eps: str, ell: int, r0: int):
    """
    Prints t, h_min and the word length n from which a balanced substring is guaranteed.
    """
    result = compute_thresholds(eps, ell, r0)
    content = {"eps": eps, "ell": ell, "r0": r0, **result.to_dict()}
    return emit(config, content, result.sufficient)


@tree.command(options_metavar="[options]")
@click.option("--k", "k", type=int, default=2, metavar="<k>", help="Alphabet size")
@click.option(
    "--ell", type=click.IntRange(min=1), required=True, metavar="<ell>", help="Periodicity"
)
@click.option("--eps", required=True, metavar="<eps>", help="Tolerance")
@click.option("--r0", type=int, required=True, metavar="<r0>", help="Minimum half length")
@click.option("--cap", "n_cap", type=int, required=True, metavar="<n>", help="Longest word")
@click.option("--budget", type=int, metavar="<nodes>", help="Node budget (default: cap)")
@debug_option
@run_options
def empirical(
    config: RunConfig, k: int, ell: int, eps: str, r0: int, n_cap: int, budget: int
):
    """
    Smallest n such that every ell-periodic word of length n has a near-anagramish substring.
    """
    budget = budget or config.get_cap("word-nodes")
    config.check_cap("word-nodes", budget)
    result = empirical_lemma_bound(k, ell, eps, r0, n_cap, config.workers, budget)
    content = {"k": k, "ell": ell, "eps": eps, "r0": r0, **result.to_dict()}
    return emit(config, content, result.n is not None)
