# Copyright 2021 Canonical Ltd.
# See LICENSE file for licensing details.
"""
This module takes care of the `anagram-forge grid` commands.
"""
import logging

import click
from anagram_forge.cli import debug_option, emit, run_options
from anagram_forge.config import RunConfig
from anagram_forge.files import Checkpoint, load_colouring, load_palette
from anagram_forge.pathcheck import (
    afcn_grid,
    afcn_grid_unpruned,
    afcn_path,
    breaker_predicate,
    sigma_predicate,
    verify_colouring,
)
from anagram_forge.words import Alphabet, minimal_core_alphabet

logger = logging.getLogger()


@click.group()
def grid():
    """Colourings of the 2 x n grid"""


@grid.command(options_metavar="[options]")
@click.argument("colouring_file", metavar="<colouring.json>")
@debug_option
@run_options
def check(config: RunConfig, colouring_file: str):
    """
    Checks that no simple path of the grid has an anagramish colour sequence.

    Arguments:

        colouring.json: File with n, c, top and bottom
    """
    phi = load_colouring(colouring_file)
    config.check_cap("grid-check-n", phi.n)
    verdict = verify_colouring(phi, config.workers)
    content = {"n": phi.n, "c": phi.c, **verdict.to_dict()}
    return emit(config, content, verdict.anagram_free)


@grid.command(options_metavar="[options]")
@click.option("--n", "n", type=int, required=True, metavar="<n>", help="Grid width")
@click.option("--cmax", "c_max", type=int, required=True, metavar="<c>", help="Colours to try")
@click.option("--oracle", is_flag=True, help="Cross-check with the unpruned search")
@click.option("--no-cache", is_flag=True, help="Neither read nor write a checkpoint")
@debug_option
@run_options
def afcn(config: RunConfig, n: int, c_max: int, oracle: bool, no_cache: bool):
    """
    Finds the smallest number of colours with an anagram-free colouring of G_n.
    """
    config.check_cap("afcn-n", n)
    config.check_cap("afcn-cmax", c_max)
    if oracle:
        config.check_cap("oracle-n", n)
    params = {"n": n, "c_max": c_max}
    checkpoint = None
    if not no_cache:
        checkpoint = Checkpoint(config.checkpoint_path("afcn", params), "afcn", params)
    result = afcn_grid(n, c_max, config.workers, checkpoint)
    content = result.to_dict()
    if result.resumed_units:
        logger.info("%s work units came from the checkpoint", result.resumed_units)
    if oracle:
        expected = afcn_grid_unpruned(n, c_max)
        content["oracle"] = expected
        content["oracle_agrees"] = expected == result.value
    holds = result.value is not None and content.get("oracle_agrees", True)
    return emit(config, content, holds)


@grid.command("path-afcn", options_metavar="[options]")
@click.option("--m", "m", type=int, required=True, metavar="<m>", help="Path length")
@click.option("--cmax", "c_max", type=int, required=True, metavar="<c>", help="Colours to try")
@debug_option
@run_options
def path_afcn(config: RunConfig, m: int, c_max: int):
    """
    Finds the smallest number of colours with an anagram-free colouring of the m-vertex path.
    """
    value = afcn_path(m, c_max)
    return emit(config, {"m": m, "c_max": c_max, "afcn": value}, value is not None)


@grid.command(options_metavar="[options]")
@click.argument("palette_file", metavar="<palette.json>")
@click.option("--probe", type=int, required=True, metavar="<n>", help="Probe length")
@debug_option
@run_options
def core(config: RunConfig, palette_file: str, probe: int):
    """
    Smallest set of palette letters whose strips stay anagram-free up to the probe length.

    Plain blocks are placed side by side; block symbols are realized
    between copies of phi*. The result only holds up to the probe length.

    Arguments:

        palette.json: Blocks, or block symbols with phi* and ell
    """
    palette = load_palette(palette_file)
    config.check_cap("grid-check-n", palette.strip_width(probe))
    if palette.phi_star is not None:
        predicate = sigma_predicate(palette.symbols, palette.phi_star, palette.ell)
    else:
        predicate = breaker_predicate(palette.blocks)
    letters = Alphabet(tuple("p{}".format(i) for i in range(len(palette))))
    result = minimal_core_alphabet(predicate, letters, probe, config.get_cap("witness-cap"))
    content = result.to_dict()
    content["witnesses"] = content["witnesses"][:10]
    return emit(config, content, True)
