# Copyright 2021 Canonical Ltd.
# See LICENSE file for licensing details.
"""
This module takes care of the `anagram-forge construct` commands.

A block string file holds either the bare block string or the output of
`construct plant`, whose provenance carries the eps the string was planted for.
"""
import logging

import click
from anagram_forge import FileFormatError
from anagram_forge.anaconstruct import construct_path, verify_construction
from anagram_forge.cli import debug_option, emit, run_options
from anagram_forge.config import RunConfig
from anagram_forge.files import load_block_string, load_json, write_json
from anagram_forge.gridmodel import GridVertex
from anagram_forge.planting import default_eps, permutation_instance, plant_instance
from anagram_forge.words import to_fraction

logger = logging.getLogger()


def _planted_eps(path: str):
    content = load_json(path)
    if isinstance(content, dict):
        eps = content.get("provenance", {}).get("eps")
        if eps is not None:
            return to_fraction(eps)
    return None


def _load_vertices(path: str):
    content = load_json(path)
    labels = content.get("vertices") if isinstance(content, dict) else content
    if not isinstance(labels, list):
        raise FileFormatError("{} must hold a list of vertex labels".format(path))
    return [GridVertex.parse(str(label)) for label in labels]


@click.group()
def construct():
    """Anagramish paths through block-string colourings"""


@construct.command(options_metavar="[options]")
@click.option(
    "--ell", type=click.IntRange(min=1), required=True, metavar="<ell>", help="Periodicity"
)
@click.option("--r", "r", type=int, required=True, metavar="<r>", help="Half length")
@click.option("--tau", type=int, default=0, metavar="<tau>", help="Target imbalance (even)")
@click.option("--seed", type=int, default=None, metavar="<seed>", help="Random seed")
@click.option("--colours", type=int, default=3, metavar="<c>", help="Number of colours")
@click.option("--eps", default=None, metavar="<eps>", help="Tolerance (default: 1/(4 ell + 1))")
@click.option("--permutation", is_flag=True, help="Second half repeats the first; tau is 0")
@click.option("-o", "--output", metavar="<file>", help="Write the instance to this file")
@debug_option
@run_options
def plant(
    config: RunConfig,
    ell: int,
    r: int,
    tau: int,
    seed: int,
    colours: int,
    eps: str,
    permutation: bool,
    output: str,
):
    """
    Plants an ell-periodic block string of length 2r with the given tau.
    """
    seed = config["seed"] if seed is None else seed
    if permutation:
        instance = permutation_instance(ell, r, seed, colours)
    else:
        instance = plant_instance(ell, r, tau, seed, colours, eps)
    content = instance.to_dict()
    if output:
        write_json(output, content)
        logger.info("instance written to %s", output)
        content = {"output": output, **content["provenance"]}
    return emit(config, content, True)


@construct.command(options_metavar="[options]")
@click.argument("source", metavar="<block_string.json>")
@click.option("--eps", default=None, metavar="<eps>", help="Tolerance (default: as planted)")
@click.option("-o", "--output", metavar="<file>", help="Write the path to this file")
@debug_option
@run_options
def run(config: RunConfig, source: str, eps: str, output: str):
    """
    Builds the anagramish path for a block string and checks it.

    Arguments:

        block_string.json: Block string or planted instance
    """
    s = load_block_string(source)
    if eps is None:
        eps = _planted_eps(source) or default_eps(s.ell)
    result = construct_path(s, eps)
    content = result.to_dict()
    holds = result.report.anagramish and result.midpoint_ok
    if not result.report.anagramish:
        content["report"] = result.report.to_dict()
    if output:
        write_json(output, content)
        logger.info("path written to %s", output)
        content = {k: v for k, v in content.items() if k not in ("vertices", "roles")}
        content["output"] = output
        content["length"] = len(result.path)
    return emit(config, content, holds)


@construct.command(options_metavar="[options]")
@click.argument("source", metavar="<block_string.json>")
@click.argument("path_file", metavar="<path.json>")
@debug_option
@run_options
def verify(config: RunConfig, source: str, path_file: str):
    """
    Independently checks a path against the colouring of a block string.

    Arguments:

        block_string.json: Block string or planted instance

        path.json: Output of `construct run -o`, or a list of vertex labels
    """
    report = verify_construction(load_block_string(source), _load_vertices(path_file))
    return emit(config, report.to_dict(), report.valid_path and report.anagramish)
