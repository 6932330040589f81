# Copyright 2021 Canonical Ltd.
# See LICENSE file for licensing details.
"""
This module takes care of the anagram-forge root command.

For more information, execute `anagram-forge --help`
"""
import logging

import click
from anagram_forge.cli import EXIT_USAGE
from anagram_forge.cli.construct import construct
from anagram_forge.cli.grid import grid
from anagram_forge.cli.tree import tree
from anagram_forge.cli.word import word
from anagram_forge.version import version

logger = logging.getLogger()


@click.group()
@click.version_option(version, prog_name="anagram-forge")
@click.option(
    "--config",
    metavar="<config_file>",
    type=click.Path(exists=True, dir_okay=False),
    help="YAML file with run settings",
)
@click.option(
    "--cache-dir",
    metavar="<dir>",
    help="Directory for search checkpoints (default: $ANAGRAM_FORGE_CACHE)",
)
@click.option("--override-caps", is_flag=True, help="Run past the feasibility caps")
def cli(config, cache_dir, override_caps):
    """Anagram-free colouring toolkit for words and 2 x n grids"""


for group in (word, grid, construct, tree):
    cli.add_command(group)


def main():
    try:
        cli()
    except Exception as e:
        logger.error(e)
    exit(EXIT_USAGE)


if __name__ == "__main__":
    main()
