# Copyright 2021 Canonical Ltd.
# See LICENSE file for licensing details.
"""
Shared pieces of the anagram-forge command line

Exit codes: 0 when the checked property holds or a search succeeded, 1 when
it fails (the report carries the witness), 2 on usage and input errors.
"""
from functools import wraps
import logging
from typing import Any, Dict, List

import click
from anagram_forge import ForgeError, OUTPUT_FORMATS
from anagram_forge.config import RunConfig
from anagram_forge.report import render

EXIT_HOLDS = 0
EXIT_REFUTED = 1
EXIT_USAGE = 2

logger = logging.getLogger()


def debug_option(f):
    @click.option("--debug", is_flag=True, help="Print more output")
    @wraps(f)
    def wrapper(debug, *args, **kwargs):
        level = logging.DEBUG if debug else logging.INFO
        logging.basicConfig(level=level, format="%(message)s", force=True)
        return f(*args, **kwargs)

    return wrapper


def run_options(f):
    """
    Adds --format and --workers, builds the RunConfig and passes it as the
    first argument. ForgeError is reported and turned into exit code 2.
    """

    @wraps(f)
    @click.option(
        "--format",
        "output_format",
        type=click.Choice(OUTPUT_FORMATS),
        default=None,
        help="Report format (default: text)",
    )
    @click.option("--workers", type=int, metavar="<n>", default=None, help="Worker processes")
    @click.pass_context
    def wrapper(ctx, output_format, workers, *args, **kwargs):
        root = ctx.find_root().params
        try:
            config = RunConfig.from_file(
                root.get("config"),
                format=output_format,
                workers=workers,
                cache_dir=root.get("cache_dir"),
                override_caps=root.get("override_caps") or None,
            )
            code = f(config, *args, **kwargs)
        except ForgeError as e:
            logger.error(e)
            ctx.exit(EXIT_USAGE)
        ctx.exit(code)

    return wrapper


def emit(
    config: RunConfig,
    content: Dict[str, Any],
    holds: bool,
    tables: Dict[str, List[Dict[str, Any]]] = None,
) -> int:
    """Print the report and return the matching exit code"""
    click.echo(render(content, config.output_format, tables))
    return EXIT_HOLDS if holds else EXIT_REFUTED
