# Copyright 2021 Canonical Ltd.
# See LICENSE file for licensing details.
import os


CACHE_ENV_VAR = "ANAGRAM_FORGE_CACHE"
DEFAULT_CACHE_DIR = "{}/.cache/anagram-forge".format(os.getenv("HOME"))
OUTPUT_FORMATS = ("text", "json")

DEFAULT_CAPS = {
    "grid-check-n": 12,
    "afcn-n": 6,
    "afcn-cmax": 4,
    "oracle-n": 3,
    "word-nodes": 10 ** 7,
    "witness-cap": 100000,
}


class ForgeError(Exception):
    """Base class of every error raised by anagram_forge"""


class PreconditionError(ForgeError, ValueError):
    """An operation was called with arguments outside of its domain"""


class InfeasibleError(ForgeError):
    """A search or construction that should succeed could not be completed"""


class AdjacencyError(ForgeError):
    """Two consecutive path vertices are not adjacent in the grid"""

    def __init__(self, message: str, junction: int) -> None:
        """
        Args:
            message: Description of the failure
            junction: Index of the fragment junction where adjacency broke
        """
        super().__init__(message)
        self.junction = junction


class FileFormatError(ForgeError):
    """An input file or inline value could not be parsed"""


class CapExceededError(ForgeError):
    """A feasibility cap was exceeded without override"""
