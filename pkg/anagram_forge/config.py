# Copyright 2021 Canonical Ltd.
# See LICENSE file for licensing details.
import copy
import hashlib
import json
import logging
import os
from typing import Any, Dict

from anagram_forge import (
    CACHE_ENV_VAR,
    CapExceededError,
    DEFAULT_CACHE_DIR,
    DEFAULT_CAPS,
    FileFormatError,
    OUTPUT_FORMATS,
)
from anagram_forge.files import load_yaml

logger = logging.getLogger(__name__)

DEFAULTS = {
    "format": "text",
    "workers": 1,
    "seed": 0,
    "cache-dir": DEFAULT_CACHE_DIR,
    "caps": DEFAULT_CAPS,
    "override-caps": False,
}


class RunConfig(dict):
    """This class represents the settings of one anagram-forge run"""

    def __init__(self, config: Dict = None, **options: Any) -> None:
        """
        Args:
            config: Settings read from a configuration file
            options: Settings given on the command line; None means unset

        Precedence, lowest first: defaults, config, the cache environment
        variable, options.
        """
        super().__init__(copy.deepcopy(DEFAULTS))
        config = dict(config or {})
        caps = config.pop("caps", None) or {}
        if not isinstance(caps, dict):
            raise FileFormatError("caps must be a mapping, got {!r}".format(caps))
        self.update(config)
        self["caps"] = {**DEFAULT_CAPS, **caps}
        if os.getenv(CACHE_ENV_VAR):
            self["cache-dir"] = os.getenv(CACHE_ENV_VAR)
        for key, value in options.items():
            if value is not None:
                self.__setitem__(key.replace("_", "-"), value)
        self._validate()

    @classmethod
    def from_file(cls, path: str = None, **options: Any) -> "RunConfig":
        config = load_yaml(path) if path else {}
        if path:
            logger.debug("loaded configuration from %s", path)
        return cls(config, **options)

    def _validate(self) -> None:
        unknown = set(self) - set(DEFAULTS)
        if unknown:
            raise FileFormatError("unknown settings: {}".format(", ".join(sorted(unknown))))
        if self["format"] not in OUTPUT_FORMATS:
            raise FileFormatError(
                "format must be one of {}, got {!r}".format(OUTPUT_FORMATS, self["format"])
            )
        for key in ("workers", "seed"):
            if not isinstance(self[key], int) or isinstance(self[key], bool):
                raise FileFormatError("{} must be an integer, got {!r}".format(key, self[key]))
        if self["workers"] < 1:
            raise FileFormatError("workers must be positive, got {}".format(self["workers"]))
        for name, value in self["caps"].items():
            if name not in DEFAULT_CAPS:
                raise FileFormatError("unknown cap {!r}".format(name))
            if not isinstance(value, int) or value < 1:
                raise FileFormatError(
                    "cap {} must be a positive integer, got {!r}".format(name, value)
                )

    @property
    def workers(self) -> int:
        return self["workers"]

    @property
    def output_format(self) -> str:
        return self["format"]

    def get_cap(self, name: str) -> int:
        return self["caps"][name]

    def check_cap(self, name: str, value: int) -> None:
        """
        Raises:
            CapExceededError: if value is above the cap and overrides are off
        """
        cap = self.get_cap(name)
        if value <= cap:
            return
        if self["override-caps"]:
            logger.warning("%s = %s is above the cap of %s", name, value, cap)
            return
        raise CapExceededError(
            "{} = {} exceeds the cap of {}; pass --override-caps to run anyway".format(
                name, value, cap
            )
        )

    def checkpoint_path(self, kind: str, params: Dict[str, Any]) -> str:
        """Cache file for a resumable search, named after its parameters"""
        digest = hashlib.sha1(json.dumps(params, sort_keys=True).encode("utf-8")).hexdigest()
        return os.path.join(self["cache-dir"], "{}-{}.ndjson".format(kind, digest[:12]))
