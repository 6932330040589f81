# Copyright 2021 Canonical Ltd.
# See LICENSE file for licensing details.
""" Module in charge of handling word, colouring, block-string and cache files """
from dataclasses import dataclass
import json
import logging
import os
import tempfile
from typing import Any, Dict, List, Optional, Tuple

from anagram_forge import FileFormatError
from anagram_forge.gridmodel import (
    BlockColouring,
    BlockString,
    BlockSymbol,
    BORING_WIDTH,
    GridColouring,
)
from anagram_forge.version import CACHE_FORMAT
from anagram_forge.words import Alphabet, Word
import yaml

logger = logging.getLogger(__name__)


def dump_json(content: Any) -> str:
    """Serialize with stable key ordering"""
    return json.dumps(content, sort_keys=True, indent=2, ensure_ascii=False)


def _read_text(path: str) -> str:
    if not os.path.isfile(path):
        raise FileFormatError(f"file {path} not found.")
    with open(path, encoding="utf-8") as file_stream:
        return file_stream.read()


def load_json(path: str) -> Any:
    try:
        return json.loads(_read_text(path))
    except json.JSONDecodeError as e:
        raise FileFormatError(f"{path} is not valid JSON: {e}") from e


def load_yaml(path: str) -> Dict[str, Any]:
    """Load a YAML mapping, returning an empty mapping for an empty file"""
    try:
        content = yaml.safe_load(_read_text(path))
    except yaml.YAMLError as e:
        raise FileFormatError(f"{path} is not valid YAML: {e}") from e
    if content is None:
        return {}
    if not isinstance(content, dict):
        raise FileFormatError(f"{path} must contain a mapping")
    return content


def load_word(source: str, alphabet: Alphabet = None) -> Word:
    """
    Load a word given inline or as a path to a word file

    A source naming an existing file is read from disk, anything else is
    parsed as the word itself.
    """
    text = _read_text(source) if os.path.isfile(source) else source
    return Word.parse(text, alphabet)


def load_colouring(path: str) -> GridColouring:
    return GridColouring.from_dict(load_json(path))


def load_block_string(path: str) -> BlockString:
    content = load_json(path)
    if isinstance(content, dict) and "block_string" in content:
        content = content["block_string"]
    return BlockString.from_dict(content)


@dataclass(frozen=True)
class Palette:
    """
    Letters for a core-alphabet search over grid strips

    Either plain blocks, concatenated side by side, or block symbols with
    the boring colouring phi* they are realized with.
    """

    blocks: Tuple[BlockColouring, ...] = ()
    symbols: Tuple[BlockSymbol, ...] = ()
    phi_star: Optional[BlockColouring] = None
    ell: int = 1

    def __len__(self) -> int:
        return len(self.symbols) if self.phi_star is not None else len(self.blocks)

    def strip_width(self, length: int) -> int:
        """Widest strip a word of this length can colour"""
        if self.phi_star is None:
            return length * max(block.t for block in self.blocks)
        widest = max(symbol.phi.t for symbol in self.symbols)
        return BORING_WIDTH * (length + 1) + length * widest


def load_palette(path: str) -> Palette:
    """
    Palette file: `{"blocks": [colouring, ...]}`, or
    `{"symbols": [{"k": k, "phi": colouring}, ...], "phi_star": colouring, "ell": ell}`
    """
    content = load_json(path)
    if not isinstance(content, dict):
        raise FileFormatError(f"{path} must contain a mapping")
    try:
        if "phi_star" in content:
            symbols = tuple(
                BlockSymbol(int(s["k"]), BlockColouring(GridColouring.from_dict(s["phi"])))
                for s in content["symbols"]
            )
            palette = Palette(
                symbols=symbols,
                phi_star=BlockColouring(GridColouring.from_dict(content["phi_star"])),
                ell=int(content.get("ell", max((s.k for s in symbols), default=1))),
            )
        else:
            palette = Palette(
                blocks=tuple(BlockColouring(GridColouring.from_dict(b)) for b in content["blocks"])
            )
    except (KeyError, TypeError, ValueError) as e:
        raise FileFormatError(f"malformed palette {path}: {e}") from e
    if not len(palette):
        raise FileFormatError(f"palette {path} is empty")
    colours = {b.colouring.c for b in palette.blocks}
    colours.update(s.phi.colouring.c for s in palette.symbols)
    if palette.phi_star is not None:
        colours.add(palette.phi_star.colouring.c)
    if len(colours) > 1:
        raise FileFormatError(f"palette {path} mixes colour counts {sorted(colours)}")
    return palette


def write_text_atomic(path: str, content: str) -> None:
    """Write through a temporary file in the same directory, then rename over path"""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp_path = tempfile.mkstemp(dir=directory, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as tmp:
            tmp.write(content)
        os.replace(tmp_path, path)
    except BaseException:
        if os.path.exists(tmp_path):
            os.unlink(tmp_path)
        raise


def write_json(path: str, content: Any) -> None:
    write_text_atomic(path, dump_json(content) + "\n")


class Checkpoint:
    """
    Newline-delimited JSON checkpoint of a resumable search

    The first line is a header with the cache format version and the search
    parameters; every further line records one completed work unit. A file
    whose header does not match is ignored and overwritten. Records are
    appended one line at a time; the file is only rewritten (atomically)
    when it has to be rebuilt.
    """

    def __init__(self, path: str, kind: str, params: Dict[str, Any]) -> None:
        """
        Args:
            path: Checkpoint file
            kind: Search kind, part of the header
            params: Search parameters, part of the header
        """
        self._path = path
        self._header = {"version": CACHE_FORMAT, "kind": kind, "params": params}
        self._synced = False
        self._records = self._load()

    @property
    def path(self) -> str:
        return self._path

    @property
    def records(self) -> List[Dict[str, Any]]:
        return list(self._records)

    def _load(self) -> List[Dict[str, Any]]:
        if not os.path.isfile(self._path):
            return []
        with open(self._path, encoding="utf-8") as f:
            text = f.read()
        lines = [line for line in text.splitlines() if line.strip()]
        try:
            header = json.loads(lines[0]) if lines else None
        except json.JSONDecodeError:
            logger.warning("ignoring unreadable checkpoint %s", self._path)
            return []
        if header != self._header:
            logger.info("ignoring stale checkpoint %s", self._path)
            return []
        records = []
        for number, line in enumerate(lines[1:], start=2):
            try:
                records.append(json.loads(line))
            except json.JSONDecodeError:
                if number != len(lines):
                    logger.warning("ignoring unreadable checkpoint %s", self._path)
                    return []
                # interrupted append
                logger.info("dropping truncated last record of %s", self._path)
                return records
        self._synced = text.endswith("\n")
        logger.debug("loaded %s records from %s", len(records), self._path)
        return records

    def find(self, **fields: Any) -> Optional[Dict[str, Any]]:
        """First record whose fields match"""
        for record in self._records:
            if all(record.get(k) == v for k, v in fields.items()):
                return record
        return None

    def compact(self) -> None:
        """Rewrite the whole file from the header and the records in memory"""
        lines = [json.dumps(self._header, sort_keys=True)]
        lines.extend(json.dumps(r, sort_keys=True) for r in self._records)
        write_text_atomic(self._path, "\n".join(lines) + "\n")
        self._synced = True

    def append(self, record: Dict[str, Any]) -> None:
        self._records.append(record)
        if not self._synced:
            self.compact()
        else:
            with open(self._path, "a", encoding="utf-8") as f:
                f.write(json.dumps(record, sort_keys=True) + "\n")
                f.flush()
                os.fsync(f.fileno())
        logger.debug("checkpoint %s: %s records", self._path, len(self._records))
