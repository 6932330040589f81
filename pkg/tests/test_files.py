# Copyright 2021 Canonical Ltd.
# See LICENSE file for licensing details.
import json
import os
import tempfile
import unittest

from anagram_forge import FileFormatError
from anagram_forge.files import (
    Checkpoint,
    dump_json,
    load_block_string,
    load_colouring,
    load_json,
    load_palette,
    load_word,
    write_json,
    write_text_atomic,
)
from anagram_forge.planting import plant_instance
import mock


class FilesTest(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)

    def path(self, name):
        return os.path.join(self.tmp.name, name)

    def test_dump_json_is_stable(self):
        self.assertEqual(dump_json({"b": 1, "a": [1, 2]}), dump_json({"a": [1, 2], "b": 1}))

    def test_load_word_inline_or_file(self):
        self.assertEqual(load_word("abca").render(), "abca")
        with open(self.path("w.txt"), "w") as f:
            f.write("x y\nx\n")
        self.assertEqual(load_word(self.path("w.txt")).tokens(), ["x", "y", "x"])

    def test_load_colouring(self):
        write_json(self.path("c.json"), {"n": 1, "c": 2, "top": [1], "bottom": [2]})
        phi = load_colouring(self.path("c.json"))
        self.assertEqual((phi.n, phi.c), (1, 2))

    def test_malformed_files(self):
        with open(self.path("bad.json"), "w") as f:
            f.write("{not json")
        with self.assertRaises(FileFormatError):
            load_json(self.path("bad.json"))
        with self.assertRaises(FileFormatError):
            load_json(self.path("missing.json"))
        write_json(self.path("c.json"), {"n": 1, "c": 2, "top": [3], "bottom": [2]})
        with self.assertRaises(Exception):
            load_colouring(self.path("c.json"))

    def test_block_string_with_provenance(self):
        instance = plant_instance(2, 8, 0, seed=1)
        write_json(self.path("planted.json"), instance.to_dict())
        write_json(self.path("bare.json"), instance.block_string.to_dict())
        self.assertEqual(load_block_string(self.path("planted.json")), instance.block_string)
        self.assertEqual(load_block_string(self.path("bare.json")), instance.block_string)

    def test_atomic_write_leaves_no_temporary_files(self):
        target = self.path("sub/out.txt")
        write_text_atomic(target, "one")
        write_text_atomic(target, "two")
        with open(target) as f:
            self.assertEqual(f.read(), "two")
        self.assertEqual(os.listdir(os.path.dirname(target)), ["out.txt"])

    def test_load_palette(self):
        block = {"n": 4, "c": 2, "top": [1, 2, 1, 2], "bottom": [2, 1, 2, 1]}
        write_json(self.path("blocks.json"), {"blocks": [block, block]})
        palette = load_palette(self.path("blocks.json"))
        self.assertEqual(len(palette), 2)
        self.assertIsNone(palette.phi_star)
        self.assertEqual(palette.strip_width(3), 12)
        write_json(
            self.path("symbols.json"),
            {"symbols": [{"k": 1, "phi": block}], "phi_star": block, "ell": 1},
        )
        palette = load_palette(self.path("symbols.json"))
        self.assertEqual((len(palette), palette.ell), (1, 1))
        self.assertEqual(palette.strip_width(2), 20)

    def test_malformed_palettes(self):
        block = {"n": 4, "c": 2, "top": [1, 2, 1, 2], "bottom": [2, 1, 2, 1]}
        wide = {"n": 4, "c": 3, "top": [1, 2, 3, 2], "bottom": [2, 1, 2, 1]}
        for content in ([block], {"blocks": []}, {"symbols": [block]}, {"blocks": [block, wide]}):
            write_json(self.path("palette.json"), content)
            with self.assertRaises(FileFormatError, msg=content):
                load_palette(self.path("palette.json"))


class CheckpointTest(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.file = os.path.join(self.tmp.name, "afcn.ndjson")

    def test_records_survive_reload(self):
        checkpoint = Checkpoint(self.file, "afcn", {"n": 2})
        checkpoint.append({"c": 1, "unit": 0, "colouring": None, "nodes": 3})
        checkpoint.append({"c": 2, "unit": 0, "colouring": [1, 2, 2, 1], "nodes": 5})
        reloaded = Checkpoint(self.file, "afcn", {"n": 2})
        self.assertEqual(len(reloaded.records), 2)
        self.assertEqual(reloaded.find(c=2, unit=0)["nodes"], 5)
        self.assertIsNone(reloaded.find(c=3))
        with open(self.file) as f:
            header = json.loads(f.readline())
        self.assertEqual(header["kind"], "afcn")
        self.assertIn("version", header)

    def test_stale_header_is_ignored(self):
        Checkpoint(self.file, "afcn", {"n": 2}).append({"c": 1, "unit": 0})
        self.assertEqual(Checkpoint(self.file, "afcn", {"n": 3}).records, [])

    def test_append_adds_one_line(self):
        checkpoint = Checkpoint(self.file, "afcn", {"n": 2})
        checkpoint.append({"c": 1, "unit": 0})
        inode = os.stat(self.file).st_ino
        with mock.patch("anagram_forge.files.write_text_atomic") as rewrite:
            checkpoint.append({"c": 1, "unit": 1})
            Checkpoint(self.file, "afcn", {"n": 2}).append({"c": 1, "unit": 2})
        rewrite.assert_not_called()
        self.assertEqual(os.stat(self.file).st_ino, inode)
        with open(self.file) as f:
            self.assertEqual(len(f.read().splitlines()), 4)

    def test_truncated_last_record_is_dropped(self):
        checkpoint = Checkpoint(self.file, "afcn", {"n": 2})
        checkpoint.append({"c": 1, "unit": 0})
        with open(self.file, "a") as f:
            f.write('{"c": 1, "un')
        reloaded = Checkpoint(self.file, "afcn", {"n": 2})
        self.assertEqual(reloaded.records, [{"c": 1, "unit": 0}])
        reloaded.append({"c": 1, "unit": 1})
        with open(self.file) as f:
            lines = f.read().splitlines()
        self.assertEqual([json.loads(line).get("unit") for line in lines[1:]], [0, 1])

    def test_unreadable_file_is_ignored(self):
        with open(self.file, "w") as f:
            f.write("garbage\n")
        self.assertEqual(Checkpoint(self.file, "afcn", {"n": 2}).records, [])
