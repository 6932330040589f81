# Copyright 2021 Canonical Ltd.
# See LICENSE file for licensing details.
import os
import tempfile
import unittest

from anagram_forge import CACHE_ENV_VAR, CapExceededError, DEFAULT_CAPS, FileFormatError
from anagram_forge.config import RunConfig
import mock


class RunConfigTest(unittest.TestCase):
    def setUp(self):
        patcher = mock.patch.dict(os.environ, {}, clear=False)
        patcher.start()
        self.addCleanup(patcher.stop)
        os.environ.pop(CACHE_ENV_VAR, None)

    def test_defaults(self):
        config = RunConfig()
        self.assertEqual(config.output_format, "text")
        self.assertEqual(config.workers, 1)
        self.assertEqual(config["caps"], DEFAULT_CAPS)
        self.assertFalse(config["override-caps"])

    def test_precedence(self):
        with mock.patch.dict(os.environ, {CACHE_ENV_VAR: "/from/env"}):
            config = RunConfig({"cache-dir": "/from/file", "workers": 3}, workers=None)
            self.assertEqual(config["cache-dir"], "/from/env")
            self.assertEqual(config.workers, 3)
            config = RunConfig({"workers": 3}, cache_dir="/from/option", workers=2)
        self.assertEqual(config["cache-dir"], "/from/option")
        self.assertEqual(config.workers, 2)

    def test_caps_are_merged(self):
        config = RunConfig({"caps": {"afcn-n": 8}})
        self.assertEqual(config.get_cap("afcn-n"), 8)
        self.assertEqual(config.get_cap("grid-check-n"), DEFAULT_CAPS["grid-check-n"])

    def test_invalid_settings(self):
        for settings in [
            {"colour": "red"},
            {"format": "xml"},
            {"workers": 0},
            {"workers": "two"},
            {"caps": {"afcn-n": 0}},
            {"caps": {"unknown": 3}},
            {"caps": [1, 2]},
        ]:
            with self.assertRaises(FileFormatError, msg=settings):
                RunConfig(settings)

    def test_check_cap(self):
        config = RunConfig()
        config.check_cap("afcn-n", 6)
        with self.assertRaises(CapExceededError):
            config.check_cap("afcn-n", 7)
        with self.assertLogs("anagram_forge.config", level="WARNING"):
            RunConfig(override_caps=True).check_cap("afcn-n", 7)

    def test_oracle_cap(self):
        config = RunConfig()
        config.check_cap("oracle-n", 3)
        with self.assertRaises(CapExceededError) as cm:
            config.check_cap("oracle-n", 4)
        self.assertIn("oracle-n", str(cm.exception))

    def test_checkpoint_path(self):
        config = RunConfig(cache_dir="/tmp/forge")
        path = config.checkpoint_path("afcn", {"n": 3, "c_max": 4})
        self.assertTrue(path.startswith("/tmp/forge/afcn-"))
        self.assertTrue(path.endswith(".ndjson"))
        self.assertEqual(path, config.checkpoint_path("afcn", {"c_max": 4, "n": 3}))
        self.assertNotEqual(path, config.checkpoint_path("afcn", {"n": 4, "c_max": 4}))

    def test_from_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "run.yaml")
            with open(path, "w") as f:
                f.write("format: json\nseed: 7\ncaps:\n  word-nodes: 1000\n")
            config = RunConfig.from_file(path, workers=4)
            self.assertEqual(config.output_format, "json")
            self.assertEqual(config["seed"], 7)
            self.assertEqual(config.get_cap("word-nodes"), 1000)
            self.assertEqual(config.workers, 4)

            with open(path, "w") as f:
                f.write("- just\n- a list\n")
            with self.assertRaises(FileFormatError):
                RunConfig.from_file(path)
