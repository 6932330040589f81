# Copyright 2021 Canonical Ltd.
# See LICENSE file for licensing details.
import itertools
import os
import random
import tempfile
import unittest

from anagram_forge import PreconditionError
from anagram_forge.files import Checkpoint
from anagram_forge.gridmodel import (
    BlockColouring,
    BlockString,
    BlockSymbol,
    bottom,
    concat_blocks,
    grid_graph,
    GridColouring,
    GridVertex,
    realize_sigma_string,
    top,
)
from anagram_forge.pathcheck import (
    afcn_grid,
    afcn_grid_unpruned,
    afcn_path,
    breaker_predicate,
    colour_trace,
    enumerate_simple_paths,
    GridPath,
    is_simple_path,
    sigma_predicate,
    verify_colouring,
)
from anagram_forge.words import Alphabet, is_anagram_free, is_anagramish, Word
import networkx as nx


def networkx_paths(n: int):
    """Every simple path of G_n with at least two vertices, one orientation each"""
    graph = grid_graph(n)
    paths = set()
    for u, v in itertools.combinations(sorted(graph.nodes), 2):
        for labels in nx.all_simple_paths(graph, u, v):
            path = GridPath.from_labels(labels).canonical()
            paths.add(path.vertices)
    return paths


def brute_force_anagram_free(phi: GridColouring) -> bool:
    for vertices in networkx_paths(phi.n):
        if is_anagramish(colour_trace(GridPath(vertices), phi)):
            return False
    return True


class GridPathTest(unittest.TestCase):
    def test_rejects_invalid_paths(self):
        with self.assertRaises(PreconditionError):
            GridPath(())
        with self.assertRaises(PreconditionError):
            GridPath((top(0), bottom(1)))
        with self.assertRaises(PreconditionError):
            GridPath((top(0), bottom(0), top(0)))

    def test_canonical(self):
        p = GridPath.from_labels(["b1", "a1", "a0"])
        self.assertEqual(p.canonical().labels(), ["a0", "a1", "b1"])
        self.assertEqual(p.reversed().reversed(), p)

    def test_is_simple_path(self):
        self.assertTrue(is_simple_path((top(0), top(1), bottom(1)), 2))
        self.assertFalse(is_simple_path((top(0), top(1), bottom(1)), 1))
        self.assertFalse(is_simple_path((top(0), bottom(1)), 3))
        self.assertFalse(is_simple_path((top(0), bottom(0), top(0)), 3))
        self.assertFalse(is_simple_path((), 3))


class EnumerationTest(unittest.TestCase):
    def test_small_counts(self):
        self.assertEqual(len(list(enumerate_simple_paths(1, 2, 2))), 1)
        self.assertEqual(len(list(enumerate_simple_paths(2, 2, 2))), 4)
        self.assertEqual(len(list(enumerate_simple_paths(2, 2, 4))), 12)

    def test_single_vertices(self):
        self.assertEqual(len(list(enumerate_simple_paths(3, 1, 1))), 6)

    def test_matches_networkx(self):
        for n in range(1, 6):
            ours = {p.vertices for p in enumerate_simple_paths(n, 2, 2 * n)}
            self.assertEqual(ours, networkx_paths(n))

    def test_paths_are_canonical(self):
        for p in enumerate_simple_paths(3, 2, 6):
            self.assertEqual(p.canonical(), p)

    def test_invalid_grid(self):
        with self.assertRaises(PreconditionError):
            list(enumerate_simple_paths(0, 1, 1))


class VerifyColouringTest(unittest.TestCase):
    def test_monochromatic_rung(self):
        verdict = verify_colouring(GridColouring(1, 1, (1,), (1,)))
        self.assertFalse(verdict.anagram_free)
        self.assertEqual(verdict.witness.labels(), ["a0", "b0"])
        self.assertEqual(verdict.to_dict(), {"anagram_free": False, "witness_path": ["a0", "b0"]})

    def test_proper_rung(self):
        verdict = verify_colouring(GridColouring(1, 2, (1,), (2,)))
        self.assertTrue(verdict.anagram_free)
        self.assertIsNone(verdict.witness)

    def test_empty_grid(self):
        self.assertTrue(verify_colouring(GridColouring(0, 1, (), ())).anagram_free)

    def test_witness_is_anagramish(self):
        phi = GridColouring(3, 2, (1, 2, 1), (2, 1, 2))
        verdict = verify_colouring(phi)
        self.assertFalse(verdict.anagram_free)
        self.assertTrue(is_anagramish(colour_trace(verdict.witness, phi)))

    def test_matches_brute_force(self):
        rng = random.Random(5)
        for _ in range(60):
            n = rng.randint(1, 4)
            c = rng.randint(2, 4)
            phi = GridColouring(
                n, c, [rng.randint(1, c) for _ in range(n)], [rng.randint(1, c) for _ in range(n)]
            )
            self.assertEqual(
                verify_colouring(phi).anagram_free, brute_force_anagram_free(phi), phi.to_dict()
            )

    def test_invariant_under_symmetries(self):
        rng = random.Random(6)
        for _ in range(40):
            n = rng.randint(1, 4)
            phi = GridColouring.from_flat([rng.randint(1, 3) for _ in range(2 * n)], 3)
            expected = verify_colouring(phi).anagram_free
            self.assertEqual(verify_colouring(phi.mirror()).anagram_free, expected)
            pi = rng.sample([1, 2, 3], 3)
            self.assertEqual(verify_colouring(phi.permute_colours(pi)).anagram_free, expected)

    def test_workers_do_not_change_the_witness(self):
        phi = GridColouring(4, 3, (1, 2, 3, 1), (3, 1, 2, 2))
        self.assertEqual(verify_colouring(phi, workers=2), verify_colouring(phi))


class AfcnTest(unittest.TestCase):
    def test_single_column(self):
        result = afcn_grid(1, 3)
        self.assertEqual(result.value, 2)
        self.assertTrue(verify_colouring(result.colouring).anagram_free)
        self.assertIsNone(afcn_grid(1, 1).value)

    def test_matches_unpruned(self):
        for n in range(1, 4):
            result = afcn_grid(n, 4)
            self.assertEqual(result.value, afcn_grid_unpruned(n, 4), n)
            if result.colouring is not None:
                self.assertTrue(verify_colouring(result.colouring).anagram_free)

    def test_non_decreasing(self):
        values = [afcn_grid(n, 4).value for n in range(1, 5)]
        known = [v for v in values if v is not None]
        self.assertEqual(known, sorted(known))

    def test_invalid_arguments(self):
        with self.assertRaises(PreconditionError):
            afcn_grid(0, 3)

    def test_checkpoint_resume(self):
        params = {"n": 3, "c_max": 4}
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "afcn.ndjson")
            first = afcn_grid(3, 4, checkpoint=Checkpoint(path, "afcn", params))
            self.assertTrue(os.path.isfile(path))
            records = Checkpoint(path, "afcn", params).records
            with open(path) as f:
                self.assertEqual(len(f.read().splitlines()), len(records) + 1)
            with self.assertLogs("anagram_forge.pathcheck", level="INFO") as logs:
                resumed = afcn_grid(3, 4, checkpoint=Checkpoint(path, "afcn", params))
        messages = [line for line in logs.output if "resumed" in line]
        self.assertEqual(len(messages), len({r["c"] for r in records}))
        self.assertEqual(resumed.resumed_units, len(records))
        self.assertGreater(resumed.resumed_units, 0)
        self.assertEqual(resumed.value, first.value)
        self.assertEqual(resumed.colouring, first.colouring)
        self.assertEqual(resumed.to_dict(), first.to_dict())

    def test_workers_do_not_change_the_result(self):
        self.assertEqual(afcn_grid(3, 4, workers=2).to_dict(), afcn_grid(3, 4).to_dict())

    def test_path_afcn(self):
        self.assertEqual(afcn_path(1, 3), 1)
        self.assertEqual(afcn_path(3, 3), 2)
        self.assertEqual(afcn_path(4, 3), 3)
        self.assertIsNone(afcn_path(8, 3))
        self.assertEqual(afcn_path(8, 4), 4)

    def test_path_afcn_matches_exhaustive_search(self):
        for m in range(1, 8):
            expected = next(
                c
                for c in range(1, 4)
                if any(
                    is_anagram_free(Word(Alphabet.letters(c), letters))
                    for letters in itertools.product(range(c), repeat=m)
                )
            )
            self.assertEqual(afcn_path(m, 3), expected, m)


class PredicateTest(unittest.TestCase):
    def setUp(self):
        self.plain = BlockColouring.of(3, [1, 1, 1, 1], [1, 1, 1, 1])
        self.mixed = BlockColouring.of(3, [1, 2, 3, 1], [2, 3, 1, 3])

    def test_breaker_predicate(self):
        predicate = breaker_predicate([self.plain, self.mixed])
        self.assertFalse(predicate(Word.parse("a", Alphabet.letters(2))))
        w = Word.parse("bb", Alphabet.letters(2))
        expected = verify_colouring(concat_blocks([self.mixed, self.mixed])).anagram_free
        self.assertEqual(predicate(w), expected)

    def test_sigma_predicate(self):
        symbol = BlockSymbol(1, self.mixed)
        predicate = sigma_predicate([symbol], self.plain, 1)
        s = BlockString((symbol,), self.plain, 1, 3)
        expected = verify_colouring(realize_sigma_string(s)).anagram_free
        self.assertEqual(predicate(Word.parse("a", Alphabet.letters(1))), expected)
        self.assertFalse(expected)

    def test_colour_trace(self):
        phi = GridColouring(2, 3, (1, 2), (3, 1))
        trace = colour_trace(GridPath((GridVertex.parse("a0"), top(1), bottom(1))), phi)
        self.assertEqual(trace.tokens(), ["1", "2", "1"])
        with self.assertRaises(PreconditionError):
            colour_trace(GridPath((top(2),)), phi)
