# Copyright 2021 Canonical Ltd.
# See LICENSE file for licensing details.
import random
import unittest

from anagram_forge import FileFormatError, PreconditionError
from anagram_forge.gridmodel import (
    are_adjacent,
    BlockColouring,
    BlockString,
    BlockSymbol,
    bottom,
    boring_range,
    colourful_range,
    concat_blocks,
    extract_block,
    flat_adjacency,
    grid_graph,
    GridColouring,
    GridVertex,
    layout_offsets,
    neighbours,
    realize_sigma_string,
    Row,
    split_blocks,
    top,
)


def random_colouring(rng: random.Random, n: int, c: int) -> GridColouring:
    return GridColouring(
        n, c, [rng.randint(1, c) for _ in range(n)], [rng.randint(1, c) for _ in range(n)]
    )


def block(c: int, top_row, bottom_row) -> BlockColouring:
    return BlockColouring.of(c, top_row, bottom_row)


class VertexTest(unittest.TestCase):
    def test_labels(self):
        v = GridVertex.parse("b12")
        self.assertEqual((v.row, v.column), (Row.BOTTOM, 12))
        self.assertEqual(v.label, "b12")
        with self.assertRaises(FileFormatError):
            GridVertex.parse("c1")

    def test_flat_index(self):
        for i in range(10):
            self.assertEqual(GridVertex.from_flat(i).flat, i)
        self.assertEqual(top(3).flat, 6)
        self.assertEqual(bottom(3).flat, 7)

    def test_key_orders_columns_first(self):
        self.assertLess(bottom(0).key, top(1).key)
        self.assertLess(top(1).key, bottom(1).key)


class GridTest(unittest.TestCase):
    def test_neighbours(self):
        self.assertEqual(neighbours(top(0), 3), {bottom(0), top(1)})
        self.assertEqual(neighbours(bottom(1), 3), {top(1), bottom(0), bottom(2)})
        with self.assertRaises(PreconditionError):
            neighbours(top(3), 3)

    def test_adjacency(self):
        self.assertTrue(are_adjacent(top(2), bottom(2)))
        self.assertTrue(are_adjacent(bottom(2), bottom(3)))
        self.assertFalse(are_adjacent(top(2), bottom(3)))
        self.assertFalse(are_adjacent(top(2), top(2)))

    def test_matches_networkx(self):
        for n in range(1, 7):
            graph = grid_graph(n)
            self.assertEqual(graph.number_of_nodes(), 2 * n)
            self.assertEqual(graph.number_of_edges(), 3 * n - 2)
            for i, adjacent in enumerate(flat_adjacency(n)):
                expected = {u.flat for u in neighbours(GridVertex.from_flat(i), n)}
                self.assertEqual(set(adjacent), expected)
                self.assertEqual(list(adjacent), sorted(adjacent))


class ColouringTest(unittest.TestCase):
    def test_rejects_bad_colours(self):
        with self.assertRaises(PreconditionError):
            GridColouring(2, 2, (1, 3), (1, 1))
        with self.assertRaises(PreconditionError):
            GridColouring(2, 2, (1,), (1, 1))

    def test_from_dict(self):
        phi = GridColouring.from_dict({"n": 2, "c": 2, "top": [1, 2], "bottom": [2, 1]})
        self.assertEqual(phi.colour(bottom(0)), 2)
        self.assertEqual(GridColouring.from_dict(phi.to_dict()), phi)
        with self.assertRaises(FileFormatError):
            GridColouring.from_dict({"n": 2, "top": [1, 2]})

    def test_flat(self):
        phi = GridColouring.from_flat((1, 2, 3, 1), 3)
        self.assertEqual(phi.top, (1, 3))
        self.assertEqual(phi.bottom, (2, 1))
        self.assertEqual(phi.flat(), (1, 2, 3, 1))

    def test_mirror_and_permute(self):
        phi = GridColouring(3, 3, (1, 2, 3), (3, 3, 1))
        self.assertEqual(phi.mirror().top, (3, 2, 1))
        self.assertEqual(phi.mirror().mirror(), phi)
        self.assertEqual(phi.permute_colours([2, 3, 1]).bottom, (1, 1, 2))


class BlockTest(unittest.TestCase):
    def test_extract(self):
        phi = GridColouring(4, 2, (1, 2, 1, 2), (2, 2, 1, 1))
        b = extract_block(phi, 1, 3)
        self.assertEqual(b.t, 2)
        self.assertEqual((b.colouring.top, b.colouring.bottom), ((2, 1), (2, 1)))
        with self.assertRaises(PreconditionError):
            extract_block(phi, 3, 5)

    def test_concat_split_identities(self):
        rng = random.Random(3)
        for _ in range(1000):
            c = rng.randint(1, 4)
            b = rng.randint(0, 6)
            blocks = []
            for _ in range(b):
                colours = [rng.randint(1, c) for _ in range(8)]
                blocks.append(block(c, colours[:4], colours[4:]))
            phi = concat_blocks(blocks, c)
            self.assertEqual(phi.n, 4 * b)
            self.assertEqual(split_blocks(phi, 4), blocks)
            self.assertEqual(concat_blocks(split_blocks(phi, 4), c), phi)

    def test_concat_rejects_mixed_colours(self):
        with self.assertRaises(PreconditionError):
            concat_blocks([block(2, [1], [1]), block(3, [1], [1])])

    def test_split_needs_divisor(self):
        with self.assertRaises(PreconditionError):
            split_blocks(GridColouring(6, 1, [1] * 6, [1] * 6), 4)


class BlockStringTest(unittest.TestCase):
    def setUp(self):
        self.phi_star = block(3, [1, 1, 1, 1], [2, 2, 2, 2])
        self.short = BlockSymbol(1, block(3, [3, 3, 3, 3], [1, 2, 3, 1]))
        self.wide = BlockSymbol(2, block(3, [2] * 8, [3] * 8))
        self.s = BlockString((self.short, self.wide, self.short), self.phi_star, 2, 3)

    def test_symbol_width(self):
        with self.assertRaises(PreconditionError):
            BlockSymbol(2, block(3, [1] * 4, [1] * 4))

    def test_ell_bounds_symbol_width(self):
        with self.assertRaises(PreconditionError):
            BlockString((self.wide,), self.phi_star, 1, 3)

    def test_layout(self):
        offsets = layout_offsets(self.s)
        self.assertEqual(offsets, [0, 8, 20, 28])
        self.assertEqual(colourful_range(offsets, 2), (12, 20))
        self.assertEqual(boring_range(offsets, 3), (28, 32))

    def test_realization(self):
        phi = realize_sigma_string(self.s)
        self.assertEqual(phi.n, layout_offsets(self.s)[-1] + 4)
        offsets = layout_offsets(self.s)
        for i in range(len(self.s) + 1):
            self.assertEqual(extract_block(phi, *boring_range(offsets, i)), self.phi_star)
        for i, symbol in enumerate(self.s.symbols, start=1):
            self.assertEqual(extract_block(phi, *colourful_range(offsets, i)), symbol.phi)

    def test_realization_checks_colour_counts(self):
        s = BlockString((self.short,), self.phi_star, 2, 4)
        with self.assertRaises(PreconditionError):
            realize_sigma_string(s)

    def test_as_word(self):
        w = self.s.as_word()
        self.assertEqual(w.letters, (0, 1, 0))
        self.assertEqual(self.s.alphabet(), [self.short, self.wide])

    def test_dict_round_trip(self):
        self.assertEqual(BlockString.from_dict(self.s.to_dict()), self.s)
        with self.assertRaises(FileFormatError):
            BlockString.from_dict({"symbols": []})
