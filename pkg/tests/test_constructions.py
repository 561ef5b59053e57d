import itertools
import json
import numpy as np
import unittest

from fractions import Fraction
from pramsey.combinatorics import shift_adjacent
from pramsey.constructions import BrickDescriptor, BrickSpec, FiniteDescriptor, ProductDescriptor, \
    SegmentDescriptor, SegmentSpec, SpreadDescriptor, SpreadSpec, brick_points, choose_gamma, descriptor_from_json, \
    materialize, predicted_sq_distance, segment_config_points, segment_separation, spread_points, \
    tower_descriptor
from pramsey.exceptions import InvalidInputError, SearchFailureError, SizeLimitError
from pramsey.geometry import diameter, squared_distance_matrix
from pramsey.utils import canonical_json

from . import unit_segment


class TestSegmentConfig(unittest.TestCase):

    def setUp(self):
        self.spec = SegmentSpec(1, 2)

    def test_segment_spec(self):
        self.assertRaises(InvalidInputError, SegmentSpec, 0, 2)
        self.assertRaises(InvalidInputError, SegmentSpec, 1, -1)
        self.assertRaises(InvalidInputError, SegmentSpec.from_length, -1, 1)
        self.assertTrue(self.spec.exact)
        self.assertEqual(self.spec.beta_sq, Fraction(1, 14))
        self.assertEqual(self.spec.gamma_values(), (Fraction(4, 7), Fraction(1, 7), Fraction(5, 7)))
        self.assertEqual(SegmentSpec.from_length(Fraction(3, 2), 1).a_sq, Fraction(9, 4))
        self.assertFalse(SegmentSpec(2.0, 1).exact)

    def test_predicted_sq_distance(self):
        self.assertEqual(predicted_sq_distance((1, 2), (1, 3), self.spec), Fraction(4, 7))
        self.assertEqual(predicted_sq_distance((1, 3), (2, 3), self.spec), Fraction(1, 7))
        self.assertEqual(predicted_sq_distance((1, 2), (2, 3), self.spec), 1)
        self.assertEqual(predicted_sq_distance((2, 3), (1, 2), self.spec), 1)
        self.assertEqual(predicted_sq_distance((1, 2), (3, 4), self.spec), Fraction(5, 7))
        self.assertEqual(predicted_sq_distance((1, 2), (1, 2), self.spec), 0)
        for pair in ((2, 1), (0, 1), (1, 1), (1.5, 2), (True, 2), (1, 2, 3)):
            self.assertRaises(InvalidInputError, predicted_sq_distance, pair, (1, 2), self.spec)

    def test_segment_config_points(self):
        pairs = list(itertools.combinations(range(1, 5), 2))
        config = segment_config_points(self.spec, pairs)
        self.assertEqual(config.size, 6)
        self.assertEqual(config.labels, tuple(pairs))
        matrix = squared_distance_matrix(config)
        self.assertEqual(set(matrix.off_diagonal()), {1, Fraction(1, 7), Fraction(4, 7), Fraction(5, 7)})
        for i, j in itertools.combinations(range(6), 2):
            self.assertEqual(matrix.entry(i, j), predicted_sq_distance(pairs[i], pairs[j], self.spec))
        self.assertEqual(segment_config_points(self.spec, []).size, 0)

    def test_gamma_one(self):
        config = segment_config_points(SegmentSpec(1, 1), [(1, 2), (1, 3), (2, 3)])
        self.assertEqual(squared_distance_matrix(config).off_diagonal(), [Fraction(1, 3), 1, Fraction(1, 3)])

    def test_float_segment(self):
        config = segment_config_points(SegmentSpec(2.0, 0.5), [(1, 2), (2, 3)])
        self.assertAlmostEqual(squared_distance_matrix(config).entry(0, 1), 2.0)

    def test_distance_set_law(self):
        grid = [Fraction(1), Fraction(2), Fraction(1, 2), Fraction(3, 4), Fraction(5)]
        gammas = [Fraction(1), Fraction(2), Fraction(1, 2), Fraction(3), Fraction(2, 3)]
        pairs = list(itertools.combinations(range(1, 8), 2))
        for a_sq, gamma in itertools.product(grid, gammas):
            spec = SegmentSpec(a_sq, gamma)
            matrix = squared_distance_matrix(segment_config_points(spec, pairs))
            self.assertEqual(matrix.mode, 'rational')
            allowed = set(spec.gamma_values()) | {a_sq}
            for i, j in itertools.combinations(range(len(pairs)), 2):
                value = matrix.entry(i, j)
                self.assertIsInstance(value, Fraction)
                self.assertIn(value, allowed)
                self.assertEqual(value == a_sq, shift_adjacent(pairs[i], pairs[j]), (a_sq, gamma, pairs[i], pairs[j]))


class TestSpreadAndBrick(unittest.TestCase):

    def test_spread_points(self):
        spec = SpreadSpec([1, 2])
        self.assertEqual(spec.k, 2)
        self.assertEqual(spec.norm_sq, 5)
        config = spread_points(spec, [1, 2, 3])
        self.assertEqual(config.labels, ((1, 2), (1, 3), (2, 3)))
        self.assertTrue(np.allclose(np.linalg.norm(config.coordinates(), axis=1), np.sqrt(5.0)))
        self.assertRaises(InvalidInputError, spread_points, spec, [1])
        self.assertRaises(InvalidInputError, spread_points, spec, [0, 1, 2])
        self.assertRaises(InvalidInputError, SpreadSpec, [])
        self.assertAlmostEqual(SpreadSpec([0.5, 0.5]).norm, np.sqrt(0.5))

    def test_brick_points(self):
        spec = BrickSpec.from_sides([3, 4])
        self.assertEqual(spec.sides_sq, (9, 16))
        self.assertEqual(spec.sides, (3, 4))
        config = brick_points(spec)
        self.assertEqual(config.size, 4)
        self.assertEqual(config.labels, ((0, 0), (0, 1), (1, 0), (1, 1)))
        self.assertAlmostEqual(diameter(config), 5.0)
        self.assertRaises(InvalidInputError, BrickSpec, [1, 0])
        self.assertRaises(SizeLimitError, brick_points, BrickSpec([1] * 21))


class TestChooseGamma(unittest.TestCase):

    def test_choose_gamma(self):
        self.assertEqual(choose_gamma(1, [Fraction(2, 3)], [1], Fraction(1, 10)), 2)
        self.assertEqual(choose_gamma(1, [], [1], Fraction(1, 3)), 1)
        with self.assertRaises(SearchFailureError) as context:
            choose_gamma(1, [], [1], 0.4, budget=200)
        self.assertIsNotNone(context.exception.best_residual)
        self.assertRaises(InvalidInputError, choose_gamma, 0, [], [1], 0.1)
        self.assertRaises(InvalidInputError, choose_gamma, 1, [], [1], 0)

    def test_segment_separation(self):
        self.assertEqual(segment_separation(SegmentSpec(1, 2), [Fraction(2, 3)], [1]), Fraction(1, 7))
        self.assertEqual(segment_separation(SegmentSpec(1, 1), [Fraction(2, 3)], [1]), 0)
        self.assertAlmostEqual(segment_separation(SegmentSpec(1, 2), [0.5], [1]), 1.0 / 14.0)


class TestDescriptors(unittest.TestCase):

    def test_materialize(self):
        segment = SegmentDescriptor(SegmentSpec(1, 2))
        self.assertEqual(materialize(segment, 4).size, 6)
        self.assertRaises(InvalidInputError, segment.materialize, 0)
        self.assertEqual(SpreadDescriptor(SpreadSpec([1, 2, 3])).materialize(2).size, 0)
        self.assertEqual(SpreadDescriptor(SpreadSpec([1, 2])).materialize(4).size, 6)
        self.assertEqual(BrickDescriptor(BrickSpec([1, 1, 1])).materialize(1).size, 8)
        self.assertEqual(FiniteDescriptor(unit_segment()).materialize(100).size, 2)
        product = ProductDescriptor(segment, BrickDescriptor(BrickSpec([1])))
        self.assertEqual(product.materialize(3).size, 6)

    def test_tower_descriptor(self):
        tower = tower_descriptor([SegmentSpec(1, 2), SegmentSpec(2, 1)], FiniteDescriptor(unit_segment()))
        self.assertEqual(tower.to_json()['type'], 'product')
        self.assertEqual(tower.left.spec.a_sq, 2)
        self.assertEqual(tower.materialize(3).size, 3 * 3 * 2)
        self.assertIs(tower_descriptor([], tower), tower)

    def test_descriptor_from_json(self):
        desc = ProductDescriptor(SegmentDescriptor(SegmentSpec(1, Fraction(3, 2))),
                                 FiniteDescriptor(unit_segment()))
        restored = descriptor_from_json(json.loads(canonical_json(desc)))
        self.assertEqual(restored.left.spec.gamma, Fraction(3, 2))
        self.assertEqual(restored.materialize(4).size, 12)
        self.assertRaises(InvalidInputError, descriptor_from_json, {'type': 'torus'})
        self.assertRaises(InvalidInputError, descriptor_from_json, {'type': 'segment', 'a_sq': 1})
        self.assertRaises(InvalidInputError, descriptor_from_json, [])
