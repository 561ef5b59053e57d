import itertools
import numpy as np
import unittest

from mock import Mock
from pramsey.ctl import error_kind
from pramsey.exceptions import InvalidInputError, NotASimplexError, PipelineVerificationError, ShrinkLimitError
from pramsey.geometry import PointConfig, SquaredDistanceMatrix, circumsphere, negative_type_slack, \
    squared_distance_matrix
from pramsey.pipeline.steps import assemble_and_verify, realize_almost_regular, step1_shrink

from . import collinear, flat_obtuse, right_isosceles, unit_equilateral


class TestStep1(unittest.TestCase):

    def test_equilateral(self):
        s1, beta, slack = step1_shrink(unit_equilateral())
        self.assertAlmostEqual(slack, 0.5)
        self.assertAlmostEqual(beta, 1.0 / 64.0)
        self.assertTrue(np.allclose(squared_distance_matrix(s1).off_diagonal(), 63.0 / 64.0, atol=1e-9))
        self.assertAlmostEqual(circumsphere(s1)[0], np.sqrt(63.0 / 64.0) / np.sqrt(3.0))
        self.assertEqual(s1.labels, (0, 1, 2))

    def test_not_a_simplex(self):
        self.assertRaises(NotASimplexError, step1_shrink, collinear())
        self.assertRaises(NotASimplexError, step1_shrink, PointConfig.from_coordinates([[0, 0], [0, 0], [1, 0]]))
        self.assertRaises(NotASimplexError, step1_shrink, collinear().select([0]))

    def test_flat_obtuse(self):
        # squared sides 1.04, 1.04 and 4, circumradius 2.6
        self.assertGreater(negative_type_slack(squared_distance_matrix(flat_obtuse())).slack, 0.02)
        with self.assertRaises(ShrinkLimitError) as context:
            step1_shrink(flat_obtuse())
        self.assertAlmostEqual(context.exception.rho, 2.6)
        self.assertGreater(context.exception.rho_shrunk, context.exception.rho)
        self.assertEqual(error_kind(context.exception), 'shrink-limit')

    def test_right_angle_still_shrinks(self):
        s1 = step1_shrink(right_isosceles())[0]
        self.assertLess(circumsphere(s1)[0], circumsphere(right_isosceles())[0])


class TestAlmostRegular(unittest.TestCase):

    def test_regular(self):
        beta = 0.5
        matrix = SquaredDistanceMatrix(np.full((3, 3), beta ** 2) - np.diag([beta ** 2] * 3))
        config = realize_almost_regular(matrix, beta, beta / 600.0)
        self.assertTrue(np.allclose(squared_distance_matrix(config).off_diagonal(), beta ** 2))

    def test_random(self):
        beta, epsilon = 1.0, 1.0 / 600.0
        rng = np.random.default_rng(3)
        distances = np.zeros((4, 4))
        for i in range(4):
            for j in range(i + 1, 4):
                distances[i, j] = distances[j, i] = rng.uniform(beta - epsilon, beta + epsilon)
        config = realize_almost_regular(SquaredDistanceMatrix(distances ** 2), beta, epsilon)
        realized = np.sqrt(squared_distance_matrix(config).as_array())
        self.assertLess(float(np.max(np.abs(realized - distances))), 1e-9)

    def test_random_sweep(self):
        rng = np.random.default_rng(13)
        for trial in range(200):
            d = int(rng.integers(1, 5))
            beta = float(rng.uniform(0.1, 2.0))
            epsilon = beta / (64.0 * d * d) * float(rng.uniform(0.1, 0.99))
            distances = np.zeros((d + 1, d + 1))
            for i, j in itertools.combinations(range(d + 1), 2):
                distances[i, j] = distances[j, i] = beta + rng.uniform(-epsilon, epsilon)
            matrix = SquaredDistanceMatrix(distances ** 2)
            config = realize_almost_regular(matrix, beta, epsilon)
            self.assertEqual(config.size, d + 1)
            self.assertLessEqual(float(np.max(np.abs(squared_distance_matrix(config).as_array() - distances ** 2))),
                                 1e-9, trial)
            self.assertGreater(negative_type_slack(matrix).slack, beta ** 2 / 4.0)

    def test_invalid(self):
        matrix = SquaredDistanceMatrix([[0, 1, 1], [1, 0, 1], [1, 1, 0]])
        self.assertRaises(InvalidInputError, realize_almost_regular, matrix, 1.0, 1.0 / 200.0)
        self.assertRaises(InvalidInputError, realize_almost_regular, matrix, 1.0, 0)
        self.assertRaises(InvalidInputError, realize_almost_regular, SquaredDistanceMatrix([[0]]), 1.0, 1e-4)
        skewed = SquaredDistanceMatrix([[0, 1, 1], [1, 0, 1.01], [1, 1.01, 0]])
        self.assertRaises(InvalidInputError, realize_almost_regular, skewed, 1.0, 1e-3)


class TestAssemble(unittest.TestCase):

    def test_assemble(self):
        zero = PointConfig.from_coordinates([[0], [0], [0]])
        assembled = assemble_and_verify(right_isosceles(), right_isosceles(), zero)
        self.assertEqual(assembled.dim, 3)
        self.assertEqual(assembled.labels, right_isosceles().labels)

    def test_mismatch(self):
        moved = PointConfig.from_array([[0.1], [0.0], [0.0]])
        with self.assertRaises(PipelineVerificationError) as context:
            assemble_and_verify(right_isosceles(), right_isosceles(), moved)
        self.assertEqual(len(context.exception.residuals), 3)
        self.assertGreater(context.exception.residuals[(0, 1)], 1e-9)

    def test_spread_radius(self):
        zero = PointConfig.from_coordinates([[0], [0], [0]])
        trace = Mock(spread_radius=10.0)
        self.assertRaises(PipelineVerificationError, assemble_and_verify, right_isosceles(), right_isosceles(),
                          zero, trace)
        trace.spread_radius = 0.5
        self.assertIsNotNone(assemble_and_verify(right_isosceles(), right_isosceles(), zero, trace))
