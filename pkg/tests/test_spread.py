import numpy as np
import unittest

from mock import Mock, patch
from pramsey.constructions import runs_to_tuple, spread_vector, tuple_runs
from pramsey.exceptions import InvalidInputError, SearchFailureError
from pramsey.geometry import PointConfig, circumsphere
from pramsey.pipeline import PipelineParams
from pramsey.pipeline.spread import alignment_residual, shift_patterns, sine_window, spread_approximate, \
    window_correlation
from pramsey.pipeline.steps import step1_shrink
from scipy.optimize import nnls

from . import random_rotation, unit_equilateral


class TestShiftPatterns(unittest.TestCase):

    def test_shift_patterns(self):
        patterns, lags = shift_patterns(3, 2)
        self.assertEqual(len(patterns), 3)
        self.assertEqual(lags.shape, (3, 3))
        self.assertEqual(len(set(map(tuple, lags))), 3)
        for shifts in patterns:
            self.assertEqual(min(shifts), 0)
            self.assertEqual(len(set(shifts)), 3)

    def test_window_correlation(self):
        corr = window_correlation(sine_window(10), 3)
        self.assertEqual(corr.size, 4)
        self.assertAlmostEqual(corr[0], 1.0)
        self.assertTrue(np.all(np.diff(corr) < 0))

    def test_alignment_residual(self):
        target = unit_equilateral().coordinates()
        rotated = target.dot(random_rotation(2, 5).T)
        self.assertLess(alignment_residual(rotated, target), 1e-9)
        self.assertAlmostEqual(alignment_residual(rotated * 2.0, target * 2.0), 0.0, places=9)


class TestSpreadApproximate(unittest.TestCase):

    def setUp(self):
        self.s1 = step1_shrink(unit_equilateral())[0]
        self.radius = circumsphere(self.s1)[0]

    def test_equilateral(self):
        spread = spread_approximate(self.s1, self.radius, PipelineParams(delta=0.05))
        self.assertLess(spread.residual, 0.05)
        self.assertEqual(spread.points.labels, self.s1.labels)
        norms = np.linalg.norm(spread.points.coordinates(), axis=1)
        self.assertTrue(np.allclose(norms, self.radius, atol=1e-9))
        self.assertLessEqual(spread.span, PipelineParams().max_span)
        for i, assignment in enumerate(spread.assignments):
            self.assertEqual(len(assignment), spread.spec.k)
            self.assertTrue(all(a < b for a, b in zip(assignment, assignment[1:])))
            self.assertTrue(np.allclose(spread_vector(spread.spec, assignment, spread.ground),
                                        spread.points.coordinates()[i]))
        self.assertEqual(spread.to_json()['k'], spread.spec.k)

    def test_misreported_residual(self):
        # an nnls that always claims an exact fit must not end the column search
        with patch('pramsey.geometry.nnls', Mock(side_effect=lambda a, b: (nnls(a, b)[0], 0.0))) as mock_nnls:
            spread = spread_approximate(self.s1, self.radius, PipelineParams(delta=0.05))
        self.assertGreater(mock_nnls.call_count, 1)
        self.assertLess(spread.residual, 0.05)

    def test_assignments_round_trip(self):
        spread = spread_approximate(self.s1, self.radius, PipelineParams(delta=0.05))
        written = spread.to_json()['assignments']
        for i, runs in enumerate(written):
            assignment = runs_to_tuple(runs)
            self.assertEqual(assignment, tuple(spread.assignments[i]))
            self.assertEqual(tuple_runs(assignment), runs)
            self.assertTrue(np.allclose(spread_vector(spread.spec, assignment, spread.ground),
                                        spread.points.coordinates()[i]))

    def test_single_point(self):
        spread = spread_approximate(self.s1.select([0]), 2.0, PipelineParams(delta=0.1))
        self.assertEqual(spread.spec.c, (2.0,))
        self.assertEqual(spread.assignments, ((1,),))

    def test_invalid(self):
        self.assertRaises(SearchFailureError, spread_approximate, self.s1, self.radius, PipelineParams())
        self.assertRaises(SearchFailureError, spread_approximate, self.s1, self.radius,
                          PipelineParams()._replace(delta=0.0))
        self.assertRaises(InvalidInputError, spread_approximate, self.s1, 0.0, PipelineParams(delta=0.1))
        self.assertRaises(InvalidInputError, spread_approximate, self.s1.select([]), 1.0, PipelineParams(delta=0.1))
        # points outside the sphere can not be moved onto it within delta / 2
        far = PointConfig.from_array(self.s1.coordinates() * 10.0)
        self.assertRaises(InvalidInputError, spread_approximate, far, self.radius, PipelineParams(delta=0.01))

    def test_budget_exhausted(self):
        params = PipelineParams(delta=1e-6, search_budget=1, max_span=2)
        with self.assertRaises(SearchFailureError) as context:
            spread_approximate(self.s1, self.radius, params)
        self.assertIsNotNone(context.exception.best_residual)
